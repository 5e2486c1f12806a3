"""Integration through primitives: FTC, Alexiewicz norm, parts, Hake, mean values, Taylor.

The Laplace integral of ``LD1 F`` over ``[a, x]`` is realised as
``F(x) - F(a)``; no search over major and minor functions is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, NoRootBracketed
from .laplace_deriv import LimitEstimate, SGrid, classify, ld1
from .quadrature import RealFunction, cumulative_integral, integrate

NORM_GRID = 4097
SCAN_POINTS = 1025
HAKE_COUNT = 40
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _as_real_function(f, lo=-np.inf, hi=np.inf) -> RealFunction:
    if isinstance(f, RealFunction):
        return f
    return RealFunction(f, lo, hi)


@dataclass(frozen=True)
class Primitive:
    """A continuous ``F`` with base point ``base``; ``density`` is ``F'`` if known."""

    F: RealFunction
    base: float
    end: Optional[float] = None
    density: Optional[RealFunction] = None

    def __post_init__(self):
        object.__setattr__(self, "F", _as_real_function(self.F))
        if self.density is not None:
            object.__setattr__(self, "density", _as_real_function(self.density))
        end = self.F.hi if self.end is None else float(self.end)
        if not math.isfinite(end):
            raise DomainError("a primitive needs a finite right end")
        if not self.F.contains(self.base, end):
            raise DomainError(f"[{self.base}, {end}] not inside {self.F.domain}")
        object.__setattr__(self, "end", end)

    def __call__(self, x):
        return self.F(x)

    def increment(self, x):
        """``F(x) - F(base)``."""
        return self.F(x) - self.F(self.base)


class _QuadPrimitiveFunction:
    """``x -> integral_a^x h`` from a cumulative grid plus one local integral."""

    def __init__(self, h: RealFunction, a: float, b: float, tol: float, n: int):
        self.h = h
        self.grid = np.linspace(a, b, n)
        _, self.cum, self.err = cumulative_integral(h, self.grid, tol)
        self.tol = tol

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty(flat.shape)
        idx = np.clip(np.searchsorted(self.grid, flat, side="right") - 1, 0, self.grid.size - 1)
        for k, (xi, i) in enumerate(zip(flat, idx)):
            if xi == self.grid[i]:
                out[k] = self.cum[i]
            else:
                out[k] = self.cum[i] + integrate(self.h, self.grid[i], xi, self.tol).value
        return out.reshape(x.shape)


def primitive_of(h, a: float, b: float, tol: float = 1e-12, grid: int = NORM_GRID) -> Primitive:
    """Primitive ``x -> integral_a^x h`` built by quadrature, with ``h`` as density."""
    h = _as_real_function(h, a, b)
    qf = _QuadPrimitiveFunction(h, a, b, tol, grid)
    F = RealFunction(qf, a, b, name=f"int {h.name}")
    F.grid_values = (qf.grid, qf.cum)
    return Primitive(F, a, b, density=h)


def ftc_integral(F: Primitive, x: float) -> float:
    """``F(x) - F(base)``, the Laplace integral of ``LD1 F`` over ``[base, x]``."""
    if not F.F.contains(x):
        raise DomainError(f"x={x} outside {F.F.domain}")
    return float(F.F(x) - F.F(F.base))


@dataclass(frozen=True)
class AlexiewiczNorm:
    value: float
    argmax_x: float


def _golden_max(fn: Callable[[float], float], lo: float, hi: float, tol: float):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fn(c), fn(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def alexiewicz_norm(F: Primitive, tol: float = 1e-10, end: Optional[float] = None) -> AlexiewiczNorm:
    """``sup |F(x) - F(base)|`` over ``[base, end]``.

    A uniform grid of 4097 points locates the maximum, then golden-section
    search refines it until the bracket is narrower than ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    end = F.end if end is None else end
    lo, hi = min(F.base, end), max(F.base, end)
    if lo == hi:
        return AlexiewiczNorm(0.0, F.base)
    f0 = float(F.F(F.base))
    stored = getattr(F.F, "grid_values", None)
    if stored is not None and stored[0][0] == lo and stored[0][-1] == hi:
        grid, vals = stored[0], np.abs(stored[1] - f0)
    else:
        grid = np.linspace(lo, hi, NORM_GRID)
        vals = np.abs(np.asarray(F.F(grid), dtype=float) - f0)
    i = int(np.argmax(vals))
    best_x, best = float(grid[i]), float(vals[i])
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    x, v = _golden_max(lambda t: abs(float(F.F(t)) - f0), a, b, tol)
    if v > best:
        best_x, best = x, v
    return AlexiewiczNorm(best, best_x)


def integrate_by_parts(F: Primitive, g, tol: float = 1e-10, b: Optional[float] = None) -> float:
    """``integral_a^b f G = F(b) G(b) - integral_a^b F g``.

    Here ``F`` and ``G`` are the primitives vanishing at ``a = F.base``, so
    only the continuous ``F`` and the bounded-variation ``g`` are evaluated.
    """
    a = F.base
    b = F.end if b is None else b
    g = _as_real_function(g, a, b)
    Fa = float(F.F(a))
    Gb = integrate(g, a, b, tol).value
    Fg = RealFunction(lambda t: (F.F(t) - Fa) * g(t), a, b)
    return (float(F.F(b)) - Fa) * Gb - integrate(Fg, a, b, tol).value


def hake_limit(F: Primitive, b: float, tol: float = 1e-8, count: int = HAKE_COUNT) -> LimitEstimate:
    """Limit of ``F(c) - F(a)`` as ``c -> b-`` along ``c = b - (b - a) 2**-k``."""
    a = F.base
    ks = np.arange(1, count + 1)
    cs = b - (b - a) * 2.0 ** -ks
    Fa = float(F.F(a))
    vals = np.array([float(F.F(c)) - Fa for c in cs])
    return classify(cs, vals, tol)


def _leftmost_root(h: Callable[[float], float], a: float, b: float, tol: float,
                   what: str) -> float:
    xs = np.linspace(a, b, SCAN_POINTS)
    hs = np.array([h(x) for x in xs])
    zero = np.nonzero(hs == 0.0)[0]
    change = np.nonzero(np.sign(hs[:-1]) * np.sign(hs[1:]) < 0)[0]
    first_zero = zero[0] if zero.size else None
    first_change = change[0] if change.size else None
    if first_zero is not None and (first_change is None or first_zero <= first_change):
        return float(xs[first_zero])
    if first_change is None:
        raise NoRootBracketed(
            f"{what}: no sign change on [{a}, {b}]",
            {"min": float(hs.min()), "max": float(hs.max()), "points": SCAN_POINTS})
    lo, hi = xs[first_change], xs[first_change + 1]
    hlo = hs[first_change]
    # bisect all the way to floating resolution; tol only sets the floor
    while hi - lo > max(tol * 1e-3, 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)):
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        if hm == 0.0:
            return float(mid)
        if np.sign(hm) == np.sign(hlo):
            lo, hlo = mid, hm
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def mean_value_xi_first(f, g, a: float, b: float, tol: float = 1e-10) -> float:
    """``xi`` with ``integral fg = f(xi) integral g`` for continuous ``f`` and ``g >= 0``.

    Returns ``a`` when ``integral g <= tol`` or ``f(a)`` already matches; ties
    go to the leftmost bracketed root.
    """
    f = _as_real_function(f, a, b)
    g = _as_real_function(g, a, b)
    Ig = integrate(g, a, b, tol).value
    if Ig <= tol:
        return float(a)
    fg = RealFunction(lambda t: f(t) * g(t), a, b)
    target = integrate(fg, a, b, tol).value / Ig
    if abs(float(f(a)) - target) * Ig <= tol:
        return float(a)
    return _leftmost_root(lambda t: float(f(t)) - target, a, b, tol, "first mean value")


def _integral_fG(F: Primitive, G: Primitive, a: float, b: float, tol: float) -> float:
    """``integral_a^b f G`` for a general primitive ``G`` (any constant offset)."""
    if G.density is not None:
        Fa = float(F.F(a))
        Gt = Primitive(F.F, a, b)
        part = integrate_by_parts(Gt, G.density, tol, b)
        return part + float(G.F(a)) * (float(F.F(b)) - Fa)
    if F.density is not None:
        fG = RealFunction(lambda t: F.density(t) * G.F(t), a, b)
        return integrate(fG, a, b, tol).value
    raise ValueError("second mean value theorem needs the density of G or of F")


def mean_value_xi_second(F: Primitive, G: Primitive, a: float, b: float,
                         tol: float = 1e-10) -> float:
    """``xi`` with ``integral fG = G(a) integral_a^xi f + G(b) integral_xi^b f``.

    ``g = G'`` must not change sign (the caller asserts this).
    """
    IfG = _integral_fG(F, G, a, b, tol)
    Ga, Gb = float(G.F(a)), float(G.F(b))
    Fa, Fb = float(F.F(a)), float(F.F(b))

    def h(xi):
        Fx = float(F.F(xi))
        return Ga * (Fx - Fa) + Gb * (Fb - Fx) - IfG

    if abs(h(a)) <= tol:
        return float(a)
    return _leftmost_root(h, a, b, tol, "second mean value")


@dataclass(frozen=True)
class TaylorResult:
    polynomial_value: float
    remainder: float
    bound: float
    norm: float


def _check_derivative_chain(derivs: Sequence[RealFunction], a: float, x: float):
    lo, hi = min(a, x), max(a, x)
    if hi == lo:
        return
    pts = np.linspace(lo, hi, 7)[1:-1]
    h = 1e-4 * max(hi - lo, 1e-3)
    for k in range(len(derivs) - 1):
        fk, fk1 = derivs[k], derivs[k + 1]
        ok = [fk.contains(p - h, p + h) for p in pts]
        if not all(ok):
            continue
        fd = (fk(pts + h) - fk(pts - h)) / (2 * h)
        ref = fk1(pts)
        scale = 1.0 + np.abs(ref)
        if np.any(np.abs(fd - ref) > 1e-5 * scale):
            raise ConsistencyError(f"derivative {k + 1} disagrees with finite differences")


def taylor(f_derivs: Sequence, ld_next, a: float, x: float, tol: float = 1e-10) -> TaylorResult:
    """Taylor polynomial of degree ``n = len(f_derivs) - 1`` with integral remainder.

    The remainder is ``1/n! integral_a^x LD_{n+1}f(t) (x - t)**n dt`` and the
    bound is ``|x - a|**n / n!`` times the Alexiewicz norm of ``ld_next`` on
    the interval between ``a`` and ``x``. The hypothesis
    ``f^(n)(x) - f^(n)(a) = integral_a^x LD_{n+1}f`` is checked, not assumed.
    """
    derivs = [_as_real_function(d) for d in f_derivs]
    if not derivs:
        raise ValueError("need at least f itself")
    n = len(derivs) - 1
    ld_next = _as_real_function(ld_next)
    _check_derivative_chain(derivs, a, x)
    lo, hi = min(a, x), max(a, x)
    qtol = tol * 1e-2
    sign = 1.0 if x >= a else -1.0
    inc = sign * integrate(ld_next, lo, hi, qtol).value
    if abs(float(derivs[n](x)) - float(derivs[n](a)) - inc) > tol:
        raise ConsistencyError(
            f"f^({n})(x) - f^({n})(a) = {float(derivs[n](x)) - float(derivs[n](a))!r} "
            f"but the integral of LD_(n+1) f is {inc!r}")
    poly = math.fsum(float(derivs[k](a)) * (x - a) ** k / math.factorial(k)
                     for k in range(n + 1))
    kernel = RealFunction(lambda t: ld_next(t) * (x - t) ** n, lo, hi)
    rem = sign * integrate(kernel, lo, hi, qtol).value / math.factorial(n)
    if lo == hi:
        norm = 0.0
    else:
        prim = primitive_of(ld_next, a, x, qtol) if x > a else primitive_of(
            RealFunction(lambda t: -ld_next(-t), -a, -x), -a, -x, qtol)
        norm = alexiewicz_norm(prim, tol * 1e-2).value
    bound = abs(x - a) ** n / math.factorial(n) * norm
    fx = float(derivs[0](x))
    if abs(fx - poly - rem) > tol:
        raise ConsistencyError(f"f(x)={fx!r} but polynomial + remainder = {poly + rem!r}")
    if abs(rem) > bound + tol:
        raise ConsistencyError(f"|remainder|={abs(rem)!r} exceeds bound {bound!r}")
    return TaylorResult(poly, rem, bound, norm)


def ld1_integral(F, a: float, x: float, tol: float = 1e-4, delta: float = 0.25,
                 grid: SGrid = SGrid()) -> float:
    """Integrate pointwise LD1 estimates of ``F`` from ``a`` to ``x``.

    This is the round trip behind the fundamental theorem: for continuous
    ``F`` with a Laplace derivative everywhere, the result approaches
    ``F(x) - F(a)``.
    """
    F = _as_real_function(F)
    lo, hi = min(a, x), max(a, x)

    def point(t):
        lim = ld1(F, float(t), delta, grid, tol)
        sides = [e.value for e in lim.sides()]
        return float(np.mean(sides))

    d = RealFunction(point, lo, hi, vectorized=False)
    sign = 1.0 if x >= a else -1.0
    return sign * integrate(d, lo, hi, tol).value
