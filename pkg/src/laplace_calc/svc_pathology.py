"""The SVC(4) fat Cantor set and a continuous function that oscillates on its gaps.

Stage ``n`` of the construction removes an open interval of length ``4**-n``
from the middle of every component of stage ``n - 1``. All endpoints up to
depth ``N`` are integer multiples of ``2**-(2N + 1)``, so the model stores
integer numerators over that common denominator and every identity can be
checked exactly.

The function vanishes on the set and on each removed interval ``(a, b)``
with midpoint ``c`` equals

    (x - a)**(1/4) sin((x - a)**(-7/4))   on (a, c],
    (b - x)**(1/4) sin((b - x)**(-7/4))   on [c, b).

It is continuous everywhere, differentiable nowhere on the set, and still
has Laplace derivative zero there.
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath
import numpy as np

from .errors import ConsistencyError, DepthTooLarge, DomainError, NoWitnessAtDepth
from .oscillatory import canonical
from .quadrature import QuadratureResult, RealFunction

# Endpoints are stored as int64 numerators and compared as floats; both are
# exact while 2 * depth + 1 <= 53. Memory (2**depth components) is the
# practical limit well before that.
MAX_DEPTH = 26
_LD = np.longdouble
# phase above which pointwise evaluation switches to mpmath; chosen so the
# rounding error of the phase in extended precision stays near 1e-10
FAST_PHASE = 2.0 ** 32 if np.finfo(_LD).eps < 1e-18 else 2.0 ** 20
_WITNESS_PREC = 256

Number = Union[float, int, Fraction, "mpmath.mpf"]


@dataclass(frozen=True)
class Gap:
    """A removed open interval, with exact endpoints."""

    index: int
    level: int
    a: Fraction
    b: Fraction

    @property
    def c(self) -> Fraction:
        return (self.a + self.b) / 2

    @property
    def d_left(self) -> Fraction:
        """Midpoint of ``a`` and ``c``."""
        return (self.a + self.c) / 2

    @property
    def d_right(self) -> Fraction:
        """Midpoint of ``c`` and ``b``."""
        return (self.b + self.c) / 2

    @property
    def length(self) -> Fraction:
        return self.b - self.a


@dataclass(frozen=True)
class InGap:
    gap: Gap


@dataclass(frozen=True)
class InComponent:
    """``x`` lies inside a depth-``N`` component; membership in S is undecided."""

    index: int
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class Boundary:
    """``x`` is a gap endpoint or an endpoint of [0, 1], hence in S."""

    x: Fraction


def _components(depth: int, upto: int):
    """Integer component endpoints of S_upto in units of 2**-(2*depth+1)."""
    lefts = np.array([0], dtype=np.int64)
    rights = np.array([1 << (2 * depth + 1)], dtype=np.int64)
    gaps = []
    for n in range(1, upto + 1):
        mid = (lefts + rights) // 2
        half = np.int64(1) << np.int64(2 * (depth - n))
        gaps.append((mid - half, mid + half, n))
        new_l = np.empty(2 * lefts.size, dtype=np.int64)
        new_r = np.empty_like(new_l)
        new_l[0::2], new_l[1::2] = lefts, mid + half
        new_r[0::2], new_r[1::2] = mid - half, rights
        lefts, rights = new_l, new_r
    return lefts, rights, gaps


class SvcModel:
    """SVC(4) built to ``depth`` levels with exact dyadic endpoints."""

    def __init__(self, depth: int):
        if not isinstance(depth, (int, np.integer)) or depth < 1:
            raise ValueError(f"depth must be a positive integer, got {depth!r}")
        if depth > MAX_DEPTH:
            raise DepthTooLarge(f"depth {depth} exceeds the cap of {MAX_DEPTH}")
        self.depth = int(depth)
        self.denominator = 1 << (2 * self.depth + 1)
        lefts, rights, gaps = _components(self.depth, self.depth)
        self.comp_a, self.comp_b = lefts, rights
        ga = np.concatenate([g[0] for g in gaps])
        gb = np.concatenate([g[1] for g in gaps])
        gl = np.concatenate([np.full(g[0].size, g[2], dtype=np.int16) for g in gaps])
        order = np.argsort(ga, kind="stable")
        self.gap_a, self.gap_b, self.gap_level = ga[order], gb[order], gl[order]
        # float copies are exact (numerators < 2**53, power-of-two denominator)
        scale = 1.0 / self.denominator
        self.gap_af = self.gap_a.astype(float) * scale
        self.gap_bf = self.gap_b.astype(float) * scale
        for arr in (self.comp_a, self.comp_b, self.gap_a, self.gap_b, self.gap_level,
                    self.gap_af, self.gap_bf):
            arr.setflags(write=False)

    def __repr__(self):
        return f"SvcModel(depth={self.depth}, gaps={self.gap_a.size})"

    @property
    def gap_count(self) -> int:
        return int(self.gap_a.size)

    def frac(self, numerator) -> Fraction:
        return Fraction(int(numerator), self.denominator)

    def components(self, n: int):
        """Exact component intervals of S_n as a list of Fraction pairs."""
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        lefts, rights, _ = _components(self.depth, n)
        return [(self.frac(a), self.frac(b)) for a, b in zip(lefts, rights)]

    def component_numerators(self, n: int):
        lefts, rights, _ = _components(self.depth, n)
        return lefts, rights

    @property
    def levels(self):
        """Mapping ``n -> list of component intervals of S_n`` (built on access)."""
        return {n: self.components(n) for n in range(self.depth + 1)}

    def gap(self, index: int) -> Gap:
        return Gap(int(index), int(self.gap_level[index]),
                   self.frac(self.gap_a[index]), self.frac(self.gap_b[index]))

    def gaps_at_level(self, n: int):
        idx = np.nonzero(self.gap_level == n)[0]
        return [self.gap(i) for i in idx]

    def measure(self, n: Optional[int] = None) -> Fraction:
        """Exact Lebesgue measure of S_n (default: the deepest level)."""
        n = self.depth if n is None else n
        lefts, rights, _ = _components(self.depth, n)
        return Fraction(int(np.sum(rights - lefts)), self.denominator)

    def to_csv(self, fh=None, max_level: Optional[int] = None) -> Optional[str]:
        """Write the gap catalog as CSV with columns level, a, b ("p/q" strings)."""
        out = fh if fh is not None else io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["level", "a", "b"])
        top = self.depth if max_level is None else max_level
        for i in np.nonzero(self.gap_level <= top)[0]:
            writer.writerow([int(self.gap_level[i]), _pq(self.frac(self.gap_a[i])),
                             _pq(self.frac(self.gap_b[i]))])
        return out.getvalue() if fh is None else None


def _pq(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def build_svc(depth: int) -> SvcModel:
    return SvcModel(depth)


def _to_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    return Fraction(x)


def _gap_index(model: SvcModel, X: Fraction) -> int:
    """Index of the last gap whose left end is <= X (exact), or -1."""
    units = X * model.denominator
    fl = math.floor(units)
    i = int(np.searchsorted(model.gap_a, fl, side="right")) - 1
    return i


def locate(model: SvcModel, x: Number):
    """Classify ``x`` in [0, 1] against the depth-``N`` model."""
    X = _to_fraction(x)
    if not 0 <= X <= 1:
        raise DomainError(f"x={x} outside [0, 1]")
    if X in (0, 1):
        return Boundary(X)
    i = _gap_index(model, X)
    if i >= 0:
        a, b = model.frac(model.gap_a[i]), model.frac(model.gap_b[i])
        if X == a or X == b:
            return Boundary(X)
        if a < X < b:
            return InGap(model.gap(i))
    units = X * model.denominator
    j = int(np.searchsorted(model.comp_a, math.floor(units), side="right")) - 1
    a, b = model.frac(model.comp_a[j]), model.frac(model.comp_b[j])
    if X == a or X == b:
        return Boundary(X)
    return InComponent(j, a, b)


def _mp_phi(tau: Fraction, prec: Optional[int] = None):
    """``tau**(1/4) sin(tau**(-7/4))`` for exact ``tau > 0`` in mpmath."""
    est = -1.75 * math.log2(tau) if tau > 0 else 0.0
    bits = prec or max(64, int(est) + 64)
    with mpmath.workprec(bits):
        t = mpmath.mpf(tau.numerator) / tau.denominator
        return t ** mpmath.mpf(0.25) * mpmath.sin(t ** mpmath.mpf(-1.75))


class PathologicalFunction(RealFunction):
    """The oscillatory function on the gaps of an :class:`SvcModel`, zero elsewhere.

    Points not inside a cataloged gap evaluate to 0. The value that depth
    truncation may drop is at most ``truncation_bound``.
    """

    def __init__(self, model: SvcModel):
        super().__init__(self._eval_array, 0.0, 1.0, name=f"svc_f(depth={model.depth})")
        self.model = model
        self.truncation_bound = (0.25 ** model.depth / 2.0) ** 0.25
        self._cache = {}
        self._lock = threading.Lock()
        self.noise_scale = 0.0

    def midpoints(self, gap_index: int):
        """Exact ``(c, d_left, d_right)`` of a gap."""
        g = self.model.gap(gap_index)
        return g.c, g.d_left, g.d_right

    # pointwise evaluation

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        m = self.model
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros(flat.shape)
        idx = np.searchsorted(m.gap_af, flat, side="right") - 1
        valid = idx >= 0
        idx = np.where(valid, idx, 0)
        A, B = m.gap_af[idx], m.gap_bf[idx]
        inside = valid & (flat > A) & (flat < B)
        if not inside.any():
            return out.reshape(x.shape)
        xa, Aa, Ba = flat[inside], A[inside], B[inside]
        # exact by Sterbenz: every gap satisfies b <= 2a
        tau = np.where(xa <= 0.5 * (Aa + Ba), xa - Aa, Ba - xa)
        tl = tau.astype(_LD)
        phase = tl ** _LD(-1.75)
        vals = (tl ** _LD(0.25) * np.sin(phase)).astype(float)
        slow = np.nonzero(phase > FAST_PHASE)[0]
        for k in slow:
            vals[k] = float(_mp_phi(Fraction(float(tau[k]))))
        out[inside] = vals
        return out.reshape(x.shape)

    def eval_exact(self, x: Number, prec: Optional[int] = None):
        """Value at an exact point (Fraction, mpf, float or int) as an mpf."""
        X = _to_fraction(x)
        loc = locate(self.model, X)
        if not isinstance(loc, InGap):
            return mpmath.mpf(0)
        g = loc.gap
        tau = X - g.a if X <= g.c else g.b - X
        return _mp_phi(tau, prec)

    # exponentially weighted integrals

    def _half_integral(self, lam: float, n: int, tol: float):
        """Canonical integral over a whole half gap of level ``n``, cached."""
        L = 0.25 ** n / 2.0
        ref = 0.0 if lam < 0 else L
        key = (lam, n)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None and hit[1] <= tol:
            return hit
        val, err, nev = canonical(lam, ref, 0.0, L, tol * 0.1)
        with self._lock:
            self._cache[key] = (val, err, nev)
        return val, err, nev

    def weighted_integral(self, x: float, side: str, s: float, delta: float,
                          power: int = 2, tol: float = 1e-8) -> QuadratureResult:
        """``s**power * integral_0^delta exp(-s t) f(x +/- t) dt`` by gap decomposition.

        Each gap splits into two halves on which the integrand reduces to the
        canonical oscillatory integral of :mod:`laplace_calc.oscillatory`.
        Whole halves of one level share a single canonical value, so their
        exponential prefactors are summed per level.
        """
        if side not in ("plus", "minus"):
            raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
        if not s > 0 or not delta > 0 or not tol > 0:
            raise ValueError("s, delta and tol must all be positive")
        plus = side == "plus"
        y0, y1 = (x, x + delta) if plus else (x - delta, x)
        if y0 < 0.0 or y1 > 1.0:
            raise DomainError(f"[{y0}, {y1}] not inside [0, 1]")
        m = self.model
        scale = float(s) ** power
        budget = tol / scale
        total, err, nevals = 0.0, 0.0, 0

        # gaps entirely inside [y0, y1]
        i0 = int(np.searchsorted(m.gap_af, y0, side="left"))
        i1 = int(np.searchsorted(m.gap_bf, y1, side="right"))
        if i1 > i0:
            A = m.gap_af[i0:i1]
            lev = m.gap_level[i0:i1].astype(np.int64)
            L = 0.25 ** lev / 2.0
            if plus:
                w_neg = np.exp(-s * (A - x))          # g halves, weight decays in tau
                w_pos = np.exp(-s * (A + L - x))      # h halves, weight grows in tau
            else:
                w_pos = np.exp(-s * (x - A - L))
                w_neg = np.exp(-s * (x - A - 2 * L))
            nl = m.depth + 1
            sums = {-1: np.bincount(lev, weights=w_neg, minlength=nl),
                    1: np.bincount(lev, weights=w_pos, minlength=nl)}
            active = [(sg, n) for sg in (-1, 1) for n in range(1, nl) if sums[sg][n] > 0]
            share = 0.5 * budget / max(len(active), 1)
            for sg, n in active:
                W = sums[sg][n]
                Ln = 0.25 ** n / 2.0
                bound = W * Ln ** 0.25 * min(Ln, 1.0 / s)
                if bound <= 1e-3 * share:
                    err += bound
                    continue
                val, e, nev = self._half_integral(sg * float(s), n, share / W)
                total += W * val
                err += W * e
                nevals += nev

        # gaps cut by an end of the window
        pieces = []
        for y in (y0, y1):
            j = int(np.searchsorted(m.gap_af, y, side="right")) - 1
            if j >= 0 and m.gap_af[j] < y < m.gap_bf[j] and j not in pieces:
                pieces.append(j)
        for j in pieces:
            A, B = m.gap_af[j], m.gap_bf[j]
            Lj = 0.5 * (B - A)
            lo, hi = max(A, y0), min(B, y1)
            halves = []
            g_lo, g_hi = max(0.0, lo - A), min(Lj, hi - A)
            if g_hi > g_lo:
                if plus:
                    halves.append((-s, g_lo, g_lo, g_hi, (A - x) + g_lo))
                else:
                    halves.append((s, g_hi, g_lo, g_hi, (x - A) - g_hi))
            h_lo, h_hi = max(0.0, B - hi), min(Lj, B - lo)
            if h_hi > h_lo:
                if plus:
                    halves.append((s, h_hi, h_lo, h_hi, (B - x) - h_hi))
                else:
                    halves.append((-s, h_lo, h_lo, h_hi, (x - B) + h_lo))
            for lam, ref, t0, t1, dist in halves:
                pre = math.exp(-s * max(dist, 0.0))
                if pre == 0.0:
                    continue
                val, e, nev = canonical(lam, ref, t0, t1, 0.125 * budget / pre)
                total += pre * val
                err += pre * e
                nevals += nev
        return QuadratureResult(scale * total, scale * err, max(nevals, 1), 1)


def eval_f(pf: PathologicalFunction, x):
    """Evaluate at a float, an array of floats, or an exact scalar (Fraction/mpf)."""
    if isinstance(x, (Fraction, mpmath.mpf)):
        return float(pf.eval_exact(x))
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise DomainError("eval_f needs points in [0, 1]")
    return pf(arr)


# witnesses of non-differentiability

@dataclass(frozen=True)
class Witness:
    k: int
    side: str
    gap: Gap
    l: int
    u: "mpmath.mpf"
    v: "mpmath.mpf"
    offset_u: "mpmath.mpf"
    offset_v: "mpmath.mpf"


def _certified(model: SvcModel, a: Number) -> Fraction:
    A = _to_fraction(a)
    if isinstance(locate(model, A), InGap):
        raise ValueError(f"a={a} lies in a removed interval, not in S")
    if (A * model.denominator).denominator != 1:
        raise ValueError(f"a={a} is not an endpoint of a depth-{model.depth} component")
    return A


def witness_pair(model: SvcModel, a: Number, k: int) -> Witness:
    """Points ``u``, ``v`` near ``a`` where the function equals its envelope and zero.

    Gaps of levels ``k+1 .. 2k`` inside ``[a + 4**-(k+1), a + 5 * 4**-(k+1)]``
    are searched first, then the mirrored window left of ``a``. The largest
    qualifying gap wins, ties going to the one nearest ``a``. The smallest
    integer ``l`` placing both points in the inner quarter next to the
    midpoint is used.
    """
    if k < 2:
        raise ValueError("witness index k must be at least 2")
    A = _certified(model, a)
    N = model.depth
    if k >= N:
        raise NoWitnessAtDepth(f"k={k} needs depth > {k}, model has depth {N}")
    au = int(A * model.denominator)
    q = 1 << (2 * (N - k) - 1)
    levels = model.gap_level
    lvl_ok = (levels >= k + 1) & (levels <= 2 * k)
    for side in ("plus", "minus"):
        if side == "plus":
            lo, hi = au + q, au + 5 * q
        else:
            lo, hi = au - 5 * q, au - q
        i0 = int(np.searchsorted(model.gap_a, lo, side="left"))
        i1 = int(np.searchsorted(model.gap_b, hi, side="right"))
        if i1 <= i0:
            continue
        cand = np.arange(i0, i1)[lvl_ok[i0:i1]]
        if cand.size == 0:
            continue
        best = cand[levels[cand] == levels[cand].min()]
        dist = np.abs(model.gap_a[best] - au) if side == "plus" else np.abs(au - model.gap_b[best])
        gi = int(best[np.argmin(dist)])
        return _solve_witness(model.gap(gi), side, k)
    raise NoWitnessAtDepth(f"no gap of levels {k + 1}..{2 * k} near a={A} at depth {N}")


def _solve_witness(gap: Gap, side: str, k: int) -> Witness:
    m = gap.level
    with mpmath.workprec(_WITNESS_PREC):
        low = mpmath.mpf(2) ** (mpmath.mpf(7 * (2 * m + 1)) / 4)    # phase at the midpoint c
        high = mpmath.mpf(2) ** (mpmath.mpf(7 * (2 * m + 2)) / 4)   # phase at the quarter point d
        l = int(mpmath.floor(low / (2 * mpmath.pi))) + 1
        th_u = (4 * l + 1) * mpmath.pi / 2
        th_v = 2 * l * mpmath.pi
        if not (low < th_v < th_u < high):
            raise ConsistencyError(f"no admissible l in gap {gap}")
        off_u = th_u ** (mpmath.mpf(-4) / 7)
        off_v = th_v ** (mpmath.mpf(-4) / 7)
        a = mpmath.mpf(gap.a.numerator) / gap.a.denominator
        b = mpmath.mpf(gap.b.numerator) / gap.b.denominator
        if side == "plus":
            u, v = a + off_u, a + off_v
        else:
            u, v = b - off_u, b - off_v
    return Witness(k, side, gap, l, u, v, off_u, off_v)


@dataclass(frozen=True)
class DifferenceQuotient:
    k: int
    quotient_u: float
    quotient_v: float
    side: str
    lower_bound: float


def quotient_lower_bound(k: int) -> float:
    """``4**(k+1) / (5 * 2**(k + 1/2))``, the guaranteed size of ``quotient_u``."""
    return 2.0 ** (k + 1.5) / 5.0


def difference_quotients(pf: PathologicalFunction, a: Number, k_max: int):
    """Difference quotients of ``f`` at ``a`` along the witnesses ``k = 2 .. k_max``.

    ``quotient_u`` is ``|f(u) - f(a)| / |u - a|``, taken from the closed
    form ``(u - a_n)**(1/4)`` since the sine equals one at ``u``. The signed
    quotient is negative when ``side`` is ``"minus"``. ``quotient_v`` is zero
    because ``sin(2 l pi) = 0``.
    """
    A = _certified(pf.model, a)
    out = []
    with mpmath.workprec(_WITNESS_PREC):
        a_mp = mpmath.mpf(A.numerator) / A.denominator
        for k in range(2, k_max + 1):
            w = witness_pair(pf.model, A, k)
            qu = float(w.offset_u ** mpmath.mpf(0.25) / abs(w.u - a_mp))
            bound = quotient_lower_bound(k)
            if not qu >= bound:
                raise ConsistencyError(f"quotient {qu} below the bound {bound} at k={k}")
            out.append(DifferenceQuotient(k, qu, 0.0, w.side, bound))
    return out


def certified_points(model: SvcModel, count: int, rng: np.random.Generator):
    """Random endpoints of depth-``N`` components, all exactly in S."""
    picks = rng.choice(model.comp_a.size, size=count, replace=count > model.comp_a.size)
    ends = rng.integers(0, 2, size=count)
    pts = []
    for j, e in zip(picks, ends):
        num = model.comp_a[j] if e == 0 else model.comp_b[j]
        pts.append(model.frac(num))
    return pts
