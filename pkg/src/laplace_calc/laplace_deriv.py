"""Finite-grid estimates of the s -> infinity limits behind LD0 and LD1.

A limit in ``s`` is probed on a geometric grid ``s_k = s0 * ratio**k`` and
decided from the trailing third of the samples; see :func:`classify`.
No acceleration is applied, since extrapolation can manufacture spurious
convergence on oscillating tails.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainTooSmall
from .quadrature import RealFunction, exp_weighted

DEFAULT_DELTA = 0.25
DIVERGENCE_THRESHOLD = 1e6
# fraction of the convergence tolerance handed to the quadrature
QUAD_FRACTION = 1e-2
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SGrid:
    s0: float = 4.0
    ratio: float = 2.0
    count: int = 24

    def __post_init__(self):
        if not self.s0 > 0 or not self.ratio > 1 or self.count < 1:
            raise ValueError(f"invalid s-grid {self}")

    @property
    def values(self) -> np.ndarray:
        return self.s0 * self.ratio ** np.arange(self.count)


class Classification(enum.Enum):
    CONVERGED = "converged"
    DIVERGED_POS = "diverged+"
    DIVERGED_NEG = "diverged-"
    OSCILLATING = "oscillating"
    INCONCLUSIVE = "inconclusive"

    @property
    def diverged(self) -> bool:
        return self in (Classification.DIVERGED_POS, Classification.DIVERGED_NEG)


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    classification: Classification
    tail_spread: float
    samples: tuple

    @property
    def converged(self) -> bool:
        return self.classification is Classification.CONVERGED


def _alternations(window: np.ndarray) -> int:
    signs = np.sign(np.diff(window))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def classify(points: Sequence[float], values: Sequence[float], tol: float,
             divergence_threshold: float = DIVERGENCE_THRESHOLD) -> LimitEstimate:
    """Decide a limit from a finite, increasing sequence of samples.

    The trailing window is the last ``ceil(n / 3)`` samples. Converged iff its
    spread is at most ``tol``; Diverged iff it is monotone and the last value
    exceeds ``divergence_threshold`` in magnitude; Oscillating iff the signs of
    successive differences alternate at least three times; Inconclusive
    otherwise.
    """
    pts = np.asarray(points, dtype=float)
    vals = np.asarray(values, dtype=float)
    samples = tuple(zip(pts.tolist(), vals.tolist()))
    window = vals[-int(math.ceil(vals.size / 3)):]
    last = float(window[-1])
    if np.isnan(window).any():
        return LimitEstimate(last, Classification.INCONCLUSIVE, math.nan, samples)
    with np.errstate(invalid="ignore"):
        spread = float(window.max() - window.min())
    if spread <= tol:
        return LimitEstimate(last, Classification.CONVERGED, spread, samples)
    d = np.diff(window)
    monotone = bool(np.all(d >= 0) or np.all(d <= 0))
    if monotone and abs(last) > divergence_threshold:
        kind = Classification.DIVERGED_POS if last > 0 else Classification.DIVERGED_NEG
        return LimitEstimate(last, kind, spread, samples)
    if _alternations(window) >= 3:
        return LimitEstimate(last, Classification.OSCILLATING, spread, samples)
    return LimitEstimate(last, Classification.INCONCLUSIVE, spread, samples)


class SidedLimits(NamedTuple):
    """Plus- and minus-side estimates; a side is ``None`` when it does not fit."""

    plus: Optional[LimitEstimate]
    minus: Optional[LimitEstimate]
    tol: float

    def sides(self):
        return [e for e in (self.plus, self.minus) if e is not None]

    @property
    def exists(self) -> bool:
        """Every available side converged and the sides agree within ``tol``."""
        sides = self.sides()
        if not all(e.converged for e in sides):
            return False
        return len(sides) < 2 or abs(sides[0].value - sides[1].value) <= self.tol

    @property
    def value(self) -> float:
        if not self.exists:
            return math.nan
        return float(np.mean([e.value for e in self.sides()]))


def _side_deltas(f, x, delta):
    lo, hi = (f.lo, f.hi) if isinstance(f, RealFunction) else (-math.inf, math.inf)
    if not lo <= x <= hi:
        raise DomainTooSmall(f"x={x} outside domain [{lo}, {hi}]")
    d_plus = min(delta, hi - x)
    d_minus = min(delta, x - lo)
    if d_plus <= 0 and d_minus <= 0:
        raise DomainTooSmall(f"no room on either side of x={x} in [{lo}, {hi}]")
    return {"plus": d_plus if d_plus > 0 else None,
            "minus": d_minus if d_minus > 0 else None}


def _value_at(f, x):
    return float(np.asarray(f(np.asarray([float(x)])))[0])


def increment_transform(f, x: float, side: str, s: float, delta: float,
                        power: int, tol: float, fx: Optional[float] = None) -> float:
    """``s**power * integral_0^delta exp(-s t) [f(x +/- t) - f(x)] dt``.

    The shift is subtracted inside the integrand for plain functions (so the
    quadrature never sees the large constant), and in closed form for
    objects that provide their own ``weighted_integral``.
    """
    fx = _value_at(f, x) if fx is None else fx
    if callable(getattr(f, "weighted_integral", None)):
        raw = f.weighted_integral(x, side, s, delta, power, tol).value
        return raw - fx * s ** (power - 1) * -math.expm1(-s * delta)
    shifted = RealFunction(lambda y: f(y) - fx, f.lo, f.hi, name=f"{f.name}-f(x)")
    shifted.noise_scale = 4.0 * _EPS * abs(fx)
    return exp_weighted(shifted, x, side, s, delta, power, tol).value


def _transform_samples(f, x, side, delta, grid, tol, power, shift):
    out = []
    qtol = tol * QUAD_FRACTION
    fx = _value_at(f, x) if shift else None
    for s in grid.values:
        if shift:
            v = increment_transform(f, x, side, s, delta, power, qtol, fx=fx)
        else:
            v = exp_weighted(f, x, side, s, delta, power, qtol).value
        out.append(v if side == "plus" or not shift else -v)
    return np.array(out)


def ld0(f: RealFunction, x: float, delta: float = DEFAULT_DELTA,
        grid: SGrid = SGrid(), tol: float = 1e-6) -> SidedLimits:
    """One-sided limits of ``s * integral_0^delta exp(-s t) f(x +/- t) dt``."""
    deltas = _side_deltas(f, x, delta)
    est = {}
    for side, d in deltas.items():
        if d is None:
            est[side] = None
            continue
        vals = _transform_samples(f, x, side, d, grid, tol, 1, shift=False)
        est[side] = classify(grid.values, vals, tol)
    return SidedLimits(est["plus"], est["minus"], tol)


def is_laplace_continuous(f: RealFunction, x: float, delta: float = DEFAULT_DELTA,
                          grid: SGrid = SGrid(), tol: float = 1e-6) -> bool:
    lim = ld0(f, x, delta, grid, tol)
    return lim.exists and abs(lim.value - _value_at(f, x)) <= tol


def ld1(f: RealFunction, x: float, delta: float = DEFAULT_DELTA,
        grid: SGrid = SGrid(), tol: float = 1e-6) -> SidedLimits:
    """One-sided Laplace derivative estimates at ``x``.

    The plus side is ``s**2 * integral exp(-s t) [f(x+t) - f(x)] dt`` and the
    minus side the same with ``x - t`` and the sign flipped, so both tend to
    ``f'(x)`` for smooth ``f``. ``SidedLimits.value`` is the Laplace
    derivative when it exists.
    """
    if not math.isfinite(_value_at(f, x)):
        raise ValueError(f"f({x}) is not finite")
    deltas = _side_deltas(f, x, delta)
    est = {}
    for side, d in deltas.items():
        if d is None:
            est[side] = None
            continue
        vals = _transform_samples(f, x, side, d, grid, tol, 2, shift=True)
        est[side] = classify(grid.values, vals, tol)
    return SidedLimits(est["plus"], est["minus"], tol)


class Derivates(NamedTuple):
    lower_plus: float
    upper_plus: float
    lower_minus: float
    upper_minus: float


def derivates(f: RealFunction, x: float, delta: float = DEFAULT_DELTA,
              grid: SGrid = SGrid(), tol: float = 1e-6) -> Derivates:
    """Grid surrogates for the lower/upper one-sided Laplace derivates.

    liminf and limsup are replaced by min and max over the trailing half of
    the s-grid. A side that does not fit yields NaNs.
    """
    deltas = _side_deltas(f, x, delta)
    half = int(math.ceil(grid.count / 2))
    out = []
    for side in ("plus", "minus"):
        d = deltas[side]
        if d is None:
            out += [math.nan, math.nan]
            continue
        vals = _transform_samples(f, x, side, d, grid, tol, 2, shift=True)[-half:]
        out += [float(vals.min()), float(vals.max())]
    return Derivates(*out)
