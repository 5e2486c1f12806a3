"""Picard iteration for systems ``LD1 x(t) = f(t, x(t))``, ``x(t0) = alpha``.

The step ``a`` is chosen so the Lipschitz majorant ``v`` integrates to at
most one half on each side of ``t0``; the Picard map is then a contraction
with ratio 1/2 in the max-sup norm. Iterates are sampled on a uniform grid
and interpolated by cubic splines between samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConsistencyError, DegenerateStep, MaxIterExceeded
from .laplace_deriv import SGrid, ld0
from .quadrature import RealFunction, cumulative_integral, integrate

RATIO_SLACK = 0.05


@dataclass(frozen=True)
class IvpSystem:
    """``rhs(t, X)`` maps times of shape (m,) and states (m, n) to (m, n).

    ``forcing_primitive``, when given, maps times (m,) to (m, n) and adds
    ``P(t) - P(t0)`` to the Picard map; that is how a forcing term known
    only as the Laplace derivative of ``P`` enters.
    """

    dimension: int
    rhs: Callable
    t0: float
    alpha: tuple
    lipschitz_weight: RealFunction
    domain: tuple = (-np.inf, np.inf)
    forcing_primitive: Optional[Callable] = None
    name: str = "ivp"

    def __post_init__(self):
        alpha = tuple(float(v) for v in np.atleast_1d(self.alpha))
        if len(alpha) != self.dimension:
            raise ValueError(f"alpha has {len(alpha)} entries, dimension is {self.dimension}")
        object.__setattr__(self, "alpha", alpha)
        lo, hi = self.domain
        if not lo <= self.t0 <= hi:
            raise ValueError(f"t0={self.t0} outside domain {self.domain}")


@dataclass
class PicardSolution:
    step: float
    grid: np.ndarray
    trajectory: np.ndarray
    iterations: int
    final_delta: float
    deltas: list = field(default_factory=list)

    @property
    def ratios(self) -> list:
        d = self.deltas
        return [d[i + 1] / d[i] for i in range(len(d) - 1) if d[i] > 0]

    def interpolant(self) -> CubicSpline:
        return CubicSpline(self.grid, self.trajectory, axis=0)


def _one_sided(v, t0, a, tol):
    right = integrate(v, t0, t0 + a, tol).value
    left = integrate(v, t0 - a, t0, tol).value
    return max(left, right)


def contraction_step(v, t0: float, interval: Sequence[float], tol: float = 1e-10) -> float:
    """Largest ``a`` with ``integral`` of ``v`` over ``[t0, t0 +/- a]`` at most 1/2.

    ``[t0 - a, t0 + a]`` is also kept inside ``interval``. Bisection stops
    when the bracket is narrower than ``tol``; the feasible end is returned.
    """
    lo_I, hi_I = float(interval[0]), float(interval[1])
    if not lo_I <= t0 <= hi_I:
        raise ValueError(f"t0={t0} outside {interval}")
    amax = min(t0 - lo_I, hi_I - t0)
    if not math.isfinite(amax):
        raise ValueError("the interval must be bounded")
    qtol = 1e-3 * tol
    if _one_sided(v, t0, amax, qtol) <= 0.5:
        a = amax
    else:
        lo, hi = 0.0, amax
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _one_sided(v, t0, mid, qtol) <= 0.5:
                lo = mid
            else:
                hi = mid
        a = lo
    if a < tol:
        raise DegenerateStep(f"step {a} below tol {tol}: v is too large near t0={t0}")
    return a


def _grid(t0, a, points):
    if points < 3:
        raise ValueError("need at least 3 grid points")
    if points % 2 == 0:
        points += 1
    return np.linspace(t0 - a, t0 + a, points)


def picard_map(sys: IvpSystem, grid: np.ndarray, X: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """One application of ``alpha + integral_{t0}^t f(s, X(s)) ds`` on the grid.

    ``X`` holds samples on ``grid`` (shape (m, n)); between samples it is
    replaced by its cubic spline, and each cell is integrated by adaptive
    Gauss-Kronrod quadrature.
    """
    X = np.asarray(X, dtype=float).reshape(grid.size, sys.dimension)
    spline = CubicSpline(grid, X, axis=0)
    i0 = int(np.argmin(np.abs(grid - sys.t0)))
    out = np.empty_like(X)
    for j in range(sys.dimension):
        def comp(s, j=j):
            s = np.asarray(s, dtype=float)
            return np.asarray(sys.rhs(s.ravel(), spline(s.ravel())))[:, j].reshape(s.shape)
        _, cum, _ = cumulative_integral(RealFunction(comp, grid[0], grid[-1]), grid, tol)
        out[:, j] = sys.alpha[j] + cum - cum[i0]
    if sys.forcing_primitive is not None:
        P = np.asarray(sys.forcing_primitive(grid), dtype=float).reshape(grid.size, sys.dimension)
        out += P - P[i0]
    return out


def _step_interval(sys: IvpSystem):
    lo, hi = sys.domain
    # an unbounded side is cut far away; v then decides the step
    far = 1e3
    return (max(lo, sys.t0 - far), min(hi, sys.t0 + far))


def picard_solve(sys: IvpSystem, grid_points: int = 201, tol: float = 1e-10,
                 max_iter: int = 100, step: Optional[float] = None,
                 initial: Optional[Callable] = None) -> PicardSolution:
    """Iterate the Picard map from the constant ``alpha`` until the sup change is below ``tol``.

    ``initial`` optionally maps the grid to a starting iterate of shape (m, n).
    Past the second iteration the ratio of successive changes must stay
    below ``0.5 + RATIO_SLACK`` unless the change is already at rounding level.
    """
    if step is None:
        a = contraction_step(sys.lipschitz_weight, sys.t0, _step_interval(sys), 1e-12)
    else:
        a = float(step)
    grid = _grid(sys.t0, a, grid_points)
    if initial is None:
        X = np.tile(np.asarray(sys.alpha), (grid.size, 1))
    else:
        X = np.asarray(initial(grid), dtype=float).reshape(grid.size, sys.dimension)
    qtol = min(1e-13, tol * 1e-3)
    deltas = []
    for it in range(1, max_iter + 1):
        Xn = picard_map(sys, grid, X, qtol)
        delta = float(np.max(np.abs(Xn - X)))
        deltas.append(delta)
        X = Xn
        scale = 1.0 + float(np.max(np.abs(X)))
        if it > 2 and deltas[-2] > 1e3 * qtol * scale:
            if delta > (0.5 + RATIO_SLACK) * deltas[-2]:
                raise ConsistencyError(
                    f"Picard change ratio {delta / deltas[-2]:.3f} exceeds 1/2 at iteration {it}")
        if delta <= tol:
            return PicardSolution(a, grid, X, it, delta, deltas)
    raise MaxIterExceeded(f"no convergence to {tol} in {max_iter} iterations (last {deltas[-1]})")




def continue_solution(sys: IvpSystem, t_end: float, grid_points: int = 201,
                      tol: float = 1e-10, max_steps: int = 1000):
    """Classical continuation: re-anchor at the end of each step until ``t_end``.

    Returns the concatenated grid and trajectory. Only forward continuation
    (``t_end > t0``) is supported.
    """
    if not t_end > sys.t0:
        raise ValueError("t_end must exceed t0")
    ts, xs = [], []
    cur = sys
    for _ in range(max_steps):
        sol = picard_solve(cur, grid_points, tol)
        mid = sol.grid.size // 2
        keep = sol.grid[mid:] <= t_end
        ts.append(sol.grid[mid:][keep])
        xs.append(sol.trajectory[mid:][keep])
        if sol.grid[-1] >= t_end:
            if ts[-1][-1] < t_end:
                ts.append(np.array([t_end]))
                xs.append(sol.interpolant()(np.array([t_end])))
            break
        nxt = sol.grid[-1]
        cur = IvpSystem(cur.dimension, cur.rhs, float(nxt), tuple(sol.trajectory[-1]),
                        cur.lipschitz_weight, cur.domain, cur.forcing_primitive, cur.name)
    else:
        raise MaxIterExceeded(f"continuation did not reach {t_end} in {max_steps} steps")
    t = np.concatenate(ts)
    x = np.concatenate(xs)
    t, idx = np.unique(t, return_index=True)
    return t, x[idx]


def spot_check_laplace_continuity(sys: IvpSystem, sol: PicardSolution, count: int,
                                  rng: np.random.Generator, tol: float = 1e-5) -> bool:
    """LD0 of ``t -> f(t, x(t))`` equals its value at ``count`` random interior times."""
    spline = sol.interpolant()
    lo, hi = sol.grid[0], sol.grid[-1]
    width = hi - lo
    ts = rng.uniform(lo + 0.1 * width, hi - 0.1 * width, size=count)
    grid = SGrid(s0=64.0, ratio=2.0, count=18)
    for t in ts:
        for j in range(sys.dimension):
            def comp(s, j=j):
                s = np.asarray(s, dtype=float)
                return np.asarray(sys.rhs(s.ravel(), spline(s.ravel())))[:, j].reshape(s.shape)
            f = RealFunction(comp, lo, hi)
            lim = ld0(f, float(t), delta=0.05 * width, grid=grid, tol=tol)
            if not (lim.exists and abs(lim.value - float(f(t))) <= tol):
                return False
    return True


def reduce_higher_order(n: int, f: Callable, t0: float, alphas: Sequence[float],
                        lipschitz: float = 1.0, domain=(-np.inf, np.inf)) -> IvpSystem:
    """First-order system for ``LD1 x^(n-1) = f(t, x, x', ..., x^(n-1))``.

    ``x_i' = x_{i+1}`` for ``i < n`` and the last component carries ``f``.
    ``lipschitz`` bounds the max-norm Lipschitz constant of ``f``; the
    weight is the larger of it and 1 (from the chain equations).
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    alphas = tuple(float(v) for v in alphas)
    if len(alphas) != n:
        raise ValueError(f"need {n} initial values, got {len(alphas)}")

    def rhs(t, X):
        X = np.asarray(X, dtype=float).reshape(-1, n)
        out = np.empty_like(X)
        out[:, :-1] = X[:, 1:]
        out[:, -1] = f(t, *[X[:, i] for i in range(n)])
        return out

    L = max(float(lipschitz), 1.0) if n > 1 else float(lipschitz)
    v = RealFunction(lambda t: np.full_like(np.asarray(t, dtype=float), L), *domain)
    return IvpSystem(n, rhs, float(t0), alphas, v, domain, name=f"order-{n}")


def constant_weight(L: float, domain=(-np.inf, np.inf)) -> RealFunction:
    return RealFunction(lambda t: np.full_like(np.asarray(t, dtype=float), float(L)), *domain,
                        name=f"v={L}")


# registered right-hand sides for config-driven runs

def _linear(params):
    k = float(params.get("k", 1.0))
    return IvpSystem(1, lambda t, X: k * np.asarray(X).reshape(-1, 1),
                     float(params.get("t0", 0.0)), tuple(params.get("alpha", [1.0])),
                     constant_weight(abs(k)), name="linear")


def _oscillator(params):
    omega = float(params.get("omega", 1.0))
    return reduce_higher_order(2, lambda t, x, xp: -omega ** 2 * x,
                               float(params.get("t0", 0.0)),
                               params.get("alpha", [0.0, 1.0]), lipschitz=omega ** 2)


def _pathological_forcing(params):
    from .svc_pathology import PathologicalFunction, build_svc
    k = float(params.get("k", -1.0))
    pf = PathologicalFunction(build_svc(int(params.get("depth", 8))))
    return IvpSystem(1, lambda t, X: k * np.asarray(X).reshape(-1, 1),
                     float(params.get("t0", 0.5)), tuple(params.get("alpha", [0.0])),
                     constant_weight(abs(k)), domain=(0.0, 1.0),
                     forcing_primitive=lambda t: pf(np.asarray(t)).reshape(-1, 1),
                     name="pathological-forcing")


RHS_CATALOG = {
    "linear": _linear,
    "oscillator": _oscillator,
    "pathological-forcing": _pathological_forcing,
}


def system_from_catalog(name: str, params: Optional[dict] = None) -> IvpSystem:
    if name not in RHS_CATALOG:
        raise KeyError(f"unknown rhs {name!r}; known: {sorted(RHS_CATALOG)}")
    return RHS_CATALOG[name](params or {})
