"""Poisson integrals of boundary data on the unit disc.

Boundary data ``Gf`` lives on ``[-pi, pi]``. Norm comparisons only use
its primitive ``G(x) = integral_{-pi}^x Gf``: the primitive of ``F_r`` is
rewritten by parts so that ``G`` and the kernel are all that is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .calculus import Primitive, alexiewicz_norm
from .errors import ConsistencyError, DomainError
from .quadrature import RealFunction, integrate

TWO_PI = 2.0 * math.pi
CLUSTER = 8


def _check_r(r: float):
    if not 0.0 <= r < 1.0:
        raise DomainError(f"r must lie in [0, 1), got {r}")


def poisson_kernel(r: float, phi):
    """``(1 - r**2) / (1 - 2 r cos(phi) + r**2)``.

    The denominator is evaluated as ``(1 - r)**2 + 4 r sin(phi/2)**2`` so it
    keeps full relative accuracy near ``phi = 0`` when ``r`` is close to 1.
    """
    _check_r(r)
    phi = np.asarray(phi, dtype=float)
    sh = np.sin(0.5 * phi)
    val = (1.0 - r) * (1.0 + r) / ((1.0 - r) ** 2 + 4.0 * r * sh * sh)
    return float(val) if val.ndim == 0 else val


def kernel_antiderivative(r: float, phi):
    """Continuous ``K(phi) = integral_0^phi P_r``, with ``K(phi + 2 pi) = K(phi) + 2 pi``."""
    _check_r(r)
    phi = np.asarray(phi, dtype=float)
    turns = np.floor((phi + math.pi) / TWO_PI)
    p = phi - TWO_PI * turns
    val = 2.0 * np.arctan2((1.0 + r) * np.sin(p / 2), (1.0 - r) * np.cos(p / 2)) + TWO_PI * turns
    return float(val) if val.ndim == 0 else val


def _wrap(t: np.ndarray) -> np.ndarray:
    return (t + math.pi) % TWO_PI - math.pi


def kernel_breakpoints(r: float, theta: float) -> list:
    """``theta`` and ``theta +/- k (1 - r)``, ``k = 1..8``, wrapped into ``[-pi, pi]``."""
    k = np.arange(1, CLUSTER + 1)
    pts = np.concatenate([[theta], theta + k * (1 - r), theta - k * (1 - r)])
    return sorted(set(_wrap(pts).tolist()))


def poisson_integral(Gf, r: float, theta: float, tol: float = 1e-12) -> float:
    """``F(r, theta) = 1/(2 pi) integral_{-pi}^{pi} Gf(t) P_r(theta - t) dt``."""
    _check_r(r)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if r == 0.0:
        return integrate(Gf, -math.pi, math.pi, tol * TWO_PI).value / TWO_PI
    fn = RealFunction(lambda t: Gf(t) * poisson_kernel(r, theta - t), -math.pi, math.pi)
    res = integrate(fn, -math.pi, math.pi, tol * TWO_PI, points=kernel_breakpoints(r, theta))
    return res.value / TWO_PI


class DiscFunction:
    """The harmonic extension ``(r, theta) -> F(r, theta)`` of boundary data."""

    def __init__(self, Gf, tol: float = 1e-12):
        self.Gf = Gf
        self.tol = tol

    def __call__(self, r: float, theta: float) -> float:
        return poisson_integral(self.Gf, r, theta, self.tol)

    def table(self, r_list: Sequence[float], theta_list: Sequence[float]):
        """Rows ``(r, theta, F)`` over the product grid."""
        return [(r, th, self(r, th)) for r in r_list for th in theta_list]


def harmonicity_residual(Gf, r: float, theta: float, h: float, tol: float = 1e-13) -> float:
    """``|F_rr + F_r / r + F_theta_theta / r**2|`` by central differences of step ``h``.

    ``tol`` is relative to ``1 + max |Gf|``.
    """
    if not h > 0 or not (0.0 < r - h and r + h < 1.0):
        raise DomainError(f"need 0 < r - h and r + h < 1, got r={r}, h={h}")
    scale = 1.0 + float(np.max(np.abs(Gf(np.linspace(-math.pi, math.pi, 257)))))
    F = DiscFunction(Gf, tol * scale)
    f0 = F(r, theta)
    frp, frm = F(r + h, theta), F(r - h, theta)
    ftp, ftm = F(r, theta + h), F(r, theta - h)
    f_rr = (frp - 2 * f0 + frm) / h ** 2
    f_r = (frp - frm) / (2 * h)
    f_tt = (ftp - 2 * f0 + ftm) / h ** 2
    return abs(f_rr + f_r / r + f_tt / r ** 2)


def disc_primitive(G: Primitive, r: float, tol: float = 1e-12) -> RealFunction:
    """``x -> integral_{-pi}^x F_r(theta) dtheta`` from the primitive ``G`` alone.

    Integrating the kernel in ``theta`` and then by parts in ``t`` gives

        (1/2pi) [G(pi) K(x + pi) + integral G(t) (P_r(x - t) - P_r(-pi - t)) dt]

    with ``K`` the kernel antiderivative, assuming ``G(-pi) = 0``. ``tol`` is
    relative to ``1 + max |G|``.
    """
    _check_r(r)
    G0 = float(G.F(-math.pi))
    Gpi = float(G.F(math.pi)) - G0

    def Gs(t):
        return G.F(t) - G0

    # the kernel integrates to 2 pi, so the integral scales with max |G|
    scale = 1.0 + float(np.max(np.abs(Gs(np.linspace(-math.pi, math.pi, 257)))))
    qtol = tol * scale
    @lru_cache(maxsize=None)
    def one(x):
        fn = RealFunction(
            lambda t: Gs(t) * (poisson_kernel(r, x - t) - poisson_kernel(r, -math.pi - t)),
            -math.pi, math.pi)
        pts = kernel_breakpoints(r, x) + kernel_breakpoints(r, math.pi)
        val = integrate(fn, -math.pi, math.pi, qtol, points=pts).value
        return (Gpi * kernel_antiderivative(r, x + math.pi) + val) / TWO_PI

    return RealFunction(lambda x: one(float(x)), -math.pi, math.pi, vectorized=False,
                        name=f"Phi_r={r}")


@dataclass(frozen=True)
class BoundaryPoint:
    r: float
    distance: float
    norm_Fr: float
    norm_G: float


def boundary_convergence(G: Primitive, r_list: Sequence[float], tol: float = 1e-8):
    """Alexiewicz distance ``||F_r - Gf||`` on ``[-pi, pi]`` for each ``r``.

    ``G`` is the primitive of the boundary data with ``base = -pi``. The
    contraction ``||F_r|| <= ||Gf|| + tol`` is checked for every ``r``.
    """
    if G.base != -math.pi or G.end != math.pi:
        raise DomainError("boundary data primitive must live on [-pi, pi] with base -pi")
    r_arr = np.asarray(r_list, dtype=float)
    if np.any(np.diff(r_arr) <= 0):
        raise ValueError("r_list must be increasing")
    G0 = float(G.F(-math.pi))
    norm_G = alexiewicz_norm(G, tol).value
    out = []
    for r in r_arr:
        phi = disc_primitive(G, float(r), tol * 1e-3)
        diff = RealFunction(lambda x, phi=phi: phi(x) - (G.F(x) - G0), -math.pi, math.pi)
        dist = alexiewicz_norm(Primitive(diff, -math.pi), tol).value
        norm_Fr = alexiewicz_norm(Primitive(phi, -math.pi), tol).value
        if norm_Fr > norm_G + tol:
            raise ConsistencyError(f"||F_r|| = {norm_Fr!r} exceeds ||Gf|| = {norm_G!r} at r={r}")
        out.append(BoundaryPoint(float(r), dist, norm_Fr, norm_G))
    return out
