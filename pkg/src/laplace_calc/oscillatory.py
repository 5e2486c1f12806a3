"""Exponentially weighted integrals of ``tau**(1/4) * sin(tau**(-7/4))``.

The canonical integral is

    C(lam, ref, t0, t1) = integral_{t0}^{t1} exp(lam (tau - ref)) phi(tau) dtau,
    phi(tau) = tau**0.25 * sin(tau**-1.75),

with ``ref`` chosen by the caller so the weight never exceeds one on the
range. Close to ``tau = 0`` the phase is unbounded, so that part is done
analytically: with ``u = tau**-1.75`` the integral becomes
``integral_U^inf B(u) sin(u) du`` where ``B = (4/7) tau**3 exp(lam (tau - ref))``,
and repeated integration by parts gives the asymptotic series

    sum_j (-1)**j [B^(2j)(U) cos U - B^(2j+1)(U) sin U].

Away from zero ordinary adaptive quadrature takes over, with breakpoints
at the zeros of the sine.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

from .quadrature import _adaptive

# weight cut-off: exp(-WEIGHT_CUT) is negligible against any tolerance used
WEIGHT_CUT = 80.0
# smallness parameter for switching to the asymptotic series
RHO = 1e-2
SERIES_ORDER = 60
SERIES_RTOL = 1e-17
# above this phase, sin/cos are evaluated with mpmath
MP_PHASE = 2.0 ** 20

_LD = np.longdouble


@lru_cache(maxsize=None)
def _derivative_table(order: int = SERIES_ORDER):
    """Coefficients of d^k/du^k B in the normalised form.

    Entry ``[k][i]`` multiplies ``X**i * Y**(k-i)`` where ``X = lam tau**(11/4)``
    and ``Y = tau**(7/4)``; the overall factor ``tau**3 * weight`` is implied.
    """
    table = [np.array([4.0 / 7.0])]
    for k in range(order):
        prev = table[-1]
        nxt = np.zeros(k + 2)
        for i, c in enumerate(prev):
            e = 3.0 + 2.75 * i + 1.75 * (k - i)
            nxt[i + 1] += -4.0 / 7.0 * c
            nxt[i] += -4.0 / 7.0 * c * e
        table.append(nxt)
    return table


def series_threshold(lam: float) -> float:
    """Largest power of two below which the asymptotic series is used."""
    eps = (RHO * 7.0 / 12.0) ** (4.0 / 7.0)
    if lam != 0.0:
        eps = min(eps, (RHO / abs(lam)) ** (4.0 / 11.0))
    return 2.0 ** math.floor(math.log2(eps))


def phase_cos_sin(tau: float) -> tuple[float, float]:
    """``cos`` and ``sin`` of ``tau**-1.75`` for a float ``tau``, taken exactly."""
    u = tau ** -1.75
    if u < MP_PHASE:
        return math.cos(u), math.sin(u)
    bits = int(math.log2(u)) + 64
    with mpmath.workprec(bits):
        U = mpmath.mpf(tau) ** mpmath.mpf(-1.75)
        return float(mpmath.cos(U)), float(mpmath.sin(U))


def series_primitive(lam: float, ref: float, T: float) -> float:
    """``integral_0^T exp(lam (tau - ref)) phi(tau) dtau`` from the asymptotic series.

    Valid when ``T <= series_threshold(lam)``.
    """
    if T <= 0.0:
        return 0.0
    w = math.exp(lam * (T - ref))
    if w == 0.0:
        return 0.0
    X = lam * T ** 2.75
    Y = T ** 1.75
    table = _derivative_table()
    vals = []
    first = None
    prev_size = math.inf
    for k in range(0, len(table) - 1, 2):
        pair = []
        for kk in (k, k + 1):
            c = table[kk]
            i = np.arange(c.size)
            pair.append(float(np.sum(c * X ** i * Y ** (kk - i))))
        size = abs(pair[0]) + abs(pair[1])
        if first is None:
            first = size
        if size > prev_size:
            # asymptotic series started to diverge; stop at the smallest term
            break
        vals.append(pair)
        prev_size = size
        if size <= SERIES_RTOL * first:
            break
    cu, su = phase_cos_sin(T)
    total = 0.0
    for j, (b0, b1) in enumerate(vals):
        total += (-1) ** j * (b0 * cu - b1 * su)
    return w * T ** 3 * total


def _phi_weighted(lam, ref):
    def fn(t):
        tl = np.asarray(t, dtype=_LD)
        val = tl ** _LD(0.25) * np.sin(tl ** _LD(-1.75))
        return np.exp(lam * (t - ref)) * val.astype(float)
    return fn


def _phase_edges(t0: float, t1: float) -> np.ndarray:
    """``t0``, ``t1`` and every zero of ``sin(tau**-1.75)`` between them."""
    k_lo = math.ceil(t1 ** -1.75 / math.pi)
    k_hi = math.floor(t0 ** -1.75 / math.pi)
    ks = np.arange(k_hi, k_lo - 1, -1, dtype=float)
    inner = (ks * math.pi) ** (-4.0 / 7.0)
    inner = inner[(inner > t0) & (inner < t1)]
    return np.concatenate([[t0], inner, [t1]])


def canonical(lam: float, ref: float, t0: float, t1: float, tol: float):
    """``C(lam, ref, t0, t1)`` to absolute tolerance ``tol``.

    Returns ``(value, error_estimate, evaluations)``. ``ref`` should be
    ``t0`` when ``lam < 0`` and ``t1`` when ``lam > 0`` so the weight is
    bounded by one.
    """
    if not 0.0 <= t0 <= t1:
        raise ValueError(f"need 0 <= t0 <= t1, got {t0}, {t1}")
    if t0 == t1:
        return 0.0, 0.0, 0
    if lam < 0:
        t1 = min(t1, t0 + WEIGHT_CUT / -lam)
    elif lam > 0:
        t0 = max(t0, t1 - WEIGHT_CUT / lam)
    eps = series_threshold(lam)
    value, err, nevals = 0.0, 0.0, 0
    if t0 < eps:
        top = min(t1, eps)
        value += series_primitive(lam, ref, top) - series_primitive(lam, ref, t0)
        err += 1e-16 * abs(value)
    lo = max(t0, eps)
    if lo < t1:
        edges = _phase_edges(lo, t1)
        cells, e, n, _ = _adaptive(_phi_weighted(lam, ref), edges, tol)
        value += math.fsum(cells)
        err += e
        nevals += n
    return value, err, nevals
