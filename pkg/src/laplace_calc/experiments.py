"""Named experiments behind the command line front-end.

Each experiment takes validated parameters and a seeded generator and
returns a table, a list of named assertions and plot descriptions. Tables
never contain timings, so identical parameters and seed give identical CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .calculus import (Primitive, alexiewicz_norm, hake_limit, ld1_integral,
                       mean_value_xi_first, mean_value_xi_second, primitive_of, taylor)
from .errors import ConfigError
from .gen_ode import RHS_CATALOG, picard_solve, system_from_catalog
from .laplace_deriv import SGrid, ld1
from .poisson import (DiscFunction, boundary_convergence, harmonicity_residual,
                      poisson_kernel)
from .quadrature import RealFunction, integrate
from .svc_pathology import (PathologicalFunction, build_svc, certified_points,
                            difference_quotients)


@dataclass
class PlotSpec:
    """One panel: ``y`` columns against ``x``, optionally restricted to rows where ``group`` matches."""

    name: str
    x: str
    y: list
    title: str = ""
    logy: bool = False
    style: str = "linespoints"
    group: str | None = None


@dataclass
class Outcome:
    header: list
    rows: list
    assertions: dict = field(default_factory=dict)
    plots: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)


@dataclass
class Experiment:
    name: str
    run: Callable
    defaults: dict
    columns: str
    doc: str


# smooth test functions: name -> (f, f', f'')
SMOOTH = {
    "sin": (np.sin, np.cos, lambda x: -np.sin(x)),
    "cos": (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
    "exp": (np.exp, np.exp, np.exp),
    "square": (lambda x: x * x, lambda x: 2.0 * x, lambda x: np.full_like(x, 2.0)),
    "cube": (lambda x: x ** 3, lambda x: 3.0 * x * x, lambda x: 6.0 * x),
    "atan": (np.arctan, lambda x: 1.0 / (1.0 + x * x), lambda x: -2.0 * x / (1.0 + x * x) ** 2),
}

# boundary data on [-pi, pi]: name -> (Gf, primitive from -pi, exact F(r, theta) or None)
BOUNDARY = {
    "cos": (np.cos, lambda t: np.sin(t), lambda r, th: r * math.cos(th)),
    "sin2": (lambda t: np.sin(2 * t), lambda t: (1.0 - np.cos(2 * t)) / 2.0,
             lambda r, th: r * r * math.sin(2 * th)),
    "square": (lambda t: t * t, lambda t: (t ** 3 + math.pi ** 3) / 3.0, None),
    "sign": (np.sign, lambda t: np.abs(t) - math.pi, None),
}

# hake examples on [0, 1): name -> (primitive, expected classification)
HAKE = {
    "sqrt": (lambda c: 2.0 * np.sqrt(c), "converged"),
    "oscillating": (lambda c: np.sin(1.0 / (1.0 - c)), "oscillating"),
    "constant": (lambda c: np.full_like(np.asarray(c, dtype=float), 3.0), "converged"),
    "pole": (lambda c: c / (1.0 - c), "diverged_pos"),
}


def _real(f, lo=-20.0, hi=20.0):
    return RealFunction(f, lo, hi)


def _pq(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# experiments

def _svc_measure(p, rng):
    depth = p["depth"]
    model = build_svc(depth)
    rows, ok = [], True
    D = model.denominator
    for n in range(1, depth + 1):
        lefts, rights = model.component_numerators(n)
        lens = rights - lefts
        length = Fraction(int(lens[0]), D)
        uniform = bool(np.all(lens == lens[0]))
        gl = model.gap_b[model.gap_level == n] - model.gap_a[model.gap_level == n]
        gap_len = Fraction(int(gl[0]), D)
        gaps_uniform = bool(np.all(gl == gl[0])) and gl.size == 2 ** (n - 1)
        measure = Fraction(int(lens.sum()), D)
        good = (lefts.size == 2 ** n and uniform and gaps_uniform
                and length == Fraction(2 ** n + 1, 2 ** (2 * n + 1))
                and gap_len == Fraction(1, 4 ** n)
                and measure == (1 + Fraction(1, 2 ** n)) / 2)
        ok &= good
        rows.append([n, lefts.size, _pq(length), _pq(gap_len), _pq(measure),
                     float(measure), good])
    return Outcome(
        ["n", "count", "component_length", "gap_length", "measure", "measure_float", "closed_form"],
        rows, {"closed_forms_exact": ok},
        [PlotSpec("measure", "n", ["measure_float"], "measure of S_n")])


def _svc_gaps(p, rng):
    model = build_svc(p["depth"])
    top = min(p["max_level"], model.depth)
    rows = []
    for i in np.nonzero(model.gap_level <= top)[0]:
        g = model.gap(int(i))
        rows.append([g.level, _pq(g.a), _pq(g.b), float(g.a), float(g.b)])
    counts = [sum(1 for r in rows if r[0] == n) for n in range(1, top + 1)]
    return Outcome(["level", "a", "b", "a_float", "b_float"], rows,
                   {"gap_counts": counts == [2 ** (n - 1) for n in range(1, top + 1)]},
                   [PlotSpec("gaps", "a_float", ["level"], "gap left ends by level", style="points")])


def _points(p, rng, lo, hi):
    if p["points"]:
        return [float(x) for x in p["points"]]
    return sorted(rng.uniform(lo, hi, p["count"]).tolist())


def _ld1_smooth(p, rng):
    names = p["functions"]
    for nm in names:
        if nm not in SMOOTH:
            raise ConfigError(f"params.functions: unknown function {nm!r}; known: {sorted(SMOOTH)}")
    xs = _points(p, rng, -2.0, 2.0)
    grid = SGrid(*p["s_grid"])
    rows, worst = [], 0.0
    for nm in names:
        f, df, _ = SMOOTH[nm]
        fr = _real(f)
        for x in xs:
            lim = ld1(fr, x, p["delta"], grid, p["tol"])
            est = lim.value
            exact = float(df(np.float64(x)))
            err = abs(est - exact) if math.isfinite(est) else math.inf
            worst = max(worst, err)
            rows.append([nm, x, est, exact, err, lim.plus.classification.name,
                         lim.minus.classification.name])
    return Outcome(["function", "x", "estimate", "classical", "abs_err", "plus", "minus"], rows,
                   {"abs_err_within_check": worst <= p["check"]},
                   [PlotSpec("ld1_smooth", "x", ["estimate", "classical"], "ld1 against f'",
                             style="points", group="function")],
                   {"max_abs_err": worst})


def _pf_points(p, rng):
    model = build_svc(p["depth"])
    return PathologicalFunction(model), certified_points(model, p["count"], rng)


def _ld1_pathological(p, rng):
    pf, pts = _pf_points(p, rng)
    grid = SGrid(*p["s_grid"])
    rows, ok = [], True
    for a in pts:
        lim = ld1(pf, float(a), p["delta"], grid, p["tol"])
        conv = lim.exists and all(e.converged for e in lim.sides())
        good = conv and abs(lim.value) <= p["bound"]
        ok &= good
        rows.append([_pq(a), float(a), lim.plus.value, lim.minus.value,
                     lim.plus.classification.name, lim.minus.classification.name, good])
    return Outcome(["a", "a_float", "plus", "minus", "plus_class", "minus_class", "ok"], rows,
                   {"converged_and_small": ok},
                   [PlotSpec("ld1_pathological", "a_float", ["plus", "minus"],
                             "ld1 on S", style="points")])


def _nondiff_witness(p, rng):
    pf, pts = _pf_points(p, rng)
    rows, v_zero, big = [], True, True
    for a in pts:
        qs = difference_quotients(pf, a, p["k_max"])
        v_zero &= all(q.quotient_v == 0.0 for q in qs)
        big &= max(q.quotient_u for q in qs) > p["threshold"]
        for q in qs:
            rows.append([_pq(a), float(a), q.k, q.side, q.quotient_u, q.quotient_v, q.lower_bound])
    return Outcome(["a", "a_float", "k", "side", "quotient_u", "quotient_v", "lower_bound"], rows,
                   {"quotient_v_zero": v_zero, "quotient_u_exceeds_threshold": big},
                   [PlotSpec("quotients", "k", ["quotient_u", "lower_bound"],
                             "difference quotients", logy=True, style="points")])


def _taylor_family(name):
    if name == "exp":
        return lambda k: np.exp
    if name == "sin":
        return lambda k: (lambda x, k=k: np.sin(x + k * math.pi / 2))
    if name == "rational":
        # 1/(1+x^2) = Im 1/(x-i), so the k-th derivative is Im (-1)^k k! (x-i)^-(k+1)
        def deriv(k):
            def f(x, k=k):
                z = np.asarray(x, dtype=float) - 1j
                return ((-1) ** k * math.factorial(k) / z ** (k + 1)).imag
            return f
        return deriv
    raise ConfigError(f"params.functions: unknown taylor function {name!r}")


def _taylor(p, rng):
    rows, ok = [], True
    for nm in p["functions"]:
        dk = _taylor_family(nm)
        for n in p["orders"]:
            for x in p["xs"]:
                derivs = [RealFunction(dk(k), -5, 5) for k in range(n + 1)]
                res = taylor(derivs, RealFunction(dk(n + 1), -5, 5), p["a"], x, p["tol"])
                fx = float(dk(0)(np.float64(x)))
                err = abs(fx - res.polynomial_value - res.remainder)
                good = err <= p["tol"] and abs(res.remainder) <= res.bound + p["tol"]
                ok &= good
                rows.append([nm, n, x, fx, res.polynomial_value, res.remainder, res.bound, err, good])
    return Outcome(["function", "n", "x", "f", "polynomial", "remainder", "bound", "abs_err", "ok"],
                   rows, {"identity_and_bound": ok},
                   [PlotSpec("taylor", "n", ["remainder", "bound"], "remainder against bound",
                             style="points", group="function")])


def _poisson_grid(p, rng):
    if p["data"] not in BOUNDARY:
        raise ConfigError(f"params.data: unknown boundary data {p['data']!r}; known: {sorted(BOUNDARY)}")
    Gf, _, exact = BOUNDARY[p["data"]]
    F = DiscFunction(Gf)
    thetas = np.linspace(-math.pi, math.pi, p["theta_count"], endpoint=False).tolist()
    rows, worst = [], 0.0
    for r, th, val in F.table(p["r_list"], thetas):
        ex = exact(r, th) if exact else math.nan
        err = abs(val - ex) if exact else math.nan
        if exact:
            worst = max(worst, err)
        rows.append([r, th, val, ex, err])
    norm_err = max(abs(integrate(lambda t: poisson_kernel(r, t), -math.pi, math.pi, 1e-13).value
                       / (2 * math.pi) - 1.0) for r in p["r_list"])
    res_h = [harmonicity_residual(Gf, 0.5, 0.3, h) for h in (p["h"], p["h"] / 2)]
    asserts = {"kernel_normalised": norm_err <= 1e-8,
               "harmonicity_residual": res_h[0] <= 1e-3 and res_h[0] >= 3.5 * res_h[1]}
    if exact:
        asserts["matches_exact"] = worst <= p["check"]
    return Outcome(["r", "theta", "F", "exact", "abs_err"], rows, asserts,
                   [PlotSpec("poisson_grid", "theta", ["F"], "F(r, theta)", group="r")],
                   {"kernel_norm_err": norm_err, "residuals": res_h})


def _poisson_boundary(p, rng):
    if p["data"] not in BOUNDARY:
        raise ConfigError(f"params.data: unknown boundary data {p['data']!r}; known: {sorted(BOUNDARY)}")
    _, G, _ = BOUNDARY[p["data"]]
    prim = Primitive(RealFunction(G, -math.pi, math.pi), -math.pi, math.pi)
    pts = boundary_convergence(prim, p["r_list"], p["tol"])
    rows = [[b.r, b.distance, b.norm_Fr, b.norm_G] for b in pts]
    d = [b.distance for b in pts]
    return Outcome(["r", "distance", "norm_Fr", "norm_G"], rows,
                   {"distances_decreasing": all(x > y for x, y in zip(d, d[1:])),
                    "norm_contraction": all(b.norm_Fr <= b.norm_G + 1e-6 for b in pts)},
                   [PlotSpec("poisson_boundary", "r", ["distance"], "distance to boundary data",
                             logy=True)])


_EXACT_ODE = {
    "linear": lambda t, prm: [float(prm.get("alpha", [1.0])[0]) * np.exp(float(prm.get("k", 1.0)) * (t - float(prm.get("t0", 0.0))))],
    "oscillator": None,
}


def _gen_ode(p, rng):
    if p["rhs"] not in RHS_CATALOG:
        raise ConfigError(f"params.rhs: unknown system {p['rhs']!r}; known: {sorted(RHS_CATALOG)}")
    sys = system_from_catalog(p["rhs"], p["rhs_params"])
    sol = picard_solve(sys, p["grid_points"], p["tol"])
    t, X = sol.grid, sol.trajectory
    header = ["t"] + [f"x{j + 1}" for j in range(sys.dimension)]
    rows = [[float(ti)] + [float(v) for v in xi] for ti, xi in zip(t, X)]
    ratios = sol.ratios
    asserts = {"converged": sol.final_delta <= p["tol"]}
    big = [r for r, d in zip(ratios, sol.deltas) if d > 1e-9]
    asserts["contraction_ratio"] = all(r <= 0.55 for r in big[1:])
    exact = None
    if p["rhs"] == "linear":
        exact = _EXACT_ODE["linear"](t, p["rhs_params"])
    elif p["rhs"] == "oscillator":
        w = float(p["rhs_params"].get("omega", 1.0))
        t0 = float(p["rhs_params"].get("t0", 0.0))
        x0, v0 = (list(p["rhs_params"].get("alpha", [0.0, 1.0])) + [0.0, 0.0])[:2]
        pos = x0 * np.cos(w * (t - t0)) + v0 / w * np.sin(w * (t - t0))
        exact = [pos, -x0 * w * np.sin(w * (t - t0)) + v0 * np.cos(w * (t - t0))]
    notes = {"step": sol.step, "iterations": sol.iterations, "ratios": ratios}
    if exact is not None:
        err = max(float(np.max(np.abs(X[:, j] - exact[j]))) for j in range(sys.dimension))
        asserts["matches_exact"] = err <= p["check"]
        notes["max_abs_err"] = err
    return Outcome(header, rows, asserts,
                   [PlotSpec("trajectory", "t", header[1:], f"Picard solution ({p['rhs']})",
                             style="lines")], notes)


def _hake(p, rng):
    rows, ok = [], True
    for nm in p["functions"]:
        if nm not in HAKE:
            raise ConfigError(f"params.functions: unknown hake example {nm!r}; known: {sorted(HAKE)}")
        F, expected = HAKE[nm]
        prim = Primitive(RealFunction(F, 0.0, 1.0), 0.0, 1.0)
        est = hake_limit(prim, 1.0, p["tol"], p["count"])
        good = est.classification.name.lower() == expected
        ok &= good
        for c, v in est.samples:
            rows.append([nm, float(c), float(v), est.classification.name, good])
    return Outcome(["function", "c", "increment", "classification", "as_expected"], rows,
                   {"classifications": ok},
                   [PlotSpec("hake", "c", ["increment"], "F(c) - F(0)", group="function")])


def _random_poly(rng, deg=3):
    return np.polynomial.Polynomial(rng.uniform(-1, 1, deg + 1))


def _mean_value(p, rng):
    rows = []
    worst1 = worst2 = 0.0
    cases = [(np.polynomial.Polynomial([0, 1]), np.polynomial.Polynomial([1.0]))]
    for _ in range(p["count"]):
        g = _random_poly(rng, 2)
        g = g - min(0.0, float(np.min(g(np.linspace(0, 1, 2001))))) + 0.01
        cases.append((_random_poly(rng), g))
    for i, (f, g) in enumerate(cases):
        a, b = 0.0, 1.0
        xi = mean_value_xi_first(RealFunction(f, a, b), RealFunction(g, a, b), a, b, p["tol"])
        Ifg = integrate(RealFunction(lambda t: f(t) * g(t), a, b), a, b, 1e-13).value
        Ig = integrate(RealFunction(g, a, b), a, b, 1e-13).value
        r1 = abs(Ifg - float(f(xi)) * Ig)
        # second form: F = primitive of f, G = primitive of g (monotone)
        Fp, Gp = f.integ(), g.integ()
        F = Primitive(RealFunction(Fp, a, b), a, b, density=RealFunction(f, a, b))
        G = Primitive(RealFunction(Gp, a, b), a, b, density=RealFunction(g, a, b))
        xi2 = mean_value_xi_second(F, G, a, b, p["tol"])
        IfG = integrate(RealFunction(lambda t: f(t) * Gp(t), a, b), a, b, 1e-13).value
        rhs = Gp(a) * (Fp(xi2) - Fp(a)) + Gp(b) * (Fp(b) - Fp(xi2))
        r2 = abs(IfG - rhs)
        if i > 0:
            worst1, worst2 = max(worst1, r1), max(worst2, r2)
        rows.append([i, xi, r1, xi2, r2])
    return Outcome(["case", "xi_first", "residual_first", "xi_second", "residual_second"], rows,
                   {"first_residuals": worst1 <= p["check"],
                    "second_residuals": worst2 <= p["check"],
                    "linear_case_half": abs(rows[0][1] - 0.5) <= p["check"]},
                   [PlotSpec("mean_value", "case", ["xi_first", "xi_second"], "mean value points",
                             style="points")])


def _ftc(p, rng):
    rows, worst = [], 0.0
    names = p["functions"]
    for i in range(p["count"]):
        nm = names[i % len(names)]
        f = SMOOTH[nm][0]
        a = float(rng.uniform(-1.0, 0.0))
        x = float(rng.uniform(0.2, 1.0))
        val = ld1_integral(_real(f), a, x, p["tol"], p["delta"])
        exact = float(f(np.float64(x)) - f(np.float64(a)))
        err = abs(val - exact)
        worst = max(worst, err)
        rows.append([nm, a, x, val, exact, err])
    return Outcome(["function", "a", "x", "integral_of_ld1", "increment", "abs_err"], rows,
                   {"round_trip": worst <= p["check"]},
                   [PlotSpec("ftc", "x", ["abs_err"], "FTC round-trip error", logy=True,
                             style="points")])


def _norm(p, rng):
    prim = Primitive(RealFunction(lambda t: -np.cos(t), 0.0, 2 * math.pi), 0.0, 2 * math.pi)
    sin_norm = alexiewicz_norm(prim, 1e-10).value
    rows, ok = [["sin", sin_norm, 2.0]], abs(sin_norm - 2.0) <= 1e-6
    for i in range(p["count"]):
        c = rng.normal(size=4)
        h = RealFunction(lambda t, c=c: c[0] + c[1] * np.sin(3 * t) + c[2] * t * t + c[3] * np.cos(7 * t),
                         0.0, 1.0)
        n_a = alexiewicz_norm(primitive_of(h, 0.0, 1.0), 1e-10).value
        n_1 = integrate(RealFunction(lambda t: np.abs(h(t)), 0, 1), 0.0, 1.0, 1e-11).value
        ok &= n_a <= n_1 + 1e-6
        rows.append([f"random-{i}", n_a, n_1])
    return Outcome(["function", "alexiewicz", "reference"], rows, {"norms": ok}, [])


def _sgrid_defaults():
    g = SGrid()
    return [g.s0, g.ratio, g.count]


REGISTRY = {e.name: e for e in [
    Experiment("svc-measure", _svc_measure, {"depth": 10},
               "n, count, component_length, gap_length, measure (p/q), measure_float, closed_form",
               "SVC(4) component counts, lengths and measures against their closed forms"),
    Experiment("svc-gaps", _svc_gaps, {"depth": 4, "max_level": 4},
               "level, a, b (p/q), a_float, b_float", "gap catalog"),
    Experiment("ld1-smooth", _ld1_smooth,
               {"functions": ["sin"], "points": [], "count": 9, "delta": 0.25,
                "s_grid": _sgrid_defaults(), "tol": 1e-4, "check": 1e-4},
               "function, x, estimate, classical, abs_err, plus, minus",
               "Laplace derivative of smooth functions against f'"),
    Experiment("ld1-pathological", _ld1_pathological,
               {"depth": 20, "count": 10, "delta": 0.05, "s_grid": _sgrid_defaults(),
                "tol": 1e-4, "bound": 0.1},
               "a (p/q), a_float, plus, minus, plus_class, minus_class, ok",
               "Laplace derivative of the SVC pathological function on S"),
    Experiment("nondiff-witness", _nondiff_witness,
               {"depth": 20, "count": 10, "k_max": 10, "threshold": 1e3},
               "a (p/q), a_float, k, side, quotient_u, quotient_v, lower_bound",
               "difference quotient witnesses of non-differentiability on S"),
    Experiment("ftc", _ftc,
               {"functions": ["sin", "exp", "square", "cube", "atan"], "count": 10,
                "tol": 1e-4, "delta": 0.25, "check": 1e-3},
               "function, a, x, integral_of_ld1, increment, abs_err",
               "integral of pointwise ld1 estimates against F(x) - F(a)"),
    Experiment("taylor", _taylor,
               {"functions": ["exp", "sin", "rational"], "orders": [1, 2, 3, 4, 5],
                "xs": [0.25, 0.5, 1.0], "a": 0.0, "tol": 1e-8},
               "function, n, x, f, polynomial, remainder, bound, abs_err, ok",
               "Taylor expansion with integral remainder and its norm bound"),
    Experiment("poisson-grid", _poisson_grid,
               {"data": "cos", "r_list": [0.1, 0.3, 0.5, 0.7, 0.9], "theta_count": 8,
                "h": 1e-2, "check": 1e-6},
               "r, theta, F, exact, abs_err", "Poisson integral on a polar grid"),
    Experiment("poisson-boundary", _poisson_boundary,
               {"data": "square", "r_list": [0.5, 0.9, 0.99], "tol": 1e-8},
               "r, distance, norm_Fr, norm_G", "Alexiewicz distance to boundary data as r -> 1"),
    Experiment("gen-ode", _gen_ode,
               {"rhs": "linear", "rhs_params": {}, "grid_points": 201, "tol": 1e-10, "check": 1e-6},
               "t, x1..xn", "Picard iteration for a cataloged system"),
    Experiment("hake", _hake,
               {"functions": ["sqrt", "oscillating", "constant", "pole"], "tol": 1e-8, "count": 40},
               "function, c, increment, classification, as_expected",
               "improper limits at the right end point"),
    Experiment("mean-value", _mean_value, {"count": 10, "tol": 1e-12, "check": 1e-8},
               "case, xi_first, residual_first, xi_second, residual_second",
               "first and second mean value points"),
    Experiment("norm", _norm, {"count": 10},
               "function, alexiewicz, reference", "Alexiewicz norms against L1 norms"),
]}


def _coerce(name, key, value, default):
    where = f"params.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{where} must be a finite number")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{where} must be a list")
        return value
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be an object")
        return value
    return value


def resolve_params(name: str, params) -> dict:
    """Defaults of experiment ``name`` overlaid with ``params``; unknown keys are errors."""
    if name not in REGISTRY:
        raise ConfigError(f"experiment: unknown name {name!r}; known: {sorted(REGISTRY)}")
    if params is None:
        params = {}
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    exp = REGISTRY[name]
    out = dict(exp.defaults)
    for key, value in params.items():
        if key not in exp.defaults:
            raise ConfigError(f"params.{key}: not a parameter of {name!r}; known: {sorted(exp.defaults)}")
        out[key] = _coerce(name, key, value, exp.defaults[key])
    if "s_grid" in out and (len(out["s_grid"]) != 3):
        raise ConfigError("params.s_grid must be [s0, ratio, count]")
    return out


def run_experiment(name: str, params: dict, seed: int) -> Outcome:
    p = resolve_params(name, params)
    rng = np.random.default_rng(seed)
    return REGISTRY[name].run(p, rng)
