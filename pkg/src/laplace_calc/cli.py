"""Command line front-end: ``laplace-calc run <config.json>``.

A config is a JSON object::

    {"experiment": "ld1-smooth", "params": {"functions": ["sin"]}, "seed": 7}

or a batch ``{"experiments": [{"experiment": ..., "params": ...}, ...]}``
whose members are written to numbered subdirectories of the output
directory and may run concurrently.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from .errors import ConfigError, LaplaceCalcError
from .experiments import REGISTRY, resolve_params, run_experiment
from .plotting import gnuplot_script, render_figures

TOP_KEYS = {"experiment", "params", "seed", "out", "experiments", "figures"}
ITEM_KEYS = {"experiment", "params", "name"}
THREADS_ENV = "LAPLACE_CALC_THREADS"


def format_cell(v) -> str:
    """CSV cell: 17 significant digits for floats, ``p/q`` for rationals."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_cell(v) for v in r])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed: must be an integer in [0, 2**64), got {seed!r}")
    return seed


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    if not text.strip():
        raise ConfigError("config: file is empty; expected a JSON object with 'experiment'")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    return cfg


def plan(cfg: dict) -> list:
    """Validate a config; returns ``[(label, name, params), ...]``."""
    for key in cfg:
        if key not in TOP_KEYS:
            raise ConfigError(f"{key}: unknown config field; known: {sorted(TOP_KEYS)}")
    if "experiment" in cfg and "experiments" in cfg:
        raise ConfigError("experiments: give either 'experiment' or 'experiments', not both")
    if "experiment" in cfg:
        name = cfg["experiment"]
        if not isinstance(name, str):
            raise ConfigError("experiment: must be a string")
        return [(None, name, resolve_params(name, cfg.get("params")))]
    if "params" in cfg:
        raise ConfigError("params: only allowed together with 'experiment'")
    items = cfg.get("experiments")
    if items is None:
        raise ConfigError("experiment: missing; expected one of " + ", ".join(sorted(REGISTRY)))
    if not isinstance(items, list) or not items:
        raise ConfigError("experiments: must be a non-empty list")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ConfigError(f"experiments[{i}]: must be an object")
        for key in item:
            if key not in ITEM_KEYS:
                raise ConfigError(f"experiments[{i}].{key}: unknown field")
        name = item.get("experiment")
        if not isinstance(name, str):
            raise ConfigError(f"experiments[{i}].experiment: missing or not a string")
        try:
            params = resolve_params(name, item.get("params"))
        except ConfigError as exc:
            raise ConfigError(f"experiments[{i}].{exc}") from exc
        label = item.get("name", f"{i:02d}-{name}")
        if not isinstance(label, str) or not label or os.sep in label:
            raise ConfigError(f"experiments[{i}].name: must be a plain directory name")
        out.append((label, name, params))
    labels = [p[0] for p in out]
    if len(set(labels)) != len(labels):
        raise ConfigError("experiments: names must be unique")
    return out


def thread_count(n_jobs: int) -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV}: not an integer: {raw!r}") from exc
    if n < 0:
        raise ConfigError(f"{THREADS_ENV}: must be >= 0, got {n}")
    if n == 0:
        n = os.cpu_count() or 1
    return max(1, min(n, n_jobs))


def run_one(name: str, params: dict, seed: int, out_dir: str, figures: bool) -> dict:
    """Run one experiment and write results.csv, summary.json and plot.gp to ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.perf_counter()
    summary = {"experiment": name, "seed": seed, "params": _jsonable(params)}
    try:
        outcome = run_experiment(name, params, seed)
    except ConfigError:
        raise
    except (LaplaceCalcError, ValueError) as exc:
        summary.update(passed=False, error=f"{type(exc).__name__} in {name}: {exc}",
                       assertions={}, timings={"total_s": time.perf_counter() - t0})
        _write_json(os.path.join(out_dir, "summary.json"), summary)
        return summary
    t_run = time.perf_counter() - t0
    with open(os.path.join(out_dir, "results.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(outcome.header, outcome.rows))
    with open(os.path.join(out_dir, "plot.gp"), "w", encoding="utf-8") as fh:
        fh.write(gnuplot_script(outcome))
    pngs = render_figures(outcome, out_dir) if figures else []
    asserts = {k: bool(v) for k, v in outcome.assertions.items()}
    summary.update(
        passed=all(asserts.values()),
        assertions=asserts,
        columns=list(outcome.header),
        rows=len(outcome.rows),
        figures=pngs,
        notes=_jsonable(outcome.notes),
        timings={"experiment_s": t_run, "total_s": time.perf_counter() - t0},
    )
    _write_json(os.path.join(out_dir, "summary.json"), summary)
    return summary


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg: dict, out: str | None = None, seed: int | None = None,
        figures: bool | None = None) -> int:
    """Execute a parsed config; returns the process exit status."""
    jobs = plan(cfg)
    seed = _check_seed(cfg.get("seed", 0) if seed is None else seed)
    out = out or cfg.get("out", "out")
    if not isinstance(out, str):
        raise ConfigError("out: must be a string path")
    if figures is None:
        figures = cfg.get("figures", True)
        if not isinstance(figures, bool):
            raise ConfigError("figures: must be a boolean")
    if len(jobs) == 1 and jobs[0][0] is None:
        _, name, params = jobs[0]
        summary = run_one(name, params, seed, out, figures)
        _report(summary)
        return 0 if summary["passed"] else 1
    workers = thread_count(len(jobs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(run_one, name, params, seed, os.path.join(out, label), figures)
                for label, name, params in jobs]
        results = [f.result() for f in futs]
    for s in results:
        _report(s)
    os.makedirs(out, exist_ok=True)
    _write_json(os.path.join(out, "summary.json"),
                {"passed": all(s["passed"] for s in results),
                 "experiments": {label: {"experiment": s["experiment"], "passed": s["passed"]}
                                 for (label, _, _), s in zip(jobs, results)}})
    return 0 if all(s["passed"] for s in results) else 1


def _report(summary):
    status = "PASS" if summary["passed"] else "FAIL"
    extra = summary.get("error") or ", ".join(
        f"{k}={'ok' if v else 'FAILED'}" for k, v in summary["assertions"].items())
    print(f"{status} {summary['experiment']}: {extra}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="laplace-calc",
                                 description="Laplace derivative and integral experiments")
    ap.add_argument("--list-experiments", action="store_true",
                    help="list experiment names, their CSV columns and defaults")
    sub = ap.add_subparsers(dest="command")
    rp = sub.add_parser("run", help="run the experiment(s) in a JSON config")
    rp.add_argument("config")
    rp.add_argument("--out", default=None, help="output directory (default: config 'out' or ./out)")
    rp.add_argument("--seed", type=int, default=None, help="seed for randomized suites (u64)")
    rp.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    return ap


def list_experiments() -> str:
    lines = []
    for name, e in REGISTRY.items():
        lines.append(f"{name}: {e.doc}")
        lines.append(f"    columns: {e.columns}")
        lines.append(f"    defaults: {json.dumps(e.defaults)}")
    return "\n".join(lines)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list_experiments:
        print(list_experiments())
        return 0
    if args.command != "run":
        ap.print_help(sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        return run(cfg, args.out, args.seed, False if args.no_figures else None)
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
