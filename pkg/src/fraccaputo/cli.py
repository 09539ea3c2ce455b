"""Benchmark command line: tables, error curves, convergence sweeps.

Subcommands: tail-table, soe-error, convergence, solve, property-suite.
Curves and tables go to CSV (header row plus a leading ``#`` comment line
recording the full configuration, 6 significant digits, values below
1e-15 printed as 0 where noted); single runs and property ledgers go to
JSON.  Exit codes: 0 ok, 2 bad configuration, 3 property failure,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .pde import SpaceGrid, manufactured_problem, nonlinear_problem, solve
from .property_suite import run_property_suite
from .quadrature import ConstructionError
from .schemes import TimeGrid
from .soe import SoEParams, build_soe, soe_eval, tail_integral

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PROPERTY = 3
EXIT_NUMERICAL = 4

#: mode-count shorthands: ladder (a, b, n1, n2) per target N
MODE_TABLE = {
    9: (3, 10, 2, 1),
    25: (3, 10, 4, 3),
    40: (3, 15, 4, 3),
}

DEFAULTS = {
    "alpha": 0.1,
    "dt": 1e-1,
    "h": 1e-3,
    "T": 1.0,
    "scheme": "fidr",
    "soe_a": 3,
    "soe_b": 10,
    "soe_n1": 4,
    "soe_n2": 3,
    "problem": "manufactured",
    "seed": 42,
    "levels": 4,
    "samples": 200,
    "x_lo": -1.0,
    "x_hi": 1.0,
}


def _fmt(v: float) -> str:
    return f"{v:.5e}"


def _fmt_zero(v: float) -> str:
    return "0" if abs(v) < 1e-15 else _fmt(v)


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _csv(config: dict, header: list, rows: list) -> str:
    lines = ["# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _cfg(args, key):
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if args.config_data and key in args.config_data:
        return args.config_data[key]
    return DEFAULTS[key]


def _soe_params(args) -> SoEParams:
    if getattr(args, "modes", None) is not None:
        try:
            a, b, n1, n2 = MODE_TABLE[args.modes]
        except KeyError:
            raise ValueError(
                f"no ladder preset for N={args.modes}; pass --soe-a/b/n1/n2 instead"
            ) from None
        return SoEParams.from_ladder(a, b, n1, n2)
    return SoEParams.from_ladder(
        int(_cfg(args, "soe_a")), int(_cfg(args, "soe_b")),
        int(_cfg(args, "soe_n1")), int(_cfg(args, "soe_n2")),
    )


# ---------------------------------------------------------------------------
# subcommands

def cmd_tail_table(args) -> int:
    """Dropped-tail magnitudes on the (t, p) grid t=2^-5..2^-10, p=2^5..2^20."""
    beta = 1.1
    t_exps = range(-5, -11, -1)
    p_exps = (5, 10, 15, 20)
    config = {"command": "tail-table", "beta": beta}
    header = ["t"] + [f"p=2^{e}" for e in p_exps]
    rows = []
    for te in t_exps:
        t = 2.0 ** te
        cells = [_fmt_zero(tail_integral(beta, 2.0 ** pe, t)) for pe in p_exps]
        rows.append([f"2^{te}"] + cells)
    _write_text(args.out, _csv(config, header, rows))
    return EXIT_OK


def cmd_soe_error(args) -> int:
    """Kernel-compression error curves of both fast schemes on [1e-3, 1]."""
    alpha = float(_cfg(args, "alpha"))
    params = _soe_params(args)
    n_samples = int(_cfg(args, "samples"))
    delta, horizon = 1e-3, 1.0
    fir = build_soe(1.0 + alpha, params, delta, horizon)
    fidr = build_soe(alpha, params, delta, horizon)
    t = np.geomspace(delta, horizon, n_samples)
    fir_err = alpha * np.abs(t ** -(1.0 + alpha) - soe_eval(fir, t))
    fidr_err = np.abs(t ** -alpha - soe_eval(fidr, t))
    config = {"command": "soe-error", "alpha": alpha, "n_modes": params.n_modes,
              "a": params.ladder_lo, "b": params.n_hi, "n1": params.n1, "n2": params.n2,
              "delta": delta, "horizon": horizon, "samples": n_samples}
    rows = [[_fmt(ti), _fmt(fi), _fmt(di)] for ti, fi, di in zip(t, fir_err, fidr_err)]
    _write_text(args.out, _csv(config, ["t", "fir_err_alpha", "fidr_err"], rows))
    return EXIT_OK


def _one_convergence_run(task) -> tuple:
    scheme, n_modes, dt, alpha, h, T, x_lo, x_hi, problem_name = task
    problem = (manufactured_problem(alpha) if problem_name == "manufactured"
               else nonlinear_problem(alpha, x_lo, x_hi))
    if problem.exact is None:
        raise ValueError("convergence sweep needs a problem with an exact solution")
    tgrid = TimeGrid(dt, round(T / dt))
    sgrid = SpaceGrid.from_spacing(problem.x_lo, problem.x_hi, h)
    params = (SoEParams.from_ladder(*MODE_TABLE[n_modes])
              if scheme in ("fir", "fidr") else None)
    report = solve(problem, tgrid, sgrid, scheme, params)
    return scheme, n_modes, dt, report.related_error


def cmd_convergence(args) -> int:
    """Related error versus dt for the fast schemes (N in {9, 25}) and the
    binomial baseline, halving dt ``levels`` times from the starting value."""
    alpha = float(_cfg(args, "alpha"))
    h = float(_cfg(args, "h"))
    T = float(_cfg(args, "T"))
    dt0 = float(_cfg(args, "dt"))
    levels = int(_cfg(args, "levels"))
    dts = [dt0 * 0.5 ** k for k in range(levels)]
    tasks = []
    # one row per (scheme, mode count, dt); the mode count is carried along
    # for the storage-hungry baseline too, which ignores it
    for scheme in ("fidr", "fir", "gl"):
        for n_modes in (9, 25):
            for dt in dts:
                tasks.append((scheme, n_modes, dt, alpha, h, T,
                              _cfg(args, "x_lo"), _cfg(args, "x_hi"), "manufactured"))
    jobs = args.jobs
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_one_convergence_run, t) for t in tasks]
            for t, fut in zip(tasks, futs):
                try:
                    results.append(fut.result() + ("ok",))
                except Exception as exc:
                    results.append((t[0], t[1], t[2], math.nan, f"failed: {exc}"))
    else:
        for t in tasks:
            try:
                results.append(_one_convergence_run(t) + ("ok",))
            except Exception as exc:
                results.append((t[0], t[1], t[2], math.nan, f"failed: {exc}"))
    config = {"command": "convergence", "alpha": alpha, "h": h, "T": T,
              "dts": dts, "schemes": ["fidr", "fir", "gl"], "mode_counts": [9, 25]}
    rows = [
        [scheme, str(n_modes), _fmt(dt),
         "" if err is None or (isinstance(err, float) and math.isnan(err)) else _fmt(err),
         status]
        for scheme, n_modes, dt, err, status in results
    ]
    _write_text(args.out, _csv(config, ["scheme", "n_modes", "dt", "related_error", "status"], rows))
    return EXIT_OK


def cmd_solve(args) -> int:
    """One full run, reported as JSON."""
    alpha = float(_cfg(args, "alpha"))
    dt = float(_cfg(args, "dt"))
    h = float(_cfg(args, "h"))
    T = float(_cfg(args, "T"))
    scheme = str(_cfg(args, "scheme")).lower()
    problem_name = str(_cfg(args, "problem"))
    if problem_name == "manufactured":
        problem = manufactured_problem(alpha)
    elif problem_name == "nonlinear":
        problem = nonlinear_problem(alpha, float(_cfg(args, "x_lo")), float(_cfg(args, "x_hi")))
    else:
        raise ValueError(f"unknown problem {problem_name!r}")
    tgrid = TimeGrid(dt, round(T / dt))
    sgrid = SpaceGrid.from_spacing(problem.x_lo, problem.x_hi, h)
    params = _soe_params(args) if scheme in ("fir", "fidr") else None
    report = solve(problem, tgrid, sgrid, scheme, params)
    payload = {"command": "solve", "alpha": alpha, "problem": problem_name}
    payload.update(report.to_dict(include_snapshots=args.snapshots))
    _write_text(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_property_suite(args) -> int:
    """Seeded inequality suites; nonzero exit when any suite fails."""
    seed = int(_cfg(args, "seed"))
    ledger = run_property_suite(seed, quick=args.quick)
    _write_text(args.out, json.dumps(ledger, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if ledger["all_pass"] else EXIT_PROPERTY


# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--config", default=None, help="JSON file with defaults")
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("FRACCAPUTO_JOBS", "1")),
                   help="parallel runs for sweeps (env FRACCAPUTO_JOBS)")
    p.add_argument("--seed", type=int, default=None)


def _add_soe_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--soe-a", type=int, default=None, help="ladder start exponent a")
    p.add_argument("--soe-b", type=int, default=None, help="ladder top exponent b")
    p.add_argument("--soe-n1", type=int, default=None, help="low-band rule nodes")
    p.add_argument("--soe-n2", type=int, default=None, help="Legendre nodes per interval")
    p.add_argument("--modes", type=int, default=None,
                   help=f"mode-count preset, one of {sorted(MODE_TABLE)}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraccaputo",
        description="Fast fractional-derivative evaluation benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tail-table", help="dropped-tail magnitude table")
    _add_common(p)
    p.set_defaults(func=cmd_tail_table)

    p = sub.add_parser("soe-error", help="kernel-compression error curves")
    _add_common(p)
    _add_soe_flags(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=cmd_soe_error)

    p = sub.add_parser("convergence", help="related error versus dt sweep")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--dt", type=float, default=None, help="largest step of the ladder")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--levels", type=int, default=None, help="number of halvings")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("solve", help="single run, JSON report")
    _add_common(p)
    _add_soe_flags(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--scheme", choices=("l1", "fir", "fidr", "gl"), default=None)
    p.add_argument("--problem", choices=("manufactured", "nonlinear"), default=None)
    p.add_argument("--x-lo", type=float, default=None)
    p.add_argument("--x-hi", type=float, default=None)
    p.add_argument("--snapshots", action="store_true", help="embed field snapshots")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("property-suite", help="seeded inequality checks")
    _add_common(p)
    p.add_argument("--quick", action="store_true", help="thin the dense scans")
    p.set_defaults(func=cmd_property_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.config_data = None
    if args.config:
        try:
            with open(args.config) as fh:
                args.config_data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
            return EXIT_VALIDATION
    try:
        return args.func(args)
    except ValueError as exc:
        print(json.dumps({"error": "validation", "detail": str(exc)}), file=sys.stderr)
        return EXIT_VALIDATION
    except (ConstructionError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(json.dumps({"error": "numerical", "detail": str(exc)}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
