"""Command-line front door.

Subcommands:

* ``center``    -- print a concentration center (volume or sine mode).
* ``bound``     -- print a sufficient-measurement-count bound.
* ``geometry``  -- volumes / principal angles / log sine products of
  matrices read from CSV or JSON files.
* ``simulate``  -- run a seeded experiment; writes a CSV and a JSON summary
  (atomically), optionally a rendered figure.

Exit codes: 0 success, 1 statistical acceptance failure (simulate),
2 usage/shape/parse errors, 3 rank-deficient or non-disjoint geometry
inputs. stdout carries only requested values and output paths; everything
else goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import (
    GrassvolError,
    MatrixFormatError,
    NotDisjoint,
    RankDeficient,
)
from .experiments import (
    ExperimentConfig,
    run_bartlett_equivalence,
    run_fig1_surface,
    run_lemma1_concentration,
    run_perturbation_check,
    run_theorem2_scatter,
)
from .geometry import Subspace, log_product_principal_sines, log_volume, principal_angles
from .matrixio import atomic_write_text, format_float, read_matrix
from .theory import (
    BoundParams,
    measurement_bound_corollary1,
    measurement_bound_davies,
    measurement_bound_theorem1,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

# Desk-scale defaults: small enough for a laptop/CI run, matching the
# statistical acceptance configurations.
DESK_DEFAULTS = {
    "fig1": {
        "m_grid": list(range(500, 5001, 500)),
        "d_grid": list(range(10, 71, 10)),
    },
    "lemma1": {"n": 1000, "d": 20, "m": [200], "trials": 5000},
    "bartlett": {"n": 300, "d": 8, "m": [100], "trials": 20000},
    "theorem2": {"n": 400, "k": 5, "m": [100, 200], "trials": 2000},
    "perturbation": {"n": 200, "k": 20, "d": 8, "trials": 500},
}

# Long-running reference configurations. Documented presets, not CI gates.
PRESETS = {
    "lemma1-large": {
        "experiment": "lemma1",
        "n": 10000,
        "d": 50,
        "m": [100, 200, 500, 1000, 2000, 3000, 4000, 5000],
        "trials": 1000,
    },
    "theorem2-large-m500-k10": {
        "experiment": "theorem2",
        "n": 5000,
        "k": 10,
        "m": [500],
        "trials": 800,
        "pairs_per_set": 100,
        "theta_min": 0.35,
    },
    "theorem2-large-m1000-k10": {
        "experiment": "theorem2",
        "n": 5000,
        "k": 10,
        "m": [1000],
        "trials": 800,
        "pairs_per_set": 100,
        "theta_min": 0.35,
    },
    "theorem2-large-m500-k20": {
        "experiment": "theorem2",
        "n": 5000,
        "k": 20,
        "m": [500],
        "trials": 800,
        "pairs_per_set": 100,
        "theta_min": 0.9,
    },
    "theorem2-large-m1000-k20": {
        "experiment": "theorem2",
        "n": 5000,
        "k": 20,
        "m": [1000],
        "trials": 800,
        "pairs_per_set": 100,
        "theta_min": 0.9,
    },
}


def _emit(text: str, args) -> None:
    """Print `text`, or write it to --out and print the path instead."""
    out = getattr(args, "out", None)
    if out:
        atomic_write_text(out, text + "\n")
        print(out)
    else:
        print(text)


def _value_text(value: float, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"value": value})
    return format_float(value)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return format_float(v)


def _write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_int_list(values) -> list[int]:
    out = []
    for chunk in values:
        for piece in str(chunk).split(","):
            piece = piece.strip()
            if piece:
                out.append(int(piece))
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grassvol",
        description="Volume-preserving subspace compression: closed forms, "
        "geometry, and seeded verification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_center = sub.add_parser("center", help="print a concentration center")
    p_center.add_argument("--mode", choices=("volume", "sine"), required=True)
    p_center.add_argument("--m", type=int, required=True,
                          help="number of measurements")
    p_center.add_argument("--d", type=int, help="parallelotope dimension "
                          "(volume mode)")
    p_center.add_argument("--k", type=int, help="subspace dimension "
                          "(sine mode)")
    p_center.add_argument("--format", choices=("csv", "json"), default="csv")
    p_center.add_argument("--out", help="write the value here instead of stdout")

    p_bound = sub.add_parser("bound", help="print a measurement-count bound")
    p_bound.add_argument("--formula", choices=("theorem1", "corollary1",
                                               "davies"), required=True)
    p_bound.add_argument("--L", type=int, help="number of subspaces")
    p_bound.add_argument("--L-bar", type=int, dest="L_bar",
                         help="number of subspace pairs (corollary1); "
                         "defaults to L(L-1)/2")
    p_bound.add_argument("--k", type=int, required=True)
    p_bound.add_argument("--d", type=int)
    p_bound.add_argument("--eps", type=float)
    p_bound.add_argument("--t", type=float, required=True)
    p_bound.add_argument("--C", type=float, default=None)
    p_bound.add_argument("--C-prime", type=float, default=None, dest="C_prime")
    p_bound.add_argument("--C-s", type=float, default=0.5, dest="C_s",
                         help="volume floor recorded with theorem1 params")
    p_bound.add_argument("--delta", type=float, help="isometry constant "
                         "(davies)")
    p_bound.add_argument("--c", type=float, default=1.0,
                         help="concentration constant (davies)")
    p_bound.add_argument("--pairwise", action="store_true",
                         help="davies: bound the pairwise-distance variant")
    p_bound.add_argument("--format", choices=("csv", "json"), default="csv")
    p_bound.add_argument("--out", help="write the value here instead of stdout")

    p_geom = sub.add_parser("geometry", help="operate on matrix files")
    p_geom.add_argument("--op", choices=("volume", "angles", "sines"),
                        required=True)
    p_geom.add_argument("paths", nargs="+", help="matrix files (CSV or "
                        ".json); volume takes one, angles/sines take two")
    p_geom.add_argument("--format", choices=("csv", "json"), default="csv")
    p_geom.add_argument("--out", help="write the result here instead of stdout")

    p_sim = sub.add_parser("simulate", help="run a seeded experiment")
    p_sim.add_argument("--experiment", choices=("fig1", "lemma1", "bartlett",
                                                "theorem2", "perturbation"))
    p_sim.add_argument("--preset", choices=sorted(PRESETS),
                       help="start from a documented long-running config")
    p_sim.add_argument("--config", help="JSON file with option defaults; "
                       "explicit flags override it")
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--d", type=int)
    p_sim.add_argument("--m", action="append", help="measurement count; "
                       "repeat or comma-separate for several")
    p_sim.add_argument("--m-grid", action="append", dest="m_grid",
                       help="fig1 m grid (comma-separated)")
    p_sim.add_argument("--d-grid", action="append", dest="d_grid",
                       help="fig1 d grid (comma-separated)")
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--seed", type=int, default=0,
                       help="master seed (decimal unsigned 64-bit)")
    p_sim.add_argument("--out", help="CSV output path; the JSON summary "
                       "lands next to it with a .json suffix")
    p_sim.add_argument("--threads", type=int, default=1,
                       help="trial parallelism; output is identical for "
                       "any value")
    p_sim.add_argument("--plot", action="store_true",
                       help="also render a figure next to the CSV")
    p_sim.add_argument("--cs", type=float, dest="C_s",
                       help="volume floor (perturbation)")
    p_sim.add_argument("--delta0", type=float,
                       help="perturbation radius (perturbation)")
    p_sim.add_argument("--delta-s2", type=float, dest="delta_s2",
                       help="envelope slack (perturbation)")
    p_sim.add_argument("--c-phi", type=float, dest="C_phi",
                       help="operator-norm constant recorded in the "
                       "envelope (perturbation)")
    p_sim.add_argument("--sine-floor", type=float, dest="log_sine_floor",
                       help="minimum log sine product (theorem2)")
    p_sim.add_argument("--theta-min", type=float, dest="theta_min",
                       help="smallest sampled principal angle (theorem2)")
    p_sim.add_argument("--pairs-per-set", type=int, dest="pairs_per_set",
                       help="pairs sharing each angle set (theorem2)")
    p_sim.add_argument("--global-phi", action="store_const", const=True,
                       default=None, dest="global_phi",
                       help="theorem2: share one measurement matrix per m "
                       "instead of one per angle set")
    return parser


def _cmd_center(args) -> int:
    from .theory import sine_product_center, volume_ratio_center

    if args.mode == "volume":
        if args.d is None:
            raise GrassvolError("volume mode requires --d")
        value = volume_ratio_center(args.m, args.d)
    else:
        if args.k is None:
            raise GrassvolError("sine mode requires --k")
        value = sine_product_center(args.m, args.k)
    _emit(_value_text(value, args.format), args)
    return EXIT_OK


def _cmd_bound(args) -> int:
    if args.formula == "davies":
        if args.L is None or args.delta is None:
            raise GrassvolError("davies requires --L and --delta")
        value = measurement_bound_davies(
            args.L, args.k, args.delta, args.t, args.c, pairwise=args.pairwise
        )
        _emit(_value_text(value, args.format), args)
        return EXIT_OK
    c = args.C
    c_prime = args.C_prime
    if c is None or c_prime is None:
        print(
            "warning: C/C' left at the non-normative demonstration default 1; "
            "the underlying constants are existence-only",
            file=sys.stderr,
        )
        c = 1.0 if c is None else c
        c_prime = 1.0 if c_prime is None else c_prime
    if args.eps is None:
        raise GrassvolError(f"{args.formula} requires --eps")
    if args.formula == "theorem1":
        if args.L is None or args.d is None:
            raise GrassvolError("theorem1 requires --L and --d")
        params = BoundParams(L=args.L, k=args.k, d=args.d, eps=args.eps,
                             t=args.t, C_s=args.C_s, C=c, C_prime=c_prime)
        value = measurement_bound_theorem1(params)
    else:
        l_bar = args.L_bar
        if l_bar is None:
            if args.L is None:
                raise GrassvolError("corollary1 requires --L or --L-bar")
            l_bar = args.L * (args.L - 1) // 2
        value = measurement_bound_corollary1(l_bar, args.k, args.eps, args.t,
                                             c, c_prime)
    _emit(_value_text(value, args.format), args)
    return EXIT_OK


def _cmd_geometry(args) -> int:
    want = 1 if args.op == "volume" else 2
    if len(args.paths) != want:
        raise GrassvolError(f"--op {args.op} takes exactly {want} matrix "
                            f"file(s), got {len(args.paths)}")
    matrices = [read_matrix(p) for p in args.paths]
    if args.op == "volume":
        _emit(_value_text(log_volume(matrices[0]).log_value, args.format), args)
        return EXIT_OK
    x, y = (Subspace(m) for m in matrices)
    if args.op == "angles":
        angles = principal_angles(x, y).angles
        if args.format == "json":
            _emit(json.dumps({"angles": [float(a) for a in angles]}), args)
        else:
            _emit(",".join(format_float(a) for a in angles), args)
        return EXIT_OK
    _emit(_value_text(log_product_principal_sines(x, y), args.format), args)
    return EXIT_OK


def _merge_simulate_options(args) -> dict:
    """Option precedence: built-in desk defaults < preset < config file <
    explicit flags."""
    opts: dict = {}
    if args.preset:
        opts.update(PRESETS[args.preset])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise GrassvolError(f"cannot read config {args.config}: {exc}")
        if not isinstance(loaded, dict):
            raise GrassvolError(f"config {args.config} must hold a JSON object")
        opts.update(loaded)
    flag_keys = (
        "experiment", "n", "k", "d", "trials", "C_s", "delta0", "delta_s2",
        "C_phi", "log_sine_floor", "theta_min", "pairs_per_set", "global_phi",
    )
    for key in flag_keys:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if args.m:
        opts["m"] = _parse_int_list(args.m)
    if args.m_grid:
        opts["m_grid"] = _parse_int_list(args.m_grid)
    if args.d_grid:
        opts["d_grid"] = _parse_int_list(args.d_grid)
    experiment = opts.get("experiment")
    if experiment is None:
        raise GrassvolError("simulate needs --experiment (or a preset/config "
                            "that names one)")
    if experiment not in DESK_DEFAULTS:
        raise GrassvolError(f"unknown experiment {experiment!r}")
    merged = dict(DESK_DEFAULTS[experiment])
    merged.update(opts)
    merged["experiment"] = experiment
    return merged


_EXTRA_KEYS = ("C_s", "delta0", "delta_s2", "C_phi", "log_sine_floor",
               "theta_min", "pairs_per_set", "global_phi")


def _run_simulation(opts: dict, seed: int, threads: int):
    experiment = opts["experiment"]
    if experiment == "fig1":
        return run_fig1_surface(opts["m_grid"], opts["d_grid"])
    extra = {k: opts[k] for k in _EXTRA_KEYS if k in opts}
    m_values = tuple(opts.get("m") or ())
    cfg = ExperimentConfig(
        name=experiment,
        n=int(opts["n"]),
        m_values=m_values,
        k=int(opts.get("k", opts.get("d", 1))),
        d=int(opts.get("d", opts.get("k", 1))),
        trials=int(opts["trials"]),
        master_seed=seed,
        extra=extra,
    )
    runner = {
        "lemma1": run_lemma1_concentration,
        "bartlett": run_bartlett_equivalence,
        "theorem2": run_theorem2_scatter,
        "perturbation": run_perturbation_check,
    }[experiment]
    return runner(cfg, threads=threads)


def _cmd_simulate(args) -> int:
    opts = _merge_simulate_options(args)
    result = _run_simulation(opts, args.seed, max(1, args.threads))
    out = Path(args.out) if args.out else Path(f"{result.experiment}.csv")
    _write_csv(out, result.csv_header, result.csv_rows)
    summary_path = out.with_suffix(".json")
    atomic_write_text(
        summary_path,
        json.dumps(result.summary_json(), indent=2, sort_keys=True) + "\n",
    )
    print(out)
    print(summary_path)
    if args.plot:
        from . import figures

        fig_path = out.with_suffix(".png")
        figures.render(result, fig_path)
        print(fig_path)
    if not result.passed:
        print(f"{result.experiment}: statistical acceptance FAILED",
              file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "center": _cmd_center,
        "bound": _cmd_bound,
        "geometry": _cmd_geometry,
        "simulate": _cmd_simulate,
    }[args.command]
    try:
        return handler(args)
    except (RankDeficient, NotDisjoint) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (GrassvolError, MatrixFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
