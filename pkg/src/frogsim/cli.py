"""Command-line front end: simulate, det, limits, experiment subcommands.

Data goes to --out (or stdout); diagnostics go to stderr.  Exit codes:
0 success (including flagged non-convergence), 1 I/O failure, 2 usage.
FROGSIM_SEED provides a default seed when --seed is absent.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import chain, dynamics, harness

_MODEL = {"geom": "geometric", "nongeom": "nongeometric"}


def _default_seed() -> int:
    return int(os.environ.get("FROGSIM_SEED", "0"))


def _g17(x: float) -> str:
    return format(x, ".17g")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _trajectory_text(states: list[chain.ChainState], fmt: str) -> str:
    if fmt == "json":
        rows = [
            {"t": s.t, "I": s.unvisited, "A": s.active, "D": s.dead} for s in states
        ]
        return json.dumps({"rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "I", "A", "D"])
    for s in states:
        w.writerow([s.t, s.unvisited, s.active, s.dead])
    return buf.getvalue()


def _orbit_text(states: list[dynamics.DetState], fmt: str) -> str:
    if fmt == "json":
        rows = [
            {"t": s.t, "iota": s.iota, "alpha": s.alpha, "delta": s.delta}
            for s in states
        ]
        return json.dumps({"rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "iota", "alpha", "delta"])
    for s in states:
        w.writerow([s.t, _g17(s.iota), _g17(s.alpha), _g17(s.delta)])
    return buf.getvalue()


def cmd_simulate(args) -> int:
    params = chain.ModelParams(n=args.n, kind=_MODEL[args.model], p=args.p)
    rng = chain.replication_rng(args.seed, 0)
    states = chain.simulate_trajectory(params, args.tmax, rng)
    _emit(_trajectory_text(states, args.format), args.out)
    return 0


def cmd_det(args) -> int:
    kind = _MODEL[args.model]
    p = args.p if kind == "geometric" else None
    if args.until_alpha is not None:
        res = dynamics.iterate_limit(args.n, kind, p, alpha_tol=args.until_alpha)
        print(
            f"iota_inf={_g17(res.iota_inf)} delta_inf={_g17(res.delta_inf)} "
            f"steps={res.steps_used} converged={str(res.converged).lower()}"
        )
        return 0
    states = dynamics.det_orbit(args.n, kind, args.tmax, p)
    _emit(_orbit_text(states, args.format), args.out)
    return 0


def cmd_limits(args) -> int:
    if not 0.0 < args.p < 1.0:
        raise SystemExit(2)
    lines = []
    if args.n is not None:
        lines.append(f"iota_inf_N={_g17(dynamics.fixed_point_tauN(args.p, args.n))}")
    if args.closed_form or args.n is None:
        lines.append(f"iota_inf={_g17(dynamics.iota_infinity(args.p))}")
    _emit("".join(line + "\n" for line in lines), args.out)
    return 0


def _parse_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v)


def cmd_experiment(args) -> int:
    file_vals = _parse_config_file(args.config) if args.config else {}

    def pick(flag_val, key, conv, default):
        if flag_val is not None:
            return flag_val
        if key in file_vals:
            return conv(file_vals[key])
        return default

    kind = pick(args.kind, "kind", str, None)
    if kind is None:
        print("experiment: missing kind", file=sys.stderr)
        return 2
    model_flag = pick(args.model, "model", str, "nongeom")
    cfg = harness.ExperimentConfig(
        kind=kind,
        model=_MODEL.get(model_flag, model_flag),
        p_values=pick(args.p, "p", _float_list, (0.5,)),
        n_values=pick(args.n, "n", _int_list, (100,)),
        t_max=pick(args.tmax, "tmax", int, 20),
        replications=pick(args.reps, "reps", int, 100),
        seed=pick(args.seed, "seed", int, _default_seed()),
    )
    summary = harness.run_experiment(cfg)
    text = (
        harness.summary_to_csv(summary)
        if args.format == "csv"
        else harness.summary_to_json(summary)
    )
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frogsim",
        description="Frog-model chains on the complete graph, their "
        "deterministic limits, and Monte Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=_default_seed())

    p_sim = sub.add_parser("simulate", help="sample one chain trajectory")
    p_sim.add_argument("--model", choices=("geom", "nongeom"), required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--p", type=float, default=1.0)
    p_sim.add_argument("--tmax", type=int, required=True)
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_det = sub.add_parser("det", help="run a deterministic orbit")
    p_det.add_argument("--model", choices=("geom", "nongeom"), required=True)
    p_det.add_argument("--n", type=int, required=True)
    p_det.add_argument("--p", type=float, default=1.0)
    p_det.add_argument("--tmax", type=int, default=None)
    p_det.add_argument("--until-alpha", type=float, default=None, dest="until_alpha")
    add_common(p_det)
    p_det.set_defaults(func=cmd_det)

    p_lim = sub.add_parser("limits", help="long-run unvisited-fraction limits")
    p_lim.add_argument("--p", type=float, required=True)
    p_lim.add_argument("--n", type=int, default=None)
    p_lim.add_argument("--closed-form", action="store_true", dest="closed_form")
    p_lim.add_argument("--out", default=None)
    p_lim.set_defaults(func=cmd_limits)

    p_exp = sub.add_parser("experiment", help="run a harness experiment")
    p_exp.add_argument("--kind", choices=harness.KINDS, default=None)
    p_exp.add_argument("--model", choices=("geom", "nongeom"), default=None)
    p_exp.add_argument("--p", type=_float_list, default=None, help="comma-separated")
    p_exp.add_argument("--n", type=_int_list, default=None, help="comma-separated")
    p_exp.add_argument("--tmax", type=int, default=None)
    p_exp.add_argument("--reps", type=int, default=None)
    p_exp.add_argument("--config", default=None, help="key=value config file")
    p_exp.add_argument("--jobs", type=int, default=1, help="worker cap (output is jobs-invariant)")
    p_exp.add_argument("--out", default=None)
    p_exp.add_argument("--format", choices=("csv", "json"), default="csv")
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "tmax", None) is None and args.command == "det" and args.until_alpha is None:
        print("det: one of --tmax or --until-alpha is required", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, SystemExit) as exc:
        if isinstance(exc, SystemExit):
            return exc.code if isinstance(exc.code, int) else 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
