"""Command-line front end: validate, run, sweep, and paper-experiment bundles.

Every invocation writes into its own timestamped directory under the output
root (--out, else $GOEDGE_OUT, else ./goedge_out): a config snapshot, the
summary CSV, the slot log, and a manifest with seed and version.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__, experiments, records
from .engine import default_v_grid, run, sweep
from .model import ConfigError, load_config, serialize_config

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2


def _out_root(args):
    return Path(args.out or os.environ.get("GOEDGE_OUT", "goedge_out"))


def _make_outdir(args, tag):
    root = _out_root(args)
    stamp = time.strftime("%Y%m%d-%H%M%S", time.gmtime())
    for n in range(1000):
        suffix = f"-{n}" if n else ""
        path = root / f"{stamp}_{tag}{suffix}"
        try:
            path.mkdir(parents=True, exist_ok=False)
            return path
        except FileExistsError:
            continue
    raise RuntimeError("could not allocate an output directory")


def _apply_overrides(fleet, es, sim, args):
    kw = {}
    for name, attr in (("seed", "rng_seed"), ("v", "v"), ("policy", "policy"),
                       ("horizon", "horizon"), ("warmup", "warmup")):
        val = getattr(args, name, None)
        if val is not None:
            kw[attr] = val
    if kw:
        sim = replace(sim, **kw)
    return fleet, es, sim


def _manifest(outdir, args, extra=None):
    fields = {
        "version": __version__,
        "argv": sys.argv[1:],
        "seed": getattr(args, "seed", None),
        "utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extra:
        fields.update(extra)
    records.write_manifest(outdir / "manifest.json", **fields)


def _print_verdicts(summary):
    for k in range(summary.k):
        parts = [f"ue{k}:"]
        if summary.d_avg_s[k] is not None:
            ok = summary.ue_delay_s[k] <= summary.d_avg_s[k]
            parts.append(f"delay {summary.ue_delay_s[k]:.4f}s "
                         f"{'<=' if ok else '>'} {summary.d_avg_s[k]}s "
                         f"[{'ok' if ok else 'VIOLATED'}]")
        if summary.g_avg[k] is not None and summary.policy != "mu_made":
            ok = summary.ue_accuracy[k] >= summary.g_avg[k]
            parts.append(f"accuracy {summary.ue_accuracy[k]:.4f} "
                         f"{'>=' if ok else '<'} {summary.g_avg[k]} "
                         f"[{'ok' if ok else 'VIOLATED'}]")
        if summary.e_avg_j[k] is not None:
            ok = summary.ue_energy_j[k] <= summary.e_avg_j[k]
            parts.append(f"energy {summary.ue_energy_j[k]:.4f}J "
                         f"{'<=' if ok else '>'} {summary.e_avg_j[k]}J "
                         f"[{'ok' if ok else 'VIOLATED'}]")
        print(" ".join(parts))
    print(f"converged: {summary.converged}  "
          f"drift violations: {summary.drift_violations}")


def cmd_validate(args):
    load_config(args.config)
    print(f"{args.config}: ok")
    return EXIT_OK


def cmd_run(args):
    fleet, es, sim = load_config(args.config)
    fleet, es, sim = _apply_overrides(fleet, es, sim, args)
    outdir = _make_outdir(args, "run")
    summary, recs = run(fleet, es, sim, collect_records=True)
    (outdir / "config.yaml").write_text(serialize_config(fleet, es, sim))
    records.write_summary_csv(outdir / "summary.csv", [summary])
    records.write_slot_log(outdir / "slots.jsonl", recs)
    _manifest(outdir, args, {"command": "run", "config": str(args.config)})
    _print_verdicts(summary)
    print(outdir)
    return EXIT_OK


def parse_v_spec(spec: str):
    """Grammar: empty = default grid; 'a,b,c' = list; 'lo:hi:Nlog' = log grid."""
    if not spec:
        return default_v_grid()
    if ":" in spec:
        lo, hi, n = spec.split(":")
        if not n.endswith("log"):
            raise ValueError(f"bad v-spec {spec!r}: want lo:hi:Nlog")
        import numpy as np
        count = int(n[:-3])
        return list(np.logspace(np.log10(float(lo)), np.log10(float(hi)), count))
    return [float(x) for x in spec.split(",")]


def cmd_sweep(args):
    fleet, es, sim = load_config(args.config)
    fleet, es, sim = _apply_overrides(fleet, es, sim, args)
    try:
        grid = parse_v_spec(args.v_spec)
    except ValueError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG
    outdir = _make_outdir(args, "sweep")
    summaries = sweep(fleet, es, sim, grid, jobs=args.jobs)
    (outdir / "config.yaml").write_text(serialize_config(fleet, es, sim))
    records.write_summary_csv(outdir / "sweep.csv", summaries)
    _manifest(outdir, args, {"command": "sweep", "config": str(args.config),
                             "v_grid": [float(v) for v in grid]})
    print(outdir)
    return EXIT_OK


def cmd_paper(args):
    name = args.experiment
    if name not in experiments.EXPERIMENTS:
        print(f"unknown experiment {name!r}; available: "
              f"{', '.join(sorted(experiments.EXPERIMENTS))}", file=sys.stderr)
        return EXIT_CONFIG
    outdir = _make_outdir(args, f"paper_{name}")
    kwargs = {"seed": args.seed if args.seed is not None else 1,
              "jobs": args.jobs}
    if args.horizon is not None:
        kwargs["horizon"] = args.horizon
    files = experiments.EXPERIMENTS[name](outdir, **kwargs)
    _manifest(outdir, args, {"command": "paper", "experiment": name,
                             "files": files})
    print(outdir)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="goedge",
        description="Goal-oriented edge offloading simulator and optimizer")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="YAML configuration")
        p.add_argument("--out", help="output root (default $GOEDGE_OUT or ./goedge_out)")
        p.add_argument("--seed", type=int, help="override sim.rng_seed")
        p.add_argument("--horizon", type=int, help="override sim.horizon")
        p.add_argument("--warmup", type=int, help="override sim.warmup")

    p = sub.add_parser("validate", help="check a configuration document")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="execute one simulation")
    common(p)
    p.add_argument("--v", type=float, help="override the trade-off parameter")
    p.add_argument("--policy", choices=("mu_meda", "mu_made", "fixed_accuracy",
                                        "hybrid_fixed_rate"))
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a V grid")
    common(p)
    p.add_argument("--v-spec", default="", help="'lo:hi:Nlog' or 'a,b,c'; empty = default grid")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("paper", help="run a named experiment bundle")
    common(p, config_required=False)
    p.add_argument("--experiment", required=True,
                   help=f"one of: {', '.join(sorted(experiments.EXPERIMENTS))}")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
