#!/usr/bin/env python3
"""Run every named experiment bundle at full scale.

Produces, per bundle, the CSVs needed to regenerate the corresponding
figures (trade-off curves, offloading histograms, energy traces).  Expect
roughly half an hour single-threaded; use --jobs to parallelize sweeps.
"""

import argparse
import sys

from goedge.cli import main as cli_main
from goedge.experiments import EXPERIMENTS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="goedge_out")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--horizon", type=int, default=None,
                    help="override for quick smoke runs")
    ap.add_argument("--only", choices=sorted(EXPERIMENTS), default=None)
    args = ap.parse_args()

    names = [args.only] if args.only else sorted(EXPERIMENTS)
    for name in names:
        argv = ["paper", "--experiment", name, "--out", args.out,
                "--seed", str(args.seed), "--jobs", str(args.jobs)]
        if args.horizon:
            argv += ["--horizon", str(args.horizon)]
        print(f"== {name} ==", flush=True)
        code = cli_main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
