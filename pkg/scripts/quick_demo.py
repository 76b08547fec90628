#!/usr/bin/env python3
"""Thirty-second demo: run the example config and print the verdicts."""

import sys
from pathlib import Path

from goedge.cli import main

HERE = Path(__file__).resolve().parent.parent

sys.exit(main(["run", "--config", str(HERE / "configs" / "example.yaml"),
               "--horizon", "4000", "--warmup", "1000"]))
