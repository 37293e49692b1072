#!/usr/bin/env python3
"""Regenerate every plot-ready artifact with the default configuration.

Runs the five simulation commands in sequence, then reconstructs the
quadrature file the end-to-end run wrote.  Each command leaves its CSV/JSON
plus a manifest under <out>/<command>/.  Everything is seeded, so two runs
of this script produce identical files.

Usage:
    python scripts/reproduce_figures.py [--out outputs] [--seed N] [--skip-end-to-end]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from heraldsim.cli import main as cli_main


def run_step(name: str, argv: list[str]) -> None:
    print(f"== {name}: heraldsim {' '.join(argv)}", file=sys.stderr, flush=True)
    t0 = time.perf_counter()
    rc = cli_main(argv)
    if rc != 0:
        print(f"== {name} failed (exit {rc})", file=sys.stderr)
        sys.exit(rc)
    print(f"== {name} done in {time.perf_counter() - t0:.1f} s", file=sys.stderr, flush=True)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="outputs", help="output root directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--skip-end-to-end",
        action="store_true",
        help="skip the long trigger-stream pipeline and its reconstruction",
    )
    args = parser.parse_args()

    common = ["--out", args.out]
    if args.seed is not None:
        common += ["--seed", str(args.seed)]

    run_step("pair correlation", ["g2"] + common)
    run_step("adapted-mode delay sweep", ["sweep-delay"] + common)
    run_step("fixed-mode delay sweep", ["sweep-fixed"] + common)
    run_step("photon-number panels", ["fock-panels"] + common)
    if args.skip_end_to_end:
        print("== end-to-end skipped", file=sys.stderr)
        return
    run_step("end-to-end pipeline", ["end-to-end"] + common)
    samples = Path(args.out) / "end_to_end" / "samples.csv"
    run_step("reconstruction of pipeline samples", ["reconstruct", str(samples)] + common)


if __name__ == "__main__":
    main()
