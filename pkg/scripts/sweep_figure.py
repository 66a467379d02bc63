"""Reproduce the four-curve energy-per-bit comparison over relay gain b.

Runs a log-grid sweep at fixed a through the CLI (so the files match what
`linrelay sweep` produces byte for byte), then reads the table back and
prints the per-point ordering margins: how far the rank-1 bound sits below
the 2x2 bound, and how much headroom remains down to the cut-set floor.

With the defaults this takes a few minutes; shrink --n-points for a quick
look.

Usage:
    python3 scripts/sweep_figure.py --out sweep.csv --svg sweep.svg
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from linrelay import cli


def print_margin_table(csv_path: Path) -> None:
    """Aligned console table of the four series and their orderings."""
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    header = (
        f"{'b':>8}  {'block-Markov':>12}  {'cut-set':>8}  {'2x2':>8}  "
        f"{'rank-1':>8}  {'2x2 - rank1':>11}  {'rank1 - cutset':>14}"
    )
    print(header)
    print("-" * len(header))
    for row in rows:
        b = float(row["b"])
        bm = float(row["block_markov"])
        cut = float(row["cutset"])
        two = float(row["two_by_two"])
        rank1 = float(row["rank1"])
        print(
            f"{b:8.3f}  {bm:12.6f}  {cut:8.6f}  {two:8.6f}  {rank1:8.6f}  "
            f"{two - rank1:11.2e}  {rank1 - cut:14.2e}"
        )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--a", type=float, default=1.1, help="source-to-relay gain")
    parser.add_argument("--b-min", type=float, default=0.5)
    parser.add_argument("--b-max", type=float, default=10.0)
    parser.add_argument("--n-points", type=int, default=15)
    parser.add_argument("--out", default="sweep.csv", help="CSV table path")
    parser.add_argument("--svg", default="sweep.svg", help="chart path")
    args = parser.parse_args(argv)

    rc = cli.main(
        [
            "sweep",
            "--a", str(args.a),
            "--b-min", str(args.b_min),
            "--b-max", str(args.b_max),
            "--n-points", str(args.n_points),
            "--out", args.out,
            "--svg", args.svg,
        ]
    )
    if rc != 0:
        return rc
    print(f"table: {args.out}")
    print(f"chart: {args.svg}")
    print()
    print_margin_table(Path(args.out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
