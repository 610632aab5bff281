#!/usr/bin/env python3
"""Regenerate every experiment table (CSV) and its plot (SVG).

Each experiment is one CLI invocation, so the files here are exactly what
``hexalab <subcommand> --out ...`` produces.  ``--quick`` shrinks the
sizes so the whole run finishes in well under a minute.
"""

import argparse
import sys
import time
from pathlib import Path

from hexalab.cli import run


def experiments(quick: bool) -> list:
    levels = "1,2,3,4" if quick else "1,2,3,4,5,6"
    trials = "2000" if quick else "100000"
    steps = "1,2,4,8,16" if quick else "4,8,16,32,64,128,256"
    chain = ["--k", "3", "--depth", "4"] if quick else ["--k", "6", "--depth", "6"]
    moves = [
        ("corner", "0,1", "2" if quick else "3"),
        ("knight1", "e", "2"),
        ("knight2", "0,1", "3"),
    ]
    out = [
        ("diameters_G", ["graph-diameter", "--kind", "G", "-n", levels]),
        ("diameters_H", ["graph-diameter", "--kind", "H", "-n", "1,2,3" if quick else "1,2,3,4"]),
        ("metric_diameter", ["metric", "--mu", "1/2", "--depth", "4" if quick else "6", "--from", ":0", "--to", "30:0"]),
        ("metric_matrix_V1", ["metric-matrix", "--k", "0", "--depth", "3"]),
        ("theta_profile", ["chain-experiment", *chain, "--steps", steps]),
        ("hit_prob", ["hit-prob", "--cell", "0", "--k", "3", "--samples", "5" if quick else "100", "--geodesics"]),
        ("harnack", ["harnack", "-n", "2" if quick else "2,3,4"]),
    ]
    for kind, base, k in moves:
        out.append((f"exit_{kind}_k{k}", ["exit-dist", "--move", kind, "--base", base, "--k", k, "--trials", trials, "--seed", "1"]))
    return out


PLOTS = {"diameters_G", "theta_profile", "harnack"}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results", type=Path)
    ap.add_argument("--quick", action="store_true", help="small sizes for smoke runs")
    ap.add_argument("--only", help="comma-separated experiment names")
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)
    wanted = set(args.only.split(",")) if args.only else None
    for name, cmd in experiments(args.quick):
        if wanted and name not in wanted:
            continue
        csv_path = args.outdir / f"{name}.csv"
        t = time.perf_counter()
        code = run(cmd + ["--out", str(csv_path)])
        if code:
            print(f"{name}: exit code {code}", file=sys.stderr)
            return code
        if name in PLOTS:
            run(["plot", "--in", str(csv_path), "--out", str(args.outdir / f"{name}.svg")])
        print(f"{name}: {time.perf_counter() - t:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
