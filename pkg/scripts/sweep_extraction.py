#!/usr/bin/env python3
"""Presentation defect of the observables read off a perturbed code-game strategy.

Prints theta, the game deficit eps, the defect of x_i -> P_0 - P_1 on G(h)
and their ratio, for the Hadamard code game (or the binary Reed-Muller one).
The ratio staying bounded as eps -> 0 is the O(r eps) behaviour.

    python3 scripts/sweep_extraction.py --family hadamard --t 2 --seeds 0 1 2
"""

import argparse
import csv
import sys

import numpy as np

from stabforge.codes import build_code_family
from stabforge.games import code_game, extraction_sweep, perfect_code_strategy


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--family", choices=["hadamard", "brm"], default="hadamard")
    ap.add_argument("--t", type=int, default=2)
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    args = ap.parse_args()

    code, tester = build_code_family(args.family, args.t)
    game = code_game(code, tester, drop_zero_rows=True)
    S = perfect_code_strategy(game, code)
    thetas = np.geomspace(1e-3, 0.2, args.points)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["seed", "theta", "eps", "defect", "ratio", "locality"])
    for seed in args.seeds:
        for pt in extraction_sweep(game, S, thetas, seed):
            ratio = pt.presentation_defect / pt.game_deficit if pt.game_deficit > 0 else float("nan")
            writer.writerow([seed, f"{pt.theta:.6g}", f"{pt.game_deficit:.6e}", f"{pt.presentation_defect:.6e}", f"{ratio:.3f}", tester.locality])
    return 0


if __name__ == "__main__":
    sys.exit(main())
