#!/usr/bin/env python3
"""Value gap vs. closeness for a perfect strategy under random rotations.

For each angle theta every measurement is conjugated by exp(i theta H_x)
and the script prints theta, 1 - omega, the closeness eps and 8 sqrt(eps)
as CSV. Usage:

    python3 scripts/sweep_perturbation.py --game braiding --points 12 --seed 0
"""

import argparse
import csv
import math
import sys

import numpy as np

from stabforge.games import build_game, build_perfect_strategy, game_value, perturb_strategy, strategy_closeness


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--game", choices=["braiding", "qld", "dls", "code"], default="braiding")
    ap.add_argument("--t", type=int, default=2)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--theta-min", type=float, default=1e-3)
    ap.add_argument("--theta-max", type=float, default=0.3)
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = {"t": args.t} if args.game != "qld" else {"t": args.t, "m": args.m, "d": args.d}
    game = build_game(args.game, **params)
    S = build_perfect_strategy(game)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["theta", "deficit", "closeness", "bound", "within"])
    for theta in np.geomspace(args.theta_min, args.theta_max, args.points):
        T = perturb_strategy(S, float(theta), args.seed)
        eps = strategy_closeness(S, T, None, game).delta
        deficit = 1 - game_value(game, T).omega
        bound = 8 * math.sqrt(eps)
        writer.writerow([f"{theta:.6g}", f"{deficit:.6e}", f"{eps:.6e}", f"{bound:.6e}", deficit <= bound])
    return 0


if __name__ == "__main__":
    sys.exit(main())
