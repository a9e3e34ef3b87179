#!/usr/bin/env python3
"""Best deterministic value next to the perfect quantum value for the small games.

Deterministic values come from exhaustive enumeration, so only games with a
few questions in the support of mu are listed.
"""

import sys

from stabforge.games import build_game, build_perfect_strategy, classical_value, game_value


def main() -> int:
    for kind, params in [("commutation", {}), ("anticommutation", {})]:
        game = build_game(kind, **params)
        classical, _ = classical_value(game)
        quantum = game_value(game, build_perfect_strategy(game)).omega
        print(f"{kind:16s} questions={len(game.questions):3d} classical={classical:.6f} quantum={quantum:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
