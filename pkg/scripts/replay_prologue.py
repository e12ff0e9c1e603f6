"""Replay the scripted three-player compound line move by move.

    python scripts/replay_prologue.py
"""

from __future__ import annotations

import json
from pathlib import Path

from cumulant.core import step
from cumulant.rulesets import prologue_compound, prologue_start

HEAPS = "ABCDEF"
ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    script = json.loads((ROOT / "games" / "walkthrough.json").read_text())
    game, g = prologue_compound(3), prologue_start(3)
    names = {1: "Alice", 2: "Bob", 3: "Charlie"}
    for k, m in enumerate(script["moves"], 1):
        who = game.current_player(g)
        a = tuple(m["action"])
        h = next(i for i, v in enumerate(a) if v)
        verb = "adds to A and B" if a[0] > 0 else f"takes {-a[h]} from {HEAPS[h]}"
        g = step(game, g, a)
        print(f"{k:>2}. {names[who]:<7} {verb:<16} heaps {' '.join(map(str, g.heaps))}")
    print(f"{names[game.current_player(g)]} is stuck")
    for i, row in enumerate(g.cumulation, 1):
        print(f"{names[i]:<7} cumulation {' '.join(f'{v:>2}' for v in row)}")
    print("utilities:", " ".join(str(u) for u in game.terminal_utility(g)))


if __name__ == "__main__":
    main()
