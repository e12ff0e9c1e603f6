"""Pareto efficiency of the equilibrium over a range of heaps.

    python scripts/run_pareto.py --sets 3 7 --max-heap 40
"""

from __future__ import annotations

import argparse

from cumulant.core import GroundedPosition, HeapPosition
from cumulant.lab import pareto_scan
from cumulant.rulesets import UtilitySpec, build_game, fixed


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sets", type=int, nargs="+", default=[3, 7])
    ap.add_argument("--max-heap", type=int, default=40)
    ap.add_argument("--tie", choices=["antagonistic", "friendly"], default="antagonistic")
    args = ap.parse_args()

    game = build_game(fixed(args.sets), UtilitySpec("identity", args.tie), 2, 1)
    print("heap,pspe1,pspe2,efficient,witness1,witness2,witness_moves")
    for x in range(args.max_heap + 1):
        rep = pareto_scan(game, GroundedPosition(HeapPosition.start((x,), 2), 2))
        w = rep.witness or ("", "")
        moves = " ".join(str(-a[0]) for a in rep.witness_line)
        print(f"{x},{rep.pspe_value[0]},{rep.pspe_value[1]},{int(rep.efficient)},{w[0]},{w[1]},{moves}")


if __name__ == "__main__":
    main()
