"""Critical-set census with a heap-bound sweep.

Writes one JSON report per tie policy and prints counts at each bound.

    python scripts/run_census.py --max-value 30 --heap-bound 450 --out results/
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from cumulant.lab import critical_set_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-value", type=int, nargs="+", default=[20, 30, 40])
    ap.add_argument("--heap-bound", type=int, default=450)
    ap.add_argument("--sweep", type=int, nargs="*", default=[100, 109, 150, 200, 207, 208, 250, 303, 350, 403, 450])
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    for m in args.max_value:
        for tie in ("antagonistic", "friendly"):
            t0 = time.perf_counter()
            ck = args.out / f"census_{m}_{tie}.checkpoint.json" if args.out else None
            rep = critical_set_scan(m, (2, 3), args.heap_bound, tie, args.workers, ck)
            took = time.perf_counter() - t0
            sweep = rep.sweep(args.sweep)
            print(f"max {m:>2} {tie:<12} {took:6.1f}s  " + "  ".join(f"{b}:{c}" for b, c in sweep))
            if args.out:
                doc = rep.to_json()
                doc["sweep"] = sweep
                (args.out / f"census_{m}_{tie}.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
