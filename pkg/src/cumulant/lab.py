"""Brute-force oracle and empirical scans over subtraction games."""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .core import Action, BudgetExceeded, CumulativeGame, GroundedPosition
from .efg import pspe
from .outcome import outcome_si_symmetric, outcome_zs_symmetric


class NodeBudgetExceeded(BudgetExceeded):
    pass


def brute_force_pspe(game: CumulativeGame, g0: GroundedPosition, node_budget: int = 2_000_000) -> tuple[tuple[float, ...], list[Action]]:
    """Equilibrium value and line by plain recursion over the full tree.

    Deliberately shares nothing with the DAG solvers: no memo, no merging.
    """
    game.check(g0)
    visited = 0

    def solve(g: GroundedPosition, depth: int):
        nonlocal visited
        visited += 1
        if visited > node_budget:
            raise NodeBudgetExceeded(f"more than {node_budget} nodes")
        if depth > game.move_budget:
            raise BudgetExceeded(f"line exceeds move budget {game.move_budget}")
        cur = game.current_player(g)
        acts = game.legal_actions(g)
        if not acts:
            return game.utility(g.cumulation, cur), []
        results = [solve(game.apply(g, a, cur), depth + 1) for a in acts]
        k = game.tie.choose(cur, [v for v, _ in results])
        return results[k][0], [acts[k]] + results[k][1]

    return solve(g0, 0)


# --- critical subtraction sets -----------------------------------------------


def first_divergence(S: Sequence[int], heap_bound: int, tie: str) -> int | None:
    """Smallest heap where the self-interest choice is not zero-sum optimal.

    The self-interest choice is the tie-broken action of the self-interest
    recursion; it diverges when it is missing from the set of first actions
    attaining the zero-sum maximum.
    """
    zs = outcome_zs_symmetric(S, heap_bound)
    si = outcome_si_symmetric(S, heap_bound, tie)
    for x in range(heap_bound + 1):
        a = si.picks[x]
        if a is not None and a not in zs.optimal[x]:
            return x
    return None


@dataclass(frozen=True)
class CriticalSet:
    subtraction_set: tuple[int, ...]
    heap: int
    zs_value: int
    si_value: tuple[int, int]
    zs_optimal: tuple[int, ...]
    si_choice: int


def _divergence_detail(S: tuple[int, ...], heap_bound: int, tie: str) -> CriticalSet | None:
    x = first_divergence(S, heap_bound, tie)
    if x is None:
        return None
    zs = outcome_zs_symmetric(S, x)
    si = outcome_si_symmetric(S, x, tie)
    return CriticalSet(S, x, zs[x], si[x], zs.optimal[x], si.picks[x])


@dataclass
class CriticalSetReport:
    max_value: int
    sizes: tuple[int, ...]
    heap_bound: int
    tie: str
    critical: list[CriticalSet] = field(default_factory=list)
    scanned: int = 0

    @property
    def count(self) -> int:
        return len(self.critical)

    def count_at(self, bound: int) -> int:
        """Critical sets whose first divergence is at most ``bound``."""
        return sum(1 for c in self.critical if c.heap <= bound)

    def sweep(self, bounds: Iterable[int]) -> list[tuple[int, int]]:
        return [(b, self.count_at(b)) for b in bounds if b <= self.heap_bound]

    def to_json(self) -> dict:
        return {
            "max_value": self.max_value,
            "sizes": list(self.sizes),
            "heap_bound": self.heap_bound,
            "tie_policy": self.tie,
            "scanned": self.scanned,
            "count": self.count,
            "critical": [
                {
                    "set": list(c.subtraction_set),
                    "heap": c.heap,
                    "zs": c.zs_value,
                    "si": list(c.si_value),
                    "zs_optimal": list(c.zs_optimal),
                    "si_choice": c.si_choice,
                }
                for c in self.critical
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "heap", "zs", "si1", "si2", "zs_optimal", "si_choice"])
        for c in self.critical:
            w.writerow(
                [
                    " ".join(map(str, c.subtraction_set)),
                    c.heap,
                    c.zs_value,
                    c.si_value[0],
                    c.si_value[1],
                    " ".join(map(str, c.zs_optimal)),
                    c.si_choice,
                ]
            )
        return buf.getvalue()


def _scan_chunk(args) -> list[tuple[tuple[int, ...], CriticalSet | None]]:
    sets, heap_bound, tie = args
    return [(S, _divergence_detail(S, heap_bound, tie)) for S in sets]


def candidate_sets(max_value: int, sizes: Iterable[int]) -> list[tuple[int, ...]]:
    out = []
    for k in sorted(set(sizes)):
        out.extend(itertools.combinations(range(1, max_value + 1), k))
    return out


def critical_set_scan(
    max_value: int,
    sizes: Iterable[int] = (2, 3),
    heap_bound: int = 200,
    tie: str = "antagonistic",
    workers: int | None = None,
    checkpoint: str | os.PathLike | None = None,
    chunk: int = 256,
) -> CriticalSetReport:
    """Census of subtraction sets of the given sizes drawn from
    ``1..max_value`` whose zero-sum and self-interest choices diverge at
    some heap ``<= heap_bound``.

    Work is sharded by set; the merged report is sorted so it does not
    depend on scheduling. ``checkpoint`` names a JSON file of finished sets
    that is read on start and rewritten after each chunk.
    """
    if max_value < 1 or heap_bound < 0:
        raise ValueError("parameters must be positive")
    sizes = tuple(sorted(set(sizes)))
    sets = candidate_sets(max_value, sizes)
    done: dict[tuple[int, ...], CriticalSet | None] = {}
    ck = Path(checkpoint) if checkpoint else None
    key = {"max_value": max_value, "sizes": list(sizes), "heap_bound": heap_bound, "tie": tie}
    if ck and ck.exists():
        saved = json.loads(ck.read_text())
        if saved.get("params") == key:
            for e in saved["done"]:
                S = tuple(e["set"])
                done[S] = None if e["hit"] is None else CriticalSet(
                    S, e["hit"]["heap"], e["hit"]["zs"], tuple(e["hit"]["si"]), tuple(e["hit"]["zs_optimal"]), e["hit"]["si_choice"]
                )
    todo = [S for S in sets if S not in done]
    jobs = [(todo[i : i + chunk], heap_bound, tie) for i in range(0, len(todo), chunk)]

    def save():
        if not ck:
            return
        entries = []
        for S in sorted(done):
            c = done[S]
            hit = None if c is None else {
                "heap": c.heap,
                "zs": c.zs_value,
                "si": list(c.si_value),
                "zs_optimal": list(c.zs_optimal),
                "si_choice": c.si_choice,
            }
            entries.append({"set": list(S), "hit": hit})
        tmp = ck.with_suffix(ck.suffix + ".tmp")
        tmp.write_text(json.dumps({"params": key, "done": entries}))
        tmp.replace(ck)

    if workers == 1 or len(jobs) <= 1:
        for job in jobs:
            done.update(_scan_chunk(job))
            save()
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_scan_chunk, jobs):
                done.update(part)
                save()
    crit = sorted((c for c in done.values() if c is not None), key=lambda c: (len(c.subtraction_set), c.subtraction_set))
    return CriticalSetReport(max_value, sizes, heap_bound, tie, crit, len(sets))


# --- Pareto efficiency ---------------------------------------------------------


@dataclass
class ParetoReport:
    ruleset: str
    heaps: tuple[int, ...]
    pspe_value: tuple[float, ...]
    pspe_line: tuple[Action, ...]
    dominating: list[tuple[float, ...]]
    witness: tuple[float, ...] | None = None
    witness_line: tuple[Action, ...] = ()

    @property
    def efficient(self) -> bool:
        return not self.dominating

    def to_json(self) -> dict:
        d = asdict(self)
        d["efficient"] = self.efficient
        return d


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def terminal_allocations(game: CumulativeGame, g0: GroundedPosition, node_budget: int = 2_000_000) -> dict[tuple[float, ...], tuple[Action, ...]]:
    """Every utility vector some legal line from ``g0`` ends in, with one
    line reaching it (the lexicographically first found)."""
    memo: dict[GroundedPosition, dict[tuple[float, ...], tuple[Action, ...]]] = {}
    stack = [(g0, None)]
    while stack:
        g, opts = stack[-1]
        if g in memo:
            stack.pop()
            continue
        if opts is None:
            opts = game.options(g)
            stack[-1] = (g, opts)
            if len(memo) > node_budget:
                raise NodeBudgetExceeded(f"more than {node_budget} positions")
        missing = [c for _, c in opts if c not in memo]
        if missing:
            stack.extend((c, None) for c in reversed(missing))
            continue
        stack.pop()
        if not opts:
            memo[g] = {game.terminal_utility(g): ()}
            continue
        out: dict[tuple[float, ...], tuple[Action, ...]] = {}
        for a, c in opts:
            for u, line in memo[c].items():
                out.setdefault(u, (a,) + line)
        memo[g] = out
    return memo[g0]


def pareto_scan(game: CumulativeGame, g0: GroundedPosition, node_budget: int = 2_000_000) -> ParetoReport:
    """Equilibrium value against every reachable terminal allocation.

    The witness is the dominating allocation that maximizes the smallest
    per-player gain over the equilibrium, then the total, then the vector
    itself.
    """
    eq = pspe(game, g0)
    allocs = terminal_allocations(game, g0, node_budget)
    dom = sorted(u for u in allocs if dominates(u, eq.value))
    report = ParetoReport(game.ruleset.name, g0.heaps, eq.value, eq.line, dom)
    if dom:
        best = max(dom, key=lambda u: (min(x - y for x, y in zip(u, eq.value)), sum(u), u))
        report.witness = best
        report.witness_line = allocs[best]
    return report


# --- greedy play ----------------------------------------------------------------


def greedy_report(max_value: int = 12, sizes: Iterable[int] = (2, 3), heap_bound: int = 300, tie: str = "antagonistic") -> dict[tuple[int, ...], int | None]:
    """Per symmetric set, the largest heap ``<= heap_bound`` at which taking
    the largest legal amount is not a self-interest optimal action."""
    out = {}
    for S in candidate_sets(max_value, sizes):
        si = outcome_si_symmetric(S, heap_bound, tie)
        last = None
        for x in range(heap_bound + 1):
            opt = si.optimal[x]
            if opt and max(a for a in S if a <= x) not in opt:
                last = x
        out[S] = last
    return out
