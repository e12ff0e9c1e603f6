"""Outcome functions.

Subtraction tables are keyed by heap size. The symmetric tables store values
from the mover's point of view; the partizan tables store one entry per
previous player (player 1 moves when the previous player was 2). Partizan
self-interest entries hold absolute values ``(player 1, player 2)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .core import (
    Action,
    BudgetExceeded,
    CumulativeGame,
    GameError,
    GroundedPosition,
    HeapPosition,
    Matrix,
    TiePolicy,
    row_sums,
    zero_matrix,
)
from .efg import ProfileLike, _action_of

VARIANTS = ("zs_symmetric", "si_symmetric", "zs_partizan", "si_partizan")


class PreconditionError(GameError, ValueError):
    pass


def _moves(S: Sequence[int], x: int) -> list[int]:
    # largest removal first: that is ascending order of the action vector (-a,)
    return sorted((a for a in S if a <= x), reverse=True)


def _pick(moves: Sequence[int], own: Callable[[int], float], other: Callable[[int], float], mode: str) -> tuple[list[int], int]:
    """Indifference set of ``moves`` and the tie-broken choice."""
    best = max(own(a) for a in moves)
    ind = [a for a in moves if own(a) == best]
    target = (min if mode == "antagonistic" else max)(other(a) for a in ind)
    return ind, next(a for a in ind if other(a) == target)


@dataclass
class OutcomeTable:
    """Rows indexed by heap size ``0..x_max``.

    ``values[x]`` layout per variant:

    - zs_symmetric: ``o``
    - si_symmetric: ``(o1, o2)`` with the mover as player 1
    - zs_partizan: ``{2: o(x,2), 1: o(x,1)}``, keyed by previous player
    - si_partizan: ``{p: (o1, o2)}``, keyed by previous player

    ``optimal[x]`` holds the optimal first actions (removal amounts) and
    ``picks[x]`` the tie-broken choice, with the same keying.
    """

    variant: str
    sets: tuple[tuple[int, ...], ...]
    tie: str = "antagonistic"
    values: list = field(default_factory=list)
    optimal: list = field(default_factory=list)
    picks: list = field(default_factory=list)
    cells: int = 0

    @property
    def x_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, x: int):
        return self.values[x]

    def row(self, key: str) -> list:
        """A named column: ``o``, ``o1``, ``o2``, ``o1@p``, ``o2@p``, ``o@p``."""
        name, _, prev = key.partition("@")
        out = []
        for v in self.values:
            if prev:
                v = v[int(prev)]
            if name == "o":
                out.append(v)
            else:
                out.append(v[int(name[1]) - 1])
        return out

    def columns(self) -> list[str]:
        return {
            "zs_symmetric": ["o"],
            "si_symmetric": ["o1", "o2"],
            "zs_partizan": ["o@2", "o@1"],
            "si_partizan": ["o1@2", "o2@2", "o1@1", "o2@1"],
        }[self.variant]

    def to_rows(self) -> list[list]:
        cols = self.columns()
        data = [self.row(c) for c in cols]
        return [[x] + [_clean(col[x]) for col in data] for x in range(len(self.values))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["heap"] + [c.replace("@", "_prev") for c in self.columns()])
        w.writerows(self.to_rows())
        return buf.getvalue()

    def to_json(self) -> dict[str, Any]:
        cols = self.columns()
        return {
            "variant": self.variant,
            "sets": [list(s) for s in self.sets],
            "tie_policy": self.tie,
            "columns": ["heap"] + cols,
            "rows": self.to_rows(),
        }


def _clean(v):
    return int(v) if isinstance(v, float) and v.is_integer() else v


def _resume(table: OutcomeTable | None, variant: str, sets, tie) -> OutcomeTable:
    if table is None:
        return OutcomeTable(variant, sets, tie)
    if table.variant != variant or table.sets != sets or table.tie != tie:
        raise ValueError("cannot extend a table built for different parameters")
    return table


def _norm(S: Iterable[int]) -> tuple[int, ...]:
    S = tuple(sorted(set(int(a) for a in S)))
    if not S or S[0] <= 0:
        raise ValueError("subtraction set must be nonempty with positive entries")
    return S


def outcome_zs_symmetric(S: Iterable[int], x_max: int, table: OutcomeTable | None = None) -> OutcomeTable:
    """``o(x) = max({a - o(x-a) : a in S, a <= x} | {0})``.

    Passing an existing ``table`` extends it in place.
    """
    S = _norm(S)
    t = _resume(table, "zs_symmetric", (S,), "antagonistic")
    o = t.values
    for x in range(len(o), x_max + 1):
        moves = _moves(S, x)
        t.cells += len(moves)
        if not moves:
            o.append(0)
            t.optimal.append(())
            t.picks.append(None)
            continue
        vals = {a: a - o[x - a] for a in moves}
        m = max(vals.values())
        o.append(max(m, 0))
        opt = tuple(a for a in moves if vals[a] == m)
        t.optimal.append(opt)
        t.picks.append(opt[0])
    return t


def outcome_si_symmetric(S: Iterable[int], x_max: int, tie: str = "antagonistic", table: OutcomeTable | None = None) -> OutcomeTable:
    """Self-interest outcome ``(o1, o2)``, mover first.

    The mover maximizes ``a + o2(x-a)``; among equal choices it minimizes
    (antagonistic) or maximizes (friendly) the opponent's ``o1(x-a)``.
    """
    S = _norm(S)
    TiePolicy(tie)
    t = _resume(table, "si_symmetric", (S,), tie)
    o = t.values
    for x in range(len(o), x_max + 1):
        moves = _moves(S, x)
        t.cells += len(moves)
        if not moves:
            o.append((0, 0))
            t.optimal.append(())
            t.picks.append(None)
            continue
        ind, a = _pick(moves, lambda a: a + o[x - a][1], lambda a: o[x - a][0], tie)
        o.append((a + o[x - a][1], o[x - a][0]))
        t.optimal.append(tuple(ind))
        t.picks.append(a)
    return t


def outcome_zs_partizan(S1: Iterable[int], S2: Iterable[int], x_max: int, table: OutcomeTable | None = None) -> OutcomeTable:
    """Two-row zero-sum outcome; player 1 maximizes and player 2 minimizes
    the score ``C1 - C2``, each removal counting for the remover."""
    sets = (_norm(S1), _norm(S2))
    t = _resume(table, "zs_partizan", sets, "antagonistic")
    o = t.values
    for x in range(len(o), x_max + 1):
        m1, m2 = _moves(sets[0], x), _moves(sets[1], x)
        t.cells += len(m1) + len(m2)
        row, opt, pick = {}, {}, {}
        if m1:
            vals = {a: o[x - a][1] + a for a in m1}
            row[2] = max(vals.values())
            opt[2] = tuple(a for a in m1 if vals[a] == row[2])
            pick[2] = opt[2][0]
        else:
            row[2], opt[2], pick[2] = 0, (), None
        if m2:
            vals = {a: o[x - a][2] - a for a in m2}
            row[1] = min(vals.values())
            opt[1] = tuple(a for a in m2 if vals[a] == row[1])
            pick[1] = opt[1][0]
        else:
            row[1], opt[1], pick[1] = 0, (), None
        o.append(row)
        t.optimal.append(opt)
        t.picks.append(pick)
    return t


def outcome_si_partizan(
    S1: Iterable[int], S2: Iterable[int], x_max: int, tie: str = "antagonistic", table: OutcomeTable | None = None
) -> OutcomeTable:
    """Self-interest partizan outcome.

    ``values[x][p]`` is ``(o1, o2)`` with ``p`` the previous player. The mover
    ``m`` takes ``a`` to reach ``(x-a, m)``, collects ``a`` on top of its own
    entry there, and the other player keeps theirs.
    """
    sets = (_norm(S1), _norm(S2))
    TiePolicy(tie)
    t = _resume(table, "si_partizan", sets, tie)
    o = t.values
    for x in range(len(o), x_max + 1):
        row, opt, pick = {}, {}, {}
        for prev, mover in ((2, 1), (1, 2)):
            moves = _moves(sets[mover - 1], x)
            t.cells += len(moves)
            if not moves:
                row[prev], opt[prev], pick[prev] = (0, 0), (), None
                continue
            me, other = mover - 1, 2 - mover
            ind, a = _pick(moves, lambda a: o[x - a][mover][me] + a, lambda a: o[x - a][mover][other], tie)
            child = o[x - a][mover]
            v = [0, 0]
            v[me] = child[me] + a
            v[other] = child[other]
            row[prev], opt[prev], pick[prev] = tuple(v), tuple(ind), a
        o.append(row)
        t.optimal.append(opt)
        t.picks.append(pick)
    return t


def subtraction_outcome(variant: str, sets: Sequence[Sequence[int]], x_max: int, tie: str = "antagonistic") -> OutcomeTable:
    """Dispatch on ``variant``; symmetric variants take one set."""
    if variant == "zs_symmetric":
        return outcome_zs_symmetric(sets[0], x_max)
    if variant == "si_symmetric":
        return outcome_si_symmetric(sets[0], x_max, tie)
    if len(sets) != 2:
        raise ValueError("partizan variants need two sets")
    if variant == "zs_partizan":
        return outcome_zs_partizan(sets[0], sets[1], x_max)
    if variant == "si_partizan":
        return outcome_si_partizan(sets[0], sets[1], x_max, tie)
    raise ValueError(f"unknown variant {variant!r}")


# --- general games -----------------------------------------------------------


def sigma_outcome(game: CumulativeGame, profile: ProfileLike, g: GroundedPosition) -> tuple[float, ...]:
    """Rewards collected along the line ``profile`` plays from ``g``,
    summed over heaps per player."""
    game.check(g)
    total = [0] * game.n
    for _ in range(game.move_budget + 1):
        cur = game.current_player(g)
        legal = game.legal_actions(g)
        if not legal:
            return tuple(total)
        a = _action_of(profile, g)
        r = game.ruleset.rewards(g.position, g.previous, cur, a)
        for i, v in enumerate(row_sums(r)):
            total[i] += v
        g = game.apply(g, a, cur)
    raise BudgetExceeded(f"line exceeds move budget {game.move_budget}")


@dataclass
class OutcomeMap:
    """Outcome matrices of a heap-size dynamic game.

    ``matrices[heaps]`` is an ``n x n`` tuple whose row ``p`` (0-based
    ``p-1``) gives every player's outcome when ``p`` moved last.
    """

    game: CumulativeGame
    matrices: dict[tuple[int, ...], Matrix]
    actions: dict[tuple[tuple[int, ...], int], Action]
    cells: int = 0

    def __getitem__(self, heaps) -> Matrix:
        return self.matrices[tuple(heaps)]

    def __contains__(self, heaps) -> bool:
        return tuple(heaps) in self.matrices

    def outcome(self, heaps: Sequence[int], previous: int) -> tuple[float, ...]:
        return self.matrices[tuple(heaps)][previous - 1]

    def value(self, g: GroundedPosition) -> tuple[float, ...]:
        """Grounded value: outcome plus the cumulation already banked."""
        o = self.outcome(g.heaps, g.previous)
        return tuple(a + b for a, b in zip(o, g.position.totals()))

    def line(self, g: GroundedPosition) -> list[Action]:
        out = []
        while (g.heaps, g.previous) in self.actions:
            a = self.actions[(g.heaps, g.previous)]
            out.append(a)
            g = self.game.apply(g, a)
        return out


_PROBE = 7


def _probe(game: CumulativeGame, heaps: tuple[int, ...], prev: int):
    """Actions, rewards and mover at a zero and a shifted cumulation; raise
    if they differ."""
    n, d = game.n, game.d
    zero = HeapPosition(heaps, zero_matrix(n, d))
    bent = HeapPosition(heaps, tuple(tuple(_PROBE * (i + 1) + h for h in range(d)) for i in range(n)))
    cur = game.turn(zero, prev, n)
    if game.turn(bent, prev, n) != cur:
        raise PreconditionError(f"turn function depends on cumulation at {heaps}")
    acts = sorted({tuple(a) for a in game.ruleset.actions(zero, prev, cur)})
    if acts != sorted({tuple(a) for a in game.ruleset.actions(bent, prev, cur)}):
        raise PreconditionError(f"action set depends on cumulation at {heaps}")
    out = []
    for a in acts:
        if len(a) != d or any(x + da < 0 for x, da in zip(heaps, a)):
            raise PreconditionError(f"invalid action {a} at {heaps}")
        r = game.ruleset.rewards(zero, prev, cur, a)
        if r != game.ruleset.rewards(bent, prev, cur, a):
            raise PreconditionError(f"rewards depend on cumulation at {heaps}")
        out.append((a, row_sums(r)))
    return cur, out


def recursive_outcome(game: CumulativeGame, heaps: Sequence[int] | int, budget: int | None = None) -> OutcomeMap:
    """Outcome matrices over heap sizes only.

    ``heaps`` is a start tuple (every heap tuple reachable from it is
    solved) or, for one-heap games, an integer ``x_max`` meaning all sizes
    ``0..x_max``. The mover at ``(heaps, p)`` picks, under the game's tie
    policy, the action maximizing its child outcome plus its summed reward;
    every player's entry then follows that action.
    """
    if not game.heap_size_dynamic:
        raise PreconditionError("game is not heap-size dynamic")
    if not game.utility.identity:
        raise PreconditionError("recursive outcome needs identity utilities")
    if isinstance(heaps, int):
        if game.d != 1:
            raise PreconditionError("an integer bound needs a one-heap game")
        roots = [(x,) for x in range(heaps + 1)]
    else:
        roots = [tuple(heaps)]
    n = game.n
    budget = game.move_budget if budget is None else budget
    rows: dict[tuple[tuple[int, ...], int], tuple[float, ...]] = {}
    actions: dict = {}
    cells = 0
    todo = [(root, prev) for root in roots for prev in range(1, n + 1)]
    seen_heaps = set(roots)
    while todo:
        key = todo.pop()
        if key in rows:
            continue
        # iterative post-order over (heaps, previous) keys
        stack = [(key[0], key[1], None)]
        active = {key}
        while stack:
            h, p, info = stack[-1]
            if info is None:
                info = _probe(game, h, p)
                stack[-1] = (h, p, info)
            cur, opts = info
            pending = None
            for a, _ in opts:
                child = (tuple(x + da for x, da in zip(h, a)), cur)
                if child not in rows:
                    if child in active or len(stack) > budget:
                        raise BudgetExceeded(f"line through {h} exceeds the move budget", tuple(s[0] for s in stack))
                    pending = child
                    break
            if pending is not None:
                active.add(pending)
                stack.append((pending[0], pending[1], None))
                continue
            stack.pop()
            active.discard((h, p))
            if h not in seen_heaps:
                # complete the matrix: every previous player gets a row
                seen_heaps.add(h)
                todo.extend((h, q) for q in range(1, n + 1))
            if not opts:
                rows[(h, p)] = (0,) * n
                continue
            cands = []
            for a, rho in opts:
                child = rows[(tuple(x + da for x, da in zip(h, a)), cur)]
                cands.append(tuple(c + r for c, r in zip(child, rho)))
            cells += len(opts)
            k = game.tie.choose(cur, cands)
            rows[(h, p)] = cands[k]
            actions[(h, p)] = opts[k][0]
    matrices = {h: tuple(rows[(h, q)] for q in range(1, n + 1)) for h in seen_heaps}
    return OutcomeMap(game, matrices, actions, cells)


def matrix_le(a: Matrix, b: Matrix) -> bool:
    """Entrywise order on outcome matrices."""
    return all(x <= y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def table_from_json(doc: Mapping[str, Any]) -> OutcomeTable:
    """Rebuild a subtraction table from its JSON mirror by recomputing it."""
    return subtraction_outcome(doc["variant"], doc["sets"], len(doc["rows"]) - 1, doc.get("tie_policy", "antagonistic"))


def dumps(table: OutcomeTable) -> str:
    return json.dumps(table.to_json(), sort_keys=True)
