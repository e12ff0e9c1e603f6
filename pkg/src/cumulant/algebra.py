"""Disjunctive sums, outcome-matrix comparison and the Normal-play appendix."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Sequence

from .core import (
    Action,
    BudgetExceeded,
    CumulativeGame,
    DimensionError,
    GameError,
    GroundedPosition,
    HeapPosition,
    Matrix,
    Ruleset,
    TurnFunction,
    UtilityMap,
    check_feasibility,
    cyclic_next,
)


class SumError(GameError, ValueError):
    pass


Component = tuple[CumulativeGame, HeapPosition]


@dataclass(frozen=True)
class SumPosition:
    """A compound game together with the heap position of the sum.

    ``offsets[k]`` is where component ``k``'s heaps start in the combined
    heap vector.
    """

    game: CumulativeGame
    position: HeapPosition
    offsets: tuple[int, ...]
    components: tuple[Component, ...]

    def ground(self, previous: int) -> GroundedPosition:
        return GroundedPosition(self.position, previous)


def _split(pos: HeapPosition, offsets, dims):
    for off, d in zip(offsets, dims):
        yield HeapPosition(pos.heaps[off : off + d], tuple(r[off : off + d] for r in pos.cumulation))


def _sum_ruleset(games: Sequence[CumulativeGame], offsets: Sequence[int], total: int) -> Ruleset:
    dims = [g.d for g in games]

    def actions(pos, previous, current):
        for k, part in enumerate(_split(pos, offsets, dims)):
            pre, post = offsets[k], total - offsets[k] - dims[k]
            for a in games[k].ruleset.actions(part, previous, current):
                yield (0,) * pre + tuple(a) + (0,) * post

    def rewards(pos, previous, current, a):
        for k, part in enumerate(_split(pos, offsets, dims)):
            seg = a[offsets[k] : offsets[k] + dims[k]]
            if any(seg):
                r = games[k].ruleset.rewards(part, previous, current, tuple(seg))
                pre, post = offsets[k], total - offsets[k] - dims[k]
                return tuple((0,) * pre + tuple(row) + (0,) * post for row in r)
        raise SumError(f"action {a} touches no component")

    return Ruleset(
        actions,
        rewards,
        cumulation_independent=all(g.ruleset.cumulation_independent for g in games),
        symmetric=all(g.ruleset.symmetric for g in games),
        name="+".join(g.ruleset.name for g in games),
    )


def disjunctive_sum(*components: Component, check: bool = True) -> SumPosition:
    """Sum of components; a move acts in exactly one of them.

    Every component must use cyclic turns and the same player count, and
    with ``check`` each must be feasible from every previous player.
    Nested :class:`SumPosition` arguments are accepted in place of pairs.
    """
    comps: list[Component] = []
    for c in components:
        if isinstance(c, SumPosition):
            comps.append((c.game, c.position))
        else:
            comps.append((c[0], c[1]))
    if not comps:
        raise SumError("empty sum")
    n = comps[0][0].n
    for game, pos in comps:
        if game.n != n:
            raise DimensionError("components disagree on the number of players")
        if game.turn.kind == "custom":
            raise SumError("sums need cyclic turn functions")
        if pos.d != game.d or pos.n != n:
            raise DimensionError("component position does not fit its game")
        if check:
            for p in range(1, n + 1):
                rep = check_feasibility(game, GroundedPosition(pos, p))
                if not rep:
                    raise BudgetExceeded(f"component {game.ruleset.name} has an over-long line", rep.path)
    games = [g for g, _ in comps]
    offsets, k = [], 0
    for g in games:
        offsets.append(k)
        k += g.d
    total = k
    utility = UtilityMap(
        tuple(fn for g in games for fn in g.utility.per_heap),
        identity=all(g.utility.identity for g in games),
    )
    budget = sum(g.move_budget for g in games)
    game = CumulativeGame(n, total, _sum_ruleset(games, offsets, total), TurnFunction("cyclic"), utility, budget, games[0].tie)
    heaps = tuple(x for _, p in comps for x in p.heaps)
    cum = tuple(tuple(v for _, p in comps for v in p.cumulation[i]) for i in range(n))
    return SumPosition(game, HeapPosition(heaps, cum), tuple(offsets), tuple(comps))


def empty_position(game: CumulativeGame) -> HeapPosition:
    """A position with no moves for anyone, if every heap at zero is dead."""
    return HeapPosition.start((0,) * game.d, game.n)


# --- outcome matrices for arbitrary components ------------------------------------


def outcome_matrix(game: CumulativeGame, pos: HeapPosition) -> Matrix:
    """Row ``p-1`` holds the equilibrium utilities minus the banked
    cumulation when ``p`` moved last."""
    from .efg import pspe
    from .outcome import recursive_outcome

    if game.heap_size_dynamic and game.utility.identity:
        base = HeapPosition.start(pos.heaps, game.n)
        return recursive_outcome(game, pos.heaps)[base.heaps]
    rows = []
    tot = pos.totals()
    for p in range(1, game.n + 1):
        v = pspe(game, GroundedPosition(pos, p)).value
        rows.append(tuple(a - b for a, b in zip(v, tot)))
    return tuple(rows)


def matrix_ge(a: Matrix, b: Matrix) -> bool:
    """Entrywise order on outcome matrices."""
    return all(x >= y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


# --- partizan Normal play ---------------------------------------------------------


@dataclass(frozen=True)
class PartizanPosition:
    """One heap of a partizan subtraction game; Left is player 1."""

    heap: int
    left: frozenset[int]
    right: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        if self.heap < 0:
            raise ValueError("negative heap")

    @classmethod
    def of(cls, heap: int, left: Iterable[int], right: Iterable[int] | None = None) -> PartizanPosition:
        left = frozenset(left)
        return cls(heap, left, left if right is None else frozenset(right))

    def moves(self, player: str) -> list[int]:
        s = self.left if player == "L" else self.right
        return sorted((a for a in s if a <= self.heap), reverse=True)

    def to_json(self) -> dict[str, Any]:
        return {"heap": self.heap, "left": sorted(self.left), "right": sorted(self.right)}


def negate(g: PartizanPosition) -> PartizanPosition:
    return PartizanPosition(g.heap, g.right, g.left)


def _other(p: str) -> str:
    return "R" if p == "L" else "L"


@lru_cache(maxsize=None)
def _wins(heaps: tuple[int, ...], sets: tuple[tuple[frozenset, frozenset], ...], mover: str) -> bool:
    """Does ``mover`` win the sum under Normal play when moving next?"""
    side = 0 if mover == "L" else 1
    for k, x in enumerate(heaps):
        for a in sets[k][side]:
            if a <= x:
                child = heaps[:k] + (x - a,) + heaps[k + 1 :]
                if not _wins(child, sets, _other(mover)):
                    return True
    return False


def _key(positions: Sequence[PartizanPosition]):
    return tuple(p.heap for p in positions), tuple((p.left, p.right) for p in positions)


def np_wins(positions: Sequence[PartizanPosition], mover: str) -> bool:
    heaps, sets = _key(positions)
    return _wins(heaps, sets, mover)


def np_class(positions: Sequence[PartizanPosition]) -> str:
    left_first = np_wins(positions, "L")
    right_first = np_wins(positions, "R")
    if left_first and right_first:
        return "N"
    if left_first:
        return "L"
    if right_first:
        return "R"
    return "P"


@dataclass
class NormalPlayTable:
    left: tuple[int, ...]
    right: tuple[int, ...]
    left_first: list[bool] = field(default_factory=list)
    right_first: list[bool] = field(default_factory=list)

    @property
    def classes(self) -> list[str]:
        out = []
        for lf, rf in zip(self.left_first, self.right_first):
            out.append("N" if lf and rf else "L" if lf else "R" if rf else "P")
        return out

    def to_rows(self) -> list[list]:
        return [[x, c, int(lf), int(rf)] for x, (c, lf, rf) in enumerate(zip(self.classes, self.left_first, self.right_first))]


def np_outcome_classes(S_left: Iterable[int], S_right: Iterable[int] | None, x_max: int) -> NormalPlayTable:
    """Class of every single heap ``0..x_max`` by a one-pass table.

    ``left_first[x]`` says Left wins moving first; a mover wins iff some
    move leaves a heap the opponent loses moving first.
    """
    L = tuple(sorted(set(S_left)))
    R = L if S_right is None else tuple(sorted(set(S_right)))
    t = NormalPlayTable(L, R)
    for x in range(x_max + 1):
        t.left_first.append(any(a <= x and not t.right_first[x - a] for a in L))
        t.right_first.append(any(a <= x and not t.left_first[x - a] for a in R))
    return t


ORDER = {"L": 3, "N": 2, "P": 2, "R": 1}


def class_ge(a: str, b: str) -> bool | None:
    """Outcome-class order; ``None`` when incomparable (N vs P)."""
    if a == b:
        return True
    if {a, b} == {"N", "P"}:
        return None
    return ORDER[a] > ORDER[b]


def np_ge(G: PartizanPosition | Sequence[PartizanPosition], H: PartizanPosition | Sequence[PartizanPosition]) -> bool:
    """``G >= H``: Left wins ``G + (-H)`` when Right starts."""
    g = [G] if isinstance(G, PartizanPosition) else list(G)
    h = [H] if isinstance(H, PartizanPosition) else list(H)
    return not np_wins(g + [negate(x) for x in h], "R")


def np_line(positions: Sequence[PartizanPosition], first: str) -> list[tuple[str, int, int]]:
    """A play line: the side that can win always picks its first winning
    move, the other side its first legal move. Entries are
    ``(player, component, amount)``."""
    heaps, sets = _key(positions)
    heaps = list(heaps)
    mover = first
    line = []
    while True:
        side = 0 if mover == "L" else 1
        moves = [(k, a) for k, x in enumerate(heaps) for a in sorted(sets[k][side], reverse=True) if a <= x]
        if not moves:
            return line
        pick = moves[0]
        for k, a in moves:
            child = tuple(heaps[:k] + [heaps[k] - a] + heaps[k + 1 :])
            if not _wins(child, sets, _other(mover)):
                pick = (k, a)
                break
        k, a = pick
        heaps[k] -= a
        line.append((mover, k, a))
        mover = _other(mover)


def np_game(pos: PartizanPosition, move_budget: int | None = None) -> tuple[CumulativeGame, HeapPosition]:
    """The heap as a two-player cumulative game with Normal-play utility."""
    from .rulesets import RulesetSpec, UtilitySpec, build_game

    spec = RulesetSpec("fixed_subtraction", (tuple(sorted(pos.left)), tuple(sorted(pos.right))), "none")
    game = build_game(spec, UtilitySpec("normal_play"), 2, 1, **({} if move_budget is None else {"move_budget": move_budget}))
    return game, HeapPosition.start((pos.heap,), 2)


# --- comparison certificates --------------------------------------------------------


@dataclass
class ComparisonCertificate:
    verdict: str  # proven_ge | refuted | unresolved
    method: str  # normal_play_exact | bounded_refutation
    witness: Any = None
    start: int | None = None
    checked: int = 0
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        w = self.witness
        if isinstance(w, PartizanPosition):
            w = w.to_json()
        elif isinstance(w, tuple) and len(w) == 2 and isinstance(w[1], HeapPosition):
            w = {"ruleset": w[0].ruleset.name, "heaps": list(w[1].heaps), "cumulation": [list(r) for r in w[1].cumulation]}
        elif w is not None and not isinstance(w, (dict, list, str)):
            w = str(w)
        return {
            "verdict": self.verdict,
            "method": self.method,
            "witness": w,
            "start": self.start,
            "checked": self.checked,
            "notes": list(self.notes),
        }


def single_heap_family(game: CumulativeGame, max_heap: int = 8) -> Iterator[Component | None]:
    """``None`` (no extra component) first, then each single-heap position
    of ``game`` up to ``max_heap``."""
    yield None
    for h in range(game.d):
        for x in range(max_heap + 1):
            heaps = tuple(x if k == h else 0 for k in range(game.d))
            yield game, HeapPosition.start(heaps, game.n)


def compare_refute(
    G,
    H,
    player: int = 1,
    family: Callable[[], Iterable[Component | None]] | Iterable[Component | None] | None = None,
    budget: int = 64,
) -> ComparisonCertificate:
    """Look for ``X`` and a starting player ``j`` with player ``p``'s outcome
    in ``G+X`` below that in ``H+X``.

    A miss within ``budget`` positions is ``unresolved``, never a proof.
    Normal-play partizan heaps are decided exactly instead (``p`` is Left).
    """
    if isinstance(G, PartizanPosition) and isinstance(H, PartizanPosition):
        if np_ge(G, H):
            return ComparisonCertificate("proven_ge", "normal_play_exact", checked=1)
        return ComparisonCertificate("refuted", "normal_play_exact", witness=negate(H), start=2, checked=1)
    gg, gpos = G
    hg, hpos = H
    if family is None:
        xs: Iterable = single_heap_family(gg)
    elif callable(family):
        xs = family()
    else:
        xs = family
    n = gg.n
    if not 1 <= player <= n:
        raise DimensionError(f"player {player} outside 1..{n}")
    cert = ComparisonCertificate("unresolved", "bounded_refutation")
    for X in xs:
        if cert.checked >= budget:
            break
        try:
            if X is None:
                a, b = outcome_matrix(gg, gpos), outcome_matrix(hg, hpos)
            else:
                sg, sh = disjunctive_sum((gg, gpos), X), disjunctive_sum((hg, hpos), X)
                a, b = outcome_matrix(sg.game, sg.position), outcome_matrix(sh.game, sh.position)
        except BudgetExceeded as exc:
            cert.notes.append(f"skipped infeasible sum: {exc}")
            continue
        cert.checked += 1
        for r in range(n):
            if a[r][player - 1] < b[r][player - 1]:
                cert.verdict = "refuted"
                cert.witness = "empty" if X is None else X
                cert.start = cyclic_next(r + 1, n)
                return cert
    return cert
