"""Cumulative game forms: positions, rulesets, turn functions and utilities.

Players are numbered ``1..n``. A cumulation is stored as an ``n x d`` tuple of
rows, row ``i - 1`` holding player ``i``'s amounts on each heap. Actions are
integer vectors of length ``d`` that are added to the heaps (negative entries
remove pebbles).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

Action = tuple[int, ...]
Matrix = tuple[tuple[float, ...], ...]

TOL = 1e-9
DEFAULT_MOVE_BUDGET = 10**6


class GameError(Exception):
    """Base class for errors raised by the engine."""


class DimensionError(GameError, ValueError):
    pass


class IllegalActionError(GameError, ValueError):
    pass


class InvalidRulesetError(GameError):
    """A ruleset produced an action that drives a heap negative."""


class BudgetExceeded(GameError):
    """A move or node budget was exhausted."""

    def __init__(self, message: str, path: Sequence = ()):
        super().__init__(message)
        self.path = tuple(path)


def _as_matrix(rows: Iterable[Iterable[float]]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def zero_matrix(n: int, d: int) -> Matrix:
    return tuple((0,) * d for _ in range(n))


def add_matrix(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def row_sums(m: Matrix) -> tuple[float, ...]:
    return tuple(sum(r) for r in m)


def cyclic_next(p: int, n: int) -> int:
    return p % n + 1


@dataclass(frozen=True)
class HeapPosition:
    """Heap sizes together with the ``n x d`` cumulation matrix."""

    heaps: tuple[int, ...]
    cumulation: Matrix

    def __post_init__(self):
        object.__setattr__(self, "heaps", tuple(int(x) for x in self.heaps))
        object.__setattr__(self, "cumulation", _as_matrix(self.cumulation))
        d = len(self.heaps)
        if any(x < 0 for x in self.heaps):
            raise DimensionError(f"negative heap in {self.heaps}")
        if not self.cumulation or any(len(r) != d for r in self.cumulation):
            raise DimensionError(f"cumulation must be n x {d}, got {self.cumulation}")

    @classmethod
    def start(cls, heaps: Sequence[int], n: int, cumulation: Sequence[Sequence[float]] | None = None) -> HeapPosition:
        heaps = tuple(heaps)
        if cumulation is None:
            cumulation = zero_matrix(n, len(heaps))
        return cls(heaps, _as_matrix(cumulation))

    @property
    def n(self) -> int:
        return len(self.cumulation)

    @property
    def d(self) -> int:
        return len(self.heaps)

    def column(self, h: int) -> tuple[float, ...]:
        return tuple(r[h] for r in self.cumulation)

    def totals(self) -> tuple[float, ...]:
        return row_sums(self.cumulation)

    def shifted(self, offset: Matrix) -> HeapPosition:
        return HeapPosition(self.heaps, add_matrix(self.cumulation, offset))

    def __str__(self):
        cols = ",".join(f"({x};{','.join(_fmt(c) for c in self.column(h))})" for h, x in enumerate(self.heaps))
        return f"[{cols}]"


def _fmt(v: float) -> str:
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    return str(v)


@dataclass(frozen=True)
class GroundedPosition:
    """A heap position with the player who moved last."""

    position: HeapPosition
    previous: int

    @classmethod
    def of(cls, heaps: Sequence[int], cumulation: Sequence[Sequence[float]], previous: int) -> GroundedPosition:
        return cls(HeapPosition(tuple(heaps), _as_matrix(cumulation)), previous)

    @property
    def heaps(self) -> tuple[int, ...]:
        return self.position.heaps

    @property
    def cumulation(self) -> Matrix:
        return self.position.cumulation

    def __str__(self):
        return f"{self.position}/p={self.previous}"


@dataclass(frozen=True)
class TiePolicy:
    """Generic tie-breaking for a mover facing equal own utility.

    Candidates are filtered by the mover's utility, then by each opponent's
    utility in the mover's preference order (minimised when antagonistic,
    maximised when friendly). Anything still tied goes to the first candidate
    in the caller's order, which callers keep sorted by action vector.
    """

    mode: str = "antagonistic"
    preferences: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("antagonistic", "friendly"):
            raise ValueError(f"unknown tie mode {self.mode!r}")
        object.__setattr__(self, "preferences", {int(k): tuple(v) for k, v in dict(self.preferences).items()})

    def __hash__(self):
        return hash((self.mode, tuple(sorted(self.preferences.items()))))

    def opponents(self, mover: int, n: int) -> tuple[int, ...]:
        order = self.preferences.get(mover)
        if order is None:
            return tuple(j for j in range(1, n + 1) if j != mover)
        return tuple(order)

    def choose(self, mover: int, values: Sequence[Sequence[float]]) -> int:
        """Index of the preferred utility vector among ``values``."""
        if not values:
            raise ValueError("no candidates")
        n = len(values[0])
        idx = list(range(len(values)))
        best = max(values[i][mover - 1] for i in idx)
        idx = [i for i in idx if values[i][mover - 1] >= best - TOL]
        for j in self.opponents(mover, n):
            if len(idx) == 1:
                break
            col = [values[i][j - 1] for i in idx]
            target = min(col) if self.mode == "antagonistic" else max(col)
            idx = [i for i in idx if abs(values[i][j - 1] - target) <= TOL]
        return idx[0]


ActionFn = Callable[[HeapPosition, int, int], Iterable[Action]]
RewardFn = Callable[[HeapPosition, int, int, Action], Matrix]


@dataclass(frozen=True)
class Ruleset:
    """Action sets and rewards.

    Both callables receive ``(position, previous, current)``; the reward also
    receives the action. ``current`` is supplied by the game's turn function.
    """

    actions: ActionFn
    rewards: RewardFn
    cumulation_independent: bool = True
    symmetric: bool = True
    short: bool = True
    name: str = "custom"


@dataclass(frozen=True)
class TurnFunction:
    kind: str = "cyclic"
    custom: Callable[[HeapPosition, int, int], int] | None = None
    cumulation_independent: bool = True

    def __post_init__(self):
        if self.kind not in ("cyclic", "alternating", "custom"):
            raise ValueError(f"unknown turn kind {self.kind!r}")
        if self.kind == "custom" and self.custom is None:
            raise ValueError("custom turn function needs a callable")

    def __call__(self, pos: HeapPosition, previous: int, n: int) -> int:
        if self.kind == "custom":
            return self.custom(pos, previous, n)
        if self.kind == "alternating" and n != 2:
            raise DimensionError("alternating turns need exactly two players")
        return cyclic_next(previous, n)


HeapUtility = Callable[[tuple[float, ...], int], tuple[float, ...]]


def identity_heap_utility(column: tuple[float, ...], current: int) -> tuple[float, ...]:
    return column


@dataclass(frozen=True)
class UtilityMap:
    """Per-heap terminal utilities, summed over heaps.

    ``per_heap[h]`` maps (cumulation column of heap ``h``, current player) to
    the vector of all players' utilities on that heap.
    """

    per_heap: tuple[HeapUtility, ...]
    identity: bool = False

    @classmethod
    def identity_map(cls, d: int) -> UtilityMap:
        return cls((identity_heap_utility,) * d, identity=True)

    def __call__(self, cumulation: Matrix, current: int) -> tuple[float, ...]:
        n = len(cumulation)
        total = [0] * n
        for h, fn in enumerate(self.per_heap):
            col = tuple(r[h] for r in cumulation)
            for i, v in enumerate(fn(col, current)):
                total[i] += v
        return tuple(total)


@dataclass(frozen=True)
class CumulativeGame:
    n: int
    d: int
    ruleset: Ruleset
    turn: TurnFunction = field(default_factory=TurnFunction)
    utility: UtilityMap | None = None
    move_budget: int = DEFAULT_MOVE_BUDGET
    tie: TiePolicy = field(default_factory=TiePolicy)

    def __post_init__(self):
        if self.utility is None:
            object.__setattr__(self, "utility", UtilityMap.identity_map(self.d))
        if len(self.utility.per_heap) != self.d:
            raise DimensionError("utility map must have one entry per heap")

    @property
    def heap_size_dynamic(self) -> bool:
        return self.ruleset.cumulation_independent and self.turn.cumulation_independent

    def check(self, g: GroundedPosition) -> None:
        pos = g.position
        if pos.d != self.d or pos.n != self.n:
            raise DimensionError(f"position is {pos.n}x{pos.d}, game is {self.n}x{self.d}")
        if not 1 <= g.previous <= self.n:
            raise DimensionError(f"previous player {g.previous} outside 1..{self.n}")

    def current_player(self, g: GroundedPosition) -> int:
        return self.turn(g.position, g.previous, self.n)

    def legal_actions(self, g: GroundedPosition) -> list[Action]:
        cur = self.current_player(g)
        acts = sorted({tuple(a) for a in self.ruleset.actions(g.position, g.previous, cur)})
        for a in acts:
            if len(a) != self.d:
                raise DimensionError(f"action {a} has wrong length")
            if any(x + da < 0 for x, da in zip(g.heaps, a)):
                raise InvalidRulesetError(f"action {a} drives a heap negative at {g}")
        return acts

    def apply(self, g: GroundedPosition, a: Action, current: int | None = None) -> GroundedPosition:
        if current is None:
            current = self.current_player(g)
        r = self.ruleset.rewards(g.position, g.previous, current, a)
        heaps = tuple(x + da for x, da in zip(g.heaps, a))
        return GroundedPosition(HeapPosition(heaps, add_matrix(g.cumulation, r)), current)

    def options(self, g: GroundedPosition) -> list[tuple[Action, GroundedPosition]]:
        """``(action, child)`` pairs in lexicographic action order."""
        cur = self.current_player(g)
        return [(a, self.apply(g, a, cur)) for a in self.legal_actions(g)]

    def is_terminal(self, g: GroundedPosition) -> bool:
        return not self.legal_actions(g)

    def terminal_utility(self, g: GroundedPosition) -> tuple[float, ...]:
        return self.utility(g.cumulation, self.current_player(g))


def expand_options(game: CumulativeGame, g: GroundedPosition) -> frozenset[GroundedPosition]:
    """All options of ``g``; empty exactly when ``g`` is terminal."""
    game.check(g)
    return frozenset(child for _, child in game.options(g))


def step(game: CumulativeGame, g: GroundedPosition, a: Sequence[int]) -> GroundedPosition:
    game.check(g)
    a = tuple(a)
    if a not in game.legal_actions(g):
        raise IllegalActionError(f"action {a} not available at {g}")
    return game.apply(g, a)


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    longest: int
    path: tuple[Action, ...] = ()

    def __bool__(self):
        return self.ok


def check_feasibility(game: CumulativeGame, g: GroundedPosition, budget: int | None = None) -> FeasibilityReport:
    """Exhaustive depth-first check that every line from ``g`` ends within budget.

    Longest-line lengths are memoised per grounded position, so shared
    subgames are visited once. A revisited position on the current line is an
    infinite line and is reported as over budget.
    """
    game.check(g)
    budget = game.move_budget if budget is None else budget
    longest: dict[GroundedPosition, int] = {}
    on_stack: set[GroundedPosition] = set()
    # frames: (position, pending options iterator, best so far)
    stack = [(g, iter(game.options(g)), 0)]
    actions: list[Action] = []
    on_stack.add(g)
    while stack:
        node, it, best = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            on_stack.discard(node)
            longest[node] = best
            if actions:
                actions.pop()
            if stack:
                parent, pit, pbest = stack[-1]
                stack[-1] = (parent, pit, max(pbest, best + 1))
            continue
        a, child = nxt
        if child in on_stack or len(actions) + 1 > budget:
            return FeasibilityReport(False, len(actions) + 1, tuple(actions) + (a,))
        if child in longest:
            depth = longest[child]
            if len(actions) + 1 + depth > budget:
                return FeasibilityReport(False, len(actions) + 1 + depth, tuple(actions) + (a,))
            stack[-1] = (node, it, max(best, depth + 1))
            continue
        actions.append(a)
        on_stack.add(child)
        stack.append((child, iter(game.options(child)), 0))
    return FeasibilityReport(True, longest[g])
