"""Catalog of concrete rulesets, reward schemes and utility presets.

Everything here is data-driven so a game can be written to and read back from
a JSON document without carrying code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .core import (
    DEFAULT_MOVE_BUDGET,
    Action,
    CumulativeGame,
    DimensionError,
    GameError,
    GroundedPosition,
    HeapPosition,
    Matrix,
    Ruleset,
    TiePolicy,
    TurnFunction,
    UtilityMap,
    cyclic_next,
    identity_heap_utility,
)

RULESET_PRESETS = ("fixed_subtraction", "wealth", "prologue_compound", "custom_table")
REWARD_SCHEMES = ("identity", "transfer", "last_pebble", "last_pebble_misere", "none")
UTILITY_PRESETS = (
    "identity",
    "zero_sum_difference",
    "normal_play",
    "misere_play",
    "auction",
    "scoring",
    "custom_terminal_table",
)

PROLOGUE_HEAPS = "ABCDEF"


class UnknownPresetError(GameError, ValueError):
    pass


class ValidationError(GameError, ValueError):
    """Schema violation; ``paths`` lists the offending field paths."""

    def __init__(self, paths: Sequence[str]):
        self.paths = list(paths)
        super().__init__("invalid document: " + "; ".join(self.paths))


@dataclass(frozen=True)
class RulesetSpec:
    """A catalog ruleset plus its parameters.

    ``sets`` holds one subtraction set per player (a single set means every
    player uses it). ``table`` is only read by ``custom_table``: a tuple of
    ``(heaps, player_or_None, ((delta, reward_matrix), ...))`` entries.
    """

    preset: str
    sets: tuple[tuple[int, ...], ...] = ()
    rewards: str = "identity"
    table: tuple = ()
    players: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(tuple(sorted(set(int(a) for a in s))) for s in self.sets))

    @property
    def symmetric(self) -> bool:
        return len(set(self.sets)) <= 1

    def set_for(self, player: int) -> tuple[int, ...]:
        if len(self.sets) == 1:
            return self.sets[0]
        return self.sets[player - 1]


@dataclass(frozen=True)
class UtilitySpec:
    preset: str = "identity"
    tie_policy: str = "antagonistic"
    preferences: tuple[tuple[int, tuple[int, ...]], ...] = ()
    value: float | None = None
    table: tuple = ()

    def tie(self) -> TiePolicy:
        return TiePolicy(self.tie_policy, dict(self.preferences))


def fixed(*sets: Sequence[int], rewards: str = "identity") -> RulesetSpec:
    return RulesetSpec("fixed_subtraction", tuple(tuple(s) for s in sets), rewards)


# --- reward helpers -------------------------------------------------------


def _single_entry(n: int, d: int, h: int, column: Sequence[float]) -> Matrix:
    return tuple(tuple(column[i] if k == h else 0 for k in range(d)) for i in range(n))


def _moved_heap(a: Action) -> tuple[int, int]:
    """(heap index, amount removed) of a single-heap removal."""
    for h, da in enumerate(a):
        if da:
            return h, -da
    raise ValueError(f"null action {a}")


def _reward_column(scheme: str, n: int, mover: int, taken: int, emptied: bool) -> list[float]:
    col = [0] * n
    if scheme == "identity":
        col[mover - 1] = taken
    elif scheme == "transfer":
        if n != 2:
            raise DimensionError("transfer rewards need two players")
        col[mover - 1] = taken
        col[2 - mover] = -taken
    elif scheme in ("last_pebble", "last_pebble_misere"):
        if emptied:
            sign = 1 if scheme == "last_pebble" else -1
            col = [-sign] * n
            col[mover - 1] = sign
    elif scheme != "none":
        raise UnknownPresetError(f"unknown reward scheme {scheme!r}")
    return col


def subtraction_ruleset(spec: RulesetSpec, n: int, d: int) -> Ruleset:
    scheme = spec.rewards
    if scheme not in REWARD_SCHEMES:
        raise UnknownPresetError(f"unknown reward scheme {scheme!r}")
    if scheme == "transfer" and n != 2:
        raise DimensionError("transfer rewards need two players")
    if not spec.sets or (len(spec.sets) != 1 and len(spec.sets) != n):
        raise DimensionError(f"need 1 or {n} subtraction sets, got {len(spec.sets)}")
    if any(a <= 0 for s in spec.sets for a in s):
        raise DimensionError("subtraction sets must contain positive integers")

    def actions(pos: HeapPosition, previous: int, current: int):
        s = spec.set_for(current)
        for h, x in enumerate(pos.heaps):
            for a in s:
                if a <= x:
                    yield tuple(-a if k == h else 0 for k in range(d))

    def rewards(pos: HeapPosition, previous: int, current: int, a: Action) -> Matrix:
        h, taken = _moved_heap(a)
        col = _reward_column(scheme, n, current, taken, taken == pos.heaps[h])
        return _single_entry(n, d, h, col)

    return Ruleset(actions, rewards, cumulation_independent=True, symmetric=spec.symmetric, name="fixed_subtraction")


def wealth_ruleset(n: int, d: int) -> Ruleset:
    """Remove up to your own cumulation on a heap; identity rewards."""

    def actions(pos: HeapPosition, previous: int, current: int):
        for h, x in enumerate(pos.heaps):
            cap = min(int(pos.cumulation[current - 1][h]), x)
            for k in range(1, cap + 1):
                yield tuple(-k if j == h else 0 for j in range(d))

    def rewards(pos: HeapPosition, previous: int, current: int, a: Action) -> Matrix:
        h, taken = _moved_heap(a)
        return _single_entry(n, d, h, _reward_column("identity", n, current, taken, False))

    return Ruleset(actions, rewards, cumulation_independent=False, symmetric=True, name="wealth")


def table_ruleset(spec: RulesetSpec, n: int, d: int) -> Ruleset:
    lookup: dict[tuple, tuple[tuple[Action, Matrix], ...]] = {}
    for heaps, player, acts in spec.table:
        lookup[(tuple(heaps), player)] = tuple((tuple(delta), tuple(tuple(r) for r in rew)) for delta, rew in acts)

    def entries(pos: HeapPosition, current: int):
        got = lookup.get((pos.heaps, current))
        if got is None:
            got = lookup.get((pos.heaps, None), ())
        return got

    def actions(pos, previous, current):
        return [a for a, _ in entries(pos, current)]

    def rewards(pos, previous, current, a):
        for delta, rew in entries(pos, current):
            if delta == a:
                return rew
        raise KeyError(a)

    return Ruleset(actions, rewards, cumulation_independent=True, symmetric=False, name="custom_table")


# --- the three-player compound game ----------------------------------------

PROLOGUE_ADD = (1, 1, 0, 0, 0, 0)
AUCTION_VALUE = 4


def auction_utility(value: float):
    def u(column: tuple[float, ...], current: int) -> tuple[float, ...]:
        out = []
        for i, c in enumerate(column):
            wins = all(c > other for j, other in enumerate(column) if j != i)
            out.append(value - c if wins else 0)
        return tuple(out)

    return u


def normal_play_utility(column: tuple[float, ...], current: int) -> tuple[float, ...]:
    return tuple(-1 if i + 1 == current else 1 for i in range(len(column)))


def misere_play_utility(column: tuple[float, ...], current: int) -> tuple[float, ...]:
    return tuple(1 if i + 1 == current else -1 for i in range(len(column)))


def zero_heap_utility(column: tuple[float, ...], current: int) -> tuple[float, ...]:
    return (0,) * len(column)


def prologue_compound(players: int = 3, move_budget: int = DEFAULT_MOVE_BUDGET) -> CumulativeGame:
    """The six-heap compound game A+B+C+D+E+F.

    Heaps A..E use subtraction set {2,3} (Charlie: {1,4}); heap F is wealth
    play. A rewards taking the last pebble, B punishes it, C is scoring play
    with Bob on the other side, D and E collect, E is an auction worth 4 and
    F pays -1 to whoever is stuck at the end. With three players Charlie may
    also add a pebble to each of A and B for free, and Bob moves again
    whenever he has moved and his total cumulation is exactly 5.
    """
    if players not in (2, 3):
        raise DimensionError("the compound game is defined for 2 or 3 players")
    n, d = players, 6
    own_sets = {1: (2, 3), 2: (2, 3), 3: (1, 4)}

    def actions(pos: HeapPosition, previous: int, current: int):
        x = pos.heaps
        for h in range(5):
            for a in own_sets[current]:
                if a <= x[h]:
                    yield tuple(-a if k == h else 0 for k in range(d))
        cap = min(int(pos.cumulation[current - 1][5]), x[5])
        for k in range(1, cap + 1):
            yield (0, 0, 0, 0, 0, -k)
        if current == 3:
            yield PROLOGUE_ADD

    def rewards(pos: HeapPosition, previous: int, current: int, a: Action) -> Matrix:
        if a == PROLOGUE_ADD:
            return tuple((0,) * d for _ in range(n))
        h, taken = _moved_heap(a)
        col = [0] * n
        emptied = taken == pos.heaps[h]
        if h == 0 and emptied:
            col = [1 if i + 1 == current else -1 for i in range(n)]
        elif h == 1 and emptied:
            col = [-1 if i + 1 == current else 1 for i in range(n)]
        elif h == 2:
            sign = -1 if current == 2 else 1
            col = [-sign * taken if i == 1 else sign * taken for i in range(n)]
        elif h >= 3:
            col[current - 1] = taken
        return _single_entry(n, d, h, col)

    def turn(pos: HeapPosition, previous: int, n_: int) -> int:
        if n_ == 3 and previous == 2 and sum(pos.cumulation[1]) == 5:
            return 2
        return cyclic_next(previous, n_)

    ruleset = Ruleset(actions, rewards, cumulation_independent=False, symmetric=False, name="prologue_compound")
    utility = UtilityMap(
        (identity_heap_utility,) * 4 + (auction_utility(AUCTION_VALUE), normal_play_utility),
        identity=False,
    )
    turn_fn = TurnFunction("custom", turn, cumulation_independent=False) if n == 3 else TurnFunction("cyclic")
    return CumulativeGame(n, d, ruleset, turn_fn, utility, move_budget=move_budget)


def prologue_start(players: int = 3) -> GroundedPosition:
    """All heaps at 4, F with cumulation 1 for everybody; player 1 to move."""
    cum = tuple((0, 0, 0, 0, 0, 1) for _ in range(players))
    return GroundedPosition(HeapPosition((4,) * 6, cum), players)


# --- building games from specs --------------------------------------------


def _heap_utility(us: UtilitySpec, n: int, d: int) -> UtilityMap:
    p = us.preset
    if p in ("identity", "scoring"):
        return UtilityMap.identity_map(d)
    if p == "zero_sum_difference":
        if n != 2:
            raise DimensionError("zero-sum difference utility needs two players")
        return UtilityMap(((lambda c, cur: (c[0] - c[1], c[1] - c[0])),) * d)
    if p in ("normal_play", "misere_play"):
        # the stuck player is the same on every heap, so count it once
        fn = normal_play_utility if p == "normal_play" else misere_play_utility
        return UtilityMap((fn,) + (zero_heap_utility,) * (d - 1))
    if p == "auction":
        if us.value is None:
            raise DimensionError("auction utility needs a value")
        return UtilityMap((auction_utility(us.value),) * d)
    if p == "custom_terminal_table":
        if d != 1:
            raise DimensionError("custom terminal tables are single-heap")
        table = {(tuple(c), cur): tuple(u) for c, cur, u in us.table}

        def lookup(column, current):
            got = table.get((tuple(column), current))
            if got is None:
                got = table.get((tuple(column), None), (0,) * n)
            return got

        return UtilityMap((lookup,))
    raise UnknownPresetError(f"unknown utility preset {p!r}")


def build_game(
    rs: RulesetSpec,
    us: UtilitySpec,
    n: int,
    d: int,
    move_budget: int = DEFAULT_MOVE_BUDGET,
    turn_table: tuple = (),
) -> CumulativeGame:
    """Assemble a :class:`CumulativeGame` from catalog specs."""
    if n < 1 or d < 1:
        raise DimensionError("need at least one player and one heap")
    if us.preset not in UTILITY_PRESETS:
        raise UnknownPresetError(f"unknown utility preset {us.preset!r}")
    if rs.preset == "prologue_compound":
        if d != 6:
            raise DimensionError("the compound game has six heaps")
        g = prologue_compound(n, move_budget)
        return CumulativeGame(g.n, g.d, g.ruleset, g.turn, g.utility, move_budget, us.tie())
    if rs.preset == "fixed_subtraction":
        if us.preset == "scoring" and rs.rewards == "identity":
            rs = RulesetSpec(rs.preset, rs.sets, "transfer")
        ruleset = subtraction_ruleset(rs, n, d)
    elif rs.preset == "wealth":
        ruleset = wealth_ruleset(n, d)
    elif rs.preset == "custom_table":
        ruleset = table_ruleset(rs, n, d)
    else:
        raise UnknownPresetError(f"unknown ruleset preset {rs.preset!r}")
    turn = TurnFunction("cyclic")
    if turn_table:
        table = {tuple(h): p for h, p in turn_table}
        turn = TurnFunction("custom", lambda pos, prev, n_: table.get(pos.heaps, cyclic_next(prev, n_)))
    return CumulativeGame(n, d, ruleset, turn, _heap_utility(us, n, d), move_budget, us.tie())


def zero_sum_transfer(rs: RulesetSpec, move_budget: int = DEFAULT_MOVE_BUDGET) -> CumulativeGame:
    """Zero-sum subtraction play as an identity-utility game with transfer rewards.

    The mover gains what they take and the opponent loses it, so terminal
    ``C_1`` equals the zero-sum score ``C_1 - C_2`` of the plain encoding.
    """
    if rs.preset != "fixed_subtraction":
        raise UnknownPresetError("transfer encoding needs a fixed subtraction ruleset")
    if len(rs.sets) > 2:
        raise DimensionError("transfer encoding needs two players")
    spec = RulesetSpec(rs.preset, rs.sets, "transfer")
    return build_game(spec, UtilitySpec("identity"), 2, 1, move_budget)


def zero_sum_utility_game(rs: RulesetSpec, move_budget: int = DEFAULT_MOVE_BUDGET) -> CumulativeGame:
    """The plain zero-sum encoding: identity rewards, utility ``C_i - C_-i``."""
    spec = RulesetSpec(rs.preset, rs.sets, "identity")
    return build_game(spec, UtilitySpec("zero_sum_difference"), 2, 1, move_budget)


# --- JSON game documents ---------------------------------------------------

DOC_VERSION = 1


@dataclass(frozen=True)
class GameDocument:
    """A cumulative game plus its starting grounded position."""

    players: int
    heaps: int
    ruleset: RulesetSpec
    utility: UtilitySpec
    initial_heaps: tuple[int, ...]
    initial_cumulation: tuple[tuple[float, ...], ...]
    previous_player: int
    move_budget: int = DEFAULT_MOVE_BUDGET
    turn_table: tuple = field(default=())

    def game(self, move_budget: int | None = None) -> CumulativeGame:
        return build_game(
            self.ruleset,
            self.utility,
            self.players,
            self.heaps,
            self.move_budget if move_budget is None else move_budget,
            self.turn_table,
        )

    def start(self) -> GroundedPosition:
        return GroundedPosition(HeapPosition(self.initial_heaps, self.initial_cumulation), self.previous_player)

    def to_json(self) -> dict[str, Any]:
        rs: dict[str, Any] = {"preset": self.ruleset.preset}
        if self.ruleset.sets:
            rs["sets"] = [list(s) for s in self.ruleset.sets]
        if self.ruleset.preset == "fixed_subtraction":
            rs["rewards"] = self.ruleset.rewards
        if self.ruleset.table:
            rs["table"] = [
                {
                    "heaps": list(h),
                    "player": p,
                    "actions": [{"delta": list(a), "reward": [list(r) for r in rew]} for a, rew in acts],
                }
                for h, p, acts in self.ruleset.table
            ]
        ut: dict[str, Any] = {"preset": self.utility.preset, "tie_policy": self.utility.tie_policy}
        if self.utility.preferences:
            ut["preferences"] = {str(k): list(v) for k, v in self.utility.preferences}
        if self.utility.value is not None:
            ut["value"] = self.utility.value
        if self.utility.table:
            ut["table"] = [{"cumulation": list(c), "current": cur, "utilities": list(u)} for c, cur, u in self.utility.table]
        doc: dict[str, Any] = {
            "kind": "cumulative",
            "version": DOC_VERSION,
            "players": self.players,
            "heaps": self.heaps,
            "ruleset": rs,
            "utility": ut,
            "initial": {
                "heaps": list(self.initial_heaps),
                "cumulation": [list(r) for r in self.initial_cumulation],
                "previous_player": self.previous_player,
            },
            "move_budget": self.move_budget,
        }
        if self.turn_table:
            doc["turn"] = {"kind": "table", "table": [{"heaps": list(h), "player": p} for h, p in self.turn_table]}
        return doc


def _num(v):
    return int(v) if isinstance(v, float) and v.is_integer() else v


def parse_game_document(doc: Mapping[str, Any]) -> GameDocument:
    """Validate and load a game document, collecting every bad field path."""
    errs: list[str] = []

    def need(obj, key, path, types):
        if not isinstance(obj, Mapping) or key not in obj:
            errs.append(f"{path}.{key}: missing")
            return None
        v = obj[key]
        if not isinstance(v, types) or isinstance(v, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
            errs.append(f"{path}.{key}: expected {getattr(types, '__name__', types)}")
            return None
        return v

    if not isinstance(doc, Mapping):
        raise ValidationError(["$: expected an object"])
    if doc.get("kind", "cumulative") != "cumulative":
        errs.append("$.kind: expected 'cumulative'")
    version = need(doc, "version", "$", int)
    if version is not None and version != DOC_VERSION:
        errs.append(f"$.version: unsupported version {version}")
    n = need(doc, "players", "$", int)
    d = need(doc, "heaps", "$", int)
    rs = need(doc, "ruleset", "$", Mapping) or {}
    ut = need(doc, "utility", "$", Mapping) or {}
    init = need(doc, "initial", "$", Mapping) or {}
    budget = doc.get("move_budget", DEFAULT_MOVE_BUDGET)
    if not isinstance(budget, int) or budget <= 0:
        errs.append("$.move_budget: expected positive integer")

    preset = need(rs, "preset", "$.ruleset", str)
    if preset is not None and preset not in RULESET_PRESETS:
        errs.append(f"$.ruleset.preset: unknown preset {preset!r}")
    sets = rs.get("sets", [])
    if not isinstance(sets, list) or not all(isinstance(s, list) and all(isinstance(a, int) and a > 0 for a in s) for s in sets):
        errs.append("$.ruleset.sets: expected list of lists of positive integers")
        sets = []
    if preset == "fixed_subtraction" and not sets:
        errs.append("$.ruleset.sets: missing")
    rewards = rs.get("rewards", "identity")
    if rewards not in REWARD_SCHEMES:
        errs.append(f"$.ruleset.rewards: unknown scheme {rewards!r}")
    table = []
    for k, e in enumerate(rs.get("table", [])):
        try:
            table.append(
                (
                    tuple(e["heaps"]),
                    e.get("player"),
                    tuple((tuple(a["delta"]), tuple(tuple(_num(v) for v in r) for r in a["reward"])) for a in e["actions"]),
                )
            )
        except (KeyError, TypeError):
            errs.append(f"$.ruleset.table[{k}]: malformed entry")

    upreset = need(ut, "preset", "$.utility", str)
    if upreset is not None and upreset not in UTILITY_PRESETS:
        errs.append(f"$.utility.preset: unknown preset {upreset!r}")
    tie = ut.get("tie_policy", "antagonistic")
    if tie not in ("antagonistic", "friendly"):
        errs.append("$.utility.tie_policy: expected 'antagonistic' or 'friendly'")
    prefs = ut.get("preferences", {})
    if not isinstance(prefs, Mapping):
        errs.append("$.utility.preferences: expected object")
        prefs = {}
    value = ut.get("value")
    if upreset == "auction" and not isinstance(value, (int, float)):
        errs.append("$.utility.value: required for auction")
    utable = []
    for k, e in enumerate(ut.get("table", [])):
        try:
            utable.append((tuple(_num(v) for v in e["cumulation"]), e.get("current"), tuple(e["utilities"])))
        except (KeyError, TypeError):
            errs.append(f"$.utility.table[{k}]: malformed entry")

    heaps = need(init, "heaps", "$.initial", list)
    cum = init.get("cumulation")
    prev = need(init, "previous_player", "$.initial", int)
    if heaps is not None and (not all(isinstance(x, int) and x >= 0 for x in heaps) or (d is not None and len(heaps) != d)):
        errs.append("$.initial.heaps: expected list of d nonnegative integers")
    if cum is None and n is not None and d is not None:
        cum = [[0] * d for _ in range(n)]
    if not isinstance(cum, list) or (n is not None and len(cum) != n) or any(
        not isinstance(r, list) or (d is not None and len(r) != d) for r in cum
    ):
        errs.append("$.initial.cumulation: expected n x d matrix")
    if prev is not None and n is not None and not 1 <= prev <= n:
        errs.append("$.initial.previous_player: outside 1..players")
    if upreset == "auction" and isinstance(value, (int, float)) and heaps and isinstance(heaps, list):
        if any(isinstance(x, int) and x > value for x in heaps):
            errs.append("$.utility.value: auction value must be at least the initial heap size")

    turn_table = ()
    turn = doc.get("turn")
    if turn is not None:
        try:
            if turn["kind"] != "table":
                raise KeyError
            turn_table = tuple((tuple(e["heaps"]), int(e["player"])) for e in turn["table"])
        except (KeyError, TypeError):
            errs.append("$.turn: expected {kind: 'table', table: [...]}")

    if errs:
        raise ValidationError(errs)
    return GameDocument(
        players=n,
        heaps=d,
        ruleset=RulesetSpec(preset, tuple(tuple(s) for s in sets), rewards, tuple(table)),
        utility=UtilitySpec(
            upreset,
            tie,
            tuple(sorted((int(k), tuple(v)) for k, v in prefs.items())),
            _num(value) if value is not None else None,
            tuple(utable),
        ),
        initial_heaps=tuple(heaps),
        initial_cumulation=tuple(tuple(_num(v) for v in r) for r in cum),
        previous_player=prev,
        move_budget=budget,
        turn_table=turn_table,
    )
