"""Extensive-form games, backward induction and conversions to and from
cumulative games."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterator, Mapping, Sequence

from .core import (
    Action,
    BudgetExceeded,
    CumulativeGame,
    GameError,
    GroundedPosition,
    HeapPosition,
    TiePolicy,
    check_feasibility,
    cyclic_next,
)

State = Hashable


class MalformedGameError(GameError, ValueError):
    pass


class CycleError(MalformedGameError):
    pass


class ProfileError(GameError, KeyError):
    pass


@dataclass(frozen=True)
class ExtensiveFormGame:
    """Finite perfect-information game tree (or DAG).

    ``children[s]`` is ordered; that order is the residual tie-break.
    ``labels[(s, c)]`` optionally names the edge (action vectors for games
    built from cumulative games).
    """

    n: int
    root: State
    turn: Mapping[State, int]
    children: Mapping[State, tuple[State, ...]]
    utilities: Mapping[State, tuple[float, ...]]
    labels: Mapping[tuple[State, State], Any] = field(default_factory=dict)

    @property
    def states(self) -> list[State]:
        """Reachable states in preorder (first visit)."""
        seen = {self.root}
        order = []
        stack = [self.root]
        while stack:
            s = stack.pop()
            order.append(s)
            for c in reversed(self.children.get(s, ())):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return order

    def is_terminal(self, s: State) -> bool:
        return not self.children.get(s)

    def validate(self) -> None:
        if self.n < 1:
            raise MalformedGameError("need at least one player")
        _postorder(self)  # raises on cycles
        for s in self.states:
            if self.is_terminal(s):
                u = self.utilities.get(s)
                if u is None or len(u) != self.n:
                    raise MalformedGameError(f"terminal {s!r} lacks an {self.n}-vector of utilities")
            elif not 1 <= self.turn.get(s, 0) <= self.n:
                raise MalformedGameError(f"state {s!r} has no valid mover")

    def __len__(self):
        return len(self.states)


def _postorder(efg: ExtensiveFormGame) -> list[State]:
    """Children before parents; raises CycleError on a back edge."""
    done: set[State] = set()
    active: set[State] = {efg.root}
    out: list[State] = []
    stack: list[tuple[State, Iterator[State]]] = [(efg.root, iter(efg.children.get(efg.root, ())))]
    while stack:
        s, it = stack[-1]
        c = next(it, None)
        if c is None:
            stack.pop()
            active.discard(s)
            done.add(s)
            out.append(s)
        elif c in active:
            raise CycleError(f"cycle through {c!r}")
        elif c not in done:
            active.add(c)
            stack.append((c, iter(efg.children.get(c, ()))))
    return out


@dataclass
class StrategyProfile:
    """A chosen child per nonterminal state; ``values`` are the induced
    terminal utilities when the profile came from backward induction."""

    choice: dict[State, State]
    values: dict[State, tuple[float, ...]] = field(default_factory=dict)

    def __getitem__(self, s: State) -> State:
        try:
            return self.choice[s]
        except KeyError:
            raise ProfileError(f"profile undefined at {s!r}") from None

    def __contains__(self, s: State) -> bool:
        return s in self.choice

    def terminal(self, efg: ExtensiveFormGame, s: State | None = None) -> State:
        s = efg.root if s is None else s
        while not efg.is_terminal(s):
            s = self[s]
        return s

    def path(self, efg: ExtensiveFormGame, s: State | None = None) -> list[State]:
        s = efg.root if s is None else s
        line = [s]
        while not efg.is_terminal(s):
            s = self[s]
            line.append(s)
        return line


def backward_induction(efg: ExtensiveFormGame, tie: TiePolicy | None = None) -> tuple[tuple[float, ...], StrategyProfile]:
    """PSPE of ``efg`` under the generic tie policy.

    Shared subtrees of a DAG are solved once.
    """
    tie = tie or TiePolicy()
    values: dict[State, tuple[float, ...]] = {}
    choice: dict[State, State] = {}
    for s in _postorder(efg):
        kids = efg.children.get(s, ())
        if not kids:
            values[s] = tuple(efg.utilities[s])
            continue
        cand = [values[c] for c in kids]
        k = tie.choose(efg.turn[s], cand)
        choice[s] = kids[k]
        values[s] = cand[k]
    return values[efg.root], StrategyProfile(choice, values)


def is_pspe(efg: ExtensiveFormGame, profile: StrategyProfile, tol: float = 1e-9) -> bool:
    """Check the equilibrium inequality at every nonterminal state."""
    memo: dict[State, tuple[float, ...]] = {}
    for s in _postorder(efg):
        if efg.is_terminal(s):
            memo[s] = tuple(efg.utilities[s])
        else:
            memo[s] = memo[profile[s]]
    for s in memo:
        if efg.is_terminal(s):
            continue
        i = efg.turn[s] - 1
        if any(memo[c][i] > memo[s][i] + tol for c in efg.children[s]):
            return False
    return True


# --- cumulative game <-> extensive form -------------------------------------


def cg_to_efg(game: CumulativeGame, g0: GroundedPosition, merge: bool = True, node_budget: int | None = None) -> ExtensiveFormGame:
    """Unfold a grounded game into its extensive form.

    With ``merge`` identical grounded positions share one state, giving a
    DAG; otherwise states are action paths from the root and the result is
    the plain game tree.
    """
    game.check(g0)
    rep = check_feasibility(game, g0)
    if not rep:
        raise BudgetExceeded(f"line of length {rep.longest} exceeds move budget {game.move_budget}", rep.path)
    budget = node_budget if node_budget is not None else max(game.move_budget, 10**6)
    turn: dict = {}
    children: dict = {}
    utilities: dict = {}
    labels: dict = {}
    position: dict = {}

    root = g0 if merge else ()
    position[root] = g0
    queue = deque([root])
    seen = {root}
    while queue:
        s = queue.popleft()
        g = position[s]
        opts = game.options(g)
        turn[s] = game.current_player(g)
        if not opts:
            children[s] = ()
            utilities[s] = game.terminal_utility(g)
            continue
        kids = []
        for a, child in opts:
            c = child if merge else s + (a,)
            kids.append(c)
            labels[(s, c)] = a
            if c not in seen:
                seen.add(c)
                position[c] = child
                queue.append(c)
                if len(seen) > budget:
                    raise BudgetExceeded(f"more than {budget} states")
        children[s] = tuple(kids)
    efg = ExtensiveFormGame(game.n, root, turn, children, utilities, labels)
    object.__setattr__(efg, "positions", position)
    return efg


@dataclass(frozen=True)
class PSPE:
    value: tuple[float, ...]
    line: tuple[Action, ...]
    positions: tuple[GroundedPosition, ...]
    profile: dict[GroundedPosition, Action]

    @property
    def terminal(self) -> GroundedPosition:
        return self.positions[-1]


def pspe(game: CumulativeGame, g0: GroundedPosition) -> PSPE:
    """Solve a grounded game; the profile maps positions to actions."""
    efg = cg_to_efg(game, g0)
    value, prof = backward_induction(efg, game.tie)
    actions = {s: efg.labels[(s, c)] for s, c in prof.choice.items()}
    path = prof.path(efg)
    line = tuple(efg.labels[(a, b)] for a, b in zip(path, path[1:]))
    return PSPE(value, line, tuple(path), actions)


ProfileLike = Mapping[GroundedPosition, Action] | Callable[[GroundedPosition], Action]


def _action_of(profile: ProfileLike, g: GroundedPosition) -> Action:
    if callable(profile) and not isinstance(profile, Mapping):
        return tuple(profile(g))
    try:
        return tuple(profile[g])
    except KeyError:
        raise ProfileError(f"profile undefined at {g}") from None


def play_profile(game: CumulativeGame, g0: GroundedPosition, profile: ProfileLike) -> tuple[GroundedPosition, tuple[float, ...]]:
    """Follow ``profile`` to the end; returns the terminal position and the
    per-player cumulation totals there."""
    game.check(g0)
    g = g0
    for _ in range(game.move_budget + 1):
        legal = game.legal_actions(g)
        if not legal:
            return g, g.position.totals()
        a = _action_of(profile, g)
        if a not in legal:
            raise ProfileError(f"profile picks illegal action {a} at {g}")
        g = game.apply(g, a)
    raise BudgetExceeded(f"line exceeds move budget {game.move_budget}")


# --- EFG transforms ----------------------------------------------------------


def reduce_efg(efg: ExtensiveFormGame) -> ExtensiveFormGame:
    """Bypass every nonterminal state that has exactly one child."""

    def skip(s):
        while len(efg.children.get(s, ())) == 1:
            s = efg.children[s][0]
        return s

    root = skip(efg.root)
    turn, children, utilities, labels = {}, {}, {}, {}
    stack, seen = [root], {root}
    while stack:
        s = stack.pop()
        kids = tuple(skip(c) for c in efg.children.get(s, ()))
        children[s] = kids
        if kids:
            turn[s] = efg.turn[s]
        else:
            utilities[s] = efg.utilities[s]
            turn[s] = efg.turn.get(s, 1)
        for orig, c in zip(efg.children.get(s, ()), kids):
            labels[(s, c)] = efg.labels.get((s, orig), orig)
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return ExtensiveFormGame(efg.n, root, turn, children, utilities, labels)


@dataclass(frozen=True)
class Dummy:
    """Pass-through state inserted on the edge ``parent -> child``."""

    parent: State
    child: State
    step: int


def cycle_complete(efg: ExtensiveFormGame) -> tuple[ExtensiveFormGame, frozenset]:
    """Insert single-child states so movers follow ``p -> p mod n + 1``.

    Terminal children are left alone: the mover at a terminal is irrelevant.
    Returns the new game and the set of inserted states.
    """
    n = efg.n
    turn = dict(efg.turn)
    children: dict = {}
    utilities = {s: u for s, u in efg.utilities.items()}
    labels = dict(efg.labels)
    inserted = set()
    for s in efg.states:
        kids = []
        for c in efg.children.get(s, ()):
            if efg.is_terminal(c):
                kids.append(c)
                continue
            gap = (efg.turn[c] - efg.turn[s] - 1) % n
            chain = [Dummy(s, c, k) for k in range(gap)]
            p = efg.turn[s]
            for dmy in chain:
                p = cyclic_next(p, n)
                turn[dmy] = p
                inserted.add(dmy)
            nodes = chain + [c]
            for a, b in zip(nodes, nodes[1:]):
                children[a] = (b,)
            if chain:
                labels[(s, chain[0])] = efg.labels.get((s, c), c)
            kids.append(nodes[0])
        children[s] = tuple(kids)
    return ExtensiveFormGame(n, efg.root, turn, children, utilities, labels), frozenset(inserted)


def unify_child_movers(efg: ExtensiveFormGame) -> tuple[ExtensiveFormGame, frozenset]:
    """Make all children of a state share one mover by routing the odd ones
    through a single-child state owned by the first child's mover."""
    turn = dict(efg.turn)
    children: dict = {}
    labels = dict(efg.labels)
    inserted = set()
    for s in efg.states:
        kids = efg.children.get(s, ())
        movers = [efg.turn.get(c) for c in kids if not efg.is_terminal(c)]
        if not movers or len(set(movers)) == 1:
            children[s] = kids
            continue
        want = movers[0]
        new = []
        for c in kids:
            if efg.is_terminal(c) or efg.turn[c] == want:
                new.append(c)
            else:
                dmy = Dummy(s, c, 0)
                turn[dmy] = want
                children[dmy] = (c,)
                inserted.add(dmy)
                labels[(s, dmy)] = efg.labels.get((s, c), c)
                new.append(dmy)
        children[s] = tuple(new)
    return ExtensiveFormGame(efg.n, efg.root, turn, children, dict(efg.utilities), labels), frozenset(inserted)


@dataclass(frozen=True)
class Conversion:
    """A cumulative game equivalent to an extensive form.

    ``state_at`` maps single-heap sizes to the state they encode; ``dummies``
    lists the pass-through states added along the way.
    """

    game: CumulativeGame
    start: GroundedPosition
    state_at: dict
    dummies: frozenset
    document: Any = None

    def __iter__(self):
        return iter((self.game, self.start))


def _tree_only(efg: ExtensiveFormGame) -> ExtensiveFormGame:
    """Unshare DAG nodes so that every state has one parent."""
    turn, children, utilities, labels = {}, {}, {}, {}
    root = (efg.root,)
    stack = [root]
    while stack:
        path = stack.pop()
        s = path[-1]
        turn[path] = efg.turn.get(s, 1)
        kids = tuple(path + (c,) for c in efg.children.get(s, ()))
        children[path] = kids
        if not kids:
            utilities[path] = efg.utilities[s]
        for c, k in zip(efg.children.get(s, ()), kids):
            labels[(path, k)] = efg.labels.get((s, c), c)
        stack.extend(kids)
    return ExtensiveFormGame(efg.n, root, turn, children, utilities, labels)


def _is_tree(efg: ExtensiveFormGame) -> bool:
    parents: dict = {}
    for s in efg.states:
        for c in efg.children.get(s, ()):
            if c in parents:
                return False
            parents[c] = s
    return True


def efg_to_cg_preorder(efg: ExtensiveFormGame, total: int | None = None, tie: TiePolicy | None = None) -> Conversion:
    """Single-heap game whose heap counts down the preorder index.

    State ``s`` with preorder number ``q(s)`` sits at heap ``Q - q(s)``;
    moving to a child removes ``q(child) - q(s)`` and adds that amount to
    every player's cumulation, so ``C_i = q(s)`` on every reachable position
    and the terminal utility reads the state off ``C_i``.
    """
    from .rulesets import GameDocument, RulesetSpec, UtilitySpec

    efg.validate()
    if not _is_tree(efg):
        efg = _tree_only(efg)
    efg, dummies = unify_child_movers(efg)
    order = efg.states
    q = {s: k for k, s in enumerate(order)}
    Q = len(order) - 1 if total is None else total
    if Q < len(order) - 1:
        raise MalformedGameError(f"total {Q} smaller than the state count")
    n = efg.n
    table, turn_table, utable = [], [], []
    for s in order:
        x = Q - q[s]
        kids = efg.children.get(s, ())
        if kids:
            acts = []
            for c in kids:
                a = q[c] - q[s]
                acts.append(((-a,), tuple((a,) for _ in range(n))))
            table.append(((x,), None, tuple(acts)))
            turn_table.append(((x,), efg.turn[s]))
        else:
            utable.append(((q[s],) * n, None, tuple(efg.utilities[s])))
    tie = tie or TiePolicy()
    root_prev = ((efg.turn.get(efg.root, 1) - 2) % n) + 1
    doc = GameDocument(
        players=n,
        heaps=1,
        ruleset=RulesetSpec("custom_table", table=tuple(table)),
        utility=UtilitySpec(
            "custom_terminal_table",
            tie.mode,
            tuple(sorted(tie.preferences.items())),
            table=tuple(utable),
        ),
        initial_heaps=(Q,),
        initial_cumulation=tuple((0,) for _ in range(n)),
        previous_player=root_prev,
        move_budget=max(len(order), 1),
        turn_table=tuple(turn_table),
    )
    state_at = {Q - q[s]: s for s in order}
    return Conversion(doc.game(), doc.start(), state_at, dummies, doc)


def efg_to_cg_cyclic(efg: ExtensiveFormGame, tie: TiePolicy | None = None) -> Conversion:
    """Single-heap game with a cyclic turn function and growing heaps.

    Single-child chains are bypassed, then pass-through states restore the
    cyclic mover order. Heaps grow strictly along every edge (heap = index
    in breadth-first order), rewards are zero except on edges into a
    terminal, where they deposit that terminal's utilities. Utilities are
    the identity, so the game is heap-size dynamic.
    """
    from .rulesets import GameDocument, RulesetSpec, UtilitySpec

    efg.validate()
    if not _is_tree(efg):
        efg = _tree_only(efg)
    base = reduce_efg(efg)
    base, dummies = cycle_complete(base)
    n = base.n
    order, seen = [], {base.root}
    queue = deque([base.root])
    while queue:
        s = queue.popleft()
        order.append(s)
        for c in base.children.get(s, ()):
            if c not in seen:
                seen.add(c)
                queue.append(c)
    h = {s: k for k, s in enumerate(order)}
    zero = tuple((0,) for _ in range(n))
    table = []
    for s in order:
        kids = base.children.get(s, ())
        if not kids:
            continue
        acts = []
        for c in kids:
            rew = tuple((u,) for u in base.utilities[c]) if base.is_terminal(c) else zero
            acts.append(((h[c] - h[s],), rew))
        table.append(((h[s],), None, tuple(acts)))
    tie = tie or TiePolicy()
    c0 = tuple((u,) for u in base.utilities[base.root]) if base.is_terminal(base.root) else zero
    root_prev = ((base.turn.get(base.root, 1) - 2) % n) + 1
    doc = GameDocument(
        players=n,
        heaps=1,
        ruleset=RulesetSpec("custom_table", table=tuple(table)),
        utility=UtilitySpec("identity", tie.mode, tuple(sorted(tie.preferences.items()))),
        initial_heaps=(0,),
        initial_cumulation=c0,
        previous_player=root_prev,
        move_budget=max(len(order), 1),
    )
    state_at = {h[s]: s for s in order}
    return Conversion(doc.game(), doc.start(), state_at, dummies, doc)


# --- JSON --------------------------------------------------------------------

EFG_VERSION = 1


def efg_to_json(efg: ExtensiveFormGame) -> dict[str, Any]:
    """Serialize with states renumbered in preorder unless ids are already
    strings or integers."""
    order = efg.states
    plain = all(isinstance(s, (str, int)) and not isinstance(s, bool) for s in order)
    ident = {s: (s if plain else k) for k, s in enumerate(order)}
    states = []
    for s in order:
        kids = efg.children.get(s, ())
        entry: dict[str, Any] = {"id": ident[s], "turn": efg.turn.get(s, 1), "children": [ident[c] for c in kids]}
        if not kids:
            entry["utilities"] = list(efg.utilities[s])
        states.append(entry)
    return {"kind": "efg", "version": EFG_VERSION, "players": efg.n, "states": states, "root": ident[efg.root]}


def efg_from_json(doc: Mapping[str, Any]) -> ExtensiveFormGame:
    from .rulesets import ValidationError

    errs = []
    if doc.get("kind", "efg") != "efg":
        errs.append("$.kind: expected 'efg'")
    if doc.get("version") != EFG_VERSION:
        errs.append("$.version: missing or unsupported")
    n = doc.get("players")
    if not isinstance(n, int) or n < 1:
        errs.append("$.players: expected positive integer")
    states = doc.get("states")
    if not isinstance(states, list):
        errs.append("$.states: expected list")
        states = []
    if "root" not in doc:
        errs.append("$.root: missing")
    turn, children, utilities = {}, {}, {}
    for k, e in enumerate(states):
        if not isinstance(e, Mapping) or "id" not in e:
            errs.append(f"$.states[{k}].id: missing")
            continue
        s = e["id"]
        turn[s] = e.get("turn", 1)
        children[s] = tuple(e.get("children", ()))
        if not children[s]:
            if "utilities" not in e:
                errs.append(f"$.states[{k}].utilities: required for a terminal state")
            else:
                utilities[s] = tuple(e["utilities"])
    for s, kids in children.items():
        for c in kids:
            if c not in children:
                errs.append(f"$.states: child {c!r} of {s!r} undefined")
    if errs:
        raise ValidationError(errs)
    efg = ExtensiveFormGame(n, doc["root"], turn, children, utilities)
    try:
        efg.validate()
    except MalformedGameError as exc:
        raise ValidationError([f"$.states: {exc}"]) from None
    return efg


def efg_equal(a: ExtensiveFormGame, b: ExtensiveFormGame) -> bool:
    return efg_to_json(a) == efg_to_json(b)


def random_tree(rng, n: int, max_states: int, max_branch: int = 3, max_depth: int = 6, values: Sequence[int] = range(-3, 6)) -> ExtensiveFormGame:
    """Random tree with integer ids in preorder; used by tests and scripts."""
    turn, children, utilities = {}, {}, {}
    counter = [0]

    def build(depth: int) -> int:
        s = counter[0]
        counter[0] += 1
        turn[s] = rng.randint(1, n)
        room = max_states - counter[0]
        if depth >= max_depth or room <= 0 or (depth > 0 and rng.random() < 0.3):
            children[s] = ()
            utilities[s] = tuple(rng.choice(list(values)) for _ in range(n))
            return s
        k = rng.randint(1, min(max_branch, room))
        kids = [build(depth + 1)]
        while len(kids) < k and counter[0] < max_states:
            kids.append(build(depth + 1))
        children[s] = tuple(kids)
        return s

    root = build(0)
    return ExtensiveFormGame(n, root, turn, children, utilities)
