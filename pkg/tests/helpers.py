"""Random instance builders shared by the test modules."""

from __future__ import annotations

import random
import zlib

from hypothesis import strategies as st

from cumulant.core import CumulativeGame, GroundedPosition, HeapPosition, Ruleset, TiePolicy, TurnFunction
from cumulant.efg import random_tree
from cumulant.rulesets import RulesetSpec, UtilitySpec, build_game, subtraction_ruleset


def squirrel(S=(2, 3), n=2, tie="antagonistic"):
    return build_game(RulesetSpec("fixed_subtraction", (tuple(S),)), UtilitySpec("identity", tie), n, 1)


def grounded(heaps, n, previous, cumulation=None):
    return GroundedPosition(HeapPosition.start(heaps, n, cumulation), previous)


def _hashed_rewards(seed: int, n: int, d: int):
    """Deterministic pseudo-random integer rewards keyed on heaps, mover and action."""

    def rewards(pos, previous, current, a):
        h = next(k for k, v in enumerate(a) if v)
        key = f"{seed}|{pos.heaps}|{current}|{a}".encode()
        r = zlib.crc32(key)
        col = [((r >> (4 * i)) % 7) - 2 for i in range(n)]
        return tuple(tuple(col[i] if k == h else 0 for k in range(d)) for i in range(n))

    return rewards


@st.composite
def hsd_games(draw, max_players=3, max_total=12):
    """Heap-size dynamic game with identity utility plus a grounded start.

    Rewards are one of the catalog schemes or hashed pseudo-random values,
    so the instance is cumulation independent by construction.
    """
    n = draw(st.integers(1, max_players))
    d = draw(st.integers(1, 2))
    per_heap = max_total if d == 1 else 4
    heaps = tuple(draw(st.integers(0, per_heap)) for _ in range(d))
    sym = draw(st.booleans())
    k = 1 if sym else n
    sets = tuple(tuple(sorted(draw(st.sets(st.integers(1, 4), min_size=1, max_size=3)))) for _ in range(k))
    schemes = ["identity", "last_pebble", "hashed"] + (["transfer"] if n == 2 else [])
    scheme = draw(st.sampled_from(schemes))
    tie = draw(st.sampled_from(["antagonistic", "friendly"]))
    spec = RulesetSpec("fixed_subtraction", sets, "identity" if scheme == "hashed" else scheme)
    base = subtraction_ruleset(spec, n, d)
    if scheme == "hashed":
        base = Ruleset(base.actions, _hashed_rewards(draw(st.integers(0, 10**6)), n, d), True, base.symmetric, name="hashed")
    prefs = {}
    if n == 3 and draw(st.booleans()):
        prefs = {m: tuple(draw(st.permutations([j for j in range(1, 4) if j != m]))) for m in range(1, 4)}
    game = CumulativeGame(n, d, base, TurnFunction("cyclic"), None, 10**4, TiePolicy(tie, prefs))
    cum = tuple(tuple(draw(st.integers(-5, 5)) for _ in range(d)) for _ in range(n))
    prev = draw(st.integers(1, n))
    return game, GroundedPosition(HeapPosition(heaps, cum), prev)


@st.composite
def random_profiles(draw):
    """A seed for a deterministic non-equilibrium profile."""
    return draw(st.integers(0, 2**31))


def hashed_profile(game, seed: int):
    def choose(g):
        acts = game.legal_actions(g)
        r = zlib.crc32(f"{seed}|{g}".encode())
        return acts[r % len(acts)]

    return choose


@st.composite
def efgs(draw, max_players=3, max_states=40):
    n = draw(st.integers(1, max_players))
    seed = draw(st.integers(0, 2**31))
    return random_tree(random.Random(seed), n, max_states)
