"""Randomized cross-checks between independent solvers and the structural laws."""

from __future__ import annotations

from dataclasses import replace

from hypothesis import given, settings
from hypothesis import strategies as st

from cumulant.algebra import PartizanPosition, disjunctive_sum, negate, np_class, outcome_matrix
from cumulant.core import GroundedPosition, HeapPosition, TiePolicy
from cumulant.efg import backward_induction, cg_to_efg, efg_to_cg_cyclic, efg_to_cg_preorder, play_profile, pspe
from cumulant.lab import brute_force_pspe
from cumulant.outcome import recursive_outcome, sigma_outcome
from cumulant.rulesets import UtilitySpec, build_game, fixed, zero_sum_transfer, zero_sum_utility_game

from helpers import hashed_profile, hsd_games, efgs

MANY = settings(max_examples=200, deadline=None)


@MANY
@given(hsd_games())
def test_three_solvers_agree(case):
    game, g0 = case
    fast = recursive_outcome(game, g0.heaps).value(g0)
    brute, _ = brute_force_pspe(game, g0)
    tree, _ = backward_induction(cg_to_efg(game, g0), game.tie)
    assert fast == tuple(brute) == tuple(tree)


@MANY
@given(hsd_games(), st.integers(0, 2**31))
def test_outcome_of_any_profile_is_banked_difference(case, seed):
    game, g0 = case
    prof = hashed_profile(game, seed)
    terminal, totals = play_profile(game, g0, prof)
    assert sigma_outcome(game, prof, g0) == tuple(c - c0 for c, c0 in zip(totals, g0.position.totals()))


@MANY
@given(hsd_games(), st.data())
def test_initial_cumulation_shifts_the_equilibrium(case, data):
    game, g0 = case
    n, d = game.n, game.d
    shift = tuple(tuple(data.draw(st.integers(-9, 9)) for _ in range(d)) for _ in range(n))
    cum = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(g0.cumulation, shift))
    moved = GroundedPosition(HeapPosition(g0.heaps, cum), g0.previous)
    base = pspe(game, g0).value
    assert pspe(game, moved).value == tuple(v + sum(s) for v, s in zip(base, shift))


@MANY
@given(
    st.integers(0, 30),
    st.lists(st.sets(st.integers(1, 6), min_size=1, max_size=3), min_size=1, max_size=2),
    st.integers(1, 2),
    st.sampled_from(["antagonistic", "friendly"]),
)
def test_transfer_encoding_plays_like_zero_sum(x, sets, prev, tie):
    spec = fixed(*[sorted(s) for s in sets])
    a = replace(zero_sum_transfer(spec), tie=TiePolicy(tie))
    b = replace(zero_sum_utility_game(spec), tie=TiePolicy(tie))
    g0 = GroundedPosition(HeapPosition.start((x,), 2), prev)
    assert pspe(a, g0).line == pspe(b, g0).line


@MANY
@given(efgs(max_states=40))
def test_conversions_preserve_equilibrium_values(efg):
    v = backward_induction(efg)[0]
    pre = efg_to_cg_preorder(efg)
    cyc = efg_to_cg_cyclic(efg)
    assert pspe(pre.game, pre.start).value == v
    assert pspe(cyc.game, cyc.start).value == v


@MANY
@given(st.integers(0, 15), st.sets(st.integers(1, 6), min_size=1, max_size=3))
def test_game_minus_itself_is_a_second_player_win(x, S):
    G = PartizanPosition.of(x, S)
    assert np_class([G, negate(G)]) == "P"


def _component(draw):
    n = 2
    S = sorted(draw(st.sets(st.integers(1, 3), min_size=1, max_size=2)))
    rewards = draw(st.sampled_from(["identity", "last_pebble", "transfer"]))
    game = build_game(fixed(S, rewards=rewards), UtilitySpec(), n, 1)
    return game, HeapPosition.start((draw(st.integers(0, 4)),), n)


components = st.composite(lambda draw: _component(draw))()


def _matrix(s):
    return outcome_matrix(s.game, s.position)


@MANY
@given(components, components)
def test_sums_commute(A, B):
    assert _matrix(disjunctive_sum(A, B)) == _matrix(disjunctive_sum(B, A))


@MANY
@given(components, components, components)
def test_sums_associate(A, B, C):
    left = disjunctive_sum(disjunctive_sum(A, B), C)
    right = disjunctive_sum(A, disjunctive_sum(B, C))
    assert _matrix(left) == _matrix(right)
