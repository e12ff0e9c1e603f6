from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cumulant.core import (
    BudgetExceeded,
    CumulativeGame,
    DimensionError,
    GroundedPosition,
    HeapPosition,
    IllegalActionError,
    InvalidRulesetError,
    Ruleset,
    TiePolicy,
    TurnFunction,
    check_feasibility,
    expand_options,
    step,
)
from cumulant.rulesets import UtilitySpec, build_game, fixed, wealth_ruleset

from helpers import grounded, squirrel


def test_squirrel_root_options():
    game = squirrel()
    kids = expand_options(game, grounded((7,), 2, 2))
    assert kids == {
        GroundedPosition.of((5,), ((2,), (0,)), 1),
        GroundedPosition.of((4,), ((3,), (0,)), 1),
    }


def test_squirrel_leaf_has_no_options():
    game = squirrel()
    g = GroundedPosition.of((1,), ((4,), (2,)), 2)
    assert expand_options(game, g) == frozenset()
    assert game.is_terminal(g)
    assert game.terminal_utility(g) == (4, 2)


def test_wealth_options_capped_by_cumulation():
    game = CumulativeGame(2, 1, wealth_ruleset(2, 1))
    g = GroundedPosition.of((3,), ((2,), (1,)), 2)
    assert expand_options(game, g) == {
        GroundedPosition.of((2,), ((3,), (1,)), 1),
        GroundedPosition.of((1,), ((4,), (1,)), 1),
    }


def test_step_updates_heap_cumulation_and_mover():
    game = squirrel((3,))
    g = GroundedPosition.of((4,), ((3,), (0,)), 1)
    assert step(game, g, (-3,)) == GroundedPosition.of((1,), ((3,), (3,)), 2)


def test_step_rejects_illegal_action():
    game = squirrel()
    with pytest.raises(IllegalActionError):
        step(game, grounded((7,), 2, 2), (-4,))


def test_dimension_mismatch():
    game = squirrel()
    with pytest.raises(DimensionError):
        expand_options(game, grounded((7, 1), 2, 2))
    with pytest.raises(DimensionError):
        expand_options(game, grounded((7,), 2, 3))


def test_negative_heap_rejected():
    with pytest.raises(ValueError):
        HeapPosition((-1,), ((0,),))


def test_ruleset_driving_heap_negative_is_reported():
    bad = Ruleset(lambda pos, prev, cur: [(-5,)], lambda pos, prev, cur, a: ((0,), (0,)))
    game = CumulativeGame(2, 1, bad)
    with pytest.raises(InvalidRulesetError):
        game.legal_actions(grounded((3,), 2, 1))


def test_feasibility_short_game():
    rep = check_feasibility(squirrel(), grounded((7,), 2, 2))
    assert rep.ok and rep.longest == 3


def test_feasibility_growing_heap_exceeds_budget():
    grow = Ruleset(lambda pos, prev, cur: [(1,)], lambda pos, prev, cur, a: ((0,), (0,)))
    game = CumulativeGame(2, 1, grow, move_budget=10)
    rep = check_feasibility(game, grounded((0,), 2, 1))
    assert not rep.ok
    assert len(rep.path) == 11 and set(rep.path) == {(1,)}


def test_feasibility_detects_cycle():
    # a heap oscillating 0 -> 1 -> 0 revisits a grounded position
    osc = Ruleset(
        lambda pos, prev, cur: [(1,)] if pos.heaps[0] == 0 else [(-1,)],
        lambda pos, prev, cur, a: ((0,), (0,)),
    )
    rep = check_feasibility(CumulativeGame(2, 1, osc), grounded((0,), 2, 1))
    assert not rep.ok


def test_terminal_root_is_feasible():
    rep = check_feasibility(squirrel(), grounded((1,), 2, 2))
    assert rep.ok and rep.longest == 0


def test_alternating_turns_need_two_players():
    game = CumulativeGame(3, 1, squirrel().ruleset, TurnFunction("alternating"))
    with pytest.raises(DimensionError):
        game.current_player(grounded((3,), 3, 1))


def test_tie_policy_modes():
    vals = [(3, 5, 1), (3, 2, 9), (1, 0, 0)]
    assert TiePolicy("antagonistic").choose(1, vals) == 1
    assert TiePolicy("friendly").choose(1, vals) == 0
    # preference order puts player 3 first
    assert TiePolicy("antagonistic", {1: (3, 2)}).choose(1, vals) == 0


def test_tie_policy_residual_goes_to_first():
    assert TiePolicy().choose(2, [(1, 4), (1, 4), (0, 3)]) == 0


def test_unknown_tie_mode():
    with pytest.raises(ValueError):
        TiePolicy("neutral")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 20), st.sets(st.integers(1, 5), min_size=1, max_size=3), st.integers(1, 2))
def test_options_conserve_pebbles(x, S, prev):
    """With identity rewards heap plus collected pebbles is constant."""
    game = squirrel(sorted(S))
    g = grounded((x,), 2, prev)
    for child in expand_options(game, g):
        assert child.heaps[0] + sum(child.position.totals()) == x
        assert child.previous == 3 - prev


def test_build_game_unknown_preset():
    from cumulant.rulesets import RulesetSpec, UnknownPresetError

    with pytest.raises(UnknownPresetError):
        build_game(RulesetSpec("monopoly"), UtilitySpec(), 2, 1)
    with pytest.raises(UnknownPresetError):
        build_game(fixed((2, 3)), UtilitySpec("lottery"), 2, 1)


def test_budget_exceeded_carries_path():
    exc = BudgetExceeded("x", ((1,),))
    assert exc.path == ((1,),)
