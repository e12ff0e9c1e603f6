from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cumulant.core import CumulativeGame, GroundedPosition, TiePolicy
from cumulant.efg import play_profile, pspe
from cumulant.outcome import (
    PreconditionError,
    outcome_si_partizan,
    outcome_si_symmetric,
    outcome_zs_partizan,
    outcome_zs_symmetric,
    recursive_outcome,
    sigma_outcome,
    subtraction_outcome,
    table_from_json,
)
from cumulant.rulesets import RulesetSpec, UtilitySpec, build_game, fixed

from helpers import grounded, hashed_profile, hsd_games, squirrel

ZS_23 = [0, 0, 2, 3, 3, 1, 0, 1]
SI_23 = [(0, 0), (0, 0), (2, 0), (3, 0), (3, 0), (3, 2), (3, 3), (4, 3)]


def test_zs_symmetric_golden():
    assert outcome_zs_symmetric((2, 3), 7).values == ZS_23


def test_si_symmetric_golden():
    assert outcome_si_symmetric((2, 3), 7).values == SI_23


def test_zs_partizan_golden():
    t = outcome_zs_partizan((2, 3), (1, 4), 7)
    assert t.row("o@2") == [0, 0, 2, 3, 2, 3, 4, -1]
    assert t.row("o@1") == [0, -1, -1, 1, -4, -4, -2, -1]
    assert t[3][1] == t[2][2] - 1 == 1


def test_si_partizan_golden():
    t = outcome_si_partizan((2, 3), (1, 4), 7)
    assert list(zip(t.row("o1@2"), t.row("o2@2"))) == [(0, 0), (0, 0), (2, 0), (3, 0), (3, 1), (4, 1), (5, 1), (3, 4)]
    assert list(zip(t.row("o1@1"), t.row("o2@1"))) == [(0, 0), (0, 1), (0, 1), (2, 1), (0, 4), (0, 4), (2, 4), (3, 4)]
    assert t.picks[4][2] == 3


def test_si_partizan_matches_game_solver():
    # both rows of the table against full equilibrium search
    game = build_game(fixed((2, 3), (1, 4)), UtilitySpec(), 2, 1)
    t = outcome_si_partizan((2, 3), (1, 4), 12)
    for x in range(13):
        for prev in (1, 2):
            assert pspe(game, grounded((x,), 2, prev)).value == t[x][prev]


def test_zs_symmetric_anchor_values():
    assert outcome_zs_symmetric((3, 5), 14)[14] == 3
    assert outcome_zs_symmetric((3, 5), 14).optimal[14] == (5,)
    assert outcome_zs_symmetric((6, 13, 17), 76)[76] == 5


def test_si_friendly_anchor():
    t = outcome_si_symmetric((3, 5), 14, "friendly")
    o1, o2 = t[14]
    assert o1 - o2 == 2 and t.picks[14] == 3


def test_si_antagonistic_anchor():
    o1, o2 = outcome_si_symmetric((6, 13, 17), 76)[76]
    assert o1 - o2 == 4


@pytest.mark.parametrize("S", [(2,), (3, 7), (5, 6, 9)])
def test_below_min_is_zero(S):
    t = outcome_zs_symmetric(S, min(S) - 1)
    assert set(t.values) == {0}


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(1, 9), min_size=1, max_size=4), st.integers(0, 60))
def test_zs_symmetric_nonnegative(S, x):
    assert min(outcome_zs_symmetric(S, x).values) >= 0


def test_zs_partizan_can_be_negative():
    assert outcome_zs_partizan((2, 3), (1, 4), 7)[7][2] == -1


def test_optimal_sets_agree_for_pairs_up_to_twenty():
    """Antagonistic self-interest picks a zero-sum optimal action for every
    two-element set with max at most 20 on heaps up to 80."""
    for S in itertools.combinations(range(1, 21), 2):
        zs = outcome_zs_symmetric(S, 80)
        si = outcome_si_symmetric(S, 80)
        for x in range(81):
            assert si.picks[x] is None or si.picks[x] in zs.optimal[x]


@settings(max_examples=50, deadline=None)
@given(st.sets(st.integers(1, 12), min_size=1, max_size=4), st.integers(0, 200))
def test_cell_visits_linear(S, x):
    t = outcome_si_symmetric(S, x)
    assert t.cells <= (x + 1) * len(S)


def test_tables_extend_without_recomputation():
    t = outcome_si_symmetric((2, 3), 4)
    cells = t.cells
    outcome_si_symmetric((2, 3), 7, table=t)
    assert t.values == SI_23
    # only heaps 5..7 were added, two moves each
    assert t.cells == cells + 6
    with pytest.raises(ValueError):
        outcome_si_symmetric((2, 4), 9, table=t)


def test_table_csv_layout():
    csv_text = outcome_zs_symmetric((2, 3), 7).to_csv()
    lines = csv_text.split("\n")
    assert lines[0] == "heap,o" and lines[3] == "2,2" and csv_text.endswith("\n")
    assert "\r" not in csv_text
    header = outcome_si_partizan((2, 3), (1, 4), 2).to_csv().split("\n")[0]
    assert header == "heap,o1_prev2,o2_prev2,o1_prev1,o2_prev1"


@pytest.mark.parametrize("variant,sets", [("zs_symmetric", [(2, 3)]), ("si_symmetric", [(2, 3)]), ("zs_partizan", [(2, 3), (1, 4)]), ("si_partizan", [(2, 3), (1, 4)])])
def test_table_json_mirror(variant, sets):
    t = subtraction_outcome(variant, sets, 9)
    again = table_from_json(json.loads(json.dumps(t.to_json())))
    assert again.to_json() == t.to_json()


# --- general games -------------------------------------------------------------------


def test_sigma_outcome_squirrel_seven():
    game = squirrel()
    g0 = grounded((7,), 2, 2)
    res = pspe(game, g0)
    assert sigma_outcome(game, res.profile, g0) == (4, 3)


def test_sigma_outcome_terminal_is_zero():
    assert sigma_outcome(squirrel(), {}, grounded((1,), 2, 1, ((3,), (3,)))) == (0, 0)


def test_recursive_outcome_reproduces_symmetric_table():
    om = recursive_outcome(squirrel(), 7)
    assert [om[(x,)][1] for x in range(8)] == SI_23
    # row p-1 is the previous player p; player 2 starting mirrors the pair
    assert [om[(x,)][0] for x in range(8)] == [(b, a) for a, b in SI_23]


def test_recursive_outcome_cumulation_shift():
    game = squirrel()
    om = recursive_outcome(game, 7)
    g = grounded((7,), 2, 2, ((5,), (7,)))
    assert om.value(g) == (9, 10) == pspe(game, g).value


def test_recursive_outcome_rejects_cumulation_dependence():
    wealth = build_game(RulesetSpec("wealth"), UtilitySpec(), 2, 1)
    with pytest.raises(PreconditionError):
        recursive_outcome(wealth, 4)
    lying = CumulativeGame(2, 1, type(wealth.ruleset)(wealth.ruleset.actions, wealth.ruleset.rewards, True))
    with pytest.raises(PreconditionError):
        recursive_outcome(lying, 4)


def test_recursive_outcome_needs_identity_utility():
    game = build_game(fixed((2, 3)), UtilitySpec("auction", value=9), 2, 1)
    with pytest.raises(PreconditionError):
        recursive_outcome(game, 5)


def test_recursive_outcome_line():
    om = recursive_outcome(squirrel(), 7)
    assert om.line(grounded((7,), 2, 2)) == [(-2,), (-3,), (-2,)]


@settings(max_examples=60, deadline=None)
@given(hsd_games(), st.integers(0, 2**31))
def test_profile_outcome_is_banked_difference(case, seed):
    game, g0 = case
    prof = hashed_profile(game, seed)
    terminal, totals = play_profile(game, g0, prof)
    o = sigma_outcome(game, prof, g0)
    assert o == tuple(c - c0 for c, c0 in zip(totals, g0.position.totals()))
