from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cumulant.core import DimensionError, TiePolicy, GroundedPosition, HeapPosition, step
from cumulant.efg import pspe
from cumulant.rulesets import (
    PROLOGUE_ADD,
    GameDocument,
    RulesetSpec,
    UtilitySpec,
    ValidationError,
    build_game,
    fixed,
    parse_game_document,
    prologue_compound,
    prologue_start,
    zero_sum_transfer,
    zero_sum_utility_game,
)

from helpers import grounded

GAMES = Path(__file__).resolve().parent.parent / "games"


def _line(game, g0):
    return pspe(game, g0).line


def test_fixed_identity_is_the_squirrel_game():
    game = build_game(fixed((2, 3)), UtilitySpec(), 2, 1)
    res = pspe(game, grounded((7,), 2, 2))
    assert res.value == (4, 3)


@pytest.mark.parametrize("c0,take", [((0, 0), 2), ((0, 1), 2), ((0, 2), 3)])
def test_auction_first_action_depends_on_cumulation(c0, take):
    game = build_game(fixed((2, 3)), UtilitySpec("auction", value=4), 2, 1)
    g0 = GroundedPosition.of((3,), ((c0[0],), (c0[1],)), 2)
    assert _line(game, g0)[0] == (-take,)


def test_auction_bid_two_wins_from_four():
    game = build_game(fixed((2, 3)), UtilitySpec("auction", value=4), 2, 1)
    res = pspe(game, GroundedPosition.of((4,), ((1,), (0,)), 2))
    assert res.line[0] == (-2,)
    assert res.value == (1, 0)


@pytest.mark.parametrize("x,expected", [(7, 1), (0, 0)])
def test_transfer_encoding_symmetric(x, expected):
    game = zero_sum_transfer(fixed((2, 3)))
    assert pspe(game, grounded((x,), 2, 2)).terminal.position.totals()[0] == expected


def test_transfer_encoding_partizan():
    game = zero_sum_transfer(fixed((2, 3), (1, 4)))
    assert pspe(game, grounded((6,), 2, 2)).terminal.position.totals()[0] == 4


def test_transfer_rejects_more_players():
    with pytest.raises(DimensionError):
        zero_sum_transfer(fixed((1,), (2,), (3,)))
    with pytest.raises(DimensionError):
        build_game(fixed((2, 3), rewards="transfer"), UtilitySpec(), 3, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 30), st.sets(st.integers(1, 6), min_size=1, max_size=3), st.integers(1, 2), st.sampled_from(["antagonistic", "friendly"]))
def test_transfer_play_equals_zero_sum_play(x, S, prev, tie):
    spec = fixed(sorted(S))
    a = zero_sum_transfer(spec)
    b = zero_sum_utility_game(spec)
    a, b = replace(a, tie=TiePolicy(tie)), replace(b, tie=TiePolicy(tie))
    assert _line(a, grounded((x,), 2, prev)) == _line(b, grounded((x,), 2, prev))


def test_misere_is_sign_flipped_normal_play():
    normal = build_game(fixed((1,), rewards="none"), UtilitySpec("normal_play"), 2, 1)
    misere = build_game(fixed((1,), rewards="none"), UtilitySpec("misere_play"), 2, 1)
    g = grounded((3,), 2, 2)
    # player 1 takes the last pebble; player 2 is stuck
    assert pspe(normal, g).value == (1, -1)
    assert pspe(misere, g).value == (-1, 1)


def test_scoring_preset_uses_transfer_rewards():
    game = build_game(fixed((2, 3)), UtilitySpec("scoring"), 2, 1)
    child = step(game, grounded((5,), 2, 2), (-3,))
    assert child.cumulation == ((3,), (-3,))


def test_wealth_needs_cumulation():
    game = build_game(RulesetSpec("wealth"), UtilitySpec("normal_play"), 2, 1)
    assert game.is_terminal(grounded((4,), 2, 2))
    g = GroundedPosition.of((4,), ((1,), (1,)), 2)
    assert game.legal_actions(g) == [(-1,)]


# --- the compound scenario -------------------------------------------------------


def _walkthrough():
    raw = json.loads((GAMES / "walkthrough.json").read_text())
    return [(m["player"], tuple(m["action"])) for m in raw["moves"]]


def test_compound_walkthrough_reaches_five_minus_two_six():
    game, g = prologue_compound(3), prologue_start(3)
    for who, a in _walkthrough():
        assert game.current_player(g) == who
        g = step(game, g, a)
    assert game.is_terminal(g)
    assert game.current_player(g) == 1
    assert game.terminal_utility(g) == (5, -2, 6)
    assert [row[5] for row in g.cumulation] == [3, 2, 2]


def test_compound_charlie_may_add_pebbles():
    game, g = prologue_compound(3), prologue_start(3)
    g = GroundedPosition(g.position, 2)
    assert PROLOGUE_ADD in game.legal_actions(g)
    assert PROLOGUE_ADD not in game.legal_actions(prologue_start(3))


def test_compound_bob_moves_again_at_five():
    game = prologue_compound(3)
    cum = ((0,) * 6, (0, 0, 0, 0, 4, 1), (0,) * 6)
    g = GroundedPosition(HeapPosition((4,) * 6, cum), 2)
    assert game.current_player(g) == 2
    g = GroundedPosition(HeapPosition((4,) * 6, ((0,) * 6, (0, 0, 0, 0, 3, 1), (0,) * 6)), 2)
    assert game.current_player(g) == 3


def test_compound_two_player_has_no_extra_rules():
    game = prologue_compound(2)
    g = prologue_start(2)
    assert game.current_player(g) == 1
    assert all(a != PROLOGUE_ADD for a in game.legal_actions(GroundedPosition(g.position, 1)))


def test_compound_scoring_heap_signs():
    game = prologue_compound(3)
    g = prologue_start(3)
    alice = step(game, g, (0, 0, -2, 0, 0, 0))
    assert [r[2] for r in alice.cumulation] == [2, -2, 2]
    bob = step(game, alice, (0, 0, -2, 0, 0, 0))
    assert [r[2] for r in bob.cumulation] == [0, 0, 0]


def test_compound_needs_six_heaps():
    with pytest.raises(DimensionError):
        build_game(RulesetSpec("prologue_compound"), UtilitySpec(), 3, 5)


# --- documents ----------------------------------------------------------------------


@pytest.mark.parametrize("name", ["squirrel7.json", "auction3.json", "prologue.json", "prologue2.json", "heap4_partizan.json"])
def test_documents_round_trip(name):
    raw = json.loads((GAMES / name).read_text())
    doc = parse_game_document(raw)
    assert doc.to_json() == raw
    assert parse_game_document(doc.to_json()) == doc


def test_document_missing_previous_player_lists_path():
    raw = json.loads((GAMES / "squirrel7.json").read_text())
    del raw["initial"]["previous_player"]
    with pytest.raises(ValidationError) as info:
        parse_game_document(raw)
    assert "$.initial.previous_player: missing" in info.value.paths


def test_document_collects_every_error():
    raw = {"kind": "cumulative", "players": 2, "heaps": 1, "ruleset": {"preset": "chess"}, "utility": {"preset": "identity"}, "initial": {"heaps": [3], "previous_player": 5}}
    with pytest.raises(ValidationError) as info:
        parse_game_document(raw)
    paths = " ".join(info.value.paths)
    for needle in ("$.version", "$.ruleset.preset", "$.initial.previous_player"):
        assert needle in paths


def test_auction_value_must_cover_heap():
    raw = GameDocument(2, 1, fixed((2, 3)), UtilitySpec("auction", value=4), (5,), ((0,), (0,)), 2).to_json()
    with pytest.raises(ValidationError):
        parse_game_document(raw)


def test_symmetric_flag():
    assert fixed((2, 3)).symmetric
    assert fixed((2, 3), (3, 2)).symmetric
    assert not fixed((2, 3), (1, 4)).symmetric
