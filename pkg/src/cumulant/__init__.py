"""Cumulative games: heaps, cumulations and equilibrium play."""

from .core import (
    BudgetExceeded,
    CumulativeGame,
    DimensionError,
    GameError,
    GroundedPosition,
    HeapPosition,
    IllegalActionError,
    InvalidRulesetError,
    Ruleset,
    TiePolicy,
    TurnFunction,
    UtilityMap,
    check_feasibility,
    expand_options,
    step,
)
from .efg import ExtensiveFormGame, StrategyProfile, backward_induction, cg_to_efg, play_profile, pspe
from .outcome import recursive_outcome, sigma_outcome
from .rulesets import RulesetSpec, UtilitySpec, build_game, fixed, prologue_compound, zero_sum_transfer

__version__ = "0.1.0"
