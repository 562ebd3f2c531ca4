"""
Engine Attacks Module

Greedy word-substitution and character-level attacks used to measure
empirical robustness of base and smoothed classifiers.
"""

from .tables import (
    SynonymTable,
    HomoglyphMap,
    CharOp,
    ALL_CHAR_OPS,
    char_candidates,
)

from .victims import (
    ATTACK_SAMPLES,
    Victim,
    BaseVictim,
    SmoothedVictim,
    ExactSmoothedVictim,
    QueryCounter,
)

from .greedy import (
    AttackBudget,
    AttackOutcome,
    greedy_attack,
    attack_substitution,
    attack_chars,
)

__all__ = [
    "SynonymTable",
    "HomoglyphMap",
    "CharOp",
    "ALL_CHAR_OPS",
    "char_candidates",
    "ATTACK_SAMPLES",
    "Victim",
    "BaseVictim",
    "SmoothedVictim",
    "ExactSmoothedVictim",
    "QueryCounter",
    "AttackBudget",
    "AttackOutcome",
    "greedy_attack",
    "attack_substitution",
    "attack_chars",
]
