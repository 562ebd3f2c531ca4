"""Tests for the greedy substitution and character-level attacks."""
from pathlib import Path

import numpy as np
import pytest

from engine.attacks import (
    AttackBudget,
    AttackOutcome,
    BaseVictim,
    CharOp,
    ExactSmoothedVictim,
    HomoglyphMap,
    SmoothedVictim,
    SynonymTable,
    Victim,
    attack_chars,
    attack_substitution,
    char_candidates,
)
from engine.certification import exact_certify, exact_certify_check
from engine.classifiers import ConstantClassifier, KeywordClassifier
from engine.core import DiffSet, Text
from engine.errors import InvalidArgumentError
from engine.smoothing import SmoothedClassifier, SmoothingConfig

HOMOGLYPHS = Path(__file__).resolve().parents[1] / "content" / "assets" / "homoglyphs.json"


class _Fading(Victim):
    """Class-1 score drops by 0.1 for every "z"; flips only after six of them."""

    def scores(self, x: Text) -> np.ndarray:
        z = x.tokens.count("z")
        return np.array([0.1 * z, 1.0 - 0.05 * z])

    def occlude(self, x: Text, position: int) -> np.ndarray:
        return self.scores(x)


# ─── Tables ──────────────────────────────────────────────────────────────────

@pytest.mark.unit
def test_synonym_table_drops_self_and_duplicates():
    table = SynonymTable({"good": ["good", "fine", "fine", "nice"], "bad": ["bad"]})
    assert table.get("good") == ["fine", "nice"]
    assert "bad" not in table
    assert table.get("unknown") == []


@pytest.mark.unit
def test_homoglyph_variant():
    variants = char_candidates("football", HomoglyphMap.from_file(str(HOMOGLYPHS)))
    assert "fo0tba1l" in variants
    assert "football" not in variants
    assert all(" " not in v for v in variants)


@pytest.mark.unit
def test_single_char_token_without_edits():
    assert char_candidates("x", HomoglyphMap(), ops=[CharOp.SWAP, CharOp.INSERT]) == []
    assert char_candidates("x", HomoglyphMap(), ops=[CharOp.DELETE]) == []


@pytest.mark.unit
def test_char_ops():
    assert char_candidates("ab", HomoglyphMap(), ops=[CharOp.SWAP]) == ["ba"]
    assert char_candidates("ab", HomoglyphMap(), ops=[CharOp.DELETE]) == ["b", "a"]
    assert char_candidates("ab", HomoglyphMap(), ops=[CharOp.INSERT]) == ["aab"]
    with pytest.raises(InvalidArgumentError):
        char_candidates("ab", HomoglyphMap(), max_edits=0)


# ─── Greedy substitution ─────────────────────────────────────────────────────

@pytest.mark.unit
def test_empty_table_never_succeeds(keyword_f):
    x = Text.from_string("a great movie")
    outcome = attack_substitution(x, 1, BaseVictim(keyword_f), SynonymTable(), AttackBudget())
    assert not outcome.success
    assert outcome.adversarial_text == x
    assert len(outcome.positions_changed) == 0


@pytest.mark.unit
def test_keyword_victim_falls_to_one_substitution(keyword_f):
    x = Text.from_string("a great movie")
    table = SynonymTable({"great": ["fine", "terrific"]})
    outcome = attack_substitution(x, 1, BaseVictim(keyword_f), table, AttackBudget(), example_id="ex")
    assert outcome.success
    assert outcome.adversarial_text.tokens == ("a", "fine", "movie")
    assert outcome.positions_changed.sorted() == (1,)
    assert outcome.queries_used == 3
    assert outcome.example_id == "ex"


@pytest.mark.unit
def test_zero_positions_leaves_text_unchanged(keyword_f):
    x = Text.from_string("a great movie")
    table = SynonymTable({"great": ["fine"]})
    outcome = attack_substitution(x, 1, BaseVictim(keyword_f), table, AttackBudget(max_positions=0))
    assert not outcome.success
    assert outcome.adversarial_text == x


@pytest.mark.unit
def test_misclassified_text_is_skipped(keyword_f):
    x = Text.from_string("an awful movie")
    outcome = attack_substitution(x, 1, BaseVictim(keyword_f), SynonymTable({"awful": ["bad"]}), AttackBudget())
    assert outcome.skipped
    assert not outcome.success
    assert outcome.queries_used == 1


@pytest.mark.unit
def test_indifferent_victim_is_not_fooled():
    x = Text.from_string("a great movie")
    table = SynonymTable({"great": ["fine"], "movie": ["film"]})
    outcome = attack_substitution(x, 1, BaseVictim(ConstantClassifier(1, 2)), table, AttackBudget())
    assert not outcome.success
    assert outcome.adversarial_text == x


@pytest.mark.unit
def test_query_cap(keyword_f):
    x = Text.from_string("a great movie")
    table = SynonymTable({"great": ["fine"]})
    outcome = attack_substitution(x, 1, BaseVictim(keyword_f), table, AttackBudget(queries_cap=2))
    assert outcome.cap_hit
    assert not outcome.success
    assert outcome.queries_used == 2


@pytest.mark.unit
def test_position_budget_is_respected():
    x = Text(tuple("abcdef"))
    table = SynonymTable({c: ["z"] for c in "abcdef"})
    outcome = attack_substitution(x, 1, _Fading(), table, AttackBudget(max_positions=2))
    assert not outcome.success
    assert len(outcome.positions_changed) == 2
    assert outcome.adversarial_text.tokens.count("z") == 2


@pytest.mark.unit
def test_char_attack_on_keyword():
    f = KeywordClassifier({"football": 1}, default=0, class_count=2)
    x = Text.from_string("we watched football")
    outcome = attack_chars(x, 1, BaseVictim(f), AttackBudget(), homoglyphs=HomoglyphMap.from_file(str(HOMOGLYPHS)))
    assert outcome.success
    assert outcome.positions_changed.sorted() == (2,)
    assert len(outcome.adversarial_text) == len(x)


# ─── Against the smoothed classifier ─────────────────────────────────────────

@pytest.mark.unit
def test_attack_respects_exact_certificate():
    f = KeywordClassifier({"g": 1}, default=0, class_count=2)
    x = Text.from_string("g g g g g b")
    table = SynonymTable({"g": ["b"], "b": ["g"]})
    cert = exact_certify(x, 1, f, 1)
    assert cert.radius == 1
    alphabet = [table.get(tok) for tok in x.tokens]
    assert exact_certify_check(x, 1, f, 1, cert.radius, alphabet)

    victim = ExactSmoothedVictim(f, 1)
    within = attack_substitution(x, 1, victim, table, AttackBudget(max_positions=cert.radius))
    assert not within.success
    beyond = attack_substitution(x, 1, victim, table, AttackBudget(max_positions=3))
    assert beyond.success
    assert len(beyond.positions_changed) == 2


@pytest.mark.unit
def test_smoothed_attack_is_deterministic(keyword_f):
    cfg = SmoothingConfig(rho=0.5, n=50, n_prime=50)
    x = Text.from_string("a great movie with a great cast")
    table = SynonymTable({"great": ["fine", "good"], "movie": ["film"], "cast": ["crew"]})
    first = attack_substitution(x, 1, SmoothedVictim(SmoothedClassifier(keyword_f, cfg), 50), table, AttackBudget())
    second = attack_substitution(x, 1, SmoothedVictim(SmoothedClassifier(keyword_f, cfg), 50), table, AttackBudget())
    assert first == second


@pytest.mark.unit
def test_outcome_record_round_trip():
    outcome = AttackOutcome(
        success=True,
        adversarial_text=Text(("a", "fine", "movie")),
        positions_changed=DiffSet(frozenset({1})),
        queries_used=3,
        example_id="ex-1",
    )
    record = outcome.to_record()
    assert record["positions"] == [1]
    assert AttackOutcome.from_record(record) == outcome


@pytest.mark.unit
def test_budget_validation():
    with pytest.raises(InvalidArgumentError):
        AttackBudget(max_positions=-1)
