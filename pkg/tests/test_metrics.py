"""Tests for the dataset-level robustness summaries."""
import pytest

from engine.attacks import AttackOutcome
from engine.certification import Certificate
from engine.core import DiffSet, Text
from engine.errors import InvalidArgumentError
from engine.evaluation import NOT_AVAILABLE, empirical_summary, from_rates, median_certified, summarize_outcomes


def _cert(radius, h=10):
    if radius is None:
        return Certificate.abstain(h)
    return Certificate(1, 0.9, 0.9, radius, h)


def _outcome(example_id, success=False, skipped=False):
    return AttackOutcome(success, Text(("a",)), DiffSet(frozenset()), 1, skipped=skipped, example_id=example_id)


@pytest.mark.unit
def test_median_counts_misclassified_as_lowest():
    summary = median_certified([_cert(None), _cert(None), _cert(1), _cert(2), _cert(3)])
    assert summary.mcb == 1
    assert summary.mcr == pytest.approx(0.1)
    assert summary.accuracy == pytest.approx(0.6)
    assert summary.count == 5


@pytest.mark.unit
def test_median_single_and_equal():
    assert median_certified([_cert(1)]).mcb == 1
    assert median_certified([_cert(4)] * 6).mcb == 4


@pytest.mark.unit
def test_median_lower_of_even_count():
    assert median_certified([_cert(1), _cert(2), _cert(3), _cert(4)]).mcb == 2


@pytest.mark.unit
def test_median_not_available():
    summary = median_certified([_cert(None)] * 3)
    assert summary.mcb is None
    assert summary.to_dict()["mcb"] == NOT_AVAILABLE
    assert summary.to_dict()["mcr"] == NOT_AVAILABLE
    assert summary.accuracy == 0.0


@pytest.mark.unit
def test_median_needs_certificates():
    with pytest.raises(InvalidArgumentError):
        median_certified([])


@pytest.mark.unit
def test_empirical_summary():
    clean = {f"ex-{i}": i < 8 for i in range(10)}
    attacked = [_outcome(f"ex-{i}", success=i < 4) for i in range(8)]
    summary = empirical_summary(clean, attacked)
    assert summary.cln == pytest.approx(0.8)
    assert summary.boa == pytest.approx(0.4)
    assert summary.succ == pytest.approx(0.5)
    assert summary.count == 10


@pytest.mark.unit
def test_empirical_summary_without_successes():
    clean = {"a": True, "b": True}
    summary = empirical_summary(clean, [_outcome("a"), _outcome("b")])
    assert summary.succ == 0.0
    assert summary.boa == summary.cln == 1.0


@pytest.mark.unit
def test_from_reported_percentages():
    summary = from_rates(93.9, 15.8, 100)
    assert summary.succ == pytest.approx(0.832, abs=5e-4)
    assert summary.cln == pytest.approx(0.939)


@pytest.mark.unit
def test_attacked_ids_must_match():
    clean = {"a": True, "b": False}
    with pytest.raises(InvalidArgumentError):
        empirical_summary(clean, [_outcome("b")])
    with pytest.raises(InvalidArgumentError):
        empirical_summary(clean, [_outcome("a"), _outcome("a")])


@pytest.mark.unit
def test_summary_from_outcomes_treats_skipped_as_wrong():
    outcomes = [_outcome("a", success=True), _outcome("b"), _outcome("c", skipped=True), _outcome("d")]
    summary = summarize_outcomes(outcomes)
    assert summary.cln == pytest.approx(0.75)
    assert summary.boa == pytest.approx(0.5)
    assert summary.succ == pytest.approx(1 / 3)
