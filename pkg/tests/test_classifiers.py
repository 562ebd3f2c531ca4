"""Tests for the built-in base classifiers, the registry and mask-augmented training."""
import json

import numpy as np
import pytest

from engine.classifiers import (
    CLASSIFIER_REGISTRY,
    BaseClassifier,
    BowClassifier,
    BowModel,
    ClassScores,
    ConstantClassifier,
    KeywordClassifier,
    LookupTableClassifier,
    argmax_lowest,
    build_classifier,
    classify_keyword,
    fit_bow,
    train_bow,
)
from engine.core import MASK_TOKEN, MaskedText, RetentionSet, Text, mask, retained_count
from engine.errors import InvalidArgumentError, InvalidModeError
from engine.sampling import SamplerMode, SamplerSpec, sample_uniform

pytestmark = pytest.mark.unit


def _masked(sentence: str, kept) -> MaskedText:
    x = Text.from_string(sentence)
    return mask(x, RetentionSet.of(kept, len(x)))


def _separable_corpus(size: int = 200, h: int = 8, seed: int = 0):
    rng = np.random.default_rng(seed)
    texts = []
    for i in range(size):
        label = i % 2
        words = [f"{'ab'[label]}{j}" for j in rng.integers(0, 10, size=h)]
        texts.append(Text(tuple(words), label))
    return texts


# ─── Scores ──────────────────────────────────────────────────────────────────

def test_argmax_ties_go_to_lowest_class():
    assert argmax_lowest([0.5, 0.5]) == 0
    assert argmax_lowest([0.1, 0.7, 0.7]) == 1


def test_class_scores_validation():
    with pytest.raises(InvalidArgumentError):
        ClassScores((1.0,))
    with pytest.raises(InvalidArgumentError):
        ClassScores((float("nan"), 1.0))
    assert ClassScores.one_hot(2, 3).scores == (0.0, 0.0, 1.0)


# ─── Keyword ─────────────────────────────────────────────────────────────────

def test_keyword_hit():
    scores = classify_keyword(_masked("what a great day", [0, 1, 2, 3]), {"great": 1}, 0, 2)
    assert scores.argmax == 1


def test_keyword_masked_falls_back_to_default():
    scores = classify_keyword(_masked("what a great day", [0, 1, 3]), {"great": 1}, 0, 2)
    assert scores.argmax == 0


def test_keyword_earliest_position_wins():
    rules = {"great": 1, "awful": 0, "meh": 2}
    scores = classify_keyword(_masked("meh great awful", [0, 1, 2]), rules, 1, 3)
    assert scores.argmax == 2


def test_keyword_batch_matches_single_calls(keyword_f):
    x = Text.from_string("an awful start but a great finish overall")
    batch = sample_uniform(len(x), 4, 200, SamplerSpec(master_seed=3))
    vectorized = keyword_f.classify_batch(x, batch.retained)
    looped = BaseClassifier.classify_batch(keyword_f, x, batch.retained)
    assert np.array_equal(vectorized, looped)


def test_keyword_rule_validation():
    with pytest.raises(InvalidArgumentError):
        KeywordClassifier({})
    with pytest.raises(InvalidArgumentError):
        KeywordClassifier({"x": 3}, class_count=2)


# ─── Constant and lookup ─────────────────────────────────────────────────────

def test_constant_classifier(constant_f):
    x = Text.from_string("anything at all")
    assert constant_f.classify_text(x).argmax == 1
    batch = constant_f.classify_batch(x, np.zeros((5, 0), dtype=int))
    assert batch.shape == (5, 2)
    assert np.all(batch[:, 1] == 1.0)


def test_lookup_is_a_fixed_function_of_the_masked_tokens():
    f = LookupTableClassifier(class_count=3, seed=4)
    a = f.classify(_masked("a b c d", [0, 2]))
    b = f.classify(_masked("a b c d", [0, 2]))
    assert a == b
    labels = {f.classify(_masked("a b c d", kept)).argmax for kept in ([0], [1], [2], [3], [0, 1], [2, 3])}
    assert labels <= {0, 1, 2}


def test_lookup_real_scores_are_finite():
    f = LookupTableClassifier(class_count=4, seed=1, scores=True)
    scores = f.classify(_masked("x y", [1]))
    assert len(scores) == 4
    assert all(np.isfinite(scores.scores))


def test_lookup_options_keep_real_scores():
    f = build_classifier("lookup", class_count=3, seed=2, scores=True)
    assert f.real_scores
    masked = _masked("x y z", [0, 2])
    assert f.classify(masked) == LookupTableClassifier(class_count=3, seed=2, scores=True).classify(masked)
    assert not build_classifier("lookup", class_count=3, seed=2).real_scores


# ─── Failures carry the sample index ─────────────────────────────────────────

class _FailsOnThird(BaseClassifier):
    NAME = "fails"

    def __init__(self):
        super().__init__(2)
        self.calls = 0

    def classify(self, masked: MaskedText) -> ClassScores:
        self.calls += 1
        if self.calls == 3:
            raise InvalidArgumentError("boom")
        return ClassScores((1.0, 0.0))


def test_classify_batch_attaches_sample_index():
    x = Text.from_string("a b c")
    retained = sample_uniform(3, 2, 5, SamplerSpec()).retained
    with pytest.raises(InvalidArgumentError) as info:
        _FailsOnThird().classify_batch(x, retained)
    assert info.value.sample_index == 2


def test_wrong_width_is_rejected():
    class Narrow(BaseClassifier):
        def classify(self, masked):
            return ClassScores((1.0, 0.0))

    with pytest.raises(InvalidArgumentError):
        Narrow(3).classify_batch(Text.from_string("a"), np.array([[0]]))


# ─── Registry ────────────────────────────────────────────────────────────────

def test_registry_names():
    assert {"constant", "keyword", "lookup", "bow", "external"} <= set(CLASSIFIER_REGISTRY)


def test_build_keyword_from_rules_file(tmp_path):
    rules = tmp_path / "rules.json"
    rules.write_text(json.dumps({"great": 1}), encoding="utf-8")
    f = build_classifier("keyword", rules_file=str(rules), class_count=2)
    assert isinstance(f, KeywordClassifier)
    assert f.classify_text(Text.from_string("so great")).argmax == 1


def test_build_unknown_name():
    with pytest.raises(KeyError):
        build_classifier("transformer")


def test_build_bow_needs_model():
    with pytest.raises(InvalidArgumentError):
        build_classifier("bow")


# ─── Bag of words ────────────────────────────────────────────────────────────

def test_training_with_rho_zero_equals_plain_counts():
    data = _separable_corpus(40)
    trained = train_bow(data, rho=0.0, epochs=1, spec=SamplerSpec(), class_count=2)
    plain = fit_bow([t.tokens for t in data], [t.label for t in data], 2)
    assert trained.same_tables(plain)


def test_mask_augmented_training_separates_classes():
    data = _separable_corpus(200)
    rho = 0.3
    model = train_bow(data, rho=rho, epochs=5, spec=SamplerSpec(master_seed=1), class_count=2)
    f = BowClassifier(model)
    correct = 0
    total = 0
    for i, x in enumerate(data):
        k = retained_count(len(x), rho)
        batch = sample_uniform(len(x), k, 5, SamplerSpec(master_seed=99), batch=i)
        votes = f.classify_batch(x, batch.retained).argmax(axis=1)
        correct += int(np.sum(votes == x.label))
        total += len(votes)
    assert correct / total >= 0.95


def test_masked_training_sees_the_sentinel():
    model = train_bow(_separable_corpus(20), rho=0.5, epochs=2, spec=SamplerSpec(), class_count=2)
    assert MASK_TOKEN in model.vocab


def test_bow_batch_matches_single_calls():
    model = train_bow(_separable_corpus(60), rho=0.5, epochs=3, spec=SamplerSpec(), class_count=2)
    f = BowClassifier(model)
    x = Text.from_string("a1 b2 a3 unseen b4 a5")
    batch = sample_uniform(len(x), 3, 50, SamplerSpec(master_seed=2))
    assert np.allclose(f.classify_batch(x, batch.retained), BaseClassifier.classify_batch(f, x, batch.retained))


def test_bow_model_persists(tmp_path):
    model = train_bow(_separable_corpus(30), rho=0.5, epochs=2, spec=SamplerSpec(), class_count=2)
    path = model.save(str(tmp_path / "model.json"))
    assert BowModel.load(str(path)).same_tables(model)
    f = build_classifier("bow", model_file=str(path))
    assert f.class_count == 2


def test_training_errors():
    with pytest.raises(InvalidArgumentError):
        train_bow([], rho=0.5, epochs=1, spec=SamplerSpec())
    with pytest.raises(InvalidArgumentError):
        train_bow([Text(("a", "b"), 3)], rho=0.5, epochs=1, spec=SamplerSpec(), class_count=2)
    with pytest.raises(InvalidArgumentError):
        train_bow([Text(("a", "b"))], rho=0.5, epochs=1, spec=SamplerSpec())
    weighted = SamplerSpec(SamplerMode.WEIGHTED, 0, weights=(1.0, 1.0))
    with pytest.raises(InvalidModeError):
        train_bow([Text(("a", "b"), 0)], rho=0.5, epochs=1, spec=weighted)
