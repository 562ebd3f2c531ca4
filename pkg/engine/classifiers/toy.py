"""
Deterministic toy classifiers used as oracles in tests and small runs.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence

import numpy as np
import xxhash

from engine.core import MASK_TOKEN, MaskedText, Text
from engine.errors import InvalidArgumentError
from .base import BaseClassifier, ClassScores, register_classifier

logger = logging.getLogger(__name__)


def _membership(retained: np.ndarray, h: int) -> np.ndarray:
    out = np.zeros((retained.shape[0], h), dtype=bool)
    if retained.size:
        rows = np.repeat(np.arange(retained.shape[0]), retained.shape[1])
        out[rows, retained.ravel()] = True
    return out


def classify_keyword(
    masked: MaskedText,
    rules: Mapping[str, int],
    default: int,
    class_count: Optional[int] = None,
) -> ClassScores:
    """
    One-hot scores for the class of the first rule keyword in token order.

    Falls back to ``default`` when no keyword survives the mask.
    """
    if not rules:
        raise InvalidArgumentError("keyword rules must not be empty")
    width = class_count or max(max(rules.values()), default, 1) + 1
    for token in masked.tokens:
        if token in rules:
            return ClassScores.one_hot(rules[token], width)
    return ClassScores.one_hot(default, width)


@register_classifier("constant")
class ConstantClassifier(BaseClassifier):
    """Always votes for one class."""

    NAME = "constant"

    def __init__(self, label: int, class_count: int = 2):
        super().__init__(class_count)
        if not 0 <= label < class_count:
            raise InvalidArgumentError(f"label {label} outside [0, {class_count})")
        self.label = int(label)

    @classmethod
    def from_options(cls, label: int = 0, class_count: int = 2, **_: object) -> "ConstantClassifier":
        return cls(int(label), int(class_count))

    def classify(self, masked: MaskedText) -> ClassScores:
        return ClassScores.one_hot(self.label, self.class_count)

    def classify_batch(self, text: Text, retained: np.ndarray, sentinel: str = MASK_TOKEN) -> np.ndarray:
        out = np.zeros((retained.shape[0], self.class_count), dtype=float)
        out[:, self.label] = 1.0
        return out


@register_classifier("keyword")
class KeywordClassifier(BaseClassifier):
    """First surviving keyword decides the class; otherwise the default class."""

    NAME = "keyword"

    def __init__(self, rules: Mapping[str, int], default: int = 0, class_count: Optional[int] = None):
        if not rules:
            raise InvalidArgumentError("keyword rules must not be empty")
        width = class_count or max(max(rules.values()), default, 1) + 1
        super().__init__(width)
        for keyword, label in rules.items():
            if not 0 <= label < width:
                raise InvalidArgumentError(f"rule {keyword!r} -> {label} outside [0, {width})")
        if not 0 <= default < width:
            raise InvalidArgumentError(f"default class {default} outside [0, {width})")
        self.rules: Dict[str, int] = dict(rules)
        self.default = int(default)

    @classmethod
    def from_options(
        cls,
        rules: Optional[Mapping[str, int]] = None,
        rules_file: Optional[str] = None,
        default: int = 0,
        class_count: Optional[int] = None,
        **_: object,
    ) -> "KeywordClassifier":
        if rules is None:
            if not rules_file:
                raise InvalidArgumentError("keyword classifier needs --rules FILE")
            with open(Path(rules_file), "r", encoding="utf-8") as f:
                rules = {str(k): int(v) for k, v in json.load(f).items()}
        return cls(rules, int(default), class_count)

    def classify(self, masked: MaskedText) -> ClassScores:
        return classify_keyword(masked, self.rules, self.default, self.class_count)

    def classify_batch(self, text: Text, retained: np.ndarray, sentinel: str = MASK_TOKEN) -> np.ndarray:
        positions = [i for i, tok in enumerate(text.tokens) if tok in self.rules]
        labels = np.full(retained.shape[0], self.default, dtype=int)
        if positions:
            hits = _membership(retained, len(text))[:, positions]
            found = hits.any(axis=1)
            first = np.argmax(hits, axis=1)
            keyword_labels = np.array([self.rules[text.tokens[p]] for p in positions], dtype=int)
            labels[found] = keyword_labels[first[found]]
        out = np.zeros((retained.shape[0], self.class_count), dtype=float)
        out[np.arange(retained.shape[0]), labels] = 1.0
        return out


@register_classifier("lookup")
class LookupTableClassifier(BaseClassifier):
    """
    A random but fixed function of the masked token tuple.

    The class of a masked copy is a seeded xxhash of its tokens modulo the
    class count, so every distinct masked copy gets an arbitrary label. With
    ``scores=True`` it emits hashed real scores instead of a one-hot vector.
    """

    NAME = "lookup"

    def __init__(self, class_count: int = 2, seed: int = 0, scores: bool = False):
        super().__init__(class_count)
        self.seed = int(seed)
        self.real_scores = bool(scores)

    @classmethod
    def from_options(
        cls, class_count: int = 2, seed: int = 0, scores: bool = False, **_: object
    ) -> "LookupTableClassifier":
        return cls(int(class_count), int(seed), bool(scores))

    def _digest(self, tokens: Sequence[str]) -> int:
        return xxhash.xxh64_intdigest("\x1f".join(tokens).encode("utf-8"), seed=self.seed)

    def classify(self, masked: MaskedText) -> ClassScores:
        digest = self._digest(masked.tokens)
        if self.real_scores:
            rng = np.random.Generator(np.random.PCG64(digest))
            return ClassScores(tuple(rng.standard_normal(self.class_count)))
        return ClassScores.one_hot(digest % self.class_count, self.class_count)
