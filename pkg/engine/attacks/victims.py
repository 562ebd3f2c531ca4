"""
Attack victims: score-based prediction functions under a query budget.

A victim returns one score per class for a text and, for importance
ranking, for the same text with one position replaced by the mask sentinel.
"""
import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from engine.classifiers.base import BaseClassifier, argmax_lowest
from engine.core import MASK_TOKEN, MaskedText, RetentionSet, Text
from engine.certification.exact import DEFAULT_ENUM_CAP, ExactOracle
from engine.errors import QueryCapReached
from engine.sampling import sample
from engine.smoothing import EnsembleMode, SmoothedClassifier, aggregate, text_batch

logger = logging.getLogger(__name__)

ATTACK_SAMPLES = 100


def _occluded_text(x: Text, position: int, sentinel: str) -> Text:
    tokens = list(x.tokens)
    tokens[position] = sentinel
    return Text(tuple(tokens), x.label)


class Victim(ABC):
    """Anything an attack can query."""

    name = "victim"

    @abstractmethod
    def scores(self, x: Text) -> np.ndarray:
        pass

    @abstractmethod
    def occlude(self, x: Text, position: int) -> np.ndarray:
        """Scores of x with ``position`` masked."""
        pass

    def label(self, x: Text) -> int:
        return argmax_lowest(self.scores(x))


class BaseVictim(Victim):
    """The base classifier on the unmasked text."""

    name = "base"

    def __init__(self, f: BaseClassifier, sentinel: str = MASK_TOKEN):
        self.f = f
        self.sentinel = sentinel

    def scores(self, x: Text) -> np.ndarray:
        return np.asarray(self.f.classify_text(x, self.sentinel).scores, dtype=float)

    def occlude(self, x: Text, position: int) -> np.ndarray:
        kept = RetentionSet(tuple(i for i in range(len(x)) if i != position), len(x))
        masked = MaskedText(_occluded_text(x, position, self.sentinel).tokens, kept, self.sentinel)
        return np.asarray(self.f.classify(masked).scores, dtype=float)


class SmoothedVictim(Victim):
    """
    g queried with a fresh seeded batch of ``n`` masked copies per text.

    Scores are vote fractions (vote ensemble) or mean scores (logit ensemble).
    """

    name = "smoothed"

    def __init__(self, g: SmoothedClassifier, n: int = ATTACK_SAMPLES):
        self.g = g
        self.n = int(n)

    def _scores_of(self, dist) -> np.ndarray:
        if self.g.cfg.ensemble is EnsembleMode.LOGIT:
            return np.asarray(dist.mean_scores, dtype=float)
        return dist.fractions()

    def scores(self, x: Text) -> np.ndarray:
        return self._scores_of(self.g.distribution(x, self.n, purpose="attack"))

    def occlude(self, x: Text, position: int) -> np.ndarray:
        cfg = self.g.cfg
        h = len(x)
        drawn = sample(h, cfg.retained_for(h), self.n, cfg.sampler, batch=text_batch(x, f"occlude:{position}"))
        occluded = _occluded_text(x, position, cfg.sentinel)
        return self._scores_of(aggregate(self.g.base.classify_batch(occluded, drawn.retained, cfg.sentinel)))


class ExactSmoothedVictim(Victim):
    """g with exact class probabilities (small texts only)."""

    name = "exact"

    def __init__(self, f: BaseClassifier, k: int, sentinel: str = MASK_TOKEN, cap: int = DEFAULT_ENUM_CAP,
                 oracle: Optional[ExactOracle] = None):
        self.oracle = oracle or ExactOracle(f, k, sentinel, cap)

    def scores(self, x: Text) -> np.ndarray:
        return self.oracle.pc(x)

    def occlude(self, x: Text, position: int) -> np.ndarray:
        return self.oracle.pc(_occluded_text(x, position, self.oracle.sentinel), strict=False)


class QueryCounter:
    """Wraps a victim and enforces a query cap."""

    def __init__(self, victim: Victim, cap: int):
        self.victim = victim
        self.cap = int(cap)
        self.used = 0

    def _charge(self) -> None:
        if self.used >= self.cap:
            raise QueryCapReached(f"query cap of {self.cap} reached")
        self.used += 1

    def scores(self, x: Text) -> np.ndarray:
        self._charge()
        return self.victim.scores(x)

    def occlude(self, x: Text, position: int) -> np.ndarray:
        self._charge()
        return self.victim.occlude(x, position)
