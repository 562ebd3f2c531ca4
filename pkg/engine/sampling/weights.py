"""
Per-word masking-weight providers for weighted sampling.

Weights are MASKING weights: a heavier word is masked more often. The engine
never decides what the weights mean; a provider does. The weight file holds
one JSON object per line: {"id": "ex-1", "weights": [1.0, 0.5, ...]}.
"""
import json
import logging
from abc import ABC, abstractmethod
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, Tuple

import numpy as np

from engine.core import Text
from engine.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


class WeightProvider(ABC):
    """Supplies one positive weight per token of a text."""

    @abstractmethod
    def weights_for(self, example_id: str, text: Text) -> Tuple[float, ...]:
        pass


class FlatWeightProvider(WeightProvider):
    """Every word gets the same weight (equivalent to uniform sampling)."""

    def __init__(self, value: float = 1.0):
        if not value > 0:
            raise InvalidArgumentError("flat weight must be positive")
        self.value = float(value)

    def weights_for(self, example_id: str, text: Text) -> Tuple[float, ...]:
        return tuple(self.value for _ in text.tokens)


class FileWeightProvider(WeightProvider):
    """Weights read from a weight file, keyed by example id."""

    def __init__(self, path: str, fallback: float = 1.0):
        self.path = Path(path)
        self.table = load_weight_file(self.path)
        self.fallback = FlatWeightProvider(fallback)

    def weights_for(self, example_id: str, text: Text) -> Tuple[float, ...]:
        weights = self.table.get(example_id)
        if weights is None:
            logger.warning("no weights for %s in %s; using flat weights", example_id, self.path)
            return self.fallback.weights_for(example_id, text)
        if len(weights) != len(text):
            raise InvalidArgumentError(
                f"{example_id}: {len(weights)} weights for a text of {len(text)} tokens"
            )
        return weights


class InverseFrequencyWeightProvider(WeightProvider):
    """
    Model-free stand-in for language-model scoring.

    A word's weight is 1 / (relative corpus frequency + smoothing), so rare
    words (the ones a language model finds least probable) are masked more.
    """

    def __init__(self, corpus: Iterable[Text], smoothing: float = 1e-3):
        counts: Counter = Counter()
        for text in corpus:
            counts.update(text.tokens)
        self.total = max(sum(counts.values()), 1)
        self.counts = dict(counts)
        self.smoothing = float(smoothing)

    def weights_for(self, example_id: str, text: Text) -> Tuple[float, ...]:
        return tuple(
            1.0 / (self.counts.get(tok, 0) / self.total + self.smoothing) for tok in text.tokens
        )


def load_weight_file(path: Path) -> Dict[str, Tuple[float, ...]]:
    """Parse a weight file into {id: weights}."""
    table: Dict[str, Tuple[float, ...]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                example_id = str(record["id"])
                weights = tuple(float(w) for w in record["weights"])
            except (ValueError, KeyError, TypeError) as e:
                raise InvalidArgumentError(f"{path}:{line_no}: bad weight record ({e})") from e
            if not weights or any(not np.isfinite(w) or w <= 0 for w in weights):
                raise InvalidArgumentError(f"{path}:{line_no}: weights must be positive numbers")
            if example_id in table:
                raise InvalidArgumentError(f"{path}:{line_no}: duplicate id {example_id}")
            table[example_id] = weights
    logger.info("loaded weights for %d examples from %s", len(table), path)
    return table
