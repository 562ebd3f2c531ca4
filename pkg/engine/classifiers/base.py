"""
Base classifier interface for maskcert

A base classifier f maps a masked text to one finite score per class. The
smoothed classifier only ever talks to f through this interface.

Core Concepts:
- ClassScores: per-class score vector; argmax breaks ties toward the lowest id
- BaseClassifier: classify() for one masked copy, classify_batch() for many
- CLASSIFIER_REGISTRY: name -> class, filled by @register_classifier

Example:
    from engine.classifiers import KeywordClassifier
    from engine.core import Text, RetentionSet, mask

    f = KeywordClassifier({"great": 1, "awful": 0}, default=0, class_count=2)
    x = Text.from_string("a great film")
    print(f.classify(mask(x, RetentionSet.full(3))).argmax)   # 1
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple, Type

import numpy as np

from engine.core import MASK_TOKEN, MaskedText, RetentionSet, Text
from engine.errors import InvalidArgumentError, MaskCertError

logger = logging.getLogger(__name__)


def argmax_lowest(values: Sequence[float]) -> int:
    """Index of the maximum; the lowest index wins ties."""
    return int(np.argmax(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class ClassScores:
    """Scores emitted by a base classifier for one masked copy."""
    scores: Tuple[float, ...]

    def __post_init__(self):
        scores = tuple(float(s) for s in self.scores)
        if len(scores) < 2:
            raise InvalidArgumentError(f"need at least 2 class scores, got {len(scores)}")
        if not all(math.isfinite(s) for s in scores):
            raise InvalidArgumentError(f"scores must be finite, got {scores}")
        object.__setattr__(self, "scores", scores)

    @classmethod
    def one_hot(cls, label: int, class_count: int) -> "ClassScores":
        if not 0 <= label < class_count:
            raise InvalidArgumentError(f"label {label} outside [0, {class_count})")
        return cls(tuple(1.0 if c == label else 0.0 for c in range(class_count)))

    @property
    def argmax(self) -> int:
        return argmax_lowest(self.scores)

    def __len__(self) -> int:
        return len(self.scores)


def masked_tokens(tokens: Sequence[str], retained_row: Sequence[int], sentinel: str) -> Tuple[str, ...]:
    """Token tuple of one masked copy."""
    kept = set(int(i) for i in retained_row)
    return tuple(tok if i in kept else sentinel for i, tok in enumerate(tokens))


class BaseClassifier(ABC):
    """
    Base class for all base classifiers.

    Subclasses implement classify(); classify() must be a pure function of the
    masked token sequence. Subclasses may override classify_batch() with a
    vectorized version that returns the same numbers.
    """

    NAME: str = "base"  # Override in subclasses

    def __init__(self, class_count: int):
        if class_count < 2:
            raise InvalidArgumentError(f"class_count must be >= 2, got {class_count}")
        self.class_count = int(class_count)

    @abstractmethod
    def classify(self, masked: MaskedText) -> ClassScores:
        """
        Score one masked copy.

        Args:
            masked: Masked text (sentinel at masked positions)

        Returns:
            ClassScores with class_count entries
        """
        pass

    def classify_batch(
        self,
        text: Text,
        retained: np.ndarray,
        sentinel: str = MASK_TOKEN,
    ) -> np.ndarray:
        """
        Score many masked copies of one text.

        Args:
            text: Source text of length h
            retained: (n, k) array of retained positions, one row per copy
            sentinel: Mask token

        Returns:
            (n, class_count) float array
        """
        h = len(text)
        out = np.empty((retained.shape[0], self.class_count), dtype=float)
        for row, indices in enumerate(retained):
            kept = RetentionSet(tuple(int(i) for i in indices), h)
            tokens = masked_tokens(text.tokens, indices, sentinel)
            try:
                scores = self.classify(MaskedText(tokens, kept, sentinel))
                self._check_width(scores)
            except MaskCertError as e:
                if e.sample_index is None:
                    e.sample_index = row
                raise
            out[row] = scores.scores
        return out

    def classify_text(self, text: Text, sentinel: str = MASK_TOKEN) -> ClassScores:
        """Score the unmasked text (every position retained)."""
        return self.classify(MaskedText(text.tokens, RetentionSet.full(len(text)), sentinel))

    def _check_width(self, scores: ClassScores) -> None:
        if len(scores) != self.class_count:
            raise InvalidArgumentError(
                f"{self.NAME} returned {len(scores)} scores, expected {self.class_count}"
            )

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} classes={self.class_count}>"


# Classifier type registry
CLASSIFIER_REGISTRY: Dict[str, Type[BaseClassifier]] = {}


def register_classifier(name: str):
    """
    Decorator to register a classifier type.

    Usage:
        @register_classifier("keyword")
        class KeywordClassifier(BaseClassifier):
            NAME = "keyword"
            ...
    """
    def decorator(cls: Type[BaseClassifier]):
        CLASSIFIER_REGISTRY[name] = cls
        return cls
    return decorator


def get_classifier_class(name: str) -> Type[BaseClassifier]:
    """
    Get classifier class by name.

    Raises:
        KeyError: If the name is not registered
    """
    if name not in CLASSIFIER_REGISTRY:
        raise KeyError(f"Classifier type not registered: {name}")
    return CLASSIFIER_REGISTRY[name]


def build_classifier(name: str, **options: Any) -> BaseClassifier:
    """Instantiate a registered classifier through its ``from_options`` hook."""
    cls = get_classifier_class(name)
    builder = getattr(cls, "from_options", None)
    if builder is None:
        return cls(**options)
    return builder(**options)
