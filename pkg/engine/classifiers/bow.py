"""
Bag-of-words naive Bayes base classifier with mask-augmented training.

The mask sentinel is an ordinary vocabulary token: training on masked copies
teaches the model how often each class sees it. Scores are class posteriors.
"""
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import softmax

from engine.core import MASK_TOKEN, MaskedText, Text, retained_count
from engine.errors import InvalidArgumentError, InvalidModeError
from engine.sampling import SamplerSpec, batch_index, sample_uniform
from .base import BaseClassifier, ClassScores, masked_tokens, register_classifier

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BowModel:
    """
    Count statistics of a multinomial naive Bayes model.

    ``token_counts[c, j]`` is how often vocab[j] occurred in class c. The log
    tables are derived with add-``smoothing`` estimates; tokens outside the
    vocabulary use the smoothing-only estimate.
    """
    vocab: Tuple[str, ...]
    doc_counts: np.ndarray
    token_counts: np.ndarray
    smoothing: float = 1.0
    index: Dict[str, int] = field(init=False, repr=False)
    log_prior: np.ndarray = field(init=False, repr=False)
    log_likelihood: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.smoothing > 0:
            raise InvalidArgumentError("smoothing constant must be positive")
        doc_counts = np.asarray(self.doc_counts, dtype=float)
        token_counts = np.asarray(self.token_counts, dtype=float).reshape(len(doc_counts), len(self.vocab))
        classes, width = token_counts.shape
        # one extra column for tokens never seen in training
        totals = token_counts.sum(axis=1, keepdims=True) + self.smoothing * (width + 1)
        table = np.empty((classes, width + 1), dtype=float)
        table[:, :width] = np.log(token_counts + self.smoothing) - np.log(totals)
        table[:, width] = np.log(self.smoothing) - np.log(totals[:, 0])
        prior = np.log(doc_counts + 1.0) - np.log(doc_counts.sum() + classes)
        object.__setattr__(self, "doc_counts", doc_counts)
        object.__setattr__(self, "token_counts", token_counts)
        object.__setattr__(self, "index", {tok: j for j, tok in enumerate(self.vocab)})
        object.__setattr__(self, "log_prior", prior)
        object.__setattr__(self, "log_likelihood", table)

    @property
    def class_count(self) -> int:
        return int(self.doc_counts.shape[0])

    @property
    def unseen_column(self) -> int:
        return len(self.vocab)

    def token_ids(self, tokens: Sequence[str]) -> np.ndarray:
        unseen = self.unseen_column
        return np.array([self.index.get(tok, unseen) for tok in tokens], dtype=np.int64)

    def log_joint(self, ids: np.ndarray) -> np.ndarray:
        """(n, h) token ids -> (n, classes) unnormalized log posteriors."""
        gathered = self.log_likelihood[:, ids]           # (classes, n, h)
        return gathered.sum(axis=2).T + self.log_prior

    def same_tables(self, other: "BowModel") -> bool:
        return (
            self.vocab == other.vocab
            and np.array_equal(self.doc_counts, other.doc_counts)
            and np.array_equal(self.token_counts, other.token_counts)
            and np.array_equal(self.log_likelihood, other.log_likelihood)
            and np.array_equal(self.log_prior, other.log_prior)
        )

    # ── Persistence ───────────────────────────────────────────────────────────
    def to_dict(self) -> Dict[str, object]:
        return {
            "vocab": list(self.vocab),
            "doc_counts": self.doc_counts.astype(int).tolist(),
            "token_counts": self.token_counts.astype(int).tolist(),
            "smoothing": self.smoothing,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "BowModel":
        return cls(
            vocab=tuple(data["vocab"]),
            doc_counts=np.asarray(data["doc_counts"], dtype=float),
            token_counts=np.asarray(data["token_counts"], dtype=float),
            smoothing=float(data.get("smoothing", 1.0)),
        )

    def save(self, path: str) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, sort_keys=True)
        return target

    @classmethod
    def load(cls, path: str) -> "BowModel":
        with open(Path(path), "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def fit_bow(
    documents: Iterable[Sequence[str]],
    labels: Iterable[int],
    class_count: int,
    smoothing: float = 1.0,
) -> BowModel:
    """Plain count-based fit over already-tokenized (possibly masked) documents."""
    per_class: List[Counter] = [Counter() for _ in range(class_count)]
    doc_counts = np.zeros(class_count, dtype=float)
    for tokens, label in zip(documents, labels):
        per_class[label].update(tokens)
        doc_counts[label] += 1
    vocab = tuple(sorted(set().union(*per_class)))
    counts = np.zeros((class_count, len(vocab)), dtype=float)
    for c, counter in enumerate(per_class):
        for j, tok in enumerate(vocab):
            counts[c, j] = counter.get(tok, 0)
    return BowModel(vocab, doc_counts, counts, smoothing)


def train_bow(
    data: Sequence[Text],
    rho: float,
    epochs: int,
    spec: SamplerSpec,
    class_count: Optional[int] = None,
    smoothing: float = 1.0,
    sentinel: str = MASK_TOKEN,
) -> BowModel:
    """
    Mask-augmented training.

    Each epoch draws one fresh retention set per example (k = retained_count(h,
    rho)) and accumulates token counts of the masked copies.

    Raises:
        InvalidArgumentError: Empty data, missing labels or labels out of range
        InvalidModeError: Weighted sampler
    """
    if not data:
        raise InvalidArgumentError("training data must not be empty")
    if epochs < 1:
        raise InvalidArgumentError(f"epochs must be >= 1, got {epochs}")
    if not spec.certifiable:
        raise InvalidModeError("mask-augmented training draws uniform retention sets")
    labels = [text.label for text in data]
    if any(label is None for label in labels):
        raise InvalidArgumentError("every training text needs a label")
    width = class_count or max(max(labels) + 1, 2)
    if any(label >= width for label in labels):
        raise InvalidArgumentError(f"label out of range for {width} classes")

    documents: List[Tuple[str, ...]] = []
    targets: List[int] = []
    for epoch in range(epochs):
        for i, text in enumerate(data):
            text.check_maskable(sentinel)
            h = len(text)
            k = retained_count(h, rho)
            batch = sample_uniform(h, k, 1, spec, batch=batch_index("train", epoch, i))
            documents.append(masked_tokens(text.tokens, batch.retained[0], sentinel))
            targets.append(text.label)
        logger.debug("epoch %d/%d: %d masked copies", epoch + 1, epochs, len(data))

    model = fit_bow(documents, targets, width, smoothing)
    logger.info("trained bag-of-words model: %d classes, %d vocab, rho=%.2f, %d epochs",
                width, len(model.vocab), rho, epochs)
    return model


@register_classifier("bow")
class BowClassifier(BaseClassifier):
    """Naive Bayes posterior over a BowModel."""

    NAME = "bow"

    def __init__(self, model: BowModel):
        super().__init__(model.class_count)
        self.model = model

    @classmethod
    def from_options(cls, model_file: Optional[str] = None, **_: object) -> "BowClassifier":
        if not model_file:
            raise InvalidArgumentError("bow classifier needs --model FILE")
        return cls(BowModel.load(model_file))

    def classify(self, masked: MaskedText) -> ClassScores:
        ids = self.model.token_ids(masked.tokens)[None, :]
        return ClassScores(tuple(softmax(self.model.log_joint(ids), axis=1)[0]))

    def classify_batch(self, text: Text, retained: np.ndarray, sentinel: str = MASK_TOKEN) -> np.ndarray:
        n, h = retained.shape[0], len(text)
        keep = np.zeros((n, h), dtype=bool)
        if retained.size:
            keep[np.repeat(np.arange(n), retained.shape[1]), retained.ravel()] = True
        text_ids = self.model.token_ids(text.tokens)
        sentinel_id = self.model.token_ids([sentinel])[0]
        ids = np.where(keep, text_ids[None, :], sentinel_id)
        return softmax(self.model.log_joint(ids), axis=1)
