"""
Synthetic two-class corpus for desk-scale robustness runs.

Every document has ``class_words`` words drawn from its class vocabulary and
fills the rest with shared filler words. A fraction of documents carries a
burst of one class "spike" word repeated several times; a bag-of-words model
learns these spikes as very strong evidence. The synonym table maps class
words and fillers to the other class's spikes, so an attacker who may change
a few words can push an unmasked text across the decision boundary.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from engine.attacks import SynonymTable
from engine.core import Text
from engine.evaluation.dataset import Dataset, Example
from engine.sampling import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusSpec:
    n_train: int = 500
    n_test: int = 100
    h: int = 16
    class_vocab: int = 1000
    shared_vocab: int = 40
    class_words: int = 10
    spikes: int = 3
    burst: int = 3
    spike_fraction: float = 0.25
    seed: int = 0


@dataclass(frozen=True)
class Corpus:
    train: Dataset
    test: Dataset
    synonyms: SynonymTable


def class_word(label: int, j: int) -> str:
    return f"c{label}w{j:04d}"


def spike_word(label: int, j: int) -> str:
    return f"c{label}spike{j}"


def filler_word(j: int) -> str:
    return f"s{j:02d}"


def _document(rng: np.random.Generator, label: int, spec: CorpusSpec) -> Text:
    picked = rng.choice(spec.class_vocab, size=spec.class_words, replace=False)
    tokens: List[str] = [class_word(label, int(j)) for j in picked]
    fillers = spec.h - spec.class_words
    tokens += [filler_word(int(j)) for j in rng.integers(0, spec.shared_vocab, size=fillers)]
    if rng.random() < spec.spike_fraction:
        spike = spike_word(label, int(rng.integers(0, spec.spikes)))
        for slot in range(spec.class_words, spec.class_words + min(spec.burst, fillers)):
            tokens[slot] = spike
    order = rng.permutation(spec.h)
    return Text(tuple(tokens[i] for i in order), label)


def _split(rng: np.random.Generator, size: int, prefix: str, spec: CorpusSpec) -> Dataset:
    examples = []
    for i in range(size):
        label = i % 2
        examples.append(Example(f"{prefix}-{i:04d}", _document(rng, label, spec), label))
    return Dataset(examples, ["class0", "class1"])


def synonym_entries(spec: CorpusSpec) -> Dict[str, List[str]]:
    entries: Dict[str, List[str]] = {}
    for label in (0, 1):
        other = [spike_word(1 - label, j) for j in range(spec.spikes)]
        for j in range(spec.class_vocab):
            entries[class_word(label, j)] = list(other)
    both = [spike_word(c, j) for c in (0, 1) for j in range(spec.spikes)]
    for j in range(spec.shared_vocab):
        entries[filler_word(j)] = list(both)
    return entries


def make_corpus(spec: CorpusSpec = CorpusSpec()) -> Corpus:
    """Train/test splits and the matching synonym table, fully determined by ``spec.seed``."""
    rng = np.random.Generator(np.random.PCG64(derive_seed(spec.seed, "corpus")))
    train = _split(rng, spec.n_train, "train", spec)
    test = _split(rng, spec.n_test, "test", spec)
    logger.info("synthetic corpus: %d train, %d test, h=%d", len(train), len(test), spec.h)
    return Corpus(train, test, SynonymTable(synonym_entries(spec)))
