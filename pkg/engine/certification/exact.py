"""
Exhaustive oracles: exact class probabilities of g by enumerating every
retention set, exact conditional betas, and brute-force adversaries over
small substitution neighborhoods.

Everything here is bounded by an enumeration cap and raises TooLargeError
instead of running away.
"""
import itertools
import logging
import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from engine.classifiers.base import BaseClassifier, argmax_lowest
from engine.core import MASK_TOKEN, Text, diff
from engine.errors import InvalidArgumentError, TooLargeError
from .bounds import delta
from .certificate import Certificate

logger = logging.getLogger(__name__)

DEFAULT_ENUM_CAP = 1_000_000


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise TooLargeError(f"{what} needs {count} evaluations, cap is {cap}")


class ExactOracle:
    """
    Exact smoothed-classifier quantities for one base classifier and retention count.

    Votes of masked copies are cached by their token tuple, so neighbors of a
    text that share masked copies are classified once.
    """

    def __init__(self, f: BaseClassifier, k: int, sentinel: str = MASK_TOKEN, cap: int = DEFAULT_ENUM_CAP):
        if k < 0:
            raise InvalidArgumentError(f"k must be >= 0, got {k}")
        self.f = f
        self.k = int(k)
        self.sentinel = sentinel
        self.cap = int(cap)
        self._subsets: Dict[int, np.ndarray] = {}
        self._membership: Dict[int, np.ndarray] = {}
        self._votes: Dict[Tuple[str, ...], int] = {}

    @property
    def class_count(self) -> int:
        return self.f.class_count

    def subsets(self, h: int) -> np.ndarray:
        """All k-subsets of range(h) in lexicographic order, shape (C(h,k), k)."""
        if self.k > h:
            raise InvalidArgumentError(f"k={self.k} exceeds text length {h}")
        if h not in self._subsets:
            _check_cap(math.comb(h, self.k), self.cap, f"enumerating C({h},{self.k}) retention sets")
            rows = list(itertools.combinations(range(h), self.k))
            self._subsets[h] = np.array(rows, dtype=np.int64).reshape(len(rows), self.k)
        return self._subsets[h]

    def membership(self, h: int) -> np.ndarray:
        if h not in self._membership:
            subsets = self.subsets(h)
            out = np.zeros((len(subsets), h), dtype=bool)
            if self.k:
                out[np.repeat(np.arange(len(subsets)), self.k), subsets.ravel()] = True
            self._membership[h] = out
        return self._membership[h]

    def votes(self, x: Text, strict: bool = True) -> np.ndarray:
        """
        Label f assigns to each masked copy, in subset order.

        ``strict=False`` admits texts that already hold the sentinel (occluded
        texts of the attacks).
        """
        if strict:
            x.check_maskable(self.sentinel)
        h = len(x)
        subsets = self.subsets(h)
        keep = self.membership(h)
        keys = [
            tuple(tok if keep[row, i] else self.sentinel for i, tok in enumerate(x.tokens))
            for row in range(len(subsets))
        ]
        missing = [row for row, key in enumerate(keys) if key not in self._votes]
        if missing:
            scores = self.f.classify_batch(x, subsets[missing], self.sentinel)
            for row, label in zip(missing, np.argmax(scores, axis=1)):
                self._votes[keys[row]] = int(label)
        return np.array([self._votes[key] for key in keys], dtype=np.int64)

    def pc(self, x: Text, strict: bool = True) -> np.ndarray:
        """Exact class probabilities of g at x."""
        votes = self.votes(x, strict)
        return np.bincount(votes, minlength=self.class_count) / len(votes)

    def label(self, x: Text) -> int:
        return argmax_lowest(self.pc(x))

    def beta(self, x: Text, label: int, positions: Sequence[int]) -> float:
        """P(f returns label | the retention set hits ``positions``), 0 when nothing hits."""
        h = len(x)
        hits = self.membership(h)[:, list(positions)].any(axis=1) if len(positions) else np.zeros(0, bool)
        if not np.any(hits):
            return 0.0
        votes = self.votes(x)
        return float(np.mean(votes[hits] == label))

    def retained_mass(self, x: Text, label: int, positions: Sequence[int]) -> float:
        """P(f returns label and the retention set avoids ``positions``)."""
        keep = self.membership(len(x))
        avoid = ~keep[:, list(positions)].any(axis=1) if len(positions) else np.ones(len(keep), bool)
        votes = self.votes(x)
        return float(np.sum(avoid & (votes == label)) / len(votes))


# ─────────────────────────────────────────────
#  Exact probabilities and certificates
# ─────────────────────────────────────────────

def exact_pc(x: Text, f: BaseClassifier, k: int, sentinel: str = MASK_TOKEN, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """
    Exact per-class probabilities over all C(h, k) masked copies.

    Raises:
        TooLargeError: C(h, k) exceeds ``cap``
    """
    return ExactOracle(f, k, sentinel, cap).pc(x)


def exact_beta(
    x: Text,
    f: BaseClassifier,
    k: int,
    label: int,
    positions: Sequence[int],
    sentinel: str = MASK_TOKEN,
    cap: int = DEFAULT_ENUM_CAP,
) -> float:
    """Exact conditional probability of ``label`` given the retention set hits ``positions``."""
    return ExactOracle(f, k, sentinel, cap).beta(x, label, positions)


def bound_slack(
    x: Text,
    x2: Text,
    f: BaseClassifier,
    k: int,
    label: int,
    oracle: Optional[ExactOracle] = None,
) -> float:
    """
    p_c(x) - p_c(x2) - beta * delta for the positions where x and x2 differ.

    Never positive: a masked copy that hides every changed position is the
    same text under x and x2.
    """
    oracle = oracle or ExactOracle(f, k)
    changed = diff(x, x2).sorted()
    h = len(x)
    p_x = oracle.pc(x)[label]
    p_x2 = oracle.pc(x2)[label]
    bound = oracle.beta(x, label, changed) * delta(h, oracle.k, len(changed))
    return float(p_x - p_x2 - bound)


def exact_certify(
    x: Text,
    y: int,
    f: BaseClassifier,
    k: int,
    sentinel: str = MASK_TOKEN,
    cap: int = DEFAULT_ENUM_CAP,
    example_id: Optional[str] = None,
    oracle: Optional[ExactOracle] = None,
) -> Certificate:
    """
    Certificate from exact probabilities and worst-case exact betas.

    Radius d is granted when, for every set D of d positions, the mass of
    copies voting y that avoid D stays above 0.5 (p_y - beta_D * delta > 0.5
    with beta_D exact). When argmax p = y but p_y <= 0.5 the radius is 0.
    """
    oracle = oracle or ExactOracle(f, k, sentinel, cap)
    h = len(x)
    pc = oracle.pc(x)
    if argmax_lowest(pc) != y:
        return Certificate.abstain(h, example_id)
    p_y = float(pc[y])
    if p_y <= 0.5:
        return Certificate(y, p_y, p_y, 0, h, example_id)

    radius, beta_at_radius = 0, p_y
    subsets = len(oracle.subsets(h))
    for d in range(1, h + 1):
        _check_cap(math.comb(h, d) * subsets, cap, f"worst-case beta at d={d}")
        worst_mass, worst_set = min(
            (oracle.retained_mass(x, y, D), D) for D in itertools.combinations(range(h), d)
        )
        if worst_mass <= 0.5:
            break
        radius = d
        beta_at_radius = oracle.beta(x, y, worst_set)
    return Certificate(y, p_y, beta_at_radius, radius, h, example_id)


# ─────────────────────────────────────────────
#  Brute-force adversary
# ─────────────────────────────────────────────

def neighborhood_size(x: Text, d: int, alphabet: Sequence[Sequence[str]]) -> int:
    """Number of texts within Hamming distance d (x itself included)."""
    options = [len([s for s in alphabet[i] if s != tok]) for i, tok in enumerate(x.tokens)]
    total = 0
    for j in range(d + 1):
        for positions in itertools.combinations(range(len(x)), j):
            total += math.prod(options[p] for p in positions)
    return total


def neighbors(x: Text, d: int, alphabet: Sequence[Sequence[str]]) -> Iterator[Text]:
    """Every text obtained by substituting at most d positions (x first)."""
    if len(alphabet) != len(x):
        raise InvalidArgumentError(f"need {len(x)} substitute lists, got {len(alphabet)}")
    if d < 0:
        raise InvalidArgumentError(f"d must be >= 0, got {d}")
    options: List[List[str]] = [
        [s for s in alphabet[i] if s != tok] for i, tok in enumerate(x.tokens)
    ]
    for j in range(min(d, len(x)) + 1):
        for positions in itertools.combinations(range(len(x)), j):
            for choice in itertools.product(*(options[p] for p in positions)):
                tokens = list(x.tokens)
                for p, s in zip(positions, choice):
                    tokens[p] = s
                yield Text(tuple(tokens), x.label)


def find_counterexample(
    x: Text,
    y: int,
    f: BaseClassifier,
    k: int,
    d: int,
    alphabet: Sequence[Sequence[str]],
    sentinel: str = MASK_TOKEN,
    cap: int = DEFAULT_ENUM_CAP,
    oracle: Optional[ExactOracle] = None,
) -> Optional[Text]:
    """
    First neighbor within Hamming distance d on which exact g does not return y.

    Raises:
        TooLargeError: The neighborhood exceeds ``cap`` texts
    """
    _check_cap(neighborhood_size(x, d, alphabet), cap, f"adversarial neighborhood at d={d}")
    oracle = oracle or ExactOracle(f, k, sentinel, cap)
    for candidate in neighbors(x, d, alphabet):
        if oracle.label(candidate) != y:
            logger.debug("counterexample at distance %d: %s", len(diff(x, candidate)), candidate)
            return candidate
    return None


def exact_certify_check(
    x: Text,
    y: int,
    f: BaseClassifier,
    k: int,
    d: int,
    alphabet: Sequence[Sequence[str]],
    sentinel: str = MASK_TOKEN,
    cap: int = DEFAULT_ENUM_CAP,
    oracle: Optional[ExactOracle] = None,
) -> bool:
    """True iff exact g returns y on every text within Hamming distance d of x."""
    return find_counterexample(x, y, f, k, d, alphabet, sentinel, cap, oracle) is None
