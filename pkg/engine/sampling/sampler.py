"""
Retention-set samplers.

Every batch is drawn from its own PCG64 stream whose seed is derived from
(master_seed, batch_index) with xxhash. Sample i of a batch always consumes
draws [i*h, (i+1)*h) of that stream, so a worker producing samples
[start, end) advances the stream counter and gets exactly the rows a single
worker would have produced. Identical (spec, batch_index, h, k, n) therefore
give identical batches for any worker count or call order.

Both modes assign each position an exponential arrival time with rate equal
to its masking weight (all ones in uniform mode). The h - k earliest arrivals
are masked, which has the same law as drawing masked positions one at a time
without replacement with probability proportional to weight. The remaining k
positions form the RetentionSet.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import xxhash

from engine.core import RetentionSet
from engine.errors import InvalidArgumentError, InvalidModeError

logger = logging.getLogger(__name__)

SEED_BITS = 64


class SamplerMode(str, Enum):
    UNIFORM = "uniform"
    WEIGHTED = "weighted"


def derive_seed(master_seed: int, *parts: Union[int, str]) -> int:
    """64-bit seed from a master seed and any number of labels."""
    key = "\x1f".join(str(p) for p in (master_seed,) + parts)
    return xxhash.xxh64_intdigest(key.encode("utf-8"))


def batch_index(*parts: Union[int, str]) -> int:
    """Stable integer batch index for a tuple of labels (example id, purpose, ...)."""
    return derive_seed(0, "batch", *parts)


@dataclass(frozen=True)
class SamplerSpec:
    """How retention sets are drawn."""
    mode: SamplerMode = SamplerMode.UNIFORM
    master_seed: int = 0
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", SamplerMode(self.mode))
        if not 0 <= int(self.master_seed) < 2 ** SEED_BITS:
            raise InvalidArgumentError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if any(not np.isfinite(w) or w <= 0 for w in weights):
                raise InvalidArgumentError("masking weights must be finite and positive")
            object.__setattr__(self, "weights", weights)

    @property
    def certifiable(self) -> bool:
        return self.mode is SamplerMode.UNIFORM

    def with_weights(self, weights: Optional[Sequence[float]]) -> "SamplerSpec":
        return SamplerSpec(self.mode, self.master_seed, None if weights is None else tuple(weights))

    def with_seed(self, master_seed: int) -> "SamplerSpec":
        return SamplerSpec(self.mode, master_seed, self.weights)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """
    A batch of retention sets.

    ``retained`` is an (n, k) int array of sorted positions; ``sets`` gives the
    same rows as RetentionSet values.
    """
    retained: np.ndarray
    h: int
    k: int
    spec: SamplerSpec
    batch_index: int
    start: int = 0

    def __len__(self) -> int:
        return int(self.retained.shape[0])

    @property
    def sets(self) -> Tuple[RetentionSet, ...]:
        return tuple(RetentionSet(tuple(row.tolist()), self.h) for row in self.retained)

    def membership(self) -> np.ndarray:
        """(n, h) boolean matrix, True where a position is retained."""
        out = np.zeros((len(self), self.h), dtype=bool)
        if self.k:
            rows = np.repeat(np.arange(len(self)), self.k)
            out[rows, self.retained.ravel()] = True
        return out

    def same_as(self, other: "SampleBatch") -> bool:
        return self.h == other.h and self.k == other.k and np.array_equal(self.retained, other.retained)


def _check_counts(h: int, k: int, n: int) -> None:
    if h < 1:
        raise InvalidArgumentError(f"h must be >= 1, got {h}")
    if not 0 <= k <= h:
        raise InvalidArgumentError(f"k must lie in [0, h={h}], got {k}")
    if n < 0:
        raise InvalidArgumentError(f"n must be >= 0, got {n}")


def _uniform_draws(spec: SamplerSpec, batch: int, start: int, n: int, h: int) -> np.ndarray:
    bitgen = np.random.PCG64(derive_seed(spec.master_seed, batch))
    if start:
        bitgen.advance(start * h)
    return np.random.Generator(bitgen).random((n, h))


def _retain_latest(arrivals: np.ndarray, h: int, k: int) -> np.ndarray:
    masked = h - k
    order = np.argsort(arrivals, axis=1, kind="stable")
    return np.sort(order[:, masked:], axis=1)


def sample_uniform(
    h: int,
    k: int,
    n: int,
    spec: SamplerSpec,
    batch: int = 0,
    start: int = 0,
) -> SampleBatch:
    """
    Draw n retention sets uniformly from all k-subsets of range(h).

    Args:
        h: Text length
        k: Retained positions per set
        n: Number of sets
        spec: Sampler spec (mode must be uniform)
        batch: Batch index selecting the random stream
        start: Index of the first sample within the batch stream

    Returns:
        SampleBatch with samples [start, start + n) of the batch
    """
    _check_counts(h, k, n)
    if spec.mode is not SamplerMode.UNIFORM:
        raise InvalidModeError("sample_uniform requires a uniform sampler spec")
    draws = _uniform_draws(spec, batch, start, n, h)
    retained = _retain_latest(draws, h, k)
    return SampleBatch(retained, h, k, spec, batch, start)


def sample_weighted(
    h: int,
    k: int,
    n: int,
    spec: SamplerSpec,
    batch: int = 0,
    start: int = 0,
) -> SampleBatch:
    """
    Draw n retention sets, masking heavier-weighted positions first.

    Masked positions are drawn sequentially without replacement with
    probability proportional to ``spec.weights``; the complement is returned.
    """
    _check_counts(h, k, n)
    if spec.mode is not SamplerMode.WEIGHTED:
        raise InvalidModeError("sample_weighted requires a weighted sampler spec")
    if spec.weights is None or len(spec.weights) != h:
        got = None if spec.weights is None else len(spec.weights)
        raise InvalidArgumentError(f"weighted sampling needs {h} weights, got {got}")
    draws = _uniform_draws(spec, batch, start, n, h)
    weights = np.asarray(spec.weights, dtype=float)
    # exponential race: arrival time of position j ~ Exp(weights[j])
    arrivals = -np.log1p(-draws) / weights
    retained = _retain_latest(arrivals, h, k)
    return SampleBatch(retained, h, k, spec, batch, start)


def sample(
    h: int,
    k: int,
    n: int,
    spec: SamplerSpec,
    batch: int = 0,
    start: int = 0,
) -> SampleBatch:
    """Dispatch on ``spec.mode``."""
    if spec.mode is SamplerMode.WEIGHTED:
        return sample_weighted(h, k, n, spec, batch, start)
    return sample_uniform(h, k, n, spec, batch, start)
