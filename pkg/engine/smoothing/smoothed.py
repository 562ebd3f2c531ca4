"""
The smoothed classifier g.

g(x) samples masked copies of x, classifies each with the base classifier f
and aggregates them either by majority vote or by the mean of the raw scores.
Ties go to the lowest class id and g never abstains.

Example:
    from engine.classifiers import KeywordClassifier
    from engine.core import Text
    from engine.smoothing import SmoothingConfig, predict

    f = KeywordClassifier({"great": 1}, default=0, class_count=2)
    cfg = SmoothingConfig(rho=0.5, n=1000)
    label, p_hat = predict(Text.from_string("a great film indeed"), f, cfg)
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import entropy

from engine.classifiers.base import BaseClassifier, argmax_lowest
from engine.core import MASK_TOKEN, Text, retained_count
from engine.errors import InvalidArgumentError, InvalidModeError, MaskCertError
from engine.sampling import SamplerMode, SamplerSpec, batch_index, sample

logger = logging.getLogger(__name__)


class EnsembleMode(str, Enum):
    VOTE = "vote"
    LOGIT = "logit"


@dataclass(frozen=True)
class SmoothingConfig:
    """Parameters of the smoothed classifier and of its certification runs."""
    rho: float = 0.9
    n: int = 1000
    n_prime: int = 5000
    alpha: float = 0.05
    ensemble: EnsembleMode = EnsembleMode.VOTE
    sampler: SamplerSpec = field(default_factory=SamplerSpec)
    sentinel: str = MASK_TOKEN

    def __post_init__(self):
        object.__setattr__(self, "ensemble", EnsembleMode(self.ensemble))
        if not 0.0 <= self.rho <= 1.0:
            raise InvalidArgumentError(f"rho must lie in [0, 1], got {self.rho}")
        if self.n < 1:
            raise InvalidArgumentError(f"n must be >= 1, got {self.n}")
        if self.n_prime < self.n:
            raise InvalidArgumentError(f"n_prime ({self.n_prime}) must be >= n ({self.n})")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.sentinel:
            raise InvalidArgumentError("mask sentinel must be a non-empty token")

    @classmethod
    def from_config(cls, config, **overrides) -> "SmoothingConfig":
        """
        Build from a ConfigManager; keyword overrides that are None are ignored.
        """
        sampler = SamplerSpec(
            mode=overrides.pop("sampler_mode", None) or config.get("sampling.mode", "uniform"),
            master_seed=_first(overrides.pop("seed", None), config.get("sampling.seed", 0)),
        )
        values = {
            "rho": config.get("smoothing.rho", 0.9),
            "n": config.get("smoothing.n", 1000),
            "n_prime": config.get("smoothing.n_prime", 5000),
            "alpha": config.get("smoothing.alpha", 0.05),
            "ensemble": config.get("smoothing.ensemble", "vote"),
            "sentinel": config.get("masking.sentinel", MASK_TOKEN),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(
            rho=float(values["rho"]),
            n=int(values["n"]),
            n_prime=int(values["n_prime"]),
            alpha=float(values["alpha"]),
            ensemble=values["ensemble"],
            sampler=sampler,
            sentinel=str(values["sentinel"]),
        )

    def with_sampler(self, sampler: SamplerSpec) -> "SmoothingConfig":
        return replace(self, sampler=sampler)

    def retained_for(self, h: int) -> int:
        return retained_count(h, self.rho)


def _first(*values):
    for v in values:
        if v is not None:
            return v
    return None


@dataclass(frozen=True)
class ClassDistribution:
    """Aggregate of n base-classifier outputs on masked copies of one text."""
    counts: Tuple[int, ...]
    mean_scores: Tuple[float, ...]
    n: int

    def __post_init__(self):
        if sum(self.counts) != self.n:
            raise InvalidArgumentError(f"vote counts sum to {sum(self.counts)}, expected {self.n}")
        if not all(math.isfinite(s) for s in self.mean_scores):
            raise InvalidArgumentError("mean scores must be finite")

    @property
    def class_count(self) -> int:
        return len(self.counts)

    def fractions(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    def fraction(self, label: int) -> float:
        return self.counts[label] / self.n


class Prediction(NamedTuple):
    label: int
    p_hat: float


def text_batch(x: Text, purpose: str) -> int:
    """Batch index of a text's random stream for one purpose ("predict", "certify", ...)."""
    return batch_index(purpose, *x.tokens)


# ─────────────────────────────────────────────
#  Sampling the base classifier
# ─────────────────────────────────────────────

def _chunks(n: int, workers: int) -> List[Tuple[int, int]]:
    workers = max(1, min(workers, n))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _score_chunk(x: Text, f: BaseClassifier, cfg: SmoothingConfig, k: int, batch: int, start: int, end: int):
    drawn = sample(len(x), k, end - start, cfg.sampler, batch=batch, start=start)
    try:
        scores = f.classify_batch(x, drawn.retained, cfg.sentinel)
    except MaskCertError as e:
        e.sample_index = start + (e.sample_index or 0)
        raise
    return drawn.retained, scores


def sample_scores(
    x: Text,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    n_draws: int,
    batch: int = 0,
    certifiable: bool = False,
    workers: int = 1,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw n_draws retention sets and score every masked copy.

    Returns:
        (retained, scores): an (n, k) position matrix and an (n, classes)
        score matrix. Both are identical for any ``workers``.
    """
    x.check_maskable(cfg.sentinel)
    if n_draws < 1:
        raise InvalidArgumentError(f"n_draws must be >= 1, got {n_draws}")
    if certifiable and cfg.sampler.mode is not SamplerMode.UNIFORM:
        raise InvalidModeError("weighted masking voids the certificate; use the uniform sampler")
    k = cfg.retained_for(len(x))
    spans = _chunks(n_draws, workers)
    if len(spans) == 1:
        parts = [_score_chunk(x, f, cfg, k, batch, 0, n_draws)]
    else:
        parts = Parallel(n_jobs=len(spans), prefer="threads")(
            delayed(_score_chunk)(x, f, cfg, k, batch, a, b) for a, b in spans
        )
    retained = np.concatenate([p[0] for p in parts], axis=0)
    scores = np.concatenate([np.asarray(p[1], dtype=float) for p in parts], axis=0)
    if scores.shape != (n_draws, f.class_count):
        raise InvalidArgumentError(f"classifier returned shape {scores.shape}, expected {(n_draws, f.class_count)}")
    return retained, scores


def aggregate(scores: np.ndarray) -> ClassDistribution:
    """Tally votes and average scores of an (n, classes) score matrix."""
    n, classes = scores.shape
    if not np.all(np.isfinite(scores)):
        bad = int(np.argwhere(~np.isfinite(scores))[0][0])
        raise InvalidArgumentError("base classifier returned non-finite scores", sample_index=bad)
    votes = np.argmax(scores, axis=1)
    counts = np.bincount(votes, minlength=classes)
    # fsum makes the mean independent of how rows were split across workers
    means = tuple(math.fsum(scores[:, c]) / n for c in range(classes))
    return ClassDistribution(tuple(int(c) for c in counts), means, n)


def classifier_g(
    x: Text,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    n_draws: int,
    batch: Optional[int] = None,
    certifiable: bool = False,
    workers: int = 1,
) -> ClassDistribution:
    """
    Distribution of f's outputs over n_draws random masked copies of x.

    Args:
        x: Text to classify
        f: Base classifier
        cfg: Smoothing configuration (rho, sampler, sentinel)
        n_draws: Number of masked copies
        batch: Random stream index (default: derived from the text for prediction)
        certifiable: Reject non-uniform samplers
        workers: Threads scoring chunks of the batch

    Raises:
        InvalidModeError: certifiable=True with a weighted sampler
        TransportError: The classifier failed; ``sample_index`` names the copy
    """
    if batch is None:
        batch = text_batch(x, "predict")
    _, scores = sample_scores(x, f, cfg, n_draws, batch, certifiable, workers)
    dist = aggregate(scores)
    logger.debug("classifier_g h=%d n=%d counts=%s", len(x), n_draws, dist.counts)
    return dist


def decide(dist: ClassDistribution, ensemble: EnsembleMode = EnsembleMode.VOTE) -> Prediction:
    """Argmax of votes or of mean scores; p_hat is always the winner's vote fraction."""
    if EnsembleMode(ensemble) is EnsembleMode.LOGIT:
        label = argmax_lowest(dist.mean_scores)
    else:
        label = argmax_lowest(dist.counts)
    return Prediction(label, dist.fraction(label))


def predict(
    x: Text,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    batch: Optional[int] = None,
    workers: int = 1,
) -> Prediction:
    """Smoothed prediction from cfg.n masked copies."""
    return decide(classifier_g(x, f, cfg, cfg.n, batch=batch, workers=workers), cfg.ensemble)


def distribution_entropy(dist: ClassDistribution) -> float:
    """Shannon entropy (nats) of the vote fractions."""
    return float(entropy(dist.fractions()))


class SmoothedClassifier:
    """
    g bound to a base classifier and a configuration.

    Used wherever a prediction function is needed (pipeline, attack victims).
    """

    def __init__(self, base: BaseClassifier, cfg: SmoothingConfig, workers: int = 1):
        self.base = base
        self.cfg = cfg
        self.workers = workers

    @property
    def class_count(self) -> int:
        return self.base.class_count

    def distribution(self, x: Text, n: Optional[int] = None, purpose: str = "predict") -> ClassDistribution:
        return classifier_g(x, self.base, self.cfg, n or self.cfg.n, batch=text_batch(x, purpose), workers=self.workers)

    def predict(self, x: Text, n: Optional[int] = None) -> Prediction:
        return decide(self.distribution(x, n), self.cfg.ensemble)

    def scores(self, x: Text, n: Optional[int] = None) -> np.ndarray:
        """Per-class scores used by score-based attacks: vote fractions or mean scores."""
        dist = self.distribution(x, n)
        if self.cfg.ensemble is EnsembleMode.LOGIT:
            return np.asarray(dist.mean_scores, dtype=float)
        return dist.fractions()

    def __repr__(self) -> str:
        return f"<SmoothedClassifier base={self.base!r} rho={self.cfg.rho} ensemble={self.cfg.ensemble.value}>"
