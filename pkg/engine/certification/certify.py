"""
Sampling-based certification of the smoothed classifier.

certify() follows the usual two-phase recipe: predict with n copies, then
draw n' fresh copies, lower-bound p_y with Clopper-Pearson and search for the
largest radius d with p_lower - beta * delta(h, k, d) > 0.5. beta is either
approximated by the vote fraction of y, estimated by Monte Carlo for each
candidate radius, computed exactly by enumeration, or set to its upper
bound 1.

Exact radii are exact and conservative radii hold with confidence 1 - alpha. The
vote fraction can fall below the true beta, so approx and monte_carlo
radii are estimates and may exceed the true certified radius.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from engine.classifiers.base import BaseClassifier
from engine.core import Text
from engine.errors import InvalidArgumentError, InvalidModeError
from engine.sampling import SamplerMode, batch_index, sample_uniform
from engine.smoothing import SmoothingConfig, classifier_g, predict, sample_scores, text_batch
from .bounds import clopper_pearson_lower, js_divergence
from .certificate import Certificate, certified_radius
from .exact import DEFAULT_ENUM_CAP, exact_certify

logger = logging.getLogger(__name__)


class BetaMode(str, Enum):
    APPROX = "approx"
    MONTE_CARLO = "monte_carlo"
    CONSERVATIVE = "conservative"
    EXACT = "exact"


@dataclass(frozen=True)
class BetaEstimatorConfig:
    """Outer perturbation-set draws n_r, inner retention-set draws n_k, perturbation size r."""
    n_r: int = 200
    n_k: int = 10000
    r: int = 1

    def __post_init__(self):
        if self.n_r < 1 or self.n_k < 1:
            raise InvalidArgumentError(f"n_r and n_k must be >= 1, got ({self.n_r}, {self.n_k})")
        if self.r < 1:
            raise InvalidArgumentError(f"r must be >= 1, got {self.r}")

    def with_r(self, r: int) -> "BetaEstimatorConfig":
        return BetaEstimatorConfig(self.n_r, self.n_k, r)


class BetaEstimate(NamedTuple):
    """Conditional class distribution and, on the same inner batch, the plain one."""
    conditional: np.ndarray
    plain: np.ndarray
    empty_draws: int


def _require_uniform(cfg: SmoothingConfig) -> None:
    if cfg.sampler.mode is not SamplerMode.UNIFORM:
        raise InvalidModeError("weighted masking voids the certificate; use the uniform sampler")


def estimate_beta_distribution(
    x: Text,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    est: BetaEstimatorConfig,
    batch: Optional[int] = None,
    workers: int = 1,
) -> BetaEstimate:
    """
    Monte Carlo estimate of the class distribution of f given that the
    retention set hits a random set of r positions.

    One inner batch of n_k retention sets is scored once; each of the n_r
    outer perturbation sets keeps the inner copies that hit it and
    contributes their class fractions. Outer draws with no surviving copy
    contribute zeros.
    """
    _require_uniform(cfg)
    h = len(x)
    if not 1 <= est.r <= h:
        raise InvalidArgumentError(f"r must lie in [1, {h}], got {est.r}")
    batch = text_batch(x, "beta") if batch is None else batch
    retained, scores = sample_scores(x, f, cfg, est.n_k, batch=batch, certifiable=True, workers=workers)
    votes = np.argmax(scores, axis=1)
    keep = np.zeros((len(retained), h), dtype=bool)
    if retained.shape[1]:
        keep[np.repeat(np.arange(len(retained)), retained.shape[1]), retained.ravel()] = True

    outer = sample_uniform(h, est.r, est.n_r, cfg.sampler, batch=batch_index("beta-outer", batch, est.r))
    classes = f.class_count
    total = np.zeros(classes, dtype=float)
    empty = 0
    for positions in outer.retained:
        hits = keep[:, positions].any(axis=1)
        survivors = int(hits.sum())
        if survivors == 0:
            empty += 1
            continue
        total += np.bincount(votes[hits], minlength=classes) / survivors
    if empty:
        logger.info("beta estimate: %d of %d perturbation sets had no overlapping copy", empty, est.n_r)
    plain = np.bincount(votes, minlength=classes) / len(votes)
    return BetaEstimate(total / est.n_r, plain, empty)


def estimate_beta(
    x: Text,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    est: BetaEstimatorConfig,
    label: int,
    batch: Optional[int] = None,
    workers: int = 1,
) -> float:
    """Monte Carlo estimate of beta for one class."""
    return float(estimate_beta_distribution(x, f, cfg, est, batch, workers).conditional[label])


def certify(
    x: Text,
    y: int,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    beta_mode: BetaMode = BetaMode.APPROX,
    est: Optional[BetaEstimatorConfig] = None,
    enum_cap: int = DEFAULT_ENUM_CAP,
    example_id: Optional[str] = None,
    workers: int = 1,
) -> Certificate:
    """
    Certify g's prediction on x against word substitutions.

    Args:
        x: Text to certify
        y: True label
        f: Base classifier
        cfg: Smoothing configuration (uniform sampler required)
        beta_mode: approx (vote fraction), monte_carlo, exact or conservative (beta = 1)
        est: Estimator sizes for monte_carlo mode
        enum_cap: Enumeration cap for exact mode
        example_id: Copied into the certificate
        workers: Threads scoring each batch

    Returns:
        Certificate; label None when g does not return y

    Raises:
        InvalidModeError: Weighted sampler
    """
    _require_uniform(cfg)
    beta_mode = BetaMode(beta_mode)
    h = len(x)
    k = cfg.retained_for(h)
    if beta_mode is BetaMode.EXACT:
        return exact_certify(x, y, f, k, cfg.sentinel, enum_cap, example_id)

    guess = predict(x, f, cfg, batch=text_batch(x, "predict"), workers=workers)
    if guess.label != y:
        logger.debug("%s: predicted %d, expected %d", example_id, guess.label, y)
        return Certificate.abstain(h, example_id)

    dist = classifier_g(x, f, cfg, cfg.n_prime, batch=text_batch(x, "certify"), certifiable=True, workers=workers)
    n_y = dist.counts[y]
    p_lower = clopper_pearson_lower(n_y, cfg.n_prime, cfg.alpha)
    beta_hat = 1.0 if beta_mode is BetaMode.CONSERVATIVE else n_y / cfg.n_prime

    if beta_mode is BetaMode.MONTE_CARLO:
        est = est or BetaEstimatorConfig()
        betas = {0: beta_hat}

        def beta_at(d: int) -> float:
            if d not in betas:
                betas[d] = estimate_beta(x, f, cfg, est.with_r(d), y, workers=workers)
            return betas[d]

        radius = certified_radius(h, k, p_lower, beta_at)
        if radius:
            beta_hat = betas[radius]
    else:
        radius = certified_radius(h, k, p_lower, beta_hat)

    return Certificate(y, p_lower, beta_hat, 0 if radius is None else radius, h, example_id)


class BetaSweepRow(NamedTuple):
    r: int
    beta_hat: float
    p_hat: float
    jsd: float


def beta_sweep(
    x: Text,
    f: BaseClassifier,
    cfg: SmoothingConfig,
    label: int,
    radii: Sequence[int],
    est: Optional[BetaEstimatorConfig] = None,
    workers: int = 1,
) -> List[BetaSweepRow]:
    """
    beta estimates against the plain vote fraction for several perturbation sizes.

    The divergence compares the conditional class distribution (renormalized
    over outer draws that had survivors) with the plain one on the same batch.
    """
    est = est or BetaEstimatorConfig()
    rows: List[BetaSweepRow] = []
    for r in radii:
        result = estimate_beta_distribution(x, f, cfg, est.with_r(r), workers=workers)
        mass = result.conditional.sum()
        conditional = result.conditional / mass if mass > 0 else result.plain
        rows.append(BetaSweepRow(
            r=int(r),
            beta_hat=float(result.conditional[label]),
            p_hat=float(result.plain[label]),
            jsd=js_divergence(conditional, result.plain),
        ))
        logger.debug("beta sweep r=%d beta=%.6f p=%.6f", r, rows[-1].beta_hat, rows[-1].p_hat)
    return rows
