"""
Engine Certification Module

Certified robustness of the smoothed classifier against word substitutions:
overlap probabilities, confidence bounds, the certify loop, beta estimation,
exhaustive oracles and the risk probability.
"""

from .bounds import (
    log_comb,
    comb_ratio,
    delta,
    beta_quantile,
    clopper_pearson_lower,
    RiskParams,
    risk_probability,
    risk_probability_for_dataset,
    js_divergence,
)

from .certificate import (
    Certificate,
    certified_radius,
)

from .exact import (
    DEFAULT_ENUM_CAP,
    ExactOracle,
    exact_pc,
    exact_beta,
    exact_certify,
    exact_certify_check,
    find_counterexample,
    neighbors,
    neighborhood_size,
    bound_slack,
)

from .certify import (
    BetaMode,
    BetaEstimatorConfig,
    BetaEstimate,
    BetaSweepRow,
    certify,
    estimate_beta,
    estimate_beta_distribution,
    beta_sweep,
)

__all__ = [
    "log_comb",
    "comb_ratio",
    "delta",
    "beta_quantile",
    "clopper_pearson_lower",
    "RiskParams",
    "risk_probability",
    "risk_probability_for_dataset",
    "js_divergence",
    "Certificate",
    "certified_radius",
    "DEFAULT_ENUM_CAP",
    "ExactOracle",
    "exact_pc",
    "exact_beta",
    "exact_certify",
    "exact_certify_check",
    "find_counterexample",
    "neighbors",
    "neighborhood_size",
    "bound_slack",
    "BetaMode",
    "BetaEstimatorConfig",
    "BetaEstimate",
    "BetaSweepRow",
    "certify",
    "estimate_beta",
    "estimate_beta_distribution",
    "beta_sweep",
]
