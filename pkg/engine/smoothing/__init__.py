"""
Engine Smoothing Module

The smoothed classifier g built from random word masking.
"""

from .smoothed import (
    EnsembleMode,
    SmoothingConfig,
    ClassDistribution,
    Prediction,
    SmoothedClassifier,
    text_batch,
    sample_scores,
    aggregate,
    classifier_g,
    decide,
    predict,
    distribution_entropy,
)

__all__ = [
    "EnsembleMode",
    "SmoothingConfig",
    "ClassDistribution",
    "Prediction",
    "SmoothedClassifier",
    "text_batch",
    "sample_scores",
    "aggregate",
    "classifier_g",
    "decide",
    "predict",
    "distribution_entropy",
]
