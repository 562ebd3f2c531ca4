"""
Engine Classifiers Module

Base classifiers f: the scoring interface, toy oracles, the mask-trained
bag-of-words model and the external-process client.
"""

from .base import (
    ClassScores,
    BaseClassifier,
    CLASSIFIER_REGISTRY,
    argmax_lowest,
    masked_tokens,
    register_classifier,
    get_classifier_class,
    build_classifier,
)

from .toy import (
    ConstantClassifier,
    KeywordClassifier,
    LookupTableClassifier,
    classify_keyword,
)

from .bow import (
    BowModel,
    BowClassifier,
    fit_bow,
    train_bow,
)

from .external import (
    ExternalClassifier,
    ExternalClassifierPool,
    classify_external,
)

__all__ = [
    "ClassScores",
    "BaseClassifier",
    "CLASSIFIER_REGISTRY",
    "argmax_lowest",
    "masked_tokens",
    "register_classifier",
    "get_classifier_class",
    "build_classifier",
    "ConstantClassifier",
    "KeywordClassifier",
    "LookupTableClassifier",
    "classify_keyword",
    "BowModel",
    "BowClassifier",
    "fit_bow",
    "train_bow",
    "ExternalClassifier",
    "ExternalClassifierPool",
    "classify_external",
]
