"""
Engine Core Module

Token sequences, the mask operation, index-set algebra and the retention-count
rule shared by every other module.
"""

from .text import (
    MASK_TOKEN,
    Text,
    MaskedText,
    RetentionSet,
    DiffSet,
    mask,
    diff,
    round_half_away,
    retained_count,
    masked_count,
)

__all__ = [
    "MASK_TOKEN",
    "Text",
    "MaskedText",
    "RetentionSet",
    "DiffSet",
    "mask",
    "diff",
    "round_half_away",
    "retained_count",
    "masked_count",
]
