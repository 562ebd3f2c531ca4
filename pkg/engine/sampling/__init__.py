"""
Engine Sampling Module

Reproducible retention-set samplers (uniform and weighted) and the masking
weight providers used by weighted mode.
"""

from .sampler import (
    SamplerMode,
    SamplerSpec,
    SampleBatch,
    derive_seed,
    batch_index,
    sample,
    sample_uniform,
    sample_weighted,
)

from .weights import (
    WeightProvider,
    FlatWeightProvider,
    FileWeightProvider,
    InverseFrequencyWeightProvider,
    load_weight_file,
)

__all__ = [
    "SamplerMode",
    "SamplerSpec",
    "SampleBatch",
    "derive_seed",
    "batch_index",
    "sample",
    "sample_uniform",
    "sample_weighted",
    "WeightProvider",
    "FlatWeightProvider",
    "FileWeightProvider",
    "InverseFrequencyWeightProvider",
    "load_weight_file",
]
