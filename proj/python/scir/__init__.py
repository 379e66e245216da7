"""Scattering and co-occurrence features for iris identification."""

from ._scir import (
    EvalReport,
    FeatureExtractor,
    Gallery,
    MatchResult,
    PcaModel,
    PipelineConfig,
    ScirError,
    block_texture_features,
    cooccurrence,
    evaluate,
    fit_pca,
    generate_synthetic,
    haralick14,
    load_image,
    path_count,
    quantize,
    run_evaluate,
    run_extract,
    run_train,
    scattering_features,
    synthesize_image,
)

__all__ = [
    "EvalReport",
    "FeatureExtractor",
    "Gallery",
    "MatchResult",
    "PcaModel",
    "PipelineConfig",
    "ScirError",
    "block_texture_features",
    "cooccurrence",
    "evaluate",
    "fit_pca",
    "generate_synthetic",
    "haralick14",
    "load_image",
    "path_count",
    "quantize",
    "run_evaluate",
    "run_extract",
    "run_train",
    "scattering_features",
    "synthesize_image",
]
