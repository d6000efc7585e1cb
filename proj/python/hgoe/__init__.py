from ._hgoe import (  # noqa: F401
    DataError,
    NumericError,
    auc,
    boundary_aware_loss,
    diffusion_features,
    estimate_graphon,
    kmeans_labels,
    mahalanobis_score,
    mixup_graphons,
    run_sbm_benchmark,
    sample_from_graphon,
    summary_embedding,
    tau_from_scores,
)

__all__ = [
    "DataError",
    "NumericError",
    "auc",
    "boundary_aware_loss",
    "diffusion_features",
    "estimate_graphon",
    "kmeans_labels",
    "mahalanobis_score",
    "mixup_graphons",
    "run_sbm_benchmark",
    "sample_from_graphon",
    "summary_embedding",
    "tau_from_scores",
]
