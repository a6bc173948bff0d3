"""Document dating by kernel smoothing over shingle-resemblance distances.

Thin wrapper around the compiled ``_core`` extension; everything public is
re-exported here.
"""

from ._core import (  # noqa: F401
    BandwidthGrid,
    CandidatePool,
    ConvergenceError,
    Corpus,
    DistanceStore,
    DistanceVector,
    Document,
    Estimate,
    EstimatorKind,
    EvalReport,
    EvalRow,
    ExperimentConfig,
    ExperimentResult,
    HeatmapImage,
    HeatmapParams,
    InvalidInputError,
    Kernel,
    KernelConfig,
    Neighbor,
    RobustLoss,
    RobustSpec,
    SetSummary,
    ShingleSet,
    SplitSpec,
    SurfacePoint,
    SyntheticSpec,
    TuneResult,
    __version__,
    candidate_pool,
    cv_loss,
    distance_vector,
    evaluate,
    exact_resemblance_distance,
    extract_shingles,
    generate_synthetic,
    impute_date,
    kernel_weight,
    load_manifest,
    nearest_m,
    normalize_text,
    parse_manifest,
    render_heatmap,
    resemblance_distance,
    robust_impute,
    run_experiment,
    scatter_tsv,
    split_corpus,
    tune,
)

__all__ = [name for name in dir() if not name.startswith("_")]
