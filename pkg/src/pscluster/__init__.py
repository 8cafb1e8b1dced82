"""Clustering toolkit: spectral clustering, its parametric approximation,
quality metrics, and benchmark instrumentation."""

from .bench import (
    BenchReport,
    MemoryProbe,
    allocation_guard,
    embed_budget_bytes,
    measure_phase,
    memory_scaling,
    run_psc_bench,
    run_sc_bench,
)
from .dataio import (
    ScalerParams,
    gen_blobs,
    gen_circles,
    load_csv,
    load_idx,
    standardize,
)
from .errors import (
    AllocationBudgetExceeded,
    DataFormatError,
    EigensolverError,
    ModelFormatError,
    TrainingDivergedError,
)
from .graph import (
    Laplacian,
    SpectralEmbedding,
    gaussian_similarity,
    median_heuristic_sigma,
    normalized_laplacian,
    spectral_embedding,
)
from .kmeans import Centroids, ClusterAssignment, assign_nearest, kmeans
from .metrics import (
    QualityScores,
    TrialSummary,
    adjusted_mutual_info,
    adjusted_rand_index,
    cluster_accuracy,
    contingency_table,
    score_clustering,
    trial_summary,
)
from .neural import (
    Mlp,
    MlpConfig,
    TrainHyperparams,
    ae_config,
    encode,
    encoder_part,
    forward,
    gradient,
    init_mlp,
    mse,
    regressor_config,
    train_autoencoder,
    train_mlp,
    train_regressor,
)
from .psc import (
    IncrementalSession,
    PscModel,
    incremental_extend,
    load_model,
    psc_cluster,
    psc_embed,
    psc_train,
    save_model,
    start_session,
)
from .spectral import ScConfig, spectral_cluster

__version__ = "0.1.0"
