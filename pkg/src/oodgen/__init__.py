"""Out-of-distribution sample generation and evaluation.

The package turns an in-distribution point set into out-of-distribution
samples by three strategies (hyperspheric offset, and hard / soft
Brownian offset walks), and ships the full desk-scale apparatus to judge
them: synthetic benchmarks, a linear representation stage, dynamic time
warping + Wasserstein set distances, and a small from-scratch detector
network. Every random draw is addressed by an explicit (seed, stream)
pair, so all outputs, including rendered figures, reproduce bitwise.
"""

__version__ = "0.1.0"

from .errors import (
    GenerationError,
    ManifestError,
    ParseError,
    TrainingError,
    ValidationError,
)
from .geometry import RandomStream, gho_offset, sample_unit_sphere
from .neighbors import NeighborIndex, build_index, min_distance_brute
from .sampling import (
    GhoConfig,
    SboConfig,
    gho_generate,
    hbo_generate,
    rho,
    sbo_generate,
)
from .synth import (
    SineConfig,
    TimeSeriesSet,
    gen_gaussian,
    gen_moons,
    gen_sine_id,
    gen_sine_o3d,
)
from .features import PcaModel, pca_decode, pca_encode, pca_fit
from .metrics import (
    CostMatrix,
    DistanceReport,
    auroc,
    dtw_distance,
    f1_hat,
    f1_score,
    normalized_distance_report,
    pairwise_cost,
    roc_points,
    wasserstein_assignment,
)
from .detector import (
    DetectorModel,
    TrainConfig,
    gradient_check,
    init_model,
    predict,
    train_detector,
)

__all__ = [
    "__version__",
    "GenerationError",
    "ManifestError",
    "ParseError",
    "TrainingError",
    "ValidationError",
    "RandomStream",
    "gho_offset",
    "sample_unit_sphere",
    "NeighborIndex",
    "build_index",
    "min_distance_brute",
    "GhoConfig",
    "SboConfig",
    "gho_generate",
    "hbo_generate",
    "rho",
    "sbo_generate",
    "SineConfig",
    "TimeSeriesSet",
    "gen_gaussian",
    "gen_moons",
    "gen_sine_id",
    "gen_sine_o3d",
    "PcaModel",
    "pca_decode",
    "pca_encode",
    "pca_fit",
    "CostMatrix",
    "DistanceReport",
    "auroc",
    "dtw_distance",
    "f1_hat",
    "f1_score",
    "normalized_distance_report",
    "pairwise_cost",
    "roc_points",
    "wasserstein_assignment",
    "DetectorModel",
    "TrainConfig",
    "gradient_check",
    "init_model",
    "predict",
    "train_detector",
]
