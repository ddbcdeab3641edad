"""Geometry, Voronoi diagrams, quantization and clustering for metrics induced
by separable Bregman generators via their monotone isometric embeddings."""

from .clustering import (
    ClusteringResult,
    GaussianMixtureModel,
    em_gmm,
    hac,
    hcpc,
    kmeans,
)
from .dataset import PointSet
from .errors import DomainError, NumericalError
from .evaluation import (
    ClusterSpec,
    EvaluationReport,
    SyntheticSpec,
    accuracy,
    adjusted_rand_index,
    default_synthetic_spec,
    generate_dataset,
    normalized_mutual_information,
    run_experiment,
)
from .generators import (
    GENERATOR_NAMES,
    ConjugatePieces,
    Generator,
    conjugate,
    embed,
    make_generator,
    unembed,
)
from .geometry import (
    Ball,
    GeodesicSample,
    ball_boundary_polyline,
    ball_contains,
    bregman_divergence,
    centroid,
    distance,
    dual_distance,
    geodesic,
    squared_distance,
)
from .quantization import (
    Codebook,
    QuantizerReport,
    distortion,
    empty_cell_repair,
    lloyd,
    quantize,
)
from .voronoi import (
    FLAVORS,
    ExactCell,
    SiteSet,
    VoronoiRaster,
    classify,
    classify_points,
    exact_riemann_cells,
    rasterize,
)

__version__ = "0.1.0"
