"""Period estimation and periodic-component extraction for object time series.

Observations live in a metric space (sphere, graph Laplacians, 1-D
distributions under the 2-Wasserstein metric, or Euclidean space). For each
candidate period the series is split into phases, each phase is summarized by
its Fréchet mean, and the residual sum of squares is penalized by the number
of phases. An information criterion picks the penalty.

>>> import numpy as np, objper
>>> pts = np.tile([[0.0], [1.0], [3.0]], (20, 1))
>>> series = objper.ObjectSeries(objper.EuclideanSpace(1), pts)
>>> objper.select(objper.scan(series)).selected_theta
3
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .component import (
    PeriodicComponent,
    component_max_distance,
    component_mean_distance,
    component_mse,
    extract_component,
    phase_dispersion,
    true_component_dirichlet,
)
from .errors import (
    ConvergenceError,
    DegenerateConfigurationError,
    DegenerateWeightsError,
    DimensionError,
    InputError,
    InvalidAdjacencyError,
    InvalidCompositionError,
    InvalidPointError,
    InvalidRegularizerError,
    NumericalError,
    ObjperError,
    ParseError,
    ValidationError,
    ZeroRSSError,
)
from .formats import parse_series, write_series
from .scan import (
    ObjectSeries,
    PhaseAssignment,
    ScanResult,
    default_theta_max,
    estimate_period,
    penalized_loss,
    phase_barycenters,
    phase_of,
    rss,
    scan,
)
from .simulation import (
    DirichletConfig,
    DistributionConfig,
    MonteCarloReport,
    NetworkConfig,
    generate_dirichlet,
    generate_distributions,
    generate_networks,
    l_schedule,
    run_monte_carlo,
)
from .spaces import (
    EuclideanSpace,
    LaplacianSpace,
    MetricSpace,
    SphereSpace,
    Wasserstein1DSpace,
    distance,
    frechet_mean,
    laplacian_from_adjacency,
    MultimodalMeanWarning,
    make_space,
    sqrt_compositional_transform,
)
from .tuning import Criterion, ICReport, LambdaPath, g_default, information_criterion, lambda_path, select

__all__ = [
    "__version__",
    "BACKEND",
    "ConvergenceError",
    "Criterion",
    "DegenerateConfigurationError",
    "DegenerateWeightsError",
    "DimensionError",
    "DirichletConfig",
    "DistributionConfig",
    "EuclideanSpace",
    "ICReport",
    "InputError",
    "InvalidAdjacencyError",
    "InvalidCompositionError",
    "InvalidPointError",
    "InvalidRegularizerError",
    "LambdaPath",
    "LaplacianSpace",
    "MetricSpace",
    "MonteCarloReport",
    "MultimodalMeanWarning",
    "NetworkConfig",
    "NumericalError",
    "ObjectSeries",
    "ObjperError",
    "ParseError",
    "PeriodicComponent",
    "PhaseAssignment",
    "ScanResult",
    "SphereSpace",
    "ValidationError",
    "Wasserstein1DSpace",
    "ZeroRSSError",
    "component_max_distance",
    "component_mean_distance",
    "component_mse",
    "default_theta_max",
    "distance",
    "estimate_period",
    "extract_component",
    "frechet_mean",
    "g_default",
    "generate_dirichlet",
    "generate_distributions",
    "generate_networks",
    "information_criterion",
    "l_schedule",
    "lambda_path",
    "laplacian_from_adjacency",
    "make_space",
    "parse_series",
    "penalized_loss",
    "phase_barycenters",
    "phase_dispersion",
    "phase_of",
    "rss",
    "run_monte_carlo",
    "scan",
    "select",
    "sqrt_compositional_transform",
    "true_component_dirichlet",
    "write_series",
]
