"""Volume moments of the zero cell of Poisson hyperplane tessellations
in d-dimensional hyperbolic space.

The package computes the first and second moments of the zero-cell volume
through three independent routes (a spectral integral over the principal
series, a residue closed form in odd dimensions, and direct three-fold
quadrature of the two-point chord formula), provides the associated
critical and Euclidean-limit constants, and cross-checks everything
against Monte Carlo simulation of the tessellation restricted to a ball.
"""

from .errors import ConvergenceError, DomainError
from .hypgeo import (
    HPoint,
    Hyperplane,
    ModelParams,
    ball_volume,
    chord_distance,
    critical_intensity,
    segment_constant,
    sphere_surface,
    triangle_hitting_measure,
    two_point_probability,
)
from .moments import (
    MomentReport,
    critical_divergence_constant,
    euclidean_limit_constant,
    euclidean_second_moment,
    first_moment,
    second_moment_direct,
    second_moment_residue,
    second_moment_spectral,
    spherical_transform_closed,
    spherical_transform_numeric,
    tail_horizon,
    truncated_second_moment_critical,
)
from .mcsim import (
    MCEstimate,
    estimate_truncated_moments,
    hyperplane_intensity,
    membership,
    sample_process,
    segment_hitting_rate,
    two_point_is_estimator,
)
from .specfun import log_gamma, spherical_function

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "HPoint",
    "Hyperplane",
    "MCEstimate",
    "ModelParams",
    "MomentReport",
    "ball_volume",
    "chord_distance",
    "critical_divergence_constant",
    "critical_intensity",
    "estimate_truncated_moments",
    "euclidean_limit_constant",
    "euclidean_second_moment",
    "first_moment",
    "hyperplane_intensity",
    "log_gamma",
    "membership",
    "sample_process",
    "second_moment_direct",
    "second_moment_residue",
    "second_moment_spectral",
    "segment_constant",
    "segment_hitting_rate",
    "sphere_surface",
    "spherical_function",
    "spherical_transform_closed",
    "spherical_transform_numeric",
    "tail_horizon",
    "triangle_hitting_measure",
    "truncated_second_moment_critical",
    "two_point_is_estimator",
    "two_point_probability",
    "__version__",
]
