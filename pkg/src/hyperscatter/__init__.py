"""Helmholtz scattering on the Poincare ball model of hyperbolic space."""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    ConditioningError,
    DomainError,
    HyperscatterError,
    PoleError,
    UnsupportedDimensionError,
)
from .geometry import (  # noqa: E402
    BallPoint,
    PolarPoint,
    SphereGrid,
    geodesic_radius,
    mobius,
    pairwise_distance,
    polar_grid,
    sphere_grid,
)
from .kernels import Branch, helmholtz_green, resolvent_kernel  # noqa: E402
from .specfun import SpectralParam  # noqa: E402

__all__ = [
    "__version__",
    "AccuracyError",
    "BallPoint",
    "Branch",
    "ConditioningError",
    "DomainError",
    "HyperscatterError",
    "PoleError",
    "PolarPoint",
    "SpectralParam",
    "SphereGrid",
    "UnsupportedDimensionError",
    "geodesic_radius",
    "helmholtz_green",
    "mobius",
    "pairwise_distance",
    "polar_grid",
    "resolvent_kernel",
    "sphere_grid",
]
