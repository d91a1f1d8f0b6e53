"""lpkit: Littlewood-Paley analysis with non-smooth kernels on periodic grids."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapabilityError,
    ConfigurationError,
    DomainError,
    EvaluationError,
    LPKitError,
    PreconditionError,
    UsageError,
)
from .grid import GridSpec, SampledField, spatial_field, spectral_field  # noqa: E402
from .kernels import KernelSpec, make_kernel  # noqa: E402
from .lp_analysis import LPFamily, build_calderon_pair, build_lp_family  # noqa: E402
from .norms import NormParams  # noqa: E402

__all__ = [
    "__version__",
    "CapabilityError",
    "ConfigurationError",
    "DomainError",
    "EvaluationError",
    "LPKitError",
    "PreconditionError",
    "UsageError",
    "GridSpec",
    "SampledField",
    "spatial_field",
    "spectral_field",
    "KernelSpec",
    "make_kernel",
    "LPFamily",
    "build_lp_family",
    "build_calderon_pair",
    "NormParams",
]
