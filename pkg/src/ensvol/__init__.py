"""Ensemble volumes: entropy-derived volumes of classical, quantum and
Gaussian ensembles, their axioms, and the information bounds built on them."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    ConvergenceError,
    EnsvolError,
    NumericalError,
    UnsupportedOperationError,
    ValidationError,
)
from .ensembles import (  # noqa: E402
    ClassicalDistribution,
    DensityOperator,
    GaussianEnsemble,
    SignalEnsemble,
    mix,
    mixture,
    product,
    reduce,
    transform,
)
from .volume import (  # noqa: E402
    DEFAULT_CONTEXT,
    EntropyValue,
    VolumeContext,
    entropy,
    log_volume,
    renyi_entropy,
    renyi_volume,
    volume,
)

__all__ = [
    "__version__",
    "EnsvolError", "ValidationError", "UnsupportedOperationError", "NumericalError", "ConvergenceError",
    "ClassicalDistribution", "DensityOperator", "GaussianEnsemble", "SignalEnsemble",
    "mix", "mixture", "product", "reduce", "transform",
    "DEFAULT_CONTEXT", "EntropyValue", "VolumeContext",
    "entropy", "log_volume", "renyi_entropy", "renyi_volume", "volume",
]
