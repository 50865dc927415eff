"""dynell: elliptic theta functions, dynamical R-matrices, and a numerical
verification harness for the identities they satisfy (Yang-Baxter, RLL,
gauge equivalence, quantum determinant, semiclassical limit).

The theta kernels run on a compiled Cython core when available, with a
pure-Python fallback selected at import (see dynell.theta.BACKEND).
"""

from ._backend import BACKEND
from .exceptions import (
    CapabilityError,
    ConditioningError,
    DomainError,
    DynellError,
    ParameterError,
    PrecisionError,
    SingularityError,
)
from .params import ModularParams, ThetaConfig, default_params
from .report import Report, TruncationOrders, VerificationConfig, VerificationRecord
from .series import Jet, LaurentSeries
from .rmatrix import TensorOperator
from .verify import run_suite

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapabilityError",
    "ConditioningError",
    "DomainError",
    "DynellError",
    "Jet",
    "LaurentSeries",
    "ModularParams",
    "ParameterError",
    "PrecisionError",
    "Report",
    "SingularityError",
    "TensorOperator",
    "ThetaConfig",
    "TruncationOrders",
    "VerificationConfig",
    "VerificationRecord",
    "default_params",
    "run_suite",
    "__version__",
]
