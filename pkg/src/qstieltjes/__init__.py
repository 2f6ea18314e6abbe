"""Arbitrary-precision q-Hurwitz zeta values, q-Stieltjes constants, identity checks
and integer-relation probes."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ArgumentError,
    DivergentSeriesError,
    DomainError,
    EvaluationError,
    InsufficientPrecisionError,
    PrecisionFloorError,
    QZetaError,
)
from .numerics import BoundedValue, PrecisionBudget  # noqa: F401
from .qzeta import LaurentData, QPoint, extract_laurent, gamma0, gamma1, zeta_q  # noqa: F401
