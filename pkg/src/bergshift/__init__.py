"""Weighted backward shifts on weighted Bergman spaces.

Moment and norm evaluation, criterion sequences with verdicts, and
constructive orbit simulation on truncated polynomial spaces.
"""

__version__ = "0.1.0"

from .errors import BergshiftError, ParameterError, QuadratureError, UnsupportedError, ZeroWeightError
from .weights import WeightFunction, WeightSequence, log_product, parse_weight_function, parse_weight_sequence
from .spaces import BergmanSpace, PolyVector, poly_norm
from .moments import MomentTable, asymptotic_report, kernel_integral, kernel_regimes
from .dynamics import ClassificationReport, CriterionSequence, classify
from .simulator import ShiftOperator, gethner_shapiro_witness, orbit_trace, periodic_vector

__all__ = [
    "__version__",
    "BergshiftError", "ParameterError", "QuadratureError", "UnsupportedError", "ZeroWeightError",
    "WeightFunction", "WeightSequence", "log_product", "parse_weight_function", "parse_weight_sequence",
    "BergmanSpace", "PolyVector", "poly_norm",
    "MomentTable", "asymptotic_report", "kernel_integral", "kernel_regimes",
    "ClassificationReport", "CriterionSequence", "classify",
    "ShiftOperator", "gethner_shapiro_witness", "orbit_trace", "periodic_vector",
]
