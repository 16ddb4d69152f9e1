"""Finitely supported measures, paired vector spaces and integration.

Exact (Gaussian rational) and binary64 backends; see the README for the CLI.
"""

from __future__ import annotations

from .chu import PairedMap, PairedSpace, RawPair
from .errors import InvariantError, MeasureChuError, ValidationError
from .expr import eval_expr, parse_expr
from .integration import Curve, VectorFn, double_integral, ftc_forward, ftc_inverse, integrate_vector
from .linalg import Matrix
from .measures import Measure, MetaMeasure, dirac, flatten, product, pushforward
from .scalar import EXACT, FLOAT, Scalar
from .spaces import FiniteSpace, MapTable, Point, make_space

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "EXACT",
    "FLOAT",
    "FiniteSpace",
    "InvariantError",
    "MapTable",
    "Matrix",
    "Measure",
    "MeasureChuError",
    "MetaMeasure",
    "PairedMap",
    "PairedSpace",
    "Point",
    "RawPair",
    "Scalar",
    "ValidationError",
    "VectorFn",
    "dirac",
    "double_integral",
    "eval_expr",
    "flatten",
    "ftc_forward",
    "ftc_inverse",
    "integrate_vector",
    "make_space",
    "parse_expr",
    "product",
    "pushforward",
]
