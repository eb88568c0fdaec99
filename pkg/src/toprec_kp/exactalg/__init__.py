"""Exact scalar and ring arithmetic: rationals, polynomials, rational
functions, Laurent series with truncation tracking, Puiseux monomial sums,
and differential polynomials."""

from .poly import (
    BiPoly,
    Poly,
    Rat,
    det_ring,
    parse_poly,
    rat,
    rat_str,
    rational_roots,
    resultant,
    resultant_bipoly,
    sylvester_resultant,
)
from .ratfunc import RatFunc
from .laurent import LaurentSeries, poly_at_series
from .puiseux import PuiseuxSum
from .diffpoly import DiffPoly, HbarSeries

__all__ = [
    "BiPoly",
    "DiffPoly",
    "HbarSeries",
    "LaurentSeries",
    "Poly",
    "PuiseuxSum",
    "Rat",
    "RatFunc",
    "det_ring",
    "parse_poly",
    "poly_at_series",
    "rat",
    "rat_str",
    "rational_roots",
    "resultant",
    "resultant_bipoly",
    "sylvester_resultant",
]
