"""Exact and numerical tools for decompositions of cubic forms as sums of cubes."""

from .decomp import Decomposition, certify, decomposition_of, pair_report
from .forms import Form
from .points import PointSet, ProjPoint, point

__version__ = "0.1.0"

__all__ = ["Decomposition", "Form", "PointSet", "ProjPoint", "certify", "decomposition_of", "pair_report", "point"]
