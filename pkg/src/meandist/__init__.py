"""Moments of the distance between uniform random points in polytopes."""

from ._backend import BACKEND
from .catalog import REFERENCE, ball_moment, gamma_ratio, get_recipe, platonic_moment, table_rows
from .errors import MeanDistError
from .geom import Polytope, first_intrinsic_volume, measure
from .oracle import McEstimate, estimate_moment, sample_uniform
from .polygon2d import disk_moment, edge_vertex_moment, even_moment_closed, polygon_limit_checks, polygon_moment
from .reduction import general_moment, solve_solid_system, tetrahedron_moment, theorem_basic_weights
from .results import MomentResult, Normalize

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "REFERENCE",
    "McEstimate",
    "MeanDistError",
    "MomentResult",
    "Normalize",
    "Polytope",
    "ball_moment",
    "disk_moment",
    "edge_vertex_moment",
    "estimate_moment",
    "even_moment_closed",
    "first_intrinsic_volume",
    "gamma_ratio",
    "general_moment",
    "get_recipe",
    "measure",
    "platonic_moment",
    "polygon_limit_checks",
    "polygon_moment",
    "sample_uniform",
    "solve_solid_system",
    "table_rows",
    "tetrahedron_moment",
    "theorem_basic_weights",
]
