"""Monotone finite-difference solver for the second boundary-value problem."""
from .geometry import ConvexPolygon, Disk, Rectangle, signed_distance_rect
from .grid import Grid, build_stencils, discrete_normals, orthogonal_pairs, stencil_directions
from .kernels import BACKEND
from .scheme import (
    Problem,
    SchemeConfig,
    assemble_residual,
    boundary_gradient,
    det_discrete,
    directional_second_difference,
    lambda1_discrete,
)
from .solver import MASolution, extend_nearest_neighbor, solve_scheme

__all__ = [
    "BACKEND", "ConvexPolygon", "Disk", "Grid", "MASolution", "Problem", "Rectangle", "SchemeConfig",
    "assemble_residual", "boundary_gradient", "build_stencils", "det_discrete", "directional_second_difference",
    "discrete_normals", "extend_nearest_neighbor", "lambda1_discrete", "orthogonal_pairs",
    "signed_distance_rect", "solve_scheme", "stencil_directions",
]
