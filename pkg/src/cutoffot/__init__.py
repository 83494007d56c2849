"""Cutoff optimal transport: radial maps, truncation error bounds and a Monge-Ampere solver."""
from .costs import CostFunction, builtin_cost
from .errors import *  # noqa: F401,F403
from .measures import (
    CumulativeProfile,
    CutoffMeasure,
    GridDensity,
    LogConcaveDensity,
    RadialDensity,
    cube_mass,
    cumulative_profile,
    cutoff,
    density_from_name,
    exponential_radial,
    gaussian,
    gaussian_logconcave,
    inverse_profile,
    moment,
    pareto_tail,
    tail_mass,
    uniform_ball,
)
from .radial_ot import (
    RadialMap,
    brenier_potential,
    kantorovich_potential,
    monotone_rearrangement_1d,
    radial_map,
    radial_potential,
    w1_exact_radial,
    w2_radial,
)

__version__ = "0.1.0"
