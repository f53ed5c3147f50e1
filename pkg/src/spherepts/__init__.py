"""Integer lattice points on spheres and their local statistics.

Enumerate the solutions of x_1^2 + ... + x_t^2 = n for t in {2, 3, 4},
project them to the unit sphere, and compare their local statistics (pair
counts, nearest-neighbour spacings, energy, covering radius, discrepancy)
against seeded random and rigid baselines.
"""

from .baselines import MonteCarloSummary, hex_patch, monte_carlo, sample_uniform_sphere
from .errors import BudgetError, CoincidentPointsError, EmptySetError
from .lattice import (
    PairCorrelationTable,
    Provenance,
    SolutionSet,
    UnitPointSet,
    close_pair_dim4,
    count_solutions,
    double_shifted_count,
    enumerate_solutions,
    filter_primitive,
    has_solutions,
    pair_correlation,
    project_to_sphere,
    read_point_set,
    shifted_count,
    write_pair_correlation,
    write_point_set,
)
from .numtheory import (
    FactoredInteger,
    admits_primitive,
    factorize,
    is_prime,
    is_squarefree,
    three_squares_representable,
)
from .sphere_stats import (
    RipleyProfile,
    SpacingMeasure,
    StatsReport,
    cap_discrepancy,
    cap_fraction,
    covering_radius,
    energy,
    energy_deviation,
    ks_exponential,
    min_spacing,
    nn_distances,
    pole_annulus_gap,
    ripley,
    spacing_measure,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CoincidentPointsError",
    "EmptySetError",
    "FactoredInteger",
    "MonteCarloSummary",
    "PairCorrelationTable",
    "Provenance",
    "RipleyProfile",
    "SolutionSet",
    "SpacingMeasure",
    "StatsReport",
    "UnitPointSet",
    "admits_primitive",
    "cap_discrepancy",
    "cap_fraction",
    "close_pair_dim4",
    "count_solutions",
    "covering_radius",
    "double_shifted_count",
    "energy",
    "energy_deviation",
    "enumerate_solutions",
    "factorize",
    "filter_primitive",
    "has_solutions",
    "hex_patch",
    "is_prime",
    "is_squarefree",
    "ks_exponential",
    "min_spacing",
    "monte_carlo",
    "nn_distances",
    "pair_correlation",
    "pole_annulus_gap",
    "project_to_sphere",
    "read_point_set",
    "ripley",
    "sample_uniform_sphere",
    "shifted_count",
    "spacing_measure",
    "three_squares_representable",
    "write_pair_correlation",
    "write_point_set",
]
