"""Analytical and simulation toolkit for finite-capacity road-traffic queues.

A road section is modeled as a loss queue whose service rate depends on
the vehicle count, either through a triangular fundamental diagram or
through classical speed-density congestion laws.  The package solves
single sections, couples two sections through a downstream-supply
constraint with a throughput fixed point, pushes occupancy laws forward
to speed and travel-time distributions, and verifies everything against
exact Markov-chain solves and seeded Monte Carlo simulation.
"""

from .config import Scenario, default_scenario, load_scenario, scenario_from_dict, section_from_dict
from .congestion import (
    ExponentialCongestionModel,
    FitAnchors,
    LinearCongestionModel,
    exponential_speed,
    fit_exponential,
    linear_speed,
)
from .ctmc import (
    Ctmc,
    OracleError,
    SimulationResult,
    birth_death_chain,
    build_tandem_2d,
    decomposition_diagnostic,
    exact_stationary,
    joint_marginals,
    simulate,
    tv_distance,
)
from .distributions import (
    DiscreteDistribution,
    mean,
    speed_dist_linear,
    speed_dist_triangular,
    travel_time_dist_linear,
    travel_time_dist_triangular,
)
from .fundamental import (
    EXACT,
    SHIFTED,
    RoadSection,
    TriangularDiagram,
    demand,
    flow,
    normalized_rate,
    service_rate,
    service_rates,
    supply,
)
from .queueing import (
    OccupancyDistribution,
    PerformanceMeasures,
    SingularModelError,
    measures,
    solve_birth_death,
    solve_jain_smith,
    solve_triangular,
    throughput_departure,
)
from .tandem import (
    ConvergenceError,
    FixedPointResult,
    TandemConfig,
    conditional_distribution,
    coupled_rate,
    downstream_distribution,
    marginal_distribution,
    scan_roots,
    solve_fixed_point,
    tandem_measures,
)

__version__ = "0.1.0"

__all__ = [
    "Ctmc",
    "ConvergenceError",
    "DiscreteDistribution",
    "EXACT",
    "ExponentialCongestionModel",
    "FitAnchors",
    "FixedPointResult",
    "LinearCongestionModel",
    "OccupancyDistribution",
    "OracleError",
    "PerformanceMeasures",
    "RoadSection",
    "SHIFTED",
    "Scenario",
    "SimulationResult",
    "SingularModelError",
    "TandemConfig",
    "TriangularDiagram",
    "birth_death_chain",
    "build_tandem_2d",
    "conditional_distribution",
    "coupled_rate",
    "decomposition_diagnostic",
    "default_scenario",
    "demand",
    "downstream_distribution",
    "exact_stationary",
    "exponential_speed",
    "fit_exponential",
    "flow",
    "joint_marginals",
    "linear_speed",
    "load_scenario",
    "marginal_distribution",
    "mean",
    "measures",
    "normalized_rate",
    "scan_roots",
    "scenario_from_dict",
    "section_from_dict",
    "service_rate",
    "service_rates",
    "simulate",
    "solve_birth_death",
    "solve_fixed_point",
    "solve_jain_smith",
    "solve_triangular",
    "speed_dist_linear",
    "speed_dist_triangular",
    "supply",
    "tandem_measures",
    "throughput_departure",
    "travel_time_dist_linear",
    "travel_time_dist_triangular",
    "tv_distance",
    "__version__",
]
