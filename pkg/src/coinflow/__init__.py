"""Simulation and exact solution of two money-exchange models with debts.

Agents sit on the vertices of a finite connected graph and pass coins
along uniformly random directed edges.  Debt is bounded either per agent
(individual limit) or globally through a central bank (collective limit).
Both chains have a uniform stationary law over their admissible
configuration sets, which makes the single-vertex balance marginal a
ratio of explicit counting formulas; this package provides fast
simulation, the exact and log-space counting paths, the large-system
limit densities, and a brute-force verification oracle for tiny
instances.
"""

__version__ = "0.1.0"

from .asymptotics import (
    LaplaceParams,
    fit_laplace_slopes,
    laplace_density,
    laplace_params,
    moment_residuals,
    shifted_exp_density,
)
from .dynamics import (
    ModelParams,
    MoneyState,
    SimulationReport,
    default_burn_in,
    dump_state,
    initial_state,
    load_state,
    replica_seeds,
    simulate,
    step_collective,
    step_individual,
    validate_state,
)
from .errors import (
    CapacityError,
    CoinflowError,
    ConnectivityError,
    DegenerateParameterError,
    GraphError,
    InsufficientDataError,
    InvalidStateError,
    InvariantBreachError,
    NoUniqueStationaryError,
)
from .exact import (
    COLLECTIVE,
    INDIVIDUAL,
    ExactPMF,
    binom_ext,
    count_states_collective,
    count_states_individual,
    load_pmf_csv,
    log_count_collective,
    log_count_individual,
    stationary_marginal,
    support_window,
)
from .graph import (
    NAMED_KINDS,
    GraphTopology,
    build_named,
    from_edge_list,
    load_edge_list,
    parse_edge_list,
)
from .stats import (
    BankCurve,
    DriftEstimate,
    Histogram,
    SymmetryResult,
    bank_depletion_curve,
    chi_square_statistic,
    drift_estimate,
    interaction_symmetry,
    tv_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
