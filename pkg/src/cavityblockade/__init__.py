"""Photon blockade in an asymmetric cavity with a driven three-level atom.

Steady-state photon statistics, optimal-blockade parameter search, and
nonreciprocity analysis for a two-mirror cavity whose mirrors leak at
different rates.  All rates and detunings are in units of the total cavity
linewidth kappa unless stated otherwise.
"""

__version__ = "0.1.0"

from .dynamics import (
    AmplitudeState,
    IntegratorConfig,
    NonFiniteState,
    Trajectory,
    evolve,
    steady_rk4,
    vacuum_state,
)
from .figures import FIGURE_NAMES, UnknownFigure, figure
from .full_model import (
    FullModel,
    FullModelParams,
    NotConverged,
    ValidationReport,
    validate_effective,
)
from .optimizer import (
    DegenerateDetuning,
    JThetaScan,
    NonreciprocityReport,
    NoRealSolution,
    NotNonreciprocal,
    OptimalPoint,
    find_roots,
    nonreciprocal_point,
    scan_j_theta,
    solve_optimal,
)
from .params import (
    ConfigError,
    Direction,
    EffectiveParams,
    RegimeWarning,
    SystemParams,
    amplitude_from_power,
    derive_effective,
    implied_e_he,
    load_config,
    mirror_swap,
    parse_config,
    reference_params,
    wrap_angle,
)
from .spectrum import EnergyPair, anharmonicity, eigenenergies
from .steady_state import (
    PhotonStats,
    SingularDenominator,
    analytic_amplitudes,
    g2_of_detuning,
    photon_stats,
    steady_stats,
)
from .sweeps import (
    SweepAxis,
    SweepResult,
    SweepSpec,
    run_sweep,
    write_sweep_csv,
)

__all__ = [
    "AmplitudeState",
    "ConfigError",
    "DegenerateDetuning",
    "Direction",
    "EffectiveParams",
    "EnergyPair",
    "FIGURE_NAMES",
    "FullModel",
    "FullModelParams",
    "IntegratorConfig",
    "JThetaScan",
    "NonFiniteState",
    "NonreciprocityReport",
    "NoRealSolution",
    "NotConverged",
    "NotNonreciprocal",
    "OptimalPoint",
    "PhotonStats",
    "RegimeWarning",
    "SingularDenominator",
    "SweepAxis",
    "SweepResult",
    "SweepSpec",
    "SystemParams",
    "Trajectory",
    "UnknownFigure",
    "ValidationReport",
    "amplitude_from_power",
    "analytic_amplitudes",
    "anharmonicity",
    "derive_effective",
    "eigenenergies",
    "evolve",
    "figure",
    "find_roots",
    "g2_of_detuning",
    "implied_e_he",
    "load_config",
    "mirror_swap",
    "nonreciprocal_point",
    "parse_config",
    "photon_stats",
    "reference_params",
    "run_sweep",
    "scan_j_theta",
    "solve_optimal",
    "steady_rk4",
    "steady_stats",
    "vacuum_state",
    "wrap_angle",
    "write_sweep_csv",
]
