"""Pilot-wave (de Broglie-Bohm) trajectory simulations in one dimension."""

from .config import ConfigError, ScenarioConfig, parse_config
from .equilibrium import (
    EquivarianceReport,
    GridDistribution,
    equivariance_report,
    ks_distance,
    ks_threshold,
    sample_born,
    verify_equivariance,
)
from .fields import (
    Grid1D,
    Potential,
    WaveState,
    density,
    fourier_transform,
    inverse_fourier_transform,
    make_grid,
    norm_squared,
)
from .guidance import Ensemble, Trajectory, advance_trajectory, current, run_trajectories, velocity_field
from .output import write_outputs
from .propagator import (
    EvolutionRecord,
    analytic_free_gaussian,
    analytic_free_packet,
    continuity_residual,
    split_step_evolve,
)
from .scenarios import (
    ScenarioResult,
    extract_asymptotic_momentum,
    run_scenario,
    scenario_double_slit,
    scenario_momentum_measurement,
    scenario_spin_measurement,
)

__version__ = "0.1.0"
