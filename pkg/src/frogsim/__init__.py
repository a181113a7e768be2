"""Frog-model chains on the complete graph, deterministic limits, and experiments."""

from .occupancy import (
    OccupancySpec,
    PmfUnavailableError,
    empbox_mean,
    empbox_pmf,
    empbox_variance,
    sample_binomial,
    sample_empbox,
)
from .chain import (
    ChainState,
    ModelParams,
    ScaledState,
    initial_state,
    moments_geometric,
    moments_nongeometric,
    replication_rng,
    run_to_absorption,
    scale,
    simulate_trajectory,
    step_geometric,
    step_nongeometric,
)
from .dynamics import (
    DetState,
    LimitResult,
    alpha_peak_index,
    det_initial,
    det_step_geometric,
    det_step_nongeometric,
    fixed_point_tauN,
    fixed_points_tau,
    iota_infinity,
    iterate_limit,
    lambert_w0,
    phi,
)
from .harness import ExperimentConfig, RunSummary, run_experiment

__version__ = "0.1.0"
