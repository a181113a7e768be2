"""Markov-chain simulation of the two frog-model variants on K_{N+1}.

State is the integer triple (unvisited I, active A, dead D) with
I + A + D = N + 1.  The complete-graph symmetry makes this triple a
sufficient statistic, so no per-particle bookkeeping is needed.

Geometric step: X ~ Binomial(A, p) survivors, Z ~ Binomial(X, I/N) of
them pick unvisited vertices, I' ~ EmpBox(Z, I), A' = X + I - I'.
Nongeometric step: Z ~ Binomial(A, I/N), I' ~ EmpBox(Z, I),
A' = Z + I - I'.  In both, D' closes the sum to N + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .occupancy import OccupancySpec, sample_binomial, sample_empbox

GEOMETRIC = "geometric"
NONGEOMETRIC = "nongeometric"


@dataclass(frozen=True)
class ModelParams:
    """Graph size N, model kind, and per-jump survival probability p.

    p is meaningful only for the geometric model.
    """

    n: int
    kind: str
    p: float = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")
        if self.kind not in (GEOMETRIC, NONGEOMETRIC):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class ChainState:
    unvisited: int
    active: int
    dead: int
    t: int = 0


@dataclass(frozen=True)
class ScaledState:
    i: float
    a: float
    d: float


@dataclass(frozen=True)
class OneStepMoments:
    """Closed-form conditional moments of the next state given the current one."""

    e_unvisited: float
    e_active: float
    e_dead: float
    var_unvisited: float
    var_active: float
    var_dead: float
    cov_unvisited_aux: float


def validate_state(state: ChainState, params: ModelParams) -> None:
    n = params.n
    if min(state.unvisited, state.active, state.dead) < 0:
        raise ValueError(f"negative component in {state}")
    if state.unvisited > n:
        raise ValueError(f"unvisited={state.unvisited} exceeds n={n}")
    if state.unvisited + state.active + state.dead != n + 1:
        raise ValueError(f"components of {state} do not sum to n+1={n + 1}")


def initial_state(params: ModelParams) -> ChainState:
    """One awake particle, N sleeping: (I, A, D) = (N, 1, 0) at t = 0."""
    return ChainState(unvisited=params.n, active=1, dead=0, t=0)


def _resolve_empbox(z: int, boxes: int, rng: np.random.Generator) -> int:
    # Zero balls (or no boxes left) leave the unvisited count untouched.
    if z == 0 or boxes == 0:
        return boxes
    return sample_empbox(OccupancySpec(z, boxes), rng)


def step_geometric(
    state: ChainState, params: ModelParams, rng: np.random.Generator
) -> tuple[ChainState, tuple[int, int]]:
    """One geometric-lifetime transition; returns (new state, (X, Z))."""
    if params.kind != GEOMETRIC:
        raise ValueError("step_geometric requires geometric params")
    validate_state(state, params)
    n, i, a = params.n, state.unvisited, state.active
    x = sample_binomial(a, params.p, rng)
    z = sample_binomial(x, i / n, rng)
    i1 = _resolve_empbox(z, i, rng)
    a1 = x + i - i1
    d1 = n + 1 - i1 - a1
    return ChainState(i1, a1, d1, state.t + 1), (x, z)


def step_nongeometric(
    state: ChainState, params: ModelParams, rng: np.random.Generator
) -> tuple[ChainState, tuple[int]]:
    """One nongeometric-lifetime transition; returns (new state, (Z,))."""
    if params.kind != NONGEOMETRIC:
        raise ValueError("step_nongeometric requires nongeometric params")
    validate_state(state, params)
    n, i, a = params.n, state.unvisited, state.active
    z = sample_binomial(a, i / n, rng)
    i1 = _resolve_empbox(z, i, rng)
    a1 = z + i - i1
    d1 = n + 1 - i1 - a1
    return ChainState(i1, a1, d1, state.t + 1), (z,)


def step(
    state: ChainState, params: ModelParams, rng: np.random.Generator
) -> tuple[ChainState, tuple[int, ...]]:
    if params.kind == GEOMETRIC:
        return step_geometric(state, params, rng)
    return step_nongeometric(state, params, rng)


def simulate_trajectory(
    params: ModelParams, t_max: int, rng: np.random.Generator
) -> list[ChainState]:
    """States from t = 0 up to t_max, stopping early at absorption (A = 0)."""
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    states = [initial_state(params)]
    for _ in range(t_max):
        if states[-1].active == 0:
            break
        nxt, _aux = step(states[-1], params, rng)
        states.append(nxt)
    return states


def run_to_absorption(
    params: ModelParams, cap: int, rng: np.random.Generator
) -> tuple[ChainState, bool]:
    """Step until A = 0 or `cap` steps; p = 1 never absorbs, hence the cap."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    state = initial_state(params)
    for _ in range(cap):
        if state.active == 0:
            return state, True
        state, _aux = step(state, params, rng)
    return state, state.active == 0


def moments_geometric(state: ChainState, params: ModelParams) -> OneStepMoments:
    """Conditional one-step moments for the geometric model (closed form)."""
    validate_state(state, params)
    n, p = params.n, params.p
    i, a, d = state.unvisited, state.active, state.dead
    q1 = (1.0 - p / n) ** a
    q2 = (1.0 - 2.0 * p / n) ** a
    e_i = i * q1
    e_a = p * a + i * (1.0 - q1)
    e_d = d + (1.0 - p) * a
    var_i = i * ((i - 1) * q2 - i * q1 * q1 + q1)
    var_d = a * p * (1.0 - p)
    cov_ix = -p * a * i * q1 * (1.0 - p) / (n - p)
    var_a = var_i + var_d - 2.0 * cov_ix
    return OneStepMoments(e_i, e_a, e_d, var_i, var_a, var_d, cov_ix)


def moments_nongeometric(state: ChainState, params: ModelParams) -> OneStepMoments:
    """Conditional one-step moments for the nongeometric model (closed form)."""
    validate_state(state, params)
    n = params.n
    i, a, d = state.unvisited, state.active, state.dead
    r1 = (1.0 - 1.0 / n) ** a
    r2 = (1.0 - 2.0 / n) ** a
    e_i = i * r1
    e_a = i * (a / n + 1.0 - r1)
    e_d = d + (1.0 - i / n) * a
    var_i = i * ((i - 1) * r2 - i * r1 * r1 + r1)
    var_d = a * (i / n) * (1.0 - i / n)
    cov_iz = (a * i / n) * r1 * (i - n) / (n - 1)
    var_a = var_i + var_d - 2.0 * cov_iz
    return OneStepMoments(e_i, e_a, e_d, var_i, var_a, var_d, cov_iz)


def scale(state: ChainState, n: int) -> ScaledState:
    """Scale the integer triple by N + 1 onto the probability simplex."""
    m = n + 1
    return ScaledState(state.unvisited / m, state.active / m, state.dead / m)


def replication_rng(master_seed: int, index: int) -> np.random.Generator:
    """Per-replication stream: Generator seeded by SeedSequence([seed, index])."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, index]))
