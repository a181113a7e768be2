"""Experiment runner tying the chains to their deterministic limits.

Experiment kinds:
  lln     sup-over-time max-norm deviation between scaled chain and orbit
  final   final unvisited fraction and absorption time
  phase   mean visited fraction across a p grid (geometric)
  moments Monte Carlo one-step moments vs the analytic oracles (z-scores)
  fig1    closed-form limit curve p -> iota_infinity(p)
  fig3    nongeometric long-run unvisited fraction vs N
  peak    nongeometric active-fraction peak index vs N

Every run is identified by (config, master seed); replication j uses the
stream derived from SeedSequence([seed, j]) (plus a per-cell tag for
multi-cell experiments), so output files are byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, asdict

import numpy as np

from . import chain, dynamics
from .occupancy import sample_empbox_batch

VERSION = "frogsim-0.1.0"

KINDS = ("lln", "final", "phase", "moments", "fig1", "fig3", "peak")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    model: str = chain.NONGEOMETRIC
    p_values: tuple[float, ...] = (0.5,)
    n_values: tuple[int, ...] = (100,)
    t_max: int = 20
    replications: int = 100
    seed: int = 0
    cap: int | None = None  # run_to_absorption step cap; default 10 * N

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.model not in (chain.GEOMETRIC, chain.NONGEOMETRIC):
            raise ValueError(f"unknown model {self.model!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if any(n < 3 for n in self.n_values):
            raise ValueError("all n values must be >= 3")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError("all p values must be in [0, 1]")


@dataclass
class RunSummary:
    columns: list[str]
    rows: list[list]
    config: dict
    metadata: dict
    wall_time: float = 0.0  # not serialized: output files must be reproducible


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def summary_to_csv(summary: RunSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"# seed={summary.metadata['seed']} version={summary.metadata['version']}"])
    w.writerow([f"# config={json.dumps(summary.config, sort_keys=True)}"])
    w.writerow(summary.columns)
    for row in summary.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def summary_to_json(summary: RunSummary) -> str:
    payload = {
        "config": summary.config,
        "rows": [dict(zip(summary.columns, row)) for row in summary.rows],
        "metadata": summary.metadata,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_summary(summary: RunSummary, path, fmt: str) -> None:
    text = summary_to_csv(summary) if fmt == "csv" else summary_to_json(summary)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _metadata(cfg: ExperimentConfig) -> dict:
    return {"seed": cfg.seed, "version": VERSION, "replications": cfg.replications}


def _finish(cfg, columns, rows, t0) -> RunSummary:
    return RunSummary(
        columns=columns,
        rows=rows,
        config=asdict(cfg),
        metadata=_metadata(cfg),
        wall_time=time.perf_counter() - t0,
    )


def _quantiles(x: np.ndarray) -> tuple[float, float, float]:
    q = np.quantile(x, [0.05, 0.5, 0.95])
    return float(q[0]), float(q[1]), float(q[2])


def _params(cfg: ExperimentConfig, n: int, p: float) -> chain.ModelParams:
    return chain.ModelParams(n=n, kind=cfg.model, p=p)


def _cell_rng(cfg: ExperimentConfig, cell: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, cell, rep]))


def lln_experiment(cfg: ExperimentConfig) -> RunSummary:
    """Sup-over-t max-norm deviation between scaled chain and orbit, per N.

    The deterministic orbit is computed once per N and shared across
    replications; absorbed trajectories are held frozen for comparison.
    """
    if cfg.kind != "lln":
        raise ValueError("config kind must be 'lln'")
    t0 = time.perf_counter()
    p = cfg.p_values[0]
    rows = []
    for cell, n in enumerate(cfg.n_values):
        params = _params(cfg, n, p)
        orbit = dynamics.det_orbit(n, cfg.model, cfg.t_max, p)
        devs = np.empty(cfg.replications)
        for rep in range(cfg.replications):
            rng = _cell_rng(cfg, cell, rep)
            traj = chain.simulate_trajectory(params, cfg.t_max, rng)
            dev = 0.0
            for t in range(cfg.t_max + 1):
                st = traj[t] if t < len(traj) else traj[-1]
                sc = chain.scale(st, n)
                det = orbit[t]
                dev = max(
                    dev,
                    abs(sc.i - det.iota),
                    abs(sc.a - det.alpha),
                    abs(sc.d - det.delta),
                )
            devs[rep] = dev
        q05, q50, q95 = _quantiles(devs)
        rows.append(
            [n, cfg.replications, float(devs.mean()), float(devs.std(ddof=1)), q05, q50, q95]
        )
    cols = ["n", "replications", "mean_dev", "sd_dev", "q05", "q50", "q95"]
    return _finish(cfg, cols, rows, t0)


def final_fraction_experiment(cfg: ExperimentConfig) -> RunSummary:
    """Final unvisited fraction I_final/(N+1) and absorption time, per N."""
    if cfg.kind != "final":
        raise ValueError("config kind must be 'final'")
    t0 = time.perf_counter()
    p = cfg.p_values[0]
    rows = []
    for cell, n in enumerate(cfg.n_values):
        params = _params(cfg, n, p)
        cap = cfg.cap if cfg.cap is not None else 10 * n
        fracs = np.empty(cfg.replications)
        times = np.empty(cfg.replications)
        capped = 0
        for rep in range(cfg.replications):
            rng = _cell_rng(cfg, cell, rep)
            final, absorbed = chain.run_to_absorption(params, cap, rng)
            if not absorbed:
                capped += 1
            fracs[rep] = final.unvisited / (n + 1)
            times[rep] = final.t
        q05, q50, q95 = _quantiles(fracs)
        rows.append(
            [
                n,
                cfg.replications,
                capped,
                float(fracs.mean()),
                float(fracs.std(ddof=1)),
                q05,
                q50,
                q95,
                float(times.mean()),
            ]
        )
    cols = [
        "n",
        "replications",
        "capped",
        "mean_unvisited_frac",
        "sd_unvisited_frac",
        "q05",
        "q50",
        "q95",
        "mean_absorption_time",
    ]
    return _finish(cfg, cols, rows, t0)


def phase_sweep(cfg: ExperimentConfig) -> RunSummary:
    """Mean final visited fraction across the p grid (geometric model)."""
    if cfg.kind != "phase":
        raise ValueError("config kind must be 'phase'")
    if cfg.model != chain.GEOMETRIC:
        raise ValueError("phase sweep applies to the geometric model")
    t0 = time.perf_counter()
    n = cfg.n_values[0]
    cap = cfg.cap if cfg.cap is not None else 10 * n
    rows = []
    for cell, p in enumerate(cfg.p_values):
        params = _params(cfg, n, p)
        visited = np.empty(cfg.replications)
        for rep in range(cfg.replications):
            rng = _cell_rng(cfg, cell, rep)
            final, _absorbed = chain.run_to_absorption(params, cap, rng)
            visited[rep] = (n + 1 - final.unvisited) / (n + 1)
        rows.append([p, n, cfg.replications, float(visited.mean()), float(visited.std(ddof=1))])
    cols = ["p", "n", "replications", "mean_visited_frac", "sd_visited_frac"]
    return _finish(cfg, cols, rows, t0)


def one_step_samples(
    state: chain.ChainState,
    params: chain.ModelParams,
    draws: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized one-step sampling: `draws` i.i.d. next states (I', A', D')."""
    n, i, a = params.n, state.unvisited, state.active
    if params.kind == chain.GEOMETRIC:
        x = rng.binomial(a, params.p, size=draws) if a > 0 else np.zeros(draws, dtype=np.int64)
        z = rng.binomial(x, i / n) if i > 0 else np.zeros(draws, dtype=np.int64)
        carrier = x
    else:
        z = rng.binomial(a, i / n, size=draws) if (a > 0 and i > 0) else np.zeros(draws, dtype=np.int64)
        carrier = z
    if i > 0:
        i1 = sample_empbox_batch(z, i, rng)
    else:
        i1 = np.zeros(draws, dtype=np.int64)
    a1 = carrier + i - i1
    d1 = n + 1 - i1 - a1
    return i1, a1, d1


_VAR_BATCHES = 200


def _batched_variance(x: np.ndarray) -> tuple[float, float]:
    """Variance estimate and its standard error via batching.

    Per-batch sample variances are unbiased for the true variance and
    their batch-mean is CLT-normal for any underlying law, unlike the
    fourth-moment plug-in SE, which degenerates for symmetric two-point
    distributions.
    """
    b = min(_VAR_BATCHES, x.size)
    size = x.size // b
    batches = x[: b * size].reshape(b, size)
    per_batch = batches.var(ddof=1, axis=1)
    return float(per_batch.mean()), float(per_batch.std(ddof=1) / np.sqrt(b))


def moment_panel(cfg: ExperimentConfig, rng: np.random.Generator) -> list[tuple[chain.ChainState, chain.ModelParams]]:
    """Audit panel: exhaustive states at N in {3, 4} plus 20 random large-N states."""
    panel = []
    for n in (3, 4):
        for i in range(n + 1):
            for a in range(n + 2 - i):
                panel.append((chain.ChainState(i, a, n + 1 - i - a), n))
    big_n = 1000
    for _ in range(20):
        i = int(rng.integers(1, big_n + 1))
        a = int(rng.integers(1, big_n + 2 - i))
        panel.append((chain.ChainState(i, a, big_n + 1 - i - a), big_n))
    p = cfg.p_values[0]
    return [(st, chain.ModelParams(n=n, kind=cfg.model, p=p)) for st, n in panel]


def moment_audit(cfg: ExperimentConfig) -> RunSummary:
    """Standardized deviations of Monte Carlo one-step moments vs the oracles."""
    if cfg.kind != "moments":
        raise ValueError("config kind must be 'moments'")
    t0 = time.perf_counter()
    panel_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 999]))
    panel = moment_panel(cfg, panel_rng)
    oracle = (
        chain.moments_geometric if cfg.model == chain.GEOMETRIC else chain.moments_nongeometric
    )
    rows = []
    for cell, (state, params) in enumerate(panel):
        rng = _cell_rng(cfg, cell, 0)
        mom = oracle(state, params)
        samples = one_step_samples(state, params, cfg.replications, rng)
        analytic = [
            (mom.e_unvisited, mom.var_unvisited),
            (mom.e_active, mom.var_active),
            (mom.e_dead, mom.var_dead),
        ]
        for comp, x, (e_th, v_th) in zip(("unvisited", "active", "dead"), samples, analytic):
            x = x.astype(float)
            se_mean = x.std(ddof=1) / np.sqrt(x.size)
            # Degenerate draws: require agreement up to float rounding, z := 0.
            tol = 1e-9 * max(1.0, abs(e_th))
            if se_mean == 0.0:
                z_mean = 0.0 if abs(x[0] - e_th) <= tol else float("inf")
            else:
                z_mean = float((x.mean() - e_th) / se_mean)
            s2, se_var = _batched_variance(x)
            if se_var == 0.0:
                z_var = 0.0 if abs(s2 - v_th) <= tol else float("inf")
            else:
                z_var = float((s2 - v_th) / se_var)
            rows.append(
                [
                    params.kind,
                    params.n,
                    params.p,
                    state.unvisited,
                    state.active,
                    state.dead,
                    comp,
                    z_mean,
                    z_var,
                ]
            )
    cols = ["model", "n", "p", "unvisited", "active", "dead", "component", "z_mean", "z_var"]
    return _finish(cfg, cols, rows, t0)


def fig1_data(cfg: ExperimentConfig) -> RunSummary:
    """Closed-form limit curve (p, iota_infinity(p))."""
    if cfg.kind != "fig1":
        raise ValueError("config kind must be 'fig1'")
    t0 = time.perf_counter()
    rows = [[p, dynamics.iota_infinity(p)] for p in cfg.p_values]
    return _finish(cfg, ["p", "iota_infinity"], rows, t0)


def fig3_data(cfg: ExperimentConfig) -> RunSummary:
    """Nongeometric long-run unvisited fraction per N (ascending grid)."""
    if cfg.kind != "fig3":
        raise ValueError("config kind must be 'fig3'")
    t0 = time.perf_counter()
    rows = []
    for n in cfg.n_values:
        res = dynamics.iterate_limit(n, dynamics.NONGEOMETRIC)
        rows.append([n, res.iota_inf, res.delta_inf, res.steps_used, res.converged])
    cols = ["n", "iota_inf", "delta_inf", "steps_used", "converged"]
    return _finish(cfg, cols, rows, t0)


def peak_experiment(cfg: ExperimentConfig) -> RunSummary:
    """Nongeometric active-fraction peak index and unimodality check per N."""
    if cfg.kind != "peak":
        raise ValueError("config kind must be 'peak'")
    t0 = time.perf_counter()
    rows = []
    for n in cfg.n_values:
        res = dynamics.alpha_peak_index(n)
        rows.append([n, res.index, res.pattern_ok, res.completed])
    return _finish(cfg, ["n", "peak_index", "pattern_ok", "completed"], rows, t0)


_DISPATCH = {
    "lln": lln_experiment,
    "final": final_fraction_experiment,
    "phase": phase_sweep,
    "moments": moment_audit,
    "fig1": fig1_data,
    "fig3": fig3_data,
    "peak": peak_experiment,
}


def run_experiment(cfg: ExperimentConfig) -> RunSummary:
    return _DISPATCH[cfg.kind](cfg)
