"""Experiment harnesses: stability, current inflation, linear sweeps,
echo chains, weight audits, and power-law fitting.

Each runner consumes a RunConfig, writes deterministic CSV/JSON
artifacts into the output directory (schemas in docs/formats.md), and
returns a summary dict whose ``assertions`` sub-dict drives the CLI
exit code.  Outputs are byte-identical for identical config + seed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, FitError
from .grid import Grid, make_grid
from .initial_data import gevrey_random_state, single_mode_state
from .linear import integrate_mode_batch, linear_field_solution
from .nonlinear import (SimState, StepperConfig, _Work, advance_to,
                        stability_limit)
from .diagnostics import DiagnosticsRecord, diagnostics, x_seminorm
from .echo import EchoConfig, chain_run, growth_regression
from .weights import WeightCache, WeightParams, WeightTable, log_mL
from .grid import SpectralField
from .snapshot_io import write_snapshot

KINDS = ("linear-sweep", "simulate", "stability", "inflation", "echo",
         "weights-audit")


@dataclass
class RunConfig:
    kind: str
    out_dir: str = "out"
    seed: int = 0
    # grid / physics
    n_x: int = 64
    n_y: int = 64
    L_y: float = 2.0 * math.pi
    nu: float = 1.0
    alpha: float = 1.0
    epsilon: float = 1e-3
    # time
    t_end: float = 10.0
    t_end_policy: str = "absolute"  # absolute | eps_minus_2_3 | eps_minus_1_2
    t_end_coeff: float = 1.0
    dt: float = 0.0  # 0 -> automatic from the stability limit
    sample_stride: float = 0.1
    # data recipe
    recipe: str = "gevrey_random"  # or single_mode
    k_mode: int = 5
    eta_mode: float = 0.0
    k_band: int = 4
    eta_band: float = 2.0
    quasistatic_G: bool = False
    with_v0: bool = True
    # diagnostics
    k0: float = 4.0
    fit_t_min: float = 5.0
    snapshots: bool = False
    linear_baseline: bool = False
    nonlinear: bool = True  # False: evolve the linearized system only
    # weights
    weight_params: WeightParams = field(default_factory=WeightParams)
    # echo
    echo_etas: tuple = (1e3, 1e4, 1e5)
    echo_epsilon: float = 0.5
    echo_policy: str = "critical"
    echo_window: float = 8.0
    # weights-audit sweep
    audit_etas: tuple = (50.0, 500.0)
    audit_t_points: int = 200

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not 0.0 < self.epsilon <= 0.1:
            raise ConfigError("epsilon must lie in (0, 0.1]")
        if self.t_end_policy not in ("absolute", "eps_minus_2_3", "eps_minus_1_2"):
            raise ConfigError(f"unknown t_end policy {self.t_end_policy!r}")
        if self.resolved_t_end() <= 0 or not math.isfinite(self.resolved_t_end()):
            raise ConfigError("t_end policy must resolve to a positive finite time")
        if self.recipe not in ("gevrey_random", "single_mode"):
            raise ConfigError(f"unknown recipe {self.recipe!r}")

    def resolved_t_end(self) -> float:
        if self.t_end_policy == "absolute":
            return self.t_end
        if self.t_end_policy == "eps_minus_2_3":
            return self.t_end_coeff * self.epsilon ** (-2.0 / 3.0)
        return self.t_end_coeff * self.epsilon ** (-0.5)


@dataclass
class FitResult:
    exponent: float
    prefactor: float
    window: tuple
    r_squared: float


def fit_power_law(ts, values, window) -> FitResult:
    """Log-log least squares over samples inside the window."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    sel = (ts >= lo) & (ts <= hi)
    if np.sum(sel) < 10:
        raise FitError("need at least 10 samples inside the fit window")
    if np.any(values[sel] <= 0) or np.any(ts[sel] <= 0):
        raise FitError("power-law fit requires positive samples")
    x = np.log(ts[sel])
    y = np.log(values[sel])
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(exponent=float(slope), prefactor=float(math.exp(intercept)),
                     window=(float(lo), float(hi)), r_squared=float(r2))


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path, columns, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


# ---------------------------------------------------------------------------
# shared simulation driver


def _initial_state(cfg: RunConfig, grid: Grid) -> SimState:
    if cfg.recipe == "single_mode":
        return single_mode_state(grid, cfg.k_mode, cfg.eta_mode, cfg.epsilon,
                                 nu=cfg.nu, alpha=cfg.alpha,
                                 params=cfg.weight_params)
    return gevrey_random_state(
        grid, cfg.epsilon, seed=cfg.seed, k_band=cfg.k_band,
        eta_band=cfg.eta_band, with_v0=cfg.with_v0,
        zero_G=not cfg.quasistatic_G, quasistatic_G=cfg.quasistatic_G,
        nu=cfg.nu, alpha=cfg.alpha, params=cfg.weight_params)


def _auto_dt(cfg: RunConfig, state: SimState, config: StepperConfig) -> float:
    stride = cfg.sample_stride
    limit = config.cfl_safety * stability_limit(state, config)
    if cfg.dt > 0:
        limit = min(limit, cfg.dt)
    n_sub = max(1, math.ceil(stride / limit))
    return stride / n_sub


def run_time_series(cfg: RunConfig, keep_states: bool = False):
    """Advance the nonlinear system, sampling diagnostics at the stride.

    Returns (ts, records, states or None, grid, extras) where extras
    carries the linear-baseline comparison when requested.
    """
    grid = make_grid(cfg.n_x, cfg.n_y, cfg.L_y)
    params = cfg.weight_params
    state = _initial_state(cfg, grid)
    t_end = cfg.resolved_t_end()
    sim_cfg = StepperConfig(dt=1.0, nu=cfg.nu, alpha=cfg.alpha,
                            nonlinear=cfg.nonlinear)
    dt = _auto_dt(cfg, state, sim_cfg)
    sim_cfg = StepperConfig(dt=dt, nu=cfg.nu, alpha=cfg.alpha,
                            nonlinear=cfg.nonlinear)
    n_samples = int(round(t_end / cfg.sample_stride))
    ts = np.arange(n_samples + 1) * cfg.sample_stride
    t_end = float(ts[-1])  # land the horizon exactly on the sample grid
    work = _Work(grid)
    cache = WeightCache(grid, params, t_max=t_end)
    records, states = [], []
    baseline = None
    if cfg.linear_baseline:
        G0, _ = _good_unknowns_of(state, cfg)
        phi0 = SpectralField(grid, state.phi.copy(), "phi")
        from .grid import FlowState, zero_field
        v00 = zero_field(grid, "v0x")
        v00.coeffs[0, :] = state.v0x
        init = FlowState(t=0.0, phi=phi0,
                         G=SpectralField(grid, G0, "G"), v0x=v00)
        baseline = linear_field_solution(init, t_end, rtol=1e-8, nu=cfg.nu,
                                         alpha=cfg.alpha, params=params,
                                         sample_times=ts)
    extras = {"baseline_x": [], "phi_x_diff": [], "dt": dt}
    for i, t in enumerate(ts):
        if t > 0:
            state = advance_to(state, float(t), sim_cfg, work=work)
        table = WeightTable.build(grid, params, float(t), cache)
        records.append(diagnostics(state, table, k0=cfg.k0, work=work,
                                   nu=cfg.nu, alpha=cfg.alpha))
        if keep_states:
            states.append(state.copy())
        if baseline is not None:
            phi_lin = baseline[i].phi.coeffs
            extras["baseline_x"].append(x_seminorm(grid, phi_lin, cfg.k0))
            extras["phi_x_diff"].append(
                x_seminorm(grid, state.phi - phi_lin, cfg.k0))
        if cfg.snapshots and (i % max(1, n_samples // 8) == 0):
            os.makedirs(cfg.out_dir, exist_ok=True)
            write_snapshot(os.path.join(cfg.out_dir, f"phi_{i:05d}.snap"),
                           SpectralField(grid, state.phi, "phi"), float(t))
    return ts, records, (states if keep_states else None), grid, extras


def _good_unknowns_of(state: SimState, cfg: RunConfig):
    from .nonlinear import good_unknown_arrays
    return good_unknown_arrays(state.w, state.phi, state.grid, state.t,
                               cfg.nu, cfg.alpha)


def _records_csv(path, ts, records, extras=None):
    cols = DiagnosticsRecord.columns()
    rows = [r.to_row() for r in records]
    if extras and extras.get("baseline_x"):
        cols = cols + ["x_seminorm_phi_lin", "x_seminorm_diff"]
        rows = [row + [bx, dx] for row, bx, dx in
                zip(rows, extras["baseline_x"], extras["phi_x_diff"])]
    write_csv(path, cols, rows)


# ---------------------------------------------------------------------------
# experiment runners


def run_simulate(cfg: RunConfig) -> dict:
    os.makedirs(cfg.out_dir, exist_ok=True)
    ts, records, _, grid, extras = run_time_series(cfg)
    _records_csv(os.path.join(cfg.out_dir, "diagnostics.csv"), ts, records,
                 extras)
    summary = {
        "kind": cfg.kind, "epsilon": cfg.epsilon, "t_end": cfg.resolved_t_end(),
        "dt": extras["dt"], "grid": [cfg.n_x, cfg.n_y],
        "E_initial": records[0].E, "E_final": records[-1].E,
        "assertions": {"finite_energy": all(math.isfinite(r.E) for r in records)},
    }
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return summary


def run_stability(cfg: RunConfig) -> dict:
    """Perturbative-horizon stability: max_t E(t) <= 4 E(0)."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    ts, records, _, grid, extras = run_time_series(cfg)
    _records_csv(os.path.join(cfg.out_dir, "diagnostics.csv"), ts, records)
    E = np.array([r.E + r.E0 for r in records])
    ratio = float(np.max(E) / E[0])
    summary = {
        "kind": cfg.kind, "epsilon": cfg.epsilon,
        "t_end": cfg.resolved_t_end(), "dt": extras["dt"],
        "max_energy_ratio": ratio,
        "assertions": {"energy_ratio_le_4": ratio <= 4.0},
    }
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return summary


def run_inflation(cfg: RunConfig) -> dict:
    """Current norm inflation: fitted t^2 growth and linear-baseline check."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    cfg_run = cfg
    if not cfg.linear_baseline:
        from dataclasses import replace
        cfg_run = replace(cfg, linear_baseline=True)
    ts, records, _, grid, extras = run_time_series(cfg_run)
    _records_csv(os.path.join(cfg.out_dir, "diagnostics.csv"), ts, records,
                 extras)
    t_end = cfg.resolved_t_end()
    window = (cfg.fit_t_min, cfg.epsilon ** (-2.0 / 3.0) / 2.0)
    norm_j = [r.norm_j for r in records]
    tb = [(1.0 + t * t) ** 0.5 * r.norm_b for t, r in zip(ts, records)]
    fit_j = fit_power_law(ts, norm_j, window)
    fit_b = fit_power_law(ts, tb, window)
    diff = np.array(extras["phi_x_diff"])
    base = np.array(extras["baseline_x"])
    rel_diff = float(np.max(diff / np.maximum(base, 1e-300)))
    delta_implied = cfg.epsilon * t_end ** 1.5
    # X-norm sandwich along the linear baseline, and the discrepancy's
    # growth exponent (meaningful only when the discrepancy rises above
    # the integrator noise floor)
    sandwich_C = float(max(np.max(base) / base[0], base[0] / np.min(base)))
    floor = 1e-12 * float(np.max(base))
    disc_exponent = None
    if np.max(diff) > floor and np.sum((diff > floor) & (ts > 0)) >= 10:
        sel = ts > 0
        try:
            disc_fit = fit_power_law(ts[sel], np.maximum(diff[sel], floor),
                                     (float(ts[sel][0]), float(ts[-1])))
            disc_exponent = disc_fit.exponent
        except FitError:
            disc_exponent = None
    summary = {
        "kind": cfg.kind, "epsilon": cfg.epsilon, "t_end": t_end,
        "dt": extras["dt"], "k0": cfg.k0, "fit_window": list(window),
        "fit_j_exponent": fit_j.exponent, "fit_j_r2": fit_j.r_squared,
        "fit_tb_exponent": fit_b.exponent, "fit_tb_r2": fit_b.r_squared,
        "max_baseline_discrepancy": rel_diff,
        "baseline_sandwich_C": sandwich_C,
        "discrepancy_growth_exponent": disc_exponent,
        "delta_implied": delta_implied,
        "assertions": {
            "j_exponent_in_band": 1.8 <= fit_j.exponent <= 2.2,
            "tb_exponent_in_band": 1.8 <= fit_b.exponent <= 2.2,
            "baseline_discrepancy_le_0.1": rel_diff <= 0.1,
            "sandwich_C_le_10": sandwich_C <= 10.0,
        },
    }
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return summary


def run_linear_sweep(cfg: RunConfig, k_range=range(1, 9),
                     eta_values=None, t_end: float = 60.0,
                     stride: float = 0.25) -> dict:
    """Per-mode linearized integration sweep with energy monotonicity."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    params = cfg.weight_params
    if eta_values is None:
        eta_values = np.linspace(-32.0, 32.0, 129)
    ks, etas = np.meshgrid(np.array(list(k_range)), np.asarray(eta_values),
                           indexing="ij")
    ks, etas = ks.ravel().astype(float), etas.ravel()
    ts, G, phi, E, cum = integrate_mode_batch(
        ks, etas, np.zeros_like(ks, dtype=complex),
        np.ones_like(ks, dtype=complex), 0.0, t_end, rtol=1e-8,
        nu=cfg.nu, alpha=cfg.alpha, params=params,
        sample_times=np.arange(0.0, t_end + 1e-9, stride))
    # energy increments and the integral inequality, both relative to E(0)
    incr = np.max((E[1:] - E[:-1]) / E[0][None, :])
    integ = np.max((E + 0.5 * cum - E[0][None, :]) / E[0][None, :])
    rows = []
    for i_t in range(0, len(ts), max(1, len(ts) // 60)):
        for m in range(0, len(ks), max(1, len(ks) // 200)):
            resid = (E[i_t, m] + 0.5 * cum[i_t, m] - E[0, m]) / E[0, m]
            rows.append([int(ks[m]), etas[m], ts[i_t], abs(G[i_t, m]),
                         abs(phi[i_t, m]), E[i_t, m], resid])
    write_csv(os.path.join(cfg.out_dir, "linear_sweep.csv"),
              ["k", "eta", "t", "abs_G", "abs_phi", "E_weighted", "residual"],
              rows)
    summary = {
        "kind": cfg.kind, "t_end": t_end, "modes": int(len(ks)),
        "max_energy_increase_rel": float(incr),
        "max_integral_violation_rel": float(integ),
        "assertions": {
            "energy_nonincreasing": bool(incr <= 1e-6),
            "dissipation_inequality": bool(integ <= 1e-6),
        },
    }
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return summary


def run_echo(cfg: RunConfig) -> dict:
    """Echo chains across etas with the gain table and growth regression."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows = []
    growths = []
    ratio_lo, ratio_hi = math.inf, -math.inf
    for eta in cfg.echo_etas:
        k_start = int(math.floor(eta ** (1.0 / 3.0) + 1e-9))
        res = chain_run(EchoConfig(eta=eta, k_start=k_start,
                                   epsilon=cfg.echo_epsilon,
                                   epsilon_policy=cfg.echo_policy,
                                   window=cfg.echo_window))
        for k, gd, pred in zip(res.ks, res.gains_down, res.predicted):
            rows.append([eta, k, gd, pred, gd / pred])
            ratio_lo = min(ratio_lo, gd / pred)
            ratio_hi = max(ratio_hi, gd / pred)
        growths.append(res.log10_growth)
    slope, intercept, r2 = growth_regression(cfg.echo_etas, growths)
    write_csv(os.path.join(cfg.out_dir, "echo.csv"),
              ["eta", "k", "gain_down", "predicted", "ratio"], rows)
    summary = {
        "kind": cfg.kind, "etas": list(cfg.echo_etas),
        "epsilon": cfg.echo_epsilon, "policy": cfg.echo_policy,
        "log10_growths": growths,
        "slope_log10_vs_eta13": slope, "intercept": intercept, "r_squared": r2,
        "gain_ratio_range": [ratio_lo, ratio_hi],
        "assertions": {
            "per_link_within_factor_2": bool(0.5 <= ratio_lo and ratio_hi <= 2.0),
            "slope_in_band": bool(0.25 <= slope <= 1.0),
            "r2_ge_0.95": bool(r2 >= 0.95),
        },
    }
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return summary


def run_weights_audit(cfg: RunConfig) -> dict:
    """CSV sweep of the log-weights used by the plotting component."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    from .weights import dq_ratio as dq_fn, log_J, log_A, log_m, log_q
    params = cfg.weight_params
    rows = []
    for eta in cfg.audit_etas:
        k_max = max(1, int(math.floor(abs(eta) ** (1.0 / 3.0) + 1e-9)))
        for k in range(1, k_max + 1):
            ts = np.linspace(0.0, 2.2 * eta, cfg.audit_t_points)
            for t in ts:
                t = float(t)
                rows.append([
                    t, k, eta,
                    log_mL(t, k, eta, params),
                    log_m(t, k, eta, params),
                    log_q(t, k, eta, params),
                    dq_fn(t, k, eta, params),
                    log_J(t, k, eta, params),
                    log_A(t, k, eta, params),
                ])
    write_csv(os.path.join(cfg.out_dir, "weights_audit.csv"),
              ["t", "k", "eta", "log_mL", "log_m", "log_q", "dq_ratio",
               "log_J", "log_A"], rows)
    summary = {"kind": cfg.kind, "etas": list(cfg.audit_etas),
               "rows": len(rows), "assertions": {"finite": all(
                   all(math.isfinite(v) for v in row) for row in rows)}}
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return summary


def run_experiment(cfg: RunConfig) -> dict:
    """Dispatch on cfg.kind; validates before any compute."""
    runner = {
        "simulate": run_simulate,
        "stability": run_stability,
        "inflation": run_inflation,
        "linear-sweep": run_linear_sweep,
        "echo": run_echo,
        "weights-audit": run_weights_audit,
    }[cfg.kind]
    return runner(cfg)
