"""Orchestrated experiments with statistical verdicts.

Each experiment runs a reproducible ensemble from a root seed, collects a
statistics table, and evaluates a pass/fail verdict against configured
tolerances.  Verdicts are pure functions of the statistics: regenerating a
report from stored statistics is byte-identical.

Experiments
-----------
- ``coming_down``: decay from large initial data; the weighted low-regularity
  norm of the solution must forget the initial amplitude.
- ``consistency``: the reconstructed paracontrolled solution converges to the
  direct renormalized solution at first order in dt under shared noise.
- ``c_invariance``: the sum v + w is independent of the splitting constant up
  to first-order time-discretization error.
- ``blowup_control``: the reversed-sign cube blows up, the damping sign never
  does.
- ``invariant_measure``: long-run Wick-corrected observable averages agree
  across independent initial data (two-dimensional dynamics).
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .besov import BesovIndex, besov_norm, build_dyadic_partition, lp_norm
from .config import RunConfig
from .diagrams import initial_diagrams, regularity_report, zero_diagrams
from .fieldio import write_csv
from .grid import Field, TorusGrid, make_grid
from .gronwall import _singular_weights
from .noise import estimate_c2, load_constants_cache, member_rng, save_constants_cache, wick_c1
from .solver import (
    ModelParams,
    Trajectory,
    init_state,
    is_blown_up,
    reconstruct_x,
    simulate_direct,
    simulate_paracontrolled,
    step_dpd2,
)

__all__ = [
    "ExperimentReport",
    "ode_reference",
    "band_limited_profile",
    "run_coming_down",
    "run_consistency",
    "run_c_invariance",
    "run_blowup_control",
    "run_invariant_measure",
    "inequality_monitor",
    "run_experiment",
    "EXPERIMENTS",
]


@dataclass
class ExperimentReport:
    """Statistics table plus verdict for one experiment."""

    tag: str
    columns: tuple
    stats: list           # rows of plain numbers/strings, deterministic order
    tolerances: dict
    verdict: bool
    runtime_seconds: float
    config_hash: str
    root_seed: int
    meta: dict = dc_field(default_factory=dict)
    extra_tables: dict = dc_field(default_factory=dict)  # name -> (columns, rows, meta)

    def verdict_text(self) -> str:
        lines = [f"experiment: {self.tag}", f"verdict: {'PASS' if self.verdict else 'FAIL'}"]
        for key in sorted(self.tolerances):
            lines.append(f"tolerance {key} = {self.tolerances[key]!r}")
        lines.append(f"config_hash: {self.config_hash}")
        lines.append(f"root_seed: {self.root_seed}")
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, "report.csv"), self.columns, self.stats, meta=self.meta)
        for name, (columns, rows, meta) in self.extra_tables.items():
            write_csv(os.path.join(out_dir, f"{name}.csv"), columns, rows, meta=meta)
        with open(os.path.join(out_dir, "verdict.txt"), "w", encoding="utf-8") as fh:
            fh.write(self.verdict_text())


def ode_reference(x0: float, m: float, t: float) -> float:
    """Closed-form solution of dx/dt = -x^3 + m x.

    For m = 0: x(t) = x0 / sqrt(1 + 2 x0^2 t); the general case is the
    Bernoulli closed form.  Uniformly over initial data, the m = 0 flow obeys
    x(t) <= (2t)^(-1/2).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if x0 == 0.0:
        return 0.0
    if m == 0.0:
        return x0 / math.sqrt(1.0 + 2.0 * x0 * x0 * t)
    e2 = math.exp(2.0 * m * t)
    return x0 * math.exp(m * t) / math.sqrt(1.0 + x0 * x0 * (e2 - 1.0) / m)


def band_limited_profile(grid: TorusGrid, amplitude: float = 1.0) -> Field:
    """Fixed band-limited profile with sup-norm equal to ``amplitude``.

    A small mixture of low modes (levels <= 1), used as the deterministic
    initial-data shape in the experiments.
    """
    xs = grid.coordinates()
    vals = np.cos(np.pi * xs[0]) + 0.4 * np.cos(2.0 * np.pi * xs[0] - 0.7)
    if grid.d >= 2:
        vals = vals + 0.3 * np.cos(np.pi * xs[1] + 0.3)
    if grid.d >= 3:
        vals = vals + 0.2 * np.cos(np.pi * xs[2] - 1.1) * np.cos(np.pi * xs[0])
    vals = vals / np.max(np.abs(vals)) * amplitude
    return Field(grid, values=vals)


def _resolve_c2(cfg: RunConfig, grid: TorusGrid, out_dir: str | None):
    """Wick constants for a run: exact c1, configured or cached or estimated c2."""
    c1 = wick_c1(grid)
    raw = cfg["model.c2"]
    if raw != "auto":
        return c1, float(raw), 0.0
    seed = cfg["ensemble.root_seed"]
    cache_path = os.path.join(out_dir or cfg["output.dir"], "constants.txt")
    hit = load_constants_cache(cache_path, grid.n, grid.d, seed)
    if hit is not None:
        return c1, hit[1], hit[2]
    # fine step: the sampling interval acts as a short-time regularization,
    # so the estimate should resolve correlations near the lattice cutoff
    est = estimate_c2(grid, 16, burn_in=0.3, rng=member_rng(seed, 10_000), horizon=1.0, dt=5e-4)
    save_constants_cache(cache_path, grid.n, grid.d, c1, float(est), est.stderr, seed)
    return c1, float(est), est.stderr


def _model_params(cfg: RunConfig, c: float | None = None) -> ModelParams:
    return ModelParams(
        m=cfg["model.m"],
        c=cfg["model.c"] if c is None else c,
        epsilon=cfg["model.epsilon"],
        p=cfg["model.p"],
        formulation=cfg["model.formulation"],
        cube_sign=float(cfg["model.sign"]),
        com1_massless=cfg["model.com1_massless"],
    )


# -- coming down from infinity -------------------------------------------------


def run_coming_down(cfg: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """Decay from initial amplitudes lambda in a fixed profile.

    Records sqrt(t) * ||X(t)|| in the low-regularity sup-index Besov norm at
    the configured times; the verdict requires the ensemble-median statistic
    for the largest amplitude to stay within ``ratio_tolerance`` of the
    smallest amplitude's, with no blow-up flags raised.
    """
    t0 = time.time()
    grid = make_grid(cfg.d, cfg.n)
    dec = build_dyadic_partition(grid)
    c1, c2, _ = _resolve_c2(cfg, grid, out_dir)
    lambdas = cfg["experiment.lambdas"]
    times = cfg["experiment.times"]
    dt = cfg["time.dt"]
    horizon = cfg["time.horizon"]
    n_steps = int(round(horizon / dt))
    record_idx = [int(round(t / dt)) for t in times]
    ens = cfg["ensemble.size"]
    seed = cfg["ensemble.root_seed"]
    eps = cfg["model.epsilon"]
    bneg = BesovIndex(-0.5 - eps)
    profile = band_limited_profile(grid)
    params = _model_params(cfg)

    deterministic = cfg["experiment.deterministic"]
    if deterministic:
        # spatially homogeneous control governed by the scalar ODE
        ens = 1
        profile = Field.constant(grid, 1.0)
    rows = []
    any_blowup = False
    stats = {}  # (lam, t) -> list of sqrt(t) ||X||
    for lam in lambdas:
        for member in range(ens):
            rng = member_rng(seed, member)
            if deterministic:
                ds = zero_diagrams(grid)
            else:
                ds = initial_diagrams(grid, rng, dec, c2=c2)
            w0 = profile * lam
            state = init_state(Field.zeros(grid), w0, ds, params)
            # record grid aligned with the statistic times
            record_every = math.gcd(*record_idx) if len(record_idx) > 1 else record_idx[0]
            traj = simulate_paracontrolled(
                state, dt, n_steps, rng, dec,
                record_every=max(1, record_every), frozen_diagrams=deterministic,
            )
            any_blowup = any_blowup or traj.blowup
            if traj.blowup:
                continue
            # re-walk is avoided: recorded besov norms are on the record grid;
            # instead sample the statistic directly from recorded series
            for t_target in times:
                idx = int(np.argmin(np.abs(traj.times - t_target)))
                stat = math.sqrt(traj.times[idx]) * traj.x_bneg[idx]
                stats.setdefault((lam, t_target), []).append(stat)
    tol = cfg["experiment.ratio_tolerance"]
    verdict = not any_blowup
    lam_lo, lam_hi = min(lambdas), max(lambdas)
    for t_target in times:
        for lam in lambdas:
            vals = stats.get((lam, t_target), [])
            med = float(np.median(vals)) if vals else math.inf
            rows.append((lam, t_target, med, len(vals)))
    for t_target in times:
        lo = float(np.median(stats.get((lam_lo, t_target), [math.inf])))
        hi = float(np.median(stats.get((lam_hi, t_target), [math.inf])))
        ratio = hi / lo if lo > 0 else math.inf
        rows.append((f"ratio:{lam_hi}/{lam_lo}", t_target, ratio, 0))
        verdict = verdict and ratio <= tol
    return ExperimentReport(
        tag="coming_down",
        columns=("lambda", "t", "median_sqrt_t_xnorm", "count"),
        stats=rows,
        tolerances={"ratio": tol, "blowups": 0},
        verdict=bool(verdict),
        runtime_seconds=time.time() - t0,
        config_hash=cfg.hash(),
        root_seed=seed,
        meta={"reference_exponent": -0.5, "epsilon": eps, "c1": c1, "c2": c2},
    )


# -- formulation consistency ----------------------------------------------------


def _fit_order(dts, dists):
    lx = np.log2(np.asarray(dts, dtype=float))
    ly = np.log2(np.asarray(dists, dtype=float))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def run_consistency(cfg: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """Direct vs reconstructed paracontrolled solution under shared noise.

    Relative sup-distance at the horizon must shrink at first order in dt:
    the fitted convergence order over the configured dt grid must reach the
    configured threshold.
    """
    t0 = time.time()
    grid = make_grid(cfg.d, cfg.n)
    dec = build_dyadic_partition(grid)
    c1, c2, _ = _resolve_c2(cfg, grid, out_dir)
    dts = sorted(cfg["experiment.dts"], reverse=True)
    if len(dts) < 3:
        raise ValueError("consistency needs a dt grid of at least 3 values")
    horizon = cfg["time.horizon"]
    seed = cfg["ensemble.root_seed"]
    params = _model_params(cfg)
    profile = band_limited_profile(grid)
    rows = []
    dists = []
    dt_min = min(dts)
    for dt in dts:
        n_steps = int(round(horizon / dt))
        substeps = int(round(dt / dt_min))  # shared fine noise path across dt levels
        rng_p = member_rng(seed, 0)
        ds0 = initial_diagrams(grid, rng_p, dec, c2=c2)
        w0 = profile * 1.0
        state = init_state(Field.zeros(grid), w0, ds0, params)
        traj_p = simulate_paracontrolled(
            state, dt, n_steps, rng_p, dec, record_every=n_steps, substeps=substeps
        )
        x_para = reconstruct_x(traj_p.final_state)

        rng_d = member_rng(seed, 0)
        ds0_d = initial_diagrams(grid, rng_d, dec, c2=c2)  # consumes the same draw
        x0 = ds0_d.x1 - ds0_d.x30 + w0
        traj_d = simulate_direct(
            x0, dt, n_steps, ds0_d, params.m, rng_d, dec,
            cube_sign=params.cube_sign, record_every=n_steps, substeps=substeps,
        )
        x_dir = traj_d.final_state
        denom = max(1.0, x_dir.max_abs())
        dist = (x_para - x_dir).max_abs() / denom
        dists.append(dist)
        rows.append((dt, dist, traj_p.blowup or traj_d.blowup))
    order = _fit_order(dts, dists)
    rows.append(("fitted_order", order, False))
    threshold = cfg["experiment.order_threshold"]
    verdict = order >= threshold and not any(r[2] for r in rows[:-1])
    return ExperimentReport(
        tag="consistency",
        columns=("dt", "rel_sup_distance", "blowup"),
        stats=rows,
        tolerances={"order_min": threshold},
        verdict=bool(verdict),
        runtime_seconds=time.time() - t0,
        config_hash=cfg.hash(),
        root_seed=seed,
        meta={"horizon": horizon, "c1": c1, "c2": c2},
    )


# -- splitting-constant invariance ----------------------------------------------


def run_c_invariance(cfg: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """The sum v + w must not depend on the splitting constant c.

    For two values of c under identical noise, the sup-distance of v + w at
    the horizon must shrink by a factor 2 (within 20 percent) each time dt
    is halved.
    """
    t0 = time.time()
    grid = make_grid(cfg.d, cfg.n)
    dec = build_dyadic_partition(grid)
    c1, c2, _ = _resolve_c2(cfg, grid, out_dir)
    c_lo, c_hi = cfg["experiment.c_values"][0], cfg["experiment.c_values"][-1]
    dts = sorted(cfg["experiment.dts"], reverse=True)
    horizon = cfg["time.horizon"]
    seed = cfg["ensemble.root_seed"]
    profile = band_limited_profile(grid)
    rows = []
    diffs = []
    dt_min = min(dts)
    for dt in dts:
        n_steps = int(round(horizon / dt))
        substeps = int(round(dt / dt_min))
        sums = []
        for c in (c_lo, c_hi):
            rng = member_rng(seed, 0)
            ds0 = initial_diagrams(grid, rng, dec, c2=c2)
            state = init_state(Field.zeros(grid), profile * 1.0, ds0, _model_params(cfg, c=c))
            traj = simulate_paracontrolled(
                state, dt, n_steps, rng, dec, record_every=n_steps, substeps=substeps
            )
            sums.append(traj.final_state.v + traj.final_state.w)
        diff = (sums[0] - sums[1]).max_abs()
        diffs.append(diff)
        rows.append((dt, diff))
    verdict = True
    for i in range(len(dts) - 1):
        shrink = diffs[i] / diffs[i + 1] if diffs[i + 1] > 0 else math.inf
        rows.append((f"shrink:{dts[i]}/{dts[i+1]}", shrink))
        verdict = verdict and (1.6 <= shrink <= 2.4)
    return ExperimentReport(
        tag="c_invariance",
        columns=("dt", "sum_difference"),
        stats=rows,
        tolerances={"shrink_lo": 1.6, "shrink_hi": 2.4, "c_lo": c_lo, "c_hi": c_hi},
        verdict=bool(verdict),
        runtime_seconds=time.time() - t0,
        config_hash=cfg.hash(),
        root_seed=seed,
        meta={"c1": c1, "c2": c2},
    )


# -- blow-up control -------------------------------------------------------------


def run_blowup_control(cfg: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """Reversed-sign cube must blow up; the damping sign must not.

    Three checks: the deterministic reversed-sign run from constant initial
    data 2 raises the flag before t = 0.2; a reversed-sign noisy ensemble
    flags at least 90 percent of members before the horizon; the
    correct-sign ensemble flags none.
    """
    t0 = time.time()
    grid = make_grid(cfg.d, cfg.n)
    dec = build_dyadic_partition(grid)
    seed = cfg["ensemble.root_seed"]
    dt = cfg["time.dt"]
    horizon = cfg["time.horizon"]
    n_steps = int(round(horizon / dt))
    ens = cfg["ensemble.size"]
    rows = []

    ds0 = zero_diagrams(grid)
    x0 = Field.constant(grid, 2.0)
    traj = simulate_direct(
        x0, dt, n_steps, ds0, 0.0, member_rng(seed, 0), dec,
        cube_sign=+1.0, with_noise=False, record_every=n_steps,
    )
    det_flag_time = traj.blowup_time if traj.blowup else math.inf
    rows.append(("deterministic_wrong_sign", det_flag_time, traj.blowup))
    det_ok = traj.blowup and det_flag_time <= 0.2

    flagged = 0
    for member in range(ens):
        rng = member_rng(seed, member)
        ds = initial_diagrams(grid, rng, dec)
        tr = simulate_direct(
            x0, dt, n_steps, ds, cfg["model.m"], rng, dec,
            cube_sign=+1.0, record_every=n_steps,
        )
        flagged += int(tr.blowup)
    rows.append(("wrong_sign_flag_fraction", flagged / ens, flagged))
    noisy_ok = flagged >= math.ceil(0.9 * ens)

    correct_flagged = 0
    for member in range(ens):
        rng = member_rng(seed, member)
        ds = initial_diagrams(grid, rng, dec)
        tr = simulate_direct(
            x0, dt, n_steps, ds, cfg["model.m"], rng, dec,
            cube_sign=-1.0, record_every=n_steps,
        )
        correct_flagged += int(tr.blowup)
    rows.append(("correct_sign_flag_fraction", correct_flagged / ens, correct_flagged))
    correct_ok = correct_flagged == 0

    verdict = det_ok and noisy_ok and correct_ok
    return ExperimentReport(
        tag="blowup_control",
        columns=("check", "value", "count"),
        stats=rows,
        tolerances={"det_deadline": 0.2, "wrong_sign_min_fraction": 0.9, "correct_sign_max": 0},
        verdict=bool(verdict),
        runtime_seconds=time.time() - t0,
        config_hash=cfg.hash(),
        root_seed=seed,
        meta={"scalar_blowup_time": 0.125},
    )


# -- invariant measure ------------------------------------------------------------


def _batch_means_stderr(series: np.ndarray, n_batches: int = 16):
    m = len(series) // n_batches
    if m == 0:
        raise ValueError("series too short for batch means")
    trimmed = series[: m * n_batches].reshape(n_batches, m)
    means = trimmed.mean(axis=1)
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(n_batches))


def run_invariant_measure(cfg: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """Long-run averages of Wick-corrected observables from two initial data.

    Runs the two-dimensional remainder dynamics from two independent initial
    conditions and seeds; the time averages of the Wick square and Wick
    fourth power over [burn_in, T] must agree within three combined
    batch-means standard errors.
    """
    t0 = time.time()
    if cfg.d != 2:
        cfg = cfg.with_overrides(**{"grid.d": 2})
    grid = make_grid(2, cfg.n)
    dec = build_dyadic_partition(grid)
    c1 = wick_c1(grid)
    dt = cfg["time.dt"]
    t_total = cfg["experiment.t_total"]
    burn_in = max(cfg["time.burn_in"], 1.0)
    n_steps = int(round(t_total / dt))
    burn_steps = int(round(burn_in / dt))
    seed = cfg["ensemble.root_seed"]
    m = cfg["model.m"]
    profile = band_limited_profile(grid)

    results = {}
    trace_rows = []
    trace_every = max(1, n_steps // 2000)
    for run_idx, (seed_off, amp) in enumerate([(0, 0.0), (1, 3.0)]):
        rng = member_rng(seed, seed_off)
        ds = initial_diagrams(grid, rng, dec)
        x_init = profile * amp
        y = x_init - ds.x1
        o2_series, o4_series = [], []
        blow = False
        for i in range(n_steps):
            y, ds = step_dpd2(y, dt, ds, m, rng, dec)
            if not y.is_finite() or y.max_abs() > 1e12:
                blow = True
                break
            if i >= burn_steps:
                xv = (ds.x1 + y).values
                m2 = float(np.mean(xv * xv))
                m4 = float(np.mean(xv**4))
                o2_series.append(m2 - c1)
                o4_series.append(m4 - 6.0 * c1 * m2 + 3.0 * c1 * c1)
                if (i - burn_steps) % trace_every == 0:
                    trace_rows.append(((i + 1) * dt, run_idx, o2_series[-1], o4_series[-1]))
        results[run_idx] = (np.array(o2_series), np.array(o4_series), blow)

    rows = []
    verdict = not (results[0][2] or results[1][2])
    sigmas = {}
    for name, idx in (("wick_x2", 0), ("wick_x4", 1)):
        a_mean, a_se = _batch_means_stderr(results[0][idx])
        b_mean, b_se = _batch_means_stderr(results[1][idx])
        combined = math.hypot(a_se, b_se)
        n_sigma = abs(a_mean - b_mean) / combined if combined > 0 else math.inf
        sigmas[name] = n_sigma
        rows.append((name, a_mean, a_se, b_mean, b_se, n_sigma))
        verdict = verdict and n_sigma <= 3.0
    return ExperimentReport(
        tag="invariant_measure",
        columns=("observable", "mean_run0", "stderr_run0", "mean_run1", "stderr_run1", "n_sigma"),
        stats=rows,
        tolerances={"max_sigma": 3.0, "batches": 16},
        verdict=bool(verdict),
        runtime_seconds=time.time() - t0,
        config_hash=cfg.hash(),
        root_seed=seed,
        meta={"c1": c1, "t_total": t_total, "burn_in": burn_in, "dt": dt},
        extra_tables={
            "traces": (
                ("t", "run", "wick_x2", "wick_x4"),
                trace_rows,
                {"c1": c1, "burn_in": burn_in},
            )
        },
    )


# -- a priori inequality monitor ---------------------------------------------------


def inequality_monitor(traj: Trajectory, which: str, cfg: RunConfig, dec) -> dict:
    """Evaluate one of the a priori estimates along a stored trajectory.

    ``which`` selects the bound: ``apriori_v`` compares the low-regularity
    norm of v against its damped-kernel bound in terms of w; ``apriori_dw``
    compares time increments of w against the eighth-root modulus bound.
    The unknown theorem constants are set to 1, so the returned ratios are
    REPORTED diagnostics, not assertions.
    """
    if which not in ("apriori_v", "apriori_dw"):
        raise ValueError(f"unknown monitor {which!r}")
    snaps = traj.snapshots
    if not snaps:
        raise ValueError("trajectory has no stored snapshots")
    eps = cfg["model.epsilon"]
    p = cfg["model.p"]
    c = cfg["model.c"]
    _, K = regularity_report(traj.diagram_snaps, cfg["experiment.report_epsilon"], dec)
    K = max(K, 1.0)
    times = np.array([s[0] for s in snaps])
    if which == "apriori_v":
        beta = -3.0 * eps
        q = 2.0 * p
        sigma = (beta + 1.0 + eps) / 2.0 + 1.5 * (1.0 / p - 1.0 / q)
        unc = c - 1.0 - (K * math.gamma(1.0 - sigma)) ** (1.0 / (1.0 - sigma))
        idx = BesovIndex(beta, q)
        lhs = np.array([besov_norm(v, idx, dec) for _, v, _, _ in snaps])
        wln = np.array([lp_norm(w, float(p)) for _, _, w, _ in snaps])
        dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
        rhs = np.zeros_like(lhs)
        for i in range(1, len(times)):
            wgt = _singular_weights(i, dt, sigma)
            u = np.arange(i + 1) * dt
            kernel_smooth = K * np.exp(-max(unc, 0.0) * u)
            rhs[i] = wgt[::-1] @ (kernel_smooth[::-1] * (wln[: i + 1] + K))
        ratios = np.where(rhs > 0, lhs / np.maximum(rhs, 1e-300), 0.0)
        ratios[0] = 0.0
        return {
            "which": which, "K": K, "sigma": sigma, "unc": unc,
            "max_ratio": float(ratios.max()), "ratios": ratios, "times": times,
        }
    # apriori_dw
    wfields = [w for _, _, w, _ in snaps]
    b14 = BesovIndex(1.0 + 4.0 * eps, float(p))
    wb = np.array([besov_norm(w, b14, dec) for w in wfields])
    wl3p = np.array([lp_norm(w, 3.0 * p) for w in wfields])
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
    max_ratio = 0.0
    for i in range(len(snaps)):
        for j in range(i + 1, len(snaps)):
            gap = times[j] - times[i]
            lhs = lp_norm(wfields[j] - wfields[i], float(p))
            int_b = (np.sum(wb[: j + 1] ** p) * dt) ** (1.0 / p)
            scale = max(wl3p[: j + 1].max(), 1e-300)
            int_l = scale**3 * (np.sum((wl3p[: j + 1] / scale) ** (3 * p)) * dt) ** (1.0 / p)
            rhs = c * K**7 * gap**0.125 * (1.0 + wb[i] + int_b + int_l)
            if rhs > 0:
                max_ratio = max(max_ratio, lhs / rhs)
    return {"which": which, "K": K, "max_ratio": float(max_ratio), "times": times}


EXPERIMENTS = {
    "coming_down": run_coming_down,
    "consistency": run_consistency,
    "c_invariance": run_c_invariance,
    "blowup_control": run_blowup_control,
    "invariant_measure": run_invariant_measure,
}


def run_experiment(name: str, cfg: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """Run a named experiment and write its report files."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; known: {sorted(EXPERIMENTS)}")
    target = out_dir or os.path.join(cfg["output.dir"], f"{name}-{cfg.hash()}")
    report = EXPERIMENTS[name](cfg, target)
    report.write(target)
    return report
