"""Command line entry points.

Subcommands: simulate, diagrams, besov-test, gronwall, harness, version.
Exit codes: 0 on success, 1 when an experiment verdict is FAIL, 2 on usage
or configuration errors.
"""

from __future__ import annotations

import math
import os
import sys

import numpy as np

from . import __version__
from .besov import BesovIndex, besov_norm, build_dyadic_partition
from .config import ConfigError, RunConfig, parse_config_file
from .diagrams import initial_diagrams, evolve_diagrams, regularity_report
from .fieldio import write_csv, write_field_snapshot
from .grid import make_grid
from .gronwall import measured_growth_rate, series_growth_rate
from .harness import EXPERIMENTS, band_limited_profile, run_experiment, _resolve_c2, _model_params
from .inequalities import fit_inequality_exponent
from .noise import member_rng
from .solver import init_state, reconstruct_x, simulate_direct, simulate_paracontrolled, step_dpd2
from .grid import Field

USAGE = """\
usage: phi4 <subcommand> [options]

subcommands:
  simulate   --config FILE [--out DIR]    run one trajectory per the config
  diagrams   --config FILE [--out DIR]    evolve diagrams, emit regularity report
  besov-test [--config FILE] [--out DIR]  inequality exponent fits
  gronwall   [--out DIR]                  kernel asymptotics table
  harness    --config FILE --experiment NAME [--out DIR]
  version                                  print version

exit codes: 0 success, 1 experiment FAIL, 2 usage/config error
"""


def _parse_flags(args):
    flags = {}
    it = iter(args)
    for tok in it:
        if not tok.startswith("--"):
            raise ValueError(f"unexpected argument {tok!r}")
        key = tok[2:]
        try:
            flags[key] = next(it)
        except StopIteration:
            raise ValueError(f"flag --{key} needs a value") from None
    return flags


def _load_config(flags) -> RunConfig:
    path = flags.get("config")
    if not path:
        raise ConfigError("missing --config FILE")
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    return parse_config_file(path)


def _cmd_simulate(flags) -> int:
    cfg = _load_config(flags)
    out = flags.get("out") or os.path.join(cfg["output.dir"], f"simulate-{cfg.hash()}")
    os.makedirs(out, exist_ok=True)
    grid = make_grid(cfg.d, cfg.n)
    dec = build_dyadic_partition(grid)
    dt = cfg["time.dt"]
    n_steps = int(round(cfg["time.horizon"] / dt))
    seed = cfg["ensemble.root_seed"]
    snap_steps = int(round(cfg["time.snapshot_every"] / dt)) if cfg["time.snapshot_every"] > 0 else 0
    formulation = cfg["model.formulation"]
    params = _model_params(cfg)
    rng = member_rng(seed, 0)
    rows = []
    eps = cfg["model.epsilon"]
    bneg = BesovIndex(-0.5 - eps)
    blow = False

    if formulation == "paracontrolled":
        c1, c2, _ = _resolve_c2(cfg, grid, out)
        ds = initial_diagrams(grid, rng, dec, c2=c2)
        state = init_state(Field.zeros(grid), band_limited_profile(grid), ds, params)
        traj = simulate_paracontrolled(
            state, dt, n_steps, rng, dec,
            snapshot_every=snap_steps, record_every=max(1, n_steps // 200),
        )
        for i, t in enumerate(traj.times):
            rows.append((t, traj.v_inf[i], traj.w_inf[i], traj.x_inf[i], traj.x_bneg[i], int(traj.blowup and t == traj.times[-1])))
        for j, (t, v, w, x) in enumerate(traj.snapshots):
            write_field_snapshot(x, os.path.join(out, f"x_{j:04d}.fld"))
        blow = traj.blowup
    elif formulation == "direct":
        c1, c2, _ = _resolve_c2(cfg, grid, out)
        ds = initial_diagrams(grid, rng, dec, c2=c2)
        x0 = ds.x1 - ds.x30 + band_limited_profile(grid)
        traj = simulate_direct(
            x0, dt, n_steps, ds, cfg["model.m"], rng, dec,
            cube_sign=float(cfg["model.sign"]), snapshot_every=snap_steps,
            record_every=max(1, n_steps // 200),
        )
        for i, t in enumerate(traj.times):
            rows.append((t, 0.0, 0.0, traj.x_inf[i], traj.x_bneg[i], int(traj.blowup and t == traj.times[-1])))
        for j, (t, _, _, x) in enumerate(traj.snapshots):
            write_field_snapshot(x, os.path.join(out, f"x_{j:04d}.fld"))
        blow = traj.blowup
    else:  # dpd2
        ds = initial_diagrams(grid, rng, dec)
        y = band_limited_profile(grid) - ds.x1
        t = 0.0
        rec = max(1, n_steps // 200)
        for i in range(1, n_steps + 1):
            y, ds = step_dpd2(y, dt, ds, cfg["model.m"], rng, dec, cube_sign=float(cfg["model.sign"]))
            t = i * dt
            x = ds.x1 + y
            if not x.is_finite() or x.max_abs() > 1e12:
                blow = True
                rows.append((t, 0.0, y.max_abs(), x.max_abs(), math.inf, 1))
                break
            if i % rec == 0 or i == n_steps:
                rows.append((t, 0.0, y.max_abs(), x.max_abs(), besov_norm(x, bneg, dec), 0))
            if snap_steps and i % snap_steps == 0:
                write_field_snapshot(x, os.path.join(out, f"x_{i:08d}.fld"))
    write_csv(
        os.path.join(out, "trajectory.csv"),
        ("t", "v_inf", "w_inf", "x_inf", "x_besov_neg", "blowup_flag"),
        rows,
        meta={"formulation": formulation, "dt": dt, "seed": seed, "epsilon": eps},
    )
    print(f"wrote {out}/trajectory.csv ({len(rows)} rows, blowup={blow})")
    return 0


def _cmd_diagrams(flags) -> int:
    cfg = _load_config(flags)
    out = flags.get("out") or os.path.join(cfg["output.dir"], f"diagrams-{cfg.hash()}")
    os.makedirs(out, exist_ok=True)
    grid = make_grid(cfg.d, cfg.n)
    dec = build_dyadic_partition(grid)
    c1, c2, _ = _resolve_c2(cfg, grid, out)
    rng = member_rng(cfg["ensemble.root_seed"], 0)
    ds = initial_diagrams(grid, rng, dec, c2=c2)
    dt = cfg["time.dt"]
    n_steps = int(round(cfg["time.horizon"] / dt))
    burn_steps = int(round(cfg["time.burn_in"] / dt))
    keep = []
    for i in range(n_steps):
        ds = evolve_diagrams(ds, dt, rng, dec)
        if i >= burn_steps and (i % max(1, n_steps // 64) == 0 or i == n_steps - 1):
            keep.append(ds)
    eps = cfg["experiment.report_epsilon"]
    rows_rr, K = regularity_report(keep, eps, dec)
    rows = [(r.tag, r.alpha_tau, r.measured_norm) for r in rows_rr]
    write_csv(
        os.path.join(out, "regularity.csv"),
        ("diagram", "alpha_tau", "measured_norm"),
        rows,
        meta={"epsilon": eps, "K": K, "n": cfg.n, "d": cfg.d, "c1": c1, "c2": c2},
    )
    print(f"wrote {out}/regularity.csv (K = {K:.6g})")
    return 0


def _cmd_besov_test(flags) -> int:
    if flags.get("config"):
        cfg = _load_config(flags)
        seed = cfg["ensemble.root_seed"]
        out = flags.get("out") or os.path.join(cfg["output.dir"], f"besov-{cfg.hash()}")
    else:
        seed = 2024
        out = flags.get("out") or "runs/besov"
    os.makedirs(out, exist_ok=True)
    rows = []
    for diff in (0.5, 1.0, 1.5):
        res = fit_inequality_exponent("heat_smoothing", 8, seed, alpha=diff, beta=0.0, p=2.0)
        rows.extend(res.csv_rows())
    rows.extend(fit_inequality_exponent("interpolation", 32, seed).csv_rows())
    rows.extend(fit_inequality_exponent("para_lt", 16, seed, alpha=-0.4, beta=0.9).csv_rows())
    rows.extend(fit_inequality_exponent("resonant", 16, seed, alpha=0.6, beta=-0.3).csv_rows())
    rows.extend(fit_inequality_exponent("embedding", 16, seed, alpha=0.0, p=2.0).csv_rows())
    rows.extend(fit_inequality_exponent("sobolev", 16, seed, alpha=0.5, p=2.0).csv_rows())
    rows.extend(fit_inequality_exponent("sobolev", 16, seed, alpha=1.0, p=2.0).csv_rows())
    write_csv(
        os.path.join(out, "inequalities.csv"),
        ("inequality_tag", "param", "fitted_exponent", "worst_constant", "n", "seed"),
        rows,
    )
    print(f"wrote {out}/inequalities.csv ({len(rows)} rows)")
    return 0


def _cmd_gronwall(flags) -> int:
    out = flags.get("out") or "runs/gronwall"
    os.makedirs(out, exist_ok=True)
    rows = []
    for sigma in (0.3, 0.5, 0.7):
        target = series_growth_rate(sigma)
        for s in (5.0, 10.0, 25.0, 50.0):
            rate = measured_growth_rate(s, sigma)
            rows.append((sigma, s, rate, target, abs(rate - target) / target))
    write_csv(
        os.path.join(out, "gronwall.csv"),
        ("sigma", "s", "series_rate", "asymptotic_target", "relative_error"),
        rows,
    )
    print(f"wrote {out}/gronwall.csv")
    return 0


def _cmd_harness(flags) -> int:
    cfg = _load_config(flags)
    name = flags.get("experiment")
    if not name:
        raise ConfigError("missing --experiment NAME")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; known: {sorted(EXPERIMENTS)}")
    out = flags.get("out")
    report = run_experiment(name, cfg, out)
    print(f"{name}: {'PASS' if report.verdict else 'FAIL'} ({report.runtime_seconds:.1f}s)")
    return 0 if report.verdict else 1


def main(argv=None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        sys.stderr.write(USAGE)
        return 2
    cmd, rest = args[0], args[1:]
    if cmd == "version":
        print(__version__)
        return 0
    handlers = {
        "simulate": _cmd_simulate,
        "diagrams": _cmd_diagrams,
        "besov-test": _cmd_besov_test,
        "gronwall": _cmd_gronwall,
        "harness": _cmd_harness,
    }
    if cmd not in handlers:
        sys.stderr.write(f"unknown subcommand {cmd!r}\n" + USAGE)
        return 2
    try:
        flags = _parse_flags(rest)
        return handlers[cmd](flags)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
