import math

import numpy as np
import pytest

from phi4field import (
    Field,
    apply_heat_semigroup,
    apply_phi1_weight,
    build_dyadic_partition,
    make_grid,
    resonant_prod,
)
from phi4field.diagrams import (
    DIAGRAM_EXPONENTS,
    evolve_diagrams,
    initial_diagrams,
    regularity_report,
    zero_diagrams,
)
from phi4field.noise import member_rng


def _setup(d=2, n=16, seed=1, c2=0.07):
    g = make_grid(d, n)
    dec = build_dyadic_partition(g)
    rng = member_rng(seed)
    ds = initial_diagrams(g, rng, dec, c2=c2)
    return g, dec, rng, ds


def _check_identities(ds, dec, tol=1e-10):
    scale = max(1.0, ds.x1.max_abs())
    assert (ds.x2 - (ds.x1 * ds.x1 - ds.c1)).max_abs() <= tol * scale**2
    assert (ds.x3 - (ds.x1 * ds.x1 * ds.x1 - 3.0 * ds.c1 * ds.x1)).max_abs() <= tol * scale**3
    assert (ds.x31 - resonant_prod(ds.x30, ds.x1, dec)).max_abs() <= tol
    assert (ds.x32 - (resonant_prod(ds.x30, ds.x2, dec) - 3.0 * ds.c2 * ds.x1)).max_abs() <= tol
    assert (ds.x22 - (resonant_prod(ds.x20, ds.x2, dec) - ds.c2)).max_abs() <= tol


def test_initial_diagrams_identities_and_zero_integrals():
    g, dec, _, ds = _setup()
    assert ds.x20.max_abs() == 0.0
    assert ds.x30.max_abs() == 0.0
    assert ds.t == 0.0
    _check_identities(ds, dec)


def test_identities_hold_after_every_step():
    g, dec, rng, ds = _setup()
    for _ in range(10):
        ds = evolve_diagrams(ds, 0.01, rng, dec)
        _check_identities(ds, dec)
    assert ds.t == pytest.approx(0.1)


def test_heat_integral_zero_mode_accumulates_exactly():
    # with a frozen constant source the zero mode of the heat integral is
    # kappa * T exactly (the zero-mode weight is dt * phi1(0) = dt)
    g = make_grid(1, 16)
    kappa = 0.7
    src = Field.constant(g, kappa)
    x20 = Field.zeros(g)
    dt, n_steps = 0.01, 40
    for _ in range(n_steps):
        x20 = apply_heat_semigroup(x20, dt) + apply_phi1_weight(src, dt) * dt
    assert x20.values.mean() == pytest.approx(kappa * dt * n_steps, rel=1e-13)


def test_evolve_zero_mode_increment_matches_source_mean():
    g, dec, rng, ds = _setup(seed=3)
    dt = 0.02
    before = ds.x20.values.mean()
    src_mean = ds.x2.values.mean()
    after = evolve_diagrams(ds, dt, rng, dec).x20.values.mean()
    assert after - before == pytest.approx(dt * src_mean, rel=1e-10, abs=1e-14)


def test_determinism_bit_identical():
    g, dec, _, _ = _setup(seed=9)
    out = []
    for _ in range(2):
        rng = member_rng(123)
        ds = initial_diagrams(g, rng, dec, c2=0.01)
        for _ in range(5):
            ds = evolve_diagrams(ds, 0.01, rng, dec)
        out.append(ds)
    for tag in DIAGRAM_EXPONENTS:
        assert np.array_equal(out[0].fields()[tag].values, out[1].fields()[tag].values)


def test_x30_time_regularity_statistic_is_finite():
    g, dec, rng, ds = _setup(d=2, n=16, seed=5)
    snaps = []
    for i in range(40):
        ds = evolve_diagrams(ds, 0.01, rng, dec)
        if i % 5 == 0:
            snaps.append((ds.t, ds.x30))
    worst = 0.0
    for i, (s, xs) in enumerate(snaps):
        for t, xt in snaps[i + 1:]:
            worst = max(worst, (xt - xs).max_abs() / (t - s) ** 0.125)
    assert math.isfinite(worst) and worst > 0.0


def test_regularity_report_exponents_table():
    g, dec, rng, ds = _setup()
    rows, K = regularity_report([ds], 0.05, dec)
    assert [round(r.alpha_tau, 10) for r in rows] == [-0.55, -1.05, 0.45, -0.05, -0.55, -0.05]
    assert K == max(r.measured_norm for r in rows)
    assert K > 0


def test_regularity_report_zero_trajectory():
    g = make_grid(1, 16)
    dec = build_dyadic_partition(g)
    rows, K = regularity_report([zero_diagrams(g)], 0.1, dec)
    assert K == 0.0
    assert all(r.measured_norm == 0.0 for r in rows)


def test_regularity_report_validations():
    g = make_grid(1, 16)
    dec = build_dyadic_partition(g)
    with pytest.raises(ValueError):
        regularity_report([], 0.05, dec)
    with pytest.raises(ValueError):
        regularity_report([zero_diagrams(g)], 0.3, dec)


@pytest.mark.slow
def test_regularity_cutoff_stability():
    # reported norms change by less than a factor 2 between n = 16 and n = 32;
    # the step must resolve correlations near the finer lattice cutoff
    eps = 0.05
    dt = 5e-4
    sups = {}
    for n in (16, 32):
        g = make_grid(3, n)
        dec = build_dyadic_partition(g)
        rng = member_rng(21)
        ds = initial_diagrams(g, rng, dec, c2=0.006)
        traj = []
        for i in range(1400):
            ds = evolve_diagrams(ds, dt, rng, dec)
            if ds.t > 0.35 and i % 100 == 0:
                traj.append(ds)
        rows, _ = regularity_report(traj, eps, dec)
        sups[n] = {r.tag: r.measured_norm for r in rows}
    for tag in DIAGRAM_EXPONENTS:
        ratio = sups[32][tag] / sups[16][tag]
        assert 0.5 <= ratio <= 2.0, (tag, ratio)


def test_evolve_rejects_bad_dt():
    g, dec, rng, ds = _setup()
    with pytest.raises(ValueError):
        evolve_diagrams(ds, 0.0, rng, dec)
