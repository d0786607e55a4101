import math
import os

import numpy as np
import pytest
from scipy import stats

from phi4field import Field, make_grid, build_dyadic_partition
from phi4field.noise import (
    aggregated_noise_rspec,
    estimate_c2,
    load_constants_cache,
    member_rng,
    ou_stationary_sample,
    ou_update,
    sample_noise_increment,
    save_constants_cache,
    wick_c1,
)


def test_increment_zero_mode_variance():
    # <increment, phi> with phi = 1/2^d has variance dt ||phi||^2 = dt / 2^d
    for d, n in [(1, 16), (2, 16)]:
        g = make_grid(d, n)
        rng = member_rng(5)
        dt = 0.3
        n_samp = 10_000
        means = np.array([sample_noise_increment(g, dt, rng).mean() for _ in range(n_samp)])
        var = means.var()
        target = dt / 2**d
        se = target * math.sqrt(2.0 / n_samp)
        assert abs(var - target) <= 3.0 * se


def test_increment_mean_centered():
    g = make_grid(1, 32)
    rng = member_rng(6)
    dt = 0.1
    n_samp = 10_000
    means = np.array([sample_noise_increment(g, dt, rng).mean() for _ in range(n_samp)])
    se = math.sqrt(dt / 2.0 / n_samp)
    assert abs(means.mean()) <= 3.0 * se


def test_increment_determinism():
    g = make_grid(2, 16)
    a = sample_noise_increment(g, 0.2, member_rng(7))
    b = sample_noise_increment(g, 0.2, member_rng(7))
    c = sample_noise_increment(g, 0.2, member_rng(8))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    with pytest.raises(ValueError):
        sample_noise_increment(g, 0.0, member_rng(9))


def test_ou_pure_decay(monkeypatch):
    import phi4field.noise as noise_mod

    g = make_grid(1, 16)
    monkeypatch.setattr(noise_mod, "unit_rspec", lambda grid, rng: np.zeros(grid.rshape, dtype=complex))
    x = Field.constant(g, 2.0)
    out = ou_update(x, 0.5, member_rng(0))
    # zero mode decays at rate lambda = 1
    assert out.values.mean() == pytest.approx(2.0 * math.exp(-0.5), rel=1e-12)


def test_ou_stationary_variance_large_dt():
    g = make_grid(1, 16)
    rng = member_rng(11)
    x = Field.zeros(g)
    acc = np.zeros(g.rshape)
    n_samp = 4000
    for _ in range(n_samp):
        x = ou_update(x, 50.0, rng)  # essentially fresh stationary draws
        from phi4field.grid import field_rspec

        acc += np.abs(field_rspec(x)) ** 2
    lam = g.zeta2_r + 1.0
    target = 1.0 / (2.0 * lam * g.volume)
    ratio = (acc / n_samp) / target
    assert ratio.min() > 0.85 and ratio.max() < 1.15


def test_ou_preserves_stationary_law_ks():
    # KS test on per-mode real parts over 10^3 well-separated steps
    g = make_grid(1, 32)
    rng = member_rng(13)
    x = ou_stationary_sample(g, rng)
    draws = []
    for _ in range(1000):
        x = ou_update(x, 5.0, rng)
        draws.append(x.spectrum.copy())
    draws = np.array(draws)
    lam = g.zeta2 + 1.0
    passes = 0
    total = 0
    for k in range(g.n):
        series = draws[:, k].real
        std = math.sqrt(1.0 / (2.0 * lam.flat[k] * g.volume))
        if k in (0, g.n // 2):
            sigma = std  # self-conjugate modes are real with full variance
        else:
            sigma = std / math.sqrt(2.0)  # real part carries half the variance
        _, pval = stats.kstest(series / sigma, "norm")
        total += 1
        passes += int(pval > 0.01)
    assert passes / total >= 0.95


def test_wick_c1_matches_monte_carlo():
    for d, n in [(1, 64), (2, 32)]:
        g = make_grid(d, n)
        rng = member_rng(17)
        c1 = wick_c1(g)
        n_samp = 3000
        est = np.array([(ou_stationary_sample(g, rng).values ** 2).mean() for _ in range(n_samp)])
        se = est.std(ddof=1) / math.sqrt(n_samp)
        assert abs(est.mean() - c1) <= 3.0 * se


def test_wick_c1_grows_with_cutoff_d3():
    c16 = wick_c1(make_grid(3, 16))
    c32 = wick_c1(make_grid(3, 32))
    assert c32 > c16


def test_wick_c1_linear_growth_d3():
    ns = [16, 32, 64]
    vals = [wick_c1(make_grid(3, n)) for n in ns]
    slope, _ = np.polyfit(np.log(ns), np.log(vals), 1)
    assert abs(slope - 1.0) <= 0.15


def test_aggregated_noise_is_refinement_consistent():
    # an OU path stepped at dt with substeps k equals the path stepped at
    # dt/k with the same generator, exactly
    g = make_grid(1, 16)
    x0 = ou_stationary_sample(g, member_rng(23))
    coarse = x0
    rng_c = member_rng(29)
    for _ in range(3):
        coarse = ou_update(coarse, 0.4, rng_c, substeps=4)
    fine = x0
    rng_f = member_rng(29)
    for _ in range(12):
        fine = ou_update(fine, 0.1, rng_f)
    assert (coarse - fine).max_abs() < 1e-12


def test_aggregated_noise_zero_rate_variance():
    g = make_grid(1, 16)
    rng = member_rng(31)
    rate = np.zeros(g.rshape)
    n_samp = 4000
    dt = 0.25
    acc = 0.0
    for _ in range(n_samp):
        spec = aggregated_noise_rspec(g, rate, dt, 4, rng)
        acc += abs(spec.flat[0]) ** 2
    target = dt / g.volume
    assert acc / n_samp == pytest.approx(target, rel=0.1)


@pytest.mark.slow
def test_estimate_c2_clt_scaling():
    # reported standard error shrinks like 1/sqrt(ensemble): compare disjoint
    # 16-member group errors against the pooled 64-member error
    g = make_grid(1, 64)
    est = estimate_c2(g, 64, burn_in=0.5, rng=member_rng(37), horizon=2.0, dt=0.02)
    mm = est.member_means
    groups = mm.reshape(4, 16)
    se16 = float(groups.std(ddof=1, axis=1).mean()) / 4.0
    se64 = float(mm.std(ddof=1)) / 8.0
    ratio = se16 / se64
    assert 1.4 <= ratio <= 2.6  # factor 2 within +-30 percent
    # the two estimators agree within a few combined errors
    assert abs(est.time_average - float(est)) <= 6.0 * max(est.stderr, 1e-6)


def test_estimate_c2_matches_exact_mode_sum():
    from phi4field.noise import wick_c2_exact

    g = make_grid(2, 16)
    dec = build_dyadic_partition(g)
    exact = wick_c2_exact(g, dec, dt=0.02, burn_in=0.5, horizon=1.5)
    mc = estimate_c2(g, 48, burn_in=0.5, rng=member_rng(77), horizon=1.5, dt=0.02)
    assert abs(float(mc) - exact) <= 3.0 * mc.stderr


@pytest.mark.slow
def test_c2_grows_with_cutoff_d3():
    # log-type divergence: the exact lattice value grows with n once the
    # sampling step resolves correlations near the lattice cutoff
    from phi4field.noise import wick_c2_exact

    vals = {}
    for n in (16, 32):
        g = make_grid(3, n)
        dec = build_dyadic_partition(g)
        vals[n] = wick_c2_exact(g, dec, dt=2.5e-4)
    assert vals[32] > vals[16]
    # and at a coarse step the time regularization dominates: no growth
    coarse16 = wick_c2_exact(make_grid(3, 16), build_dyadic_partition(make_grid(3, 16)), dt=0.02, burn_in=0.5, horizon=1.5)
    assert vals[16] > coarse16


def test_estimate_c2_rejects_small_ensemble():
    g = make_grid(1, 16)
    with pytest.raises(ValueError):
        estimate_c2(g, 8, burn_in=0.1, rng=member_rng(0), horizon=1.0)


def test_centering_zeroes_the_resonant_mean():
    # after centering with the estimated constant, the spatial-ensemble mean
    # of the centered resonant diagram is near zero
    from phi4field.besov import resonant_prod
    from phi4field.grid import Field as F

    g = make_grid(2, 16)
    dec = build_dyadic_partition(g)
    rng = member_rng(41)
    est = estimate_c2(g, 24, burn_in=0.4, rng=rng, horizon=1.2, dt=0.02)
    # fresh ensemble with that constant
    c1 = wick_c1(g)
    means = []
    rng2 = member_rng(43)
    for _ in range(24):
        x1 = ou_stationary_sample(g, rng2)
        x2 = x1 * x1 - c1
        x20 = F.zeros(g)
        from phi4field.grid import apply_heat_semigroup, apply_phi1_weight

        for _ in range(60):
            x2 = x1 * x1 - c1
            x20 = apply_heat_semigroup(x20, 0.02) + apply_phi1_weight(x2, 0.02) * 0.02
            x1 = ou_update(x1, 0.02, rng2)
        x22 = resonant_prod(x20, x1 * x1 - c1, dec) - float(est)
        means.append(x22.mean())
    se = np.std(means, ddof=1) / math.sqrt(len(means))
    assert abs(np.mean(means)) <= 4.0 * max(se, est.stderr)


def test_constants_cache_roundtrip(tmp_path):
    path = os.path.join(tmp_path, "constants.txt")
    assert load_constants_cache(path, 16, 3, 99) is None
    save_constants_cache(path, 16, 3, 0.77, 0.025, 0.003, 99)
    save_constants_cache(path, 32, 3, 1.5, 0.04, 0.004, 99)
    hit = load_constants_cache(path, 16, 3, 99)
    assert hit == (0.77, 0.025, 0.003)
    assert load_constants_cache(path, 16, 3, 100) is None
    assert load_constants_cache(path, 32, 3, 99) == (1.5, 0.04, 0.004)


def test_member_streams_differ():
    g = make_grid(1, 16)
    a = ou_stationary_sample(g, member_rng(1, 0))
    b = ou_stationary_sample(g, member_rng(1, 1))
    assert not np.array_equal(a.values, b.values)
