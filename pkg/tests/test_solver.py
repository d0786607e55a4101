import math

import numpy as np
import pytest

from phi4field import Field, build_dyadic_partition, make_grid
from phi4field.diagrams import evolve_diagrams, initial_diagrams, zero_diagrams
from phi4field.noise import member_rng
from phi4field.solver import (
    ModelParams,
    SolverState,
    build_coefficients,
    com1,
    com2,
    energy_balance_residual,
    init_state,
    is_blown_up,
    reconstruct_x,
    renormalized_mass,
    rhs_F,
    rhs_G,
    simulate_direct,
    simulate_paracontrolled,
    step_direct,
    step_dpd2,
    step_paracontrolled,
    xnorm_diagnostics,
)
from phi4field.solver import _coefficient_values, _paracontrolled_rhs_values
from phi4field.harness import ode_reference


def _rand_field(grid, seed, scale=0.3):
    rng = np.random.default_rng(seed)
    return Field.from_values(grid, scale * rng.standard_normal(grid.shape))


def _diagram_setup(d=2, n=16, seed=7, c2=0.05, steps=5):
    g = make_grid(d, n)
    dec = build_dyadic_partition(g)
    rng = member_rng(seed)
    ds = initial_diagrams(g, rng, dec, c2=c2)
    for _ in range(steps):
        ds = evolve_diagrams(ds, 0.01, rng, dec)
    return g, dec, rng, ds


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(p=23)
    with pytest.raises(ValueError):
        ModelParams(p=22)
    with pytest.raises(ValueError):
        ModelParams(epsilon=0.01)
    with pytest.raises(ValueError):
        ModelParams(c=-1.0)
    with pytest.raises(ValueError):
        ModelParams(formulation="spectral")


def test_coefficients_zero_diagrams():
    g = make_grid(1, 16)
    dec = build_dyadic_partition(g)
    ds = zero_diagrams(g)
    coeffs = build_coefficients(ds, 2.0, dec)
    assert coeffs.a0.max_abs() == 0.0
    assert (coeffs.a1 - 2.0).max_abs() == 0.0
    assert coeffs.a2.max_abs() == 0.0


def test_coefficients_identities():
    g, dec, _, ds = _diagram_setup()
    coeffs = build_coefficients(ds, 2.0, dec)
    # quadratic coefficient identity, exact
    target = (ds.x30 - ds.x1) * 3.0
    assert (coeffs.a2 - target).max_abs() <= 1e-12 * max(1.0, ds.x1.max_abs())
    # linearity of a0 in the mass parameter
    c0 = build_coefficients(ds, 0.0, dec)
    diff = coeffs.a0 - c0.a0
    expected = (ds.x1 - ds.x30) * 2.0
    assert (diff - expected).max_abs() <= 1e-11
    # collapsed fast assembly agrees with the literal paraproduct assembly
    a0f, a1f, a2f = _coefficient_values(ds, 2.0)
    assert np.abs(coeffs.a0.values - a0f).max() <= 1e-10
    assert np.abs(coeffs.a1.values - a1f).max() <= 1e-10
    assert np.abs(coeffs.a2.values - a2f).max() <= 1e-10


def test_rhs_F_structure():
    g, dec, _, ds = _diagram_setup()
    v, w = _rand_field(g, 1), _rand_field(g, 2)
    # cancellation when v + w equals the integrated cube
    out = rhs_F(ds.x30 - w, w, ds, dec)
    assert out.max_abs() <= 1e-12
    # zero source
    ds0 = zero_diagrams(g)
    assert rhs_F(v, w, ds0, dec).max_abs() == 0.0
    # depends on (v, w) only through the sum
    a = rhs_F(v, w, ds, dec)
    b = rhs_F(v + w, Field.zeros(g), ds, dec)
    assert (a - b).max_abs() <= 1e-12


def test_com1_examples():
    g, dec, rng, ds = _diagram_setup()
    params = ModelParams(c=0.0)
    v0, w0 = _rand_field(g, 3), _rand_field(g, 4)
    ds0 = initial_diagrams(g, member_rng(11), dec, c2=0.0)  # x20 = 0 at t = 0
    state = init_state(v0, w0, ds0, params)
    out = com1(state, dec)
    assert (out - v0).max_abs() <= 1e-12  # x20 vanishes at the initial time
    # c = 0: the auxiliary field tracks v exactly along the run
    st = state
    for _ in range(5):
        st = step_paracontrolled(st, 0.01, rng, dec)
    assert (st.z - st.v).max_abs() <= 1e-12
    from phi4field.besov import paraproduct_lt

    expected = st.v + paraproduct_lt(st.v + st.w - st.diagrams.x30, st.diagrams.x20, dec) * 3.0
    assert (com1(st, dec) - expected).max_abs() <= 1e-12
    # everything zero
    z = Field.zeros(g)
    zs = init_state(z, z, zero_diagrams(g), params)
    assert com1(zs, dec).max_abs() == 0.0


def test_com2_examples():
    g, dec, _, ds = _diagram_setup()
    v, w = _rand_field(g, 5), _rand_field(g, 6)
    params = ModelParams()
    ds_nox20 = initial_diagrams(g, member_rng(13), dec, c2=0.0)
    st = init_state(v, w, ds_nox20, params)
    assert com2(st, dec).max_abs() <= 1e-13  # x20 = 0
    st2 = init_state(ds.x30 - w, w, ds, params)
    assert com2(st2, dec).max_abs() <= 1e-12  # first slot vanishes
    # linearity in the first slot
    st_a = SolverState(t=0.0, v=v, w=w, z=v, diagrams=ds, params=params)
    base = com2(st_a, dec)
    v2 = ds.x30 - w + (v + w - ds.x30) * 2.0  # doubles v + w - x30
    st_b = SolverState(t=0.0, v=v2, w=w, z=v2, diagrams=ds, params=params)
    assert (com2(st_b, dec) - base * 2.0).max_abs() <= 1e-11 * max(1.0, base.max_abs())


def test_rhs_G_reductions():
    g = make_grid(1, 32)
    dec = build_dyadic_partition(g)
    ds = zero_diagrams(g)
    params = ModelParams(m=0.0, c=0.0)
    w = _rand_field(g, 7, scale=1.0)
    st = init_state(Field.zeros(g), w, ds, params)
    coeffs = build_coefficients(ds, 0.0, dec)
    out = rhs_G(st, coeffs, dec)
    assert (out - Field.from_values(g, -w.values**3)).max_abs() <= 1e-12
    # w = -v with zero diagrams reduces to the constant coefficient
    v = _rand_field(g, 8)
    st2 = init_state(v, -v, ds, params)
    out2 = rhs_G(st2, coeffs, dec)
    assert (out2 - coeffs.a0).max_abs() <= 1e-12
    # synthetic linear coefficient: G(0, w) = -w^3 + kappa w
    from phi4field.solver import Coefficients

    kappa = 1.7
    synth = Coefficients(a0=Field.zeros(g), a1=Field.constant(g, kappa), a2=Field.zeros(g))
    out3 = rhs_G(st, synth, dec)
    expected = Field.from_values(g, -w.values**3 + kappa * w.values)
    assert (out3 - expected).max_abs() <= 1e-12


def test_fast_rhs_matches_literal_assembly():
    g, dec, _, ds = _diagram_setup(d=3, n=16, seed=17)
    for massless in (False, True):
        params = ModelParams(m=1.3, c=2.0, com1_massless=massless)
        v, w = _rand_field(g, 1), _rand_field(g, 2, scale=0.5)
        z = v if not massless else _rand_field(g, 3, scale=0.2)
        st = SolverState(t=0.1, v=v, w=w, z=z, diagrams=ds, params=params)
        F_fast, Gcv_fast = _paracontrolled_rhs_values(st, dec)
        coeffs = build_coefficients(ds, params.m, dec)
        G_lit = rhs_G(st, coeffs, dec)
        F_lit = rhs_F(v, w, ds, dec)
        scale = max(1.0, np.abs(Gcv_fast).max())
        assert np.abs(F_fast - F_lit.values).max() <= 1e-10
        assert np.abs(Gcv_fast - (G_lit.values + params.c * v.values)).max() <= 1e-10 * scale


def test_one_step_scalar_arithmetic():
    # pure cube flow, zero mode: one exponential-Euler step from 1 with
    # dt = 0.01 gives 1 - 0.01
    g = make_grid(1, 32)
    dec = build_dyadic_partition(g)
    st = init_state(Field.zeros(g), Field.constant(g, 1.0), zero_diagrams(g), ModelParams(m=0.0, c=0.0))
    out = step_paracontrolled(st, 0.01, member_rng(0), dec, frozen_diagrams=True)
    assert out.w.values.mean() == pytest.approx(0.99, rel=1e-12)


def test_step_determinism():
    g, dec, _, _ = _diagram_setup(d=2, n=16)
    outs = []
    for _ in range(2):
        rng = member_rng(55)
        ds = initial_diagrams(g, rng, dec, c2=0.01)
        st = init_state(Field.zeros(g), _rand_field(g, 9), ds, ModelParams())
        for _ in range(4):
            st = step_paracontrolled(st, 5e-3, rng, dec)
        outs.append(st)
    assert np.array_equal(outs[0].v.values, outs[1].v.values)
    assert np.array_equal(outs[0].w.values, outs[1].w.values)


def test_renormalized_mass_arithmetic():
    assert renormalized_mass(1.0, 2.0, 0.3) == pytest.approx(4.3)


def test_direct_matches_ode_reference():
    g = make_grid(1, 32)
    ds = zero_diagrams(g)
    x = Field.constant(g, 1.0)
    dt = 1e-3
    rng = member_rng(1)
    for _ in range(500):
        x = step_direct(x, dt, ds, 0.0, rng, with_noise=False)
    exact = ode_reference(1.0, 0.0, 0.5)
    assert abs(x.values.mean() - exact) <= 5.0 * dt  # first-order error


def test_direct_wrong_sign_blows_up_near_closed_form():
    g = make_grid(1, 32)
    ds = zero_diagrams(g)
    x = Field.constant(g, 2.0)
    dt = 1e-3
    rng = member_rng(2)
    blow_t = None
    for i in range(500):
        x = step_direct(x, dt, ds, 0.0, rng, cube_sign=+1.0, with_noise=False)
        if is_blown_up(x):
            blow_t = (i + 1) * dt
            break
    assert blow_t is not None and blow_t <= 0.2  # scalar blow-up at 1/8


def test_dpd2_reductions_and_guards():
    g = make_grid(2, 16)
    dec = build_dyadic_partition(g)
    ds = zero_diagrams(g)
    rng = member_rng(3)
    # zero diagrams: cube flow, same closed form as the direct equation
    y = Field.constant(g, 1.0)
    dt = 1e-3
    for _ in range(500):
        y, ds = step_dpd2(y, dt, ds, 0.0, rng, dec)
        ds = zero_diagrams(g)  # keep sources frozen at zero
    assert abs(y.values.mean() - ode_reference(1.0, 0.0, 0.5)) <= 5.0 * dt
    # a pure cube source moves the zero mode by -dt * mean(x3) in one step
    from dataclasses import replace

    src = _rand_field(g, 10)
    ds_x3 = replace(zero_diagrams(g), x3=src)
    y0 = Field.zeros(g)
    y1, _ = step_dpd2(y0, dt, ds_x3, 0.0, member_rng(4), dec)
    assert y1.values.mean() == pytest.approx(-dt * src.values.mean(), rel=1e-10)
    # dimension guard
    g3 = make_grid(3, 8)
    with pytest.raises(ValueError):
        step_dpd2(Field.zeros(g3), dt, zero_diagrams(g3), 0.0, rng, build_dyadic_partition(g3))


def test_reconstruct_x():
    g, dec, _, ds = _diagram_setup()
    v, w = _rand_field(g, 11), _rand_field(g, 12)
    st = init_state(v, w, ds, ModelParams())
    x = reconstruct_x(st)
    expected = ds.x1 - ds.x30 + v + w
    assert (x - expected).max_abs() == 0.0
    z = Field.zeros(g)
    st0 = init_state(z, z, ds, ModelParams())
    assert (reconstruct_x(st0) - (ds.x1 - ds.x30)).max_abs() == 0.0
    stz = init_state(v, w, zero_diagrams(g), ModelParams())
    assert (reconstruct_x(stz) - (v + w)).max_abs() == 0.0
    # only the sum of v and w enters
    h = _rand_field(g, 13)
    st_shift = init_state(v + h, w - h, ds, ModelParams())
    assert (reconstruct_x(st_shift) - x).max_abs() <= 1e-13


def test_initial_condition_reallocation_first_order():
    # runs with (0, x0) and (h, x0 - h) produce the same v + w up to O(dt)
    g = make_grid(1, 32)
    dec = build_dyadic_partition(g)
    x0 = _rand_field(g, 14, scale=1.0)
    h = _rand_field(g, 15, scale=0.5)
    diffs = {}
    for dt in (2e-3, 1e-3):
        n = int(round(0.2 / dt))
        sums = []
        for v0, w0 in ((Field.zeros(g), x0), (h, x0 - h)):
            rng = member_rng(77)
            ds = initial_diagrams(g, rng, dec, c2=0.0)
            st = init_state(v0, w0, ds, ModelParams(m=0.0, c=1.0))
            traj = simulate_paracontrolled(st, dt, n, rng, dec, record_every=n,
                                           substeps=int(round(dt / 1e-3)))
            sums.append(traj.final_state.v + traj.final_state.w)
        diffs[dt] = (sums[0] - sums[1]).max_abs()
    shrink = diffs[2e-3] / diffs[1e-3]
    assert 1.5 <= shrink <= 2.5


def test_xnorm_diagnostics():
    g = make_grid(1, 32)
    dec = build_dyadic_partition(g)
    z = Field.zeros(g)
    rep = xnorm_diagnostics([(0.5, z, z), (1.0, z, z)], dec)
    assert rep.max() == 0.0
    # single point at t = 1: the weighted component equals the plain norm
    from phi4field.besov import BesovIndex, besov_norm

    f = _rand_field(g, 16)
    rep2 = xnorm_diagnostics([(1.0, f, z)], dec, epsilon=1e-3)
    assert rep2.v_weighted == pytest.approx(besov_norm(f, BesovIndex(0.5 + 2e-3), dec), rel=1e-12)
    # a jump of size J between times s and t contributes s^(1/2) J / (t-s)^(1/8)
    jump = Field.constant(g, 2.0)
    rep3 = xnorm_diagnostics([(0.25, z, z), (0.5, z, jump)], dec)
    expected = math.sqrt(0.25) * 2.0 / 0.25**0.125
    assert rep3.w_holder == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        xnorm_diagnostics([], dec)
    with pytest.raises(ValueError):
        xnorm_diagnostics([(1.5, z, z)], dec)


def test_energy_balance_zero_solution_and_validation():
    g = make_grid(1, 32)
    dec = build_dyadic_partition(g)
    zeros = np.zeros(g.shape)
    pts = [(i * 0.01, zeros, zeros) for i in range(5)]
    res = energy_balance_residual(pts, 24, dec)
    assert np.all(res == 0.0)
    with pytest.raises(ValueError):
        energy_balance_residual(pts, 23, dec)
    with pytest.raises(ValueError):
        energy_balance_residual(pts[:1], 24, dec)
    bad = [(0.0, zeros, zeros), (0.01, zeros, zeros), (0.05, zeros, zeros)]
    with pytest.raises(ValueError):
        energy_balance_residual(bad, 24, dec)


def test_energy_balance_cube_flow_residual():
    g = make_grid(1, 32)
    dec = build_dyadic_partition(g)
    x = g.coordinates()[0]
    w0 = Field.from_values(g, np.cos(np.pi * x))
    maxres = {}
    for dt in (1e-4, 5e-5):
        n = int(round(0.02 / dt))
        st = init_state(Field.zeros(g), w0, zero_diagrams(g), ModelParams(m=0.0, c=0.0))
        traj = simulate_paracontrolled(st, dt, n, member_rng(5), dec,
                                       store_energy=True, record_every=n, frozen_diagrams=True)
        res = energy_balance_residual(traj.energy_points, 24, dec)
        maxres[dt] = np.abs(res).max()
    assert maxres[1e-4] < 1e-4
    shrink = maxres[1e-4] / maxres[5e-5]
    assert 1.6 <= shrink <= 2.4


def test_blowup_flag_not_raised_on_standard_run():
    g, dec, rng, ds = _diagram_setup(d=2, n=16, seed=23)
    st = init_state(Field.zeros(g), _rand_field(g, 20, scale=1.0), ds, ModelParams(m=1.0, c=1.0))
    traj = simulate_paracontrolled(st, 2e-3, 100, rng, dec, record_every=10)
    assert not traj.blowup
    assert np.all(np.isfinite(traj.x_inf))
