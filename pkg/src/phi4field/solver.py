"""Time integration of the renormalized dynamics in three formulations.

- ``step_direct``: exponential Euler for the renormalized equation
  dX/dt = Lap X - X^3 + m_delta X + noise with the counterterm-shifted mass
  m_delta = m + 3 c1 - 9 c2.
- ``step_dpd2``: the two-dimensional remainder equation for Y = X - x1 with
  Wick-renormalized sources (valid for d = 2).
- ``step_paracontrolled``: the coupled (v, w) system with the mass-splitting
  constant c, the paraproduct right-hand sides F and G, the two commutator
  corrections, and the polynomial coefficients built from the diagrams.

All steppers treat the stiff linear part exactly (integrating factor) and
the nonlinearity to first order, and they consume exactly one unit noise
spectrum per step from the supplied generator, so trajectories of different
formulations driven from the same seed are coupled path by path.

The base field carries unit mass; the compensating linear source this
induces is included in the constant polynomial coefficient, which keeps
the reconstructed field x1 - x30 + v + w on the same continuum equation as
the direct formulation for any splitting constant c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np
import scipy.fft as _sfft

from .besov import (
    BesovIndex,
    DyadicDecomposition,
    _lowpass_from_blocks,
    besov_norm,
    block_decompose,
    bony_split,
    commutator_lt_res,
    paraproduct_gt,
    paraproduct_lt,
    resonant_prod,
)
from .diagrams import DiagramSet, evolve_diagrams
from .grid import Field, TorusGrid, field_from_rspec, field_rspec, phi1
from .noise import aggregated_noise_rspec

__all__ = [
    "ModelParams",
    "SolverState",
    "Coefficients",
    "BLOWUP_THRESHOLD",
    "build_coefficients",
    "rhs_F",
    "com1",
    "com2",
    "rhs_G",
    "init_state",
    "step_paracontrolled",
    "step_direct",
    "step_dpd2",
    "reconstruct_x",
    "is_blown_up",
    "xnorm_diagnostics",
    "XNormReport",
    "energy_balance_residual",
    "simulate_paracontrolled",
    "simulate_direct",
    "Trajectory",
]

BLOWUP_THRESHOLD = 1e12

FORMULATIONS = ("direct", "dpd2", "paracontrolled")


@dataclass(frozen=True)
class ModelParams:
    """Model and scheme parameters.

    ``com1_massless`` selects the reading of the first commutator's auxiliary
    field: with the default (False) the auxiliary field is damped with the
    same splitting constant c as v, which keeps the sum v + w independent of
    c at the continuous level; the massless variant is kept for comparison.
    """

    m: float = 0.0
    c: float = 1.0
    epsilon: float = 1e-3
    p: int = 24
    formulation: str = "paracontrolled"
    cube_sign: float = -1.0
    com1_massless: bool = False

    def __post_init__(self):
        if self.c < 0:
            raise ValueError(f"splitting constant c must be >= 0, got {self.c}")
        if not (0 < self.epsilon <= 1e-3):
            raise ValueError(f"epsilon must be in (0, 1e-3], got {self.epsilon}")
        if self.p < 24 or self.p % 2 != 0:
            raise ValueError(f"p must be an even integer >= 24, got {self.p}")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"formulation must be one of {FORMULATIONS}")
        if self.cube_sign not in (-1.0, 1.0):
            raise ValueError("cube_sign must be -1 (damping) or +1 (reversed)")


@dataclass(frozen=True)
class Coefficients:
    """Polynomial coefficients of the quadratic source P(s) = a0 + a1 s + a2 s^2."""

    a0: Field
    a1: Field
    a2: Field


@dataclass(frozen=True)
class SolverState:
    """State of the paracontrolled system at one time."""

    t: float
    v: Field
    w: Field
    z: Field
    diagrams: DiagramSet
    params: ModelParams


def init_state(v0: Field, w0: Field, diagrams: DiagramSet, params: ModelParams) -> SolverState:
    """Initial state at t = 0; the commutator auxiliary field starts at v0."""
    return SolverState(t=0.0, v=v0, w=w0, z=v0, diagrams=diagrams, params=params)


def is_blown_up(*fields: Field) -> bool:
    """Blow-up detector: any non-finite value or |value| beyond 1e12."""
    for f in fields:
        v = f.values
        if not np.all(np.isfinite(v)) or np.max(np.abs(v)) > BLOWUP_THRESHOLD:
            return True
    return False


# -- coefficients -------------------------------------------------------------


def build_coefficients(ds: DiagramSet, m: float, dec: DyadicDecomposition) -> Coefficients:
    """Assemble the polynomial coefficients from the centered diagrams.

    The quadratic coefficient is exactly 3 (x30 - x1); the linear and
    constant coefficients combine the diagram products through their
    non-resonant / resonant splittings.  The base field's unit mass
    contributes the extra linear source x1 to the constant coefficient.
    """
    x1, x30 = ds.x1, ds.x30
    thirty_sq = x30 * x30
    lt, res, gt = bony_split(x1, thirty_sq, dec)
    x1_nonres_sq = lt + gt
    x1_res_resres = resonant_prod(x1, resonant_prod(x30, x30, dec), dec)
    com_flat = commutator_lt_res(x30, x30, x1, dec)
    bracket = x1_nonres_sq + x1_res_resres + 2.0 * (x30 * ds.x31) + 2.0 * com_flat
    a0 = (
        (x1 - x30) * m
        + x1
        + thirty_sq * x30
        - 3.0 * bracket
        - 9.0 * (x30 * ds.x22)
        + 3.0 * ds.x32
    )
    lt2, res2, gt2 = bony_split(x30, x1, dec)
    a1 = (lt2 + gt2 + ds.x31) * 6.0 - thirty_sq * 3.0 + ds.x22 * 9.0 + m
    a2 = (x30 - x1) * 3.0
    return Coefficients(a0=a0, a1=a1, a2=a2)


def _coefficient_values(ds: DiagramSet, m: float):
    """Collapsed pointwise form of the coefficients (identical on-grid to
    the paraproduct assembly, which telescopes exactly)."""
    x1, x30 = ds.x1.values, ds.x30.values
    x22, x32 = ds.x22.values, ds.x32.values
    a2 = 3.0 * (x30 - x1)
    a1 = m + 6.0 * x1 * x30 - 3.0 * x30 * x30 + 9.0 * x22
    a0 = (
        m * (x1 - x30)
        + x1
        + x30**3
        - 3.0 * x1 * x30 * x30
        - 9.0 * x30 * x22
        + 3.0 * x32
    )
    return a0, a1, a2


# -- right-hand sides ---------------------------------------------------------


def rhs_F(v: Field, w: Field, ds: DiagramSet, dec: DyadicDecomposition) -> Field:
    """Low-frequency-modulated source F = -3 (v + w - x30) < x2."""
    return paraproduct_lt(v + w - ds.x30, ds.x2, dec) * (-3.0)


def com1(state: SolverState, dec: DyadicDecomposition) -> Field:
    """First commutator correction: auxiliary field plus the leading paraproduct.

    com1 = z + 3 (v + w - x30) < x20, where z solves the mild equation with
    the same source as v (see ``ModelParams.com1_massless`` for the damping
    convention)."""
    r = state.v + state.w - state.diagrams.x30
    return state.z + paraproduct_lt(r, state.diagrams.x20, dec) * 3.0


def com2(state: SolverState, dec: DyadicDecomposition) -> Field:
    """Second commutator correction [<, o](-3 (v + w - x30), x20, x2)."""
    r = state.v + state.w - state.diagrams.x30
    return commutator_lt_res(r * (-3.0), state.diagrams.x20, state.diagrams.x2, dec)


def rhs_G(state: SolverState, coeffs: Coefficients, dec: DyadicDecomposition) -> Field:
    """Full remainder source G, assembled literally from its definition:

    G = cube_sign (v+w)^3 - 3 [com1 o x2 + com2] - 3 w o x2
        - 3 (v + w - x30) > x2 + a0 + a1 (v+w) + a2 (v+w)^2
    """
    ds = state.diagrams
    s = state.v + state.w
    r = s - ds.x30
    com = resonant_prod(com1(state, dec), ds.x2, dec) + com2(state, dec)
    svals = s.values
    poly = coeffs.a0.values + coeffs.a1.values * svals + coeffs.a2.values * svals * svals
    cube = state.params.cube_sign * svals**3
    vals = (
        cube
        - 3.0 * com.values
        - 3.0 * resonant_prod(state.w, ds.x2, dec).values
        - 3.0 * paraproduct_gt(r, ds.x2, dec).values
        + poly
    )
    return Field(s.grid, values=vals)


# -- paracontrolled stepper ---------------------------------------------------


def _para(low, blocks):
    return np.einsum("l...,l...->...", low, blocks)


def _res(fb, gb):
    near = fb.copy()
    near[:-1] += fb[1:]
    near[1:] += fb[:-1]
    return np.einsum("l...,l...->...", near, gb)


@dataclass
class _StepTables:
    """Cached per-(dt, c) exponential-integrator multipliers."""

    dt: float
    heat0: np.ndarray
    phi0: np.ndarray
    heatc: np.ndarray
    phic: np.ndarray


def _tables(grid: TorusGrid, dt: float, c: float) -> _StepTables:
    z2 = grid.zeta2_r
    return _StepTables(
        dt=dt,
        heat0=np.exp(-dt * z2),
        phi0=dt * phi1(-dt * z2),
        heatc=np.exp(-dt * (z2 + c)),
        phic=dt * phi1(-dt * (z2 + c)),
    )


def _paracontrolled_rhs_values(state: SolverState, dec: DyadicDecomposition):
    """F and G + c v as physical arrays.

    Uses the on-grid collapse of the commutator assembly,

        com1 o x2 + com2 = z o x2 + 3 (v + w - x30) (x20 o x2),

    which holds exactly because the paraproduct and resonant pairings are
    bilinear in the dyadic blocks (the (r < x20) o x2 contributions cancel
    between the two commutators).  The result agrees with the literal
    ``rhs_G`` assembly to rounding; diagram decompositions are cached on
    the immutable fields so each time slice is analyzed once.
    """
    grid = state.v.grid
    ds = state.diagrams
    p = state.params
    vv, wv = state.v.values, state.w.values
    sv = vv + wv
    r = Field(grid, values=sv - ds.x30.values)
    rv = r.values

    r_blocks = block_decompose(r, dec)
    r_low = _lowpass_from_blocks(r_blocks)
    x2_blocks = block_decompose(ds.x2, dec)
    F = -3.0 * _para(r_low, x2_blocks)
    # z + w in one decomposition (z is v for the c-damped commutator reading)
    if state.z is state.v:
        zw_blocks = _shift_blocks_sum(r_blocks, block_decompose(ds.x30, dec))
    else:
        zw_blocks = block_decompose(Field(grid, values=state.z.values + wv), dec)
    zw_res_x2 = _res(zw_blocks, x2_blocks)
    r_gt_x2 = _para(_lowpass_from_blocks(x2_blocks), r_blocks)
    a0, a1, a2 = _coefficient_values(ds, p.m)
    G = (
        p.cube_sign * sv**3
        - 3.0 * zw_res_x2
        - 3.0 * r_gt_x2
        - 9.0 * rv * (ds.x22.values + ds.c2)
        + a0
        + a1 * sv
        + a2 * sv * sv
    )
    return F, G + p.c * vv


def _shift_blocks_sum(r_blocks: np.ndarray, x30_blocks: np.ndarray) -> np.ndarray:
    # blocks of z + w = v + w = r + x30 when z is v
    return r_blocks + x30_blocks


def step_paracontrolled(
    state: SolverState,
    dt: float,
    rng: np.random.Generator,
    dec: DyadicDecomposition,
    _tbl: _StepTables | None = None,
    substeps: int = 1,
    frozen_diagrams: bool = False,
) -> SolverState:
    """One exponential-Euler step of the coupled (v, w) system.

    v is damped by the splitting constant c, w receives the compensating
    + c v source, the auxiliary field z follows the same update as v (or its
    massless variant), and the diagrams advance on the shared noise stream.
    ``frozen_diagrams`` keeps the diagram slice fixed (deterministic
    sub-cases such as the pure cube flow).
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    grid = state.v.grid
    p = state.params
    tbl = _tbl if _tbl is not None and _tbl.dt == dt else _tables(grid, dt, p.c)
    with np.errstate(over="ignore", invalid="ignore"):
        F, Gcv = _paracontrolled_rhs_values(state, dec)
        F_spec = _sfft.rfftn(F, norm="forward")
        Gcv_spec = _sfft.rfftn(Gcv, norm="forward")
        v_new = tbl.heatc * field_rspec(state.v) + tbl.phic * F_spec
        w_new = tbl.heat0 * field_rspec(state.w) + tbl.phi0 * Gcv_spec
        v_f = field_from_rspec(grid, v_new)
        w_f = field_from_rspec(grid, w_new)
        if p.com1_massless:
            z_new = tbl.heat0 * field_rspec(state.z) + tbl.phi0 * F_spec
            z_f = field_from_rspec(grid, z_new)
        else:
            z_f = v_f
        if frozen_diagrams:
            ds_new = replace(state.diagrams, t=state.diagrams.t + dt)
        else:
            ds_new = evolve_diagrams(state.diagrams, dt, rng, dec, substeps=substeps)
    return SolverState(t=state.t + dt, v=v_f, w=w_f, z=z_f, diagrams=ds_new, params=p)


# -- direct and two-dimensional steppers --------------------------------------


def renormalized_mass(m: float, c1: float, c2: float) -> float:
    """Counterterm-shifted mass m_delta = m + 3 c1 - 9 c2."""
    return m + 3.0 * c1 - 9.0 * c2


def step_direct(
    x: Field,
    dt: float,
    ds: DiagramSet,
    m: float,
    rng: np.random.Generator,
    *,
    cube_sign: float = -1.0,
    with_noise: bool = True,
    substeps: int = 1,
) -> Field:
    """One exponential-Euler step of the renormalized equation for X.

    The stochastic convolution over the step is sampled exactly per mode
    (variance (1 - exp(-2 dt |zeta|^2)) / (2 |zeta|^2 V), with the dt / V
    limit at the zero mode); ``substeps`` unit spectra are consumed per step
    so refinement studies stay on one noise path.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    grid = x.grid
    m_delta = renormalized_mass(m, ds.c1, ds.c2)
    with np.errstate(over="ignore", invalid="ignore"):
        xv = x.values
        nonlin = cube_sign * xv**3 + m_delta * xv
        z2 = grid.zeta2_r
        heat = np.exp(-dt * z2)
        weight = dt * phi1(-dt * z2)
        spec = field_rspec(x) * heat + weight * _sfft.rfftn(nonlin, norm="forward")
        if with_noise:
            spec = spec + aggregated_noise_rspec(grid, z2, dt, substeps, rng)
        return field_from_rspec(grid, spec)


def step_dpd2(
    y: Field,
    dt: float,
    ds: DiagramSet,
    m: float,
    rng: np.random.Generator,
    dec: DyadicDecomposition,
    *,
    cube_sign: float = -1.0,
):
    """One step of the two-dimensional remainder equation for Y = X - x1.

    Returns the advanced pair (Y, diagrams).  The Y update itself is
    deterministic given the current diagram slice; the noise enters through
    the diagram evolution, which consumes the step's unit spectrum.
    """
    if y.grid.d != 2:
        raise ValueError(f"the remainder formulation requires d = 2, got d = {y.grid.d}")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    grid = y.grid
    with np.errstate(over="ignore", invalid="ignore"):
        yv = y.values
        x1v, x2v, x3v = ds.x1.values, ds.x2.values, ds.x3.values
        cube_group = yv**3 + 3.0 * yv * yv * x1v + 3.0 * yv * x2v + x3v
        nonlin = cube_sign * cube_group + m * (x1v + yv) + x1v
        z2 = grid.zeta2_r
        spec = field_rspec(y) * np.exp(-dt * z2) + dt * phi1(-dt * z2) * _sfft.rfftn(nonlin, norm="forward")
        y_new = field_from_rspec(grid, spec)
        ds_new = evolve_diagrams(ds, dt, rng, dec)
    return y_new, ds_new


def reconstruct_x(state: SolverState) -> Field:
    """Reconstruct the physical field X = x1 - x30 + v + w."""
    ds = state.diagrams
    return ds.x1 - ds.x30 + state.v + state.w


# -- diagnostics ---------------------------------------------------------------


@dataclass(frozen=True)
class XNormReport:
    """The six weighted trajectory suprema of the solution norm."""

    v_low: float        # sup_t ||v||_{B^{-3/5}}
    v_weighted: float   # sup_t t^{3/5} ||v||_{B^{1/2 + 2 eps}}
    v_holder: float     # sup_{s<t} s^{1/2} ||v(t)-v(s)||_inf / (t-s)^{1/8}
    w_low: float
    w_weighted: float   # sup_t t^{17/20} ||w||_{B^{1 + 2 eps}}
    w_holder: float

    def as_dict(self):
        return {
            "v_low": self.v_low, "v_weighted": self.v_weighted, "v_holder": self.v_holder,
            "w_low": self.w_low, "w_weighted": self.w_weighted, "w_holder": self.w_holder,
        }

    def max(self) -> float:
        return max(self.as_dict().values())


def xnorm_diagnostics(trajectory, dec: DyadicDecomposition, epsilon: float = 1e-3) -> XNormReport:
    """Evaluate the six components of the solution norm over a stored trajectory.

    The trajectory is a sequence of (t, v, w) with t in (0, T], T <= 1.
    """
    pts = [(t, v, w) for (t, v, w) in trajectory]
    if not pts:
        raise ValueError("empty trajectory")
    if max(t for t, _, _ in pts) > 1.0 + 1e-12:
        raise ValueError("the solution norm is defined on horizons T <= 1")
    b_low = BesovIndex(-0.6)
    b_v = BesovIndex(0.5 + 2 * epsilon)
    b_w = BesovIndex(1.0 + 2 * epsilon)
    v_low = max(besov_norm(v, b_low, dec) for _, v, _ in pts)
    w_low = max(besov_norm(w, b_low, dec) for _, _, w in pts)
    v_wt = max(t**0.6 * besov_norm(v, b_v, dec) for t, v, _ in pts if t > 0)
    w_wt = max(t**0.85 * besov_norm(w, b_w, dec) for t, _, w in pts if t > 0)
    v_h, w_h = 0.0, 0.0
    for i, (s, vs, ws) in enumerate(pts):
        if s <= 0:
            continue
        for t, vt, wt in pts[i + 1:]:
            gap = (t - s) ** 0.125
            v_h = max(v_h, math.sqrt(s) * (vt - vs).max_abs() / gap)
            w_h = max(w_h, math.sqrt(s) * (wt - ws).max_abs() / gap)
    return XNormReport(v_low=v_low, v_weighted=v_wt, v_holder=v_h, w_low=w_low, w_weighted=w_wt, w_holder=w_h)


def _grad_sq(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """|grad f|^2 via spectral differentiation (Nyquist dropped per axis)."""
    spec = _sfft.fftn(values, norm="forward")
    total = np.zeros(grid.shape)
    for axis in range(grid.d):
        k = grid.k_lattice[axis].astype(np.float64)
        k = np.where(k == -(grid.n // 2), 0.0, k)
        dv = _sfft.ifftn(1j * np.pi * k * spec, norm="forward").real
        total += dv * dv
    return total


def energy_balance_residual(trajectory, p: int, dec: DyadicDecomposition) -> np.ndarray:
    """Per-step residual of the tested energy identity along a trajectory.

    The trajectory is a sequence of (t, w_values, gtilde_cv_values) on a
    uniform time grid, where gtilde_cv = G + w^3 + c v is the remainder
    source without the damping cube.  Over each step [t_i, t_{i+1}] the
    identity

        [||w(t_{i+1})||^{3p-2} - ||w(t_i)||^{3p-2}] / (3p-2)
        + (3p-3) int || |grad w|^2 w^{3p-4} ||_{L^1}
        + int ||w||_{L^{3p}}^{3p}
        = int < gtilde_cv , w^{3p-3} >

    is evaluated with trapezoidal quadrature (gradients by spectral
    differentiation), and LHS - RHS of the step is returned for every step.
    The per-step residual shrinks at first order under time refinement.
    """
    if p % 2 != 0:
        raise ValueError(f"p must be even, got {p}")
    pts = list(trajectory)
    if len(pts) < 2:
        raise ValueError("need at least two trajectory points")
    times = np.array([t for t, _, _ in pts])
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-8, atol=1e-12):
        raise ValueError("trajectory must be on a uniform time grid")
    from .grid import make_grid  # local import to avoid cycle at module load

    g = make_grid(pts[0][1].ndim, pts[0][1].shape[0])
    vol = g.cell_volume
    lp_pow, grad_term, pairing, w_norm_pow = [], [], [], []
    for t, wv, gcv in pts:
        w_norm_pow.append(vol * np.sum(wv ** (3 * p - 2)))
        lp_pow.append(vol * np.sum(wv ** (3 * p)))
        grad_term.append(vol * np.sum(_grad_sq(wv, g) * wv ** (3 * p - 4)))
        pairing.append(vol * np.sum(gcv * wv ** (3 * p - 3)))
    w_norm_pow = np.array(w_norm_pow)
    integrand = (3 * p - 3) * np.array(grad_term) + np.array(lp_pow) - np.array(pairing)
    dt = dts[0]
    steps = np.diff(w_norm_pow) / (3 * p - 2) + 0.5 * dt * (integrand[1:] + integrand[:-1])
    return steps


# -- trajectory runners --------------------------------------------------------


@dataclass
class Trajectory:
    """Recorded output of one simulation run."""

    times: np.ndarray
    v_inf: np.ndarray
    w_inf: np.ndarray
    x_inf: np.ndarray
    x_bneg: np.ndarray
    blowup: bool
    blowup_time: float | None
    final_state: object
    snapshots: list = dc_field(default_factory=list)       # (t, v, w, x) Fields
    diagram_snaps: list = dc_field(default_factory=list)   # DiagramSet slices
    energy_points: list = dc_field(default_factory=list)   # (t, w_values, gtilde_cv)


def simulate_paracontrolled(
    state: SolverState,
    dt: float,
    n_steps: int,
    rng: np.random.Generator,
    dec: DyadicDecomposition,
    *,
    snapshot_every: int = 0,
    store_energy: bool = False,
    record_every: int = 1,
    substeps: int = 1,
    frozen_diagrams: bool = False,
) -> Trajectory:
    """Run the paracontrolled system for n_steps, recording norms and snapshots.

    Stops early with the blow-up flag when a field leaves the finite range.
    """
    p = state.params
    tbl = _tables(state.v.grid, dt, p.c)
    eps = p.epsilon
    bneg = BesovIndex(-0.5 - eps)
    times, v_inf, w_inf, x_inf, x_bneg = [], [], [], [], []
    snaps, dsnaps, energy = [], [], []

    def record(st):
        x = reconstruct_x(st)
        times.append(st.t)
        v_inf.append(st.v.max_abs())
        w_inf.append(st.w.max_abs())
        x_inf.append(x.max_abs())
        x_bneg.append(besov_norm(x, bneg, dec) if np.isfinite(x_inf[-1]) else math.inf)
        return x

    def store_energy_point(st):
        # the tested source is gtilde + c v = (G + c v) + w^3
        if store_energy:
            _, Gcv = _paracontrolled_rhs_values(st, dec)
            wv = st.w.values
            energy.append((st.t, wv.copy(), Gcv + wv**3))

    store_energy_point(state)
    record(state)
    if snapshot_every:
        snaps.append((state.t, state.v, state.w, reconstruct_x(state)))
        dsnaps.append(state.diagrams)
    blow = False
    blow_t = None
    for i in range(1, n_steps + 1):
        state = step_paracontrolled(
            state, dt, rng, dec, _tbl=tbl, substeps=substeps, frozen_diagrams=frozen_diagrams
        )
        if is_blown_up(state.v, state.w):
            blow, blow_t = True, state.t
            record(state)
            break
        if i % record_every == 0 or i == n_steps:
            record(state)
        store_energy_point(state)
        if snapshot_every and (i % snapshot_every == 0 or i == n_steps):
            snaps.append((state.t, state.v, state.w, reconstruct_x(state)))
            dsnaps.append(state.diagrams)
    return Trajectory(
        times=np.array(times), v_inf=np.array(v_inf), w_inf=np.array(w_inf),
        x_inf=np.array(x_inf), x_bneg=np.array(x_bneg),
        blowup=blow, blowup_time=blow_t, final_state=state,
        snapshots=snaps, diagram_snaps=dsnaps, energy_points=energy,
    )


def simulate_direct(
    x: Field,
    dt: float,
    n_steps: int,
    ds: DiagramSet,
    m: float,
    rng: np.random.Generator,
    dec: DyadicDecomposition,
    *,
    cube_sign: float = -1.0,
    with_noise: bool = True,
    snapshot_every: int = 0,
    record_every: int = 1,
    substeps: int = 1,
) -> Trajectory:
    """Run the direct renormalized equation; mirrors ``simulate_paracontrolled``."""
    eps = 1e-3
    bneg = BesovIndex(-0.5 - eps)
    times, x_inf, x_bneg = [], [], []
    snaps = []
    t = 0.0

    def record():
        times.append(t)
        x_inf.append(x.max_abs())
        x_bneg.append(besov_norm(x, bneg, dec) if np.isfinite(x_inf[-1]) else math.inf)

    record()
    if snapshot_every:
        snaps.append((t, None, None, x))
    blow = False
    blow_t = None
    for i in range(1, n_steps + 1):
        x = step_direct(x, dt, ds, m, rng, cube_sign=cube_sign, with_noise=with_noise, substeps=substeps)
        t = i * dt
        if is_blown_up(x):
            blow, blow_t = True, t
            record()
            break
        if i % record_every == 0 or i == n_steps:
            record()
        if snapshot_every and (i % snapshot_every == 0 or i == n_steps):
            snaps.append((t, None, None, x))
    return Trajectory(
        times=np.array(times), v_inf=np.zeros(len(times)), w_inf=np.zeros(len(times)),
        x_inf=np.array(x_inf), x_bneg=np.array(x_bneg),
        blowup=blow, blowup_time=blow_t, final_state=x, snapshots=snaps,
    )
