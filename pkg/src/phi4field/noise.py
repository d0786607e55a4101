"""Space-time white-noise sampling, exact Ornstein-Uhlenbeck updates, Wick constants.

Conventions (period-2 torus, volume V = 2^d, spectra in the continuum
coefficient convention of :mod:`phi4field.grid`):

- A white-noise increment over a time step dt has independent spectral
  coefficients with E|dW_k|^2 = dt / V, so that <dW, phi>_{L^2} has variance
  dt ||phi||_{L^2}^2 for every grid function phi.
- The base Gaussian field driven by (d/dt - Lap + 1) has exact per-mode
  transitions with rate lambda = |zeta|^2 + 1 and stationary per-mode
  variance 1 / (2 lambda V); its stationary pointwise variance is the exact
  lattice mode sum ``wick_c1``.
- One unit-variance Hermitian spectrum is consumed from the generator per
  update, so solvers driven by the same seeded stream stay coupled step by
  step across formulations.
"""

from __future__ import annotations

import math
import os

import numpy as np
import scipy.fft as _sfft

from .grid import Field, TorusGrid, field_from_rspec, field_rspec

__all__ = [
    "unit_spectrum",
    "unit_rspec",
    "aggregated_noise_rspec",
    "sample_noise_increment",
    "ou_update",
    "ou_stationary_sample",
    "wick_c1",
    "wick_c2_exact",
    "estimate_c2",
    "C2Estimate",
    "member_rng",
    "load_constants_cache",
    "save_constants_cache",
]


def member_rng(root_seed: int, member: int = 0) -> np.random.Generator:
    """Independent generator for one ensemble member.

    Streams are derived from the root seed by the documented counter scheme
    ``SeedSequence(root_seed, spawn_key=(member,))``, so members are
    reproducible and independent regardless of scheduling.
    """
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=(member,)))


def unit_spectrum(grid: TorusGrid, rng: np.random.Generator) -> np.ndarray:
    """Hermitian-symmetric complex spectrum with E|g_k|^2 = 1 for every mode.

    Drawn by transforming one real white field, so exactly one
    ``standard_normal(grid.shape)`` is consumed per call.
    """
    white = rng.standard_normal(grid.shape)
    return _sfft.fftn(white, norm="forward") * grid.phase * grid.n ** (grid.d / 2.0)


def unit_rspec(grid: TorusGrid, rng: np.random.Generator) -> np.ndarray:
    """Half-lattice version of :func:`unit_spectrum` (fast path).

    Consumes the same single white field from the generator, so streams stay
    aligned with the full-spectrum construction.
    """
    white = rng.standard_normal(grid.shape)
    return _sfft.rfftn(white, norm="forward") * grid.n ** (grid.d / 2.0)


def sample_noise_increment(grid: TorusGrid, dt: float, rng: np.random.Generator) -> Field:
    """White-noise increment over a step dt.

    For any grid function phi, <increment, phi>_{L^2} is centered Gaussian
    with variance dt * ||phi||_{L^2}^2.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    scale = math.sqrt(dt / grid.volume)
    return field_from_rspec(grid, unit_rspec(grid, rng) * scale)


def aggregated_noise_rspec(
    grid: TorusGrid,
    rate: np.ndarray,
    dt: float,
    substeps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Exact stochastic-convolution noise over a step of size dt.

    The step is built from ``substeps`` fine increments of size dt/substeps,
    composed with the exact per-mode decay exp(-rate * dt_fine):

        acc <- acc * decay_fine + g_j * std_fine .

    Because the composition is exact, a run at step dt and one at dt/k driven
    by the same generator see the same underlying noise path, which makes
    time-refinement studies path-consistent.  Entries of ``rate`` may be 0
    (the variance degenerates to dt_fine / V there).
    """
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    dtf = dt / substeps
    rate = np.asarray(rate, dtype=np.float64)
    safe = np.maximum(rate, 1e-300)
    var_f = np.where(rate > 0, -np.expm1(-2.0 * dtf * rate) / (2.0 * safe), dtf)
    std_f = np.sqrt(var_f / grid.volume)
    decay_f = np.exp(-dtf * rate)
    acc = unit_rspec(grid, rng) * std_f
    for _ in range(substeps - 1):
        acc = acc * decay_f + unit_rspec(grid, rng) * std_f
    return acc


def ou_update(x1: Field, dt: float, rng: np.random.Generator, substeps: int = 1) -> Field:
    """Advance the base field by an exact Ornstein-Uhlenbeck transition.

    Per mode with rate lambda = |zeta|^2 + 1:
        a <- exp(-dt lambda) a + g sqrt((1 - exp(-2 dt lambda)) / (2 lambda V))
    with g a unit Hermitian Gaussian spectrum.  The stationary law is
    preserved exactly for any dt and any substep count; ``substeps`` selects
    the noise-path refinement level (see :func:`aggregated_noise_rspec`).
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    grid = x1.grid
    lam = grid.zeta2_r + 1.0
    decay = np.exp(-dt * lam)
    noise = aggregated_noise_rspec(grid, lam, dt, substeps, rng)
    return field_from_rspec(grid, field_rspec(x1) * decay + noise)


def ou_stationary_sample(grid: TorusGrid, rng: np.random.Generator) -> Field:
    """Draw the base field directly from its stationary law."""
    lam = grid.zeta2_r + 1.0
    std = np.sqrt(1.0 / (2.0 * lam * grid.volume))
    return field_from_rspec(grid, unit_rspec(grid, rng) * std)


def wick_c1(grid: TorusGrid) -> float:
    """Stationary pointwise variance E[x1(x)^2] as an exact lattice mode sum.

    Equals sum over the frequency lattice of 1 / (2 (|zeta|^2 + 1) V); this
    is the cutoff-dependent constant that centers the Wick square and cube.
    """
    lam = grid.zeta2 + 1.0
    return float(np.sum(1.0 / (2.0 * lam * grid.volume)))


class C2Estimate(float):
    """Resonant counterterm estimate; behaves as its float value.

    Attributes: ``stderr`` (ensemble standard error), ``time_average``
    (alternative single-trajectory estimator, reported for comparison),
    ``ensemble_size``, ``member_means`` (per-member time averages).
    """

    def __new__(cls, value, stderr, time_average, ensemble_size, member_means=()):
        obj = super().__new__(cls, value)
        obj.stderr = float(stderr)
        obj.time_average = float(time_average)
        obj.ensemble_size = int(ensemble_size)
        obj.member_means = np.asarray(member_means, dtype=float)
        return obj


def estimate_c2(
    grid: TorusGrid,
    ensemble_size: int,
    burn_in: float,
    rng: np.random.Generator,
    *,
    dec=None,
    horizon: float = 2.0,
    dt: float = 0.01,
) -> C2Estimate:
    """Monte-Carlo estimate of the resonant counterterm.

    Runs ``ensemble_size`` independent stationary-noise trajectories of the
    pair (integrated square, square), and averages the resonant product
    resonant(int_square, square) over space and over times past ``burn_in``.
    The returned value centers the resonant diagrams; its ensemble standard
    error is attached, along with the time-average estimator from the first
    trajectory for comparison (the ensemble average is authoritative).
    """
    if ensemble_size < 16:
        raise ValueError(f"ensemble_size must be >= 16, got {ensemble_size}")
    if burn_in >= horizon:
        raise ValueError("burn_in must be below the horizon")
    from .besov import build_dyadic_partition, resonant_prod
    from .grid import apply_heat_semigroup, apply_phi1_weight

    if dec is None:
        dec = build_dyadic_partition(grid)
    c1 = wick_c1(grid)
    seeds = rng.integers(0, 2**63 - 1, size=ensemble_size)
    member_means = []
    first_series = None
    nsteps = int(round(horizon / dt))
    for m, seed in enumerate(seeds):
        mrng = np.random.default_rng(int(seed))
        x1 = ou_stationary_sample(grid, mrng)
        x20 = Field.zeros(grid)
        series = []
        for i in range(nsteps):
            x2 = x1 * x1 - c1
            x20 = apply_heat_semigroup(x20, dt) + apply_phi1_weight(x2, dt) * dt
            x1 = ou_update(x1, dt, mrng)
            t = (i + 1) * dt
            if t > burn_in:
                x2_new = x1 * x1 - c1
                series.append(resonant_prod(x20, x2_new, dec).mean())
        member_means.append(float(np.mean(series)))
        if first_series is None:
            first_series = series
    member_means = np.asarray(member_means)
    value = float(member_means.mean())
    stderr = float(member_means.std(ddof=1) / math.sqrt(ensemble_size))
    time_avg = float(np.mean(first_series))
    return C2Estimate(value, stderr, time_avg, ensemble_size, member_means)


def wick_c2_exact(
    grid: TorusGrid,
    dec,
    dt: float,
    burn_in: float = 0.0,
    horizon: float | None = None,
) -> float:
    """Exact lattice value of the resonant counterterm estimand.

    Computes E[ spatial mean of resonant(x20, x2) ] for the discrete
    exponential-Euler heat integral at step dt, as a double mode sum over the
    frequency lattice: the Wick square has covariance
    E[x2^(k, s) x2^(-k, t)] = 2 sum_{a+b=k (mod n)} exp(-(la+lb)|t-s|)
    / (4 la lb V^2), and the resonant pairing weight is
    rho(k) = sum_{|i-j|<=1} chi_i chi_j at zeta_k.

    With ``horizon`` set, the value is time-averaged over the recording
    window of :func:`estimate_c2` with the same conventions; without it the
    long-time stationary limit is returned.  Note the step size acts as a
    short-time regularization: internal lines with la + lb >> 1/dt are
    suppressed, so at coarse dt the value saturates in n.

    Independent of any sampling; serves as the oracle for the Monte-Carlo
    estimator.
    """
    from .grid import phi1

    if horizon is not None:
        n_steps = int(round(horizon / dt))
        ms = [m for m in range(1, n_steps + 1) if m * dt > burn_in]
        if not ms:
            raise ValueError("no recorded times past burn_in")
        m0, m1 = ms[0], ms[-1]
        count = m1 - m0 + 1
    lam = grid.zeta2 + 1.0  # lattice array in FFT layout, indexed by a
    V = grid.volume
    E1 = np.exp(-dt * lam)
    inv = 1.0 / (2.0 * lam * V)  # stationary mode variance of the base field
    # rho(k): resonant pairing weight of the dyadic partition
    chi = dec.chi
    near = chi.copy()
    near[:-1] += chi[1:]
    near[1:] += chi[:-1]
    rho = np.einsum("l...,l...->...", chi, near)
    mu = grid.zeta2
    w = dt * phi1(-dt * mu)
    d = grid.d
    axes = tuple(range(d))
    total = 0.0
    # per-a factors of the pair covariance, and their (k - a) mod n mirrors
    F = inv * E1
    F_flip = np.roll(F[tuple(slice(None, None, -1) for _ in range(d))], 1, axis=axes)
    E1_flip = np.roll(E1[tuple(slice(None, None, -1) for _ in range(d))], 1, axis=axes)
    for k_idx in np.ndindex(*grid.shape):
        rk = rho[k_idx]
        if rk == 0.0:
            continue
        Fb = np.roll(F_flip, k_idx, axis=axes)
        E1b = np.roll(E1_flip, k_idx, axis=axes)
        q = math.exp(-dt * mu[k_idx]) * E1 * E1b
        one_minus_q = 1.0 - q
        if horizon is None:
            series = 1.0 / one_minus_q
        else:
            # powers only matter where q^m0 is not negligible
            qm_avg = np.zeros_like(q)
            mask = q > math.exp(-45.0 / m0)
            if np.any(mask):
                qm = q[mask] ** m0
                qm_avg[mask] = qm * (1.0 - q[mask] ** (m1 + 1 - m0)) / (count * one_minus_q[mask])
            series = (1.0 - qm_avg) / one_minus_q
        total += rk * w[k_idx] * 2.0 * float(np.sum(F * Fb * series))
    return total


# -- constants cache ----------------------------------------------------------

_CACHE_HEADER = "# n d c1 c2 stderr_c2 root_seed\n"


def load_constants_cache(path: str, n: int, d: int, root_seed: int):
    """Look up cached (c1, c2, stderr_c2) for a grid and seed family, or None."""
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if int(parts[0]) == n and int(parts[1]) == d and int(parts[5]) == root_seed:
                return float(parts[2]), float(parts[3]), float(parts[4])
    return None


def save_constants_cache(path: str, n: int, d: int, c1: float, c2: float, stderr_c2: float, root_seed: int):
    """Append one cache line 'n d c1 c2 stderr_c2 root_seed'."""
    new = not os.path.exists(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "a", encoding="ascii") as fh:
        if new:
            fh.write(_CACHE_HEADER)
        fh.write(f"{n} {d} {c1!r} {c2!r} {stderr_c2!r} {root_seed}\n")
