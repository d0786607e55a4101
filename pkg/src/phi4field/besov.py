"""Littlewood-Paley decomposition, Besov norms, paraproducts and commutators.

The dyadic partition of unity on the frequency lattice is built from a
smooth radial cutoff: chi_tilde equals 1 inside |zeta| <= (3/4) s0, falls
smoothly to 0 on the transition interval [3/4, 4/3] s0, and the annulus
cutoffs are chi_k(zeta) = chi_tilde(zeta / 2^(k+1)) - chi_tilde(zeta / 2^k),
which makes the partition telescope to 1 exactly once the top level covers
the represented frequencies.  The base scale is s0 = pi, one dyadic unit per
fundamental wavenumber of the period-2 torus.

Products inside paraproducts are formed pointwise on the grid without
dealiasing, so the Bony decomposition lt + res + gt = f*g holds exactly
on-grid (to rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as _sfft

from .grid import Field, TorusGrid, apply_heat_semigroup, field_rspec

__all__ = [
    "BASE_SCALE",
    "DyadicDecomposition",
    "BesovIndex",
    "build_dyadic_partition",
    "lp_block",
    "lp_norm",
    "besov_norm",
    "block_decompose",
    "paraproduct_lt",
    "paraproduct_gt",
    "resonant_prod",
    "bony_split",
    "commutator_lt_res",
    "commutator_heat_lt",
]

BASE_SCALE = np.pi  # s0: one dyadic unit = the fundamental wavenumber


def _smooth_ramp(r: np.ndarray) -> np.ndarray:
    """C-infinity ramp from 0 at r<=0 to 1 at r>=1 (standard bump quotient)."""
    r = np.clip(r, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(r > 0.0, np.exp(-1.0 / np.where(r > 0.0, r, 1.0)), 0.0)
        b = np.where(r < 1.0, np.exp(-1.0 / np.where(r < 1.0, 1.0 - r, 1.0)), 0.0)
    return a / (a + b)


def _chi_tilde(radius: np.ndarray) -> np.ndarray:
    """Low-pass cutoff: 1 on |zeta| <= 3/4 s0, 0 beyond 4/3 s0, smooth between."""
    lo = 0.75 * BASE_SCALE
    hi = 4.0 / 3.0 * BASE_SCALE
    return 1.0 - _smooth_ramp((radius - lo) / (hi - lo))


@dataclass(frozen=True)
class BesovIndex:
    """Besov space index (alpha, p, q); use math.inf for the infinity indices."""

    alpha: float
    p: float = math.inf
    q: float = math.inf

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"p must be >= 1 or inf, got {self.p}")
        if not (self.q >= 1):
            raise ValueError(f"q must be >= 1 or inf, got {self.q}")


class DyadicDecomposition:
    """Precomputed Littlewood-Paley multipliers on a grid's frequency lattice.

    Levels run from -1 (low-pass chi_tilde) to k_max; multiplier arrays are
    sampled on the full FFT frequency lattice.  Array index ell corresponds
    to level k = ell - 1.
    """

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        radius = np.sqrt(grid.zeta2)
        rmax = grid.nyquist_radius()
        # partition is exact on-grid once chi_tilde(zeta / 2^(k_max+1)) = 1
        # at the largest represented |zeta|
        k_max = 0
        while rmax / 2.0 ** (k_max + 1) > 0.75 * BASE_SCALE:
            k_max += 1
        self.k_max = k_max

        def stack_levels(rad):
            levels = [_chi_tilde(rad)]
            for k in range(k_max + 1):
                levels.append(_chi_tilde(rad / 2.0 ** (k + 1)) - _chi_tilde(rad / 2.0**k))
            chi = np.stack(levels)
            # s_mult[ell] = sum of chi_j over levels j <= k-2 (k = ell-1):
            # the low-frequency weight S_{k-1} used in the paraproduct
            s = np.cumsum(chi, axis=0)
            s_mult = np.zeros_like(chi)
            s_mult[2:] = s[:-2]
            chi.setflags(write=False)
            s_mult.setflags(write=False)
            return chi, s_mult

        self.chi, self.s_mult = stack_levels(radius)  # (k_max + 2, *grid.shape)
        self.chi_r, self.s_mult_r = stack_levels(np.sqrt(grid.zeta2_r))

    @property
    def n_levels(self) -> int:
        return self.k_max + 2

    def level_multiplier(self, k: int) -> np.ndarray:
        """Multiplier chi_k sampled on the lattice, for -1 <= k <= k_max."""
        if not (-1 <= k <= self.k_max):
            raise ValueError(f"level {k} outside [-1, {self.k_max}]")
        return self.chi[k + 1]


def build_dyadic_partition(grid: TorusGrid) -> DyadicDecomposition:
    """Build the dyadic partition of unity for a grid."""
    return DyadicDecomposition(grid)


def lp_block(f: Field, k: int, dec: DyadicDecomposition) -> Field:
    """Littlewood-Paley block delta_k f: spectral multiplication by chi_k."""
    return Field(f.grid, spectrum=f.spectrum * dec.level_multiplier(k))


def _batched_irfft(mult: np.ndarray, rspec: np.ndarray, grid: TorusGrid) -> np.ndarray:
    axes = tuple(range(1, grid.d + 1))
    return _sfft.irfftn(mult * rspec[None], s=grid.shape, axes=axes, norm="forward")


def block_decompose(f: Field, dec: DyadicDecomposition) -> np.ndarray:
    """All blocks of f at once: array (n_levels, *grid.shape) of physical values.

    Level k lives at index k + 1.  The blocks sum to f exactly on-grid.
    Results are cached on the field, which is immutable.
    """
    key = ("blocks", id(dec))
    hit = f._cache.get(key)
    if hit is None:
        blocks = _batched_irfft(dec.chi_r, field_rspec(f), f.grid)
        f._cache[key] = (dec, blocks)  # pin dec so the id stays unique
        return blocks
    return hit[1]


def block_decompose_many(fields, dec: DyadicDecomposition):
    """Blocks for several fields of one grid in a single batched transform.

    Seeds each field's cache; returns the list of block arrays.
    """
    key = ("blocks", id(dec))
    missing = [f for f in fields if key not in f._cache]
    if missing:
        grid = missing[0].grid
        specs = np.stack([field_rspec(f) for f in missing])  # (m, *rshape)
        axes = tuple(range(2, grid.d + 2))
        stack = _sfft.irfftn(
            dec.chi_r[None] * specs[:, None], s=grid.shape, axes=axes, norm="forward"
        )
        for f, blocks in zip(missing, stack):
            f._cache[key] = (dec, blocks)
    return [f._cache[key][1] for f in fields]


def _lowpass_from_blocks(blocks: np.ndarray) -> np.ndarray:
    """S_{k-1} f per level from the blocks: cumulative sum shifted by two."""
    low = np.zeros_like(blocks)
    if blocks.shape[0] > 2:
        np.cumsum(blocks[:-2], axis=0, out=low[2:])
    return low


def _lowpass_decompose(f: Field, dec: DyadicDecomposition) -> np.ndarray:
    """S_{k-1} f for every level k: physical arrays (n_levels, *shape)."""
    key = ("lowpass", id(dec))
    hit = f._cache.get(key)
    if hit is None:
        low = _lowpass_from_blocks(block_decompose(f, dec))
        f._cache[key] = (dec, low)
        return low
    return hit[1]


def lp_norm(f: Field, p: float) -> float:
    """L^p norm on [-1,1]^d: cell-volume quadrature; grid max when p = inf."""
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    return float((f.grid.cell_volume * np.sum(a**p)) ** (1.0 / p))


def _lp_norm_values(values: np.ndarray, p: float, cell_volume: float, axes) -> np.ndarray:
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=axes)
    return (cell_volume * np.sum(a**p, axis=axes)) ** (1.0 / p)


def besov_norm(f: Field, idx: BesovIndex, dec: DyadicDecomposition) -> float:
    """Finite-level Besov norm: l^q over k of 2^(alpha k) ||delta_k f||_{L^p}."""
    blocks = block_decompose(f, dec)
    axes = tuple(range(1, f.grid.d + 1))
    block_norms = _lp_norm_values(blocks, idx.p, f.grid.cell_volume, axes)
    weights = 2.0 ** (idx.alpha * np.arange(-1, dec.k_max + 1))
    seq = weights * block_norms
    if math.isinf(idx.q):
        return float(seq.max())
    return float(np.sum(seq**idx.q) ** (1.0 / idx.q))


# -- paraproducts ------------------------------------------------------------


def _check_pair(f: Field, g: Field):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def _para_lt_arrays(f_low: np.ndarray, g_blocks: np.ndarray) -> np.ndarray:
    # sum over levels of S_{k-1} f * delta_k g
    return np.einsum("l...,l...->...", f_low, g_blocks)


def _resonant_arrays(f_blocks: np.ndarray, g_blocks: np.ndarray) -> np.ndarray:
    # sum over |j - k| <= 1 of delta_j f * delta_k g
    near = f_blocks.copy()
    near[:-1] += f_blocks[1:]
    near[1:] += f_blocks[:-1]
    return np.einsum("l...,l...->...", near, g_blocks)


def paraproduct_lt(f: Field, g: Field, dec: DyadicDecomposition) -> Field:
    """Paraproduct f (low) < g (high): sum over j < k-1 of delta_j f delta_k g."""
    _check_pair(f, g)
    return Field(f.grid, values=_para_lt_arrays(_lowpass_decompose(f, dec), block_decompose(g, dec)))


def paraproduct_gt(f: Field, g: Field, dec: DyadicDecomposition) -> Field:
    """Paraproduct f (high) > g (low); equals paraproduct_lt(g, f)."""
    return paraproduct_lt(g, f, dec)


def resonant_prod(f: Field, g: Field, dec: DyadicDecomposition) -> Field:
    """Resonant part of the product: sum over |j-k| <= 1 of delta_j f delta_k g."""
    _check_pair(f, g)
    return Field(f.grid, values=_resonant_arrays(block_decompose(f, dec), block_decompose(g, dec)))


def bony_split(f: Field, g: Field, dec: DyadicDecomposition):
    """Bony decomposition of the pointwise product: (lt, res, gt).

    lt + res + gt equals f*g exactly on-grid, and gt(f, g) = lt(g, f).
    """
    _check_pair(f, g)
    fb = block_decompose(f, dec)
    gb = block_decompose(g, dec)
    fl = _lowpass_decompose(f, dec)
    gl = _lowpass_decompose(g, dec)
    lt = Field(f.grid, values=_para_lt_arrays(fl, gb))
    res = Field(f.grid, values=_resonant_arrays(fb, gb))
    gt = Field(f.grid, values=_para_lt_arrays(gl, fb))
    return lt, res, gt


# -- commutators -------------------------------------------------------------


def commutator_lt_res(f: Field, g: Field, h: Field, dec: DyadicDecomposition) -> Field:
    """Trilinear commutator (f < g) o h - f * (g o h) between paraproduct and resonant part."""
    _check_pair(f, g)
    _check_pair(f, h)
    fg = paraproduct_lt(f, g, dec)
    g_res_h = resonant_prod(g, h, dec)
    return resonant_prod(fg, h, dec) - f * g_res_h


def commutator_heat_lt(t: float, f: Field, g: Field, dec: DyadicDecomposition) -> Field:
    """Commutator of the heat flow with the paraproduct:
    exp(t Lap)(f < g) - f < (exp(t Lap) g).  Zero at t = 0."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    _check_pair(f, g)
    first = apply_heat_semigroup(paraproduct_lt(f, g, dec), t)
    second = paraproduct_lt(f, apply_heat_semigroup(g, t), dec)
    return first - second
