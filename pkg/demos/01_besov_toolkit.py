"""Tour of the Littlewood-Paley / Besov / paraproduct toolkit.

Builds the dyadic partition on a one-dimensional grid, decomposes a field
into frequency blocks, checks the exact Bony identity, and fits the heat
smoothing exponent empirically.

Run:  python3 demos/01_besov_toolkit.py
"""

import numpy as np

from phi4field import (
    BesovIndex,
    Field,
    besov_norm,
    bony_split,
    build_dyadic_partition,
    lp_block,
    make_grid,
)
from phi4field.inequalities import fit_inequality_exponent

grid = make_grid(1, 256)
dec = build_dyadic_partition(grid)
print(f"grid: d={grid.d}, n={grid.n}; dyadic levels -1..{dec.k_max}")
print(f"partition of unity error: {np.abs(dec.chi.sum(axis=0) - 1).max():.2e}")

rng = np.random.default_rng(0)
f = Field.from_values(grid, rng.standard_normal(grid.shape))
print("\nblock sup-norms by level:")
for k in range(-1, dec.k_max + 1):
    print(f"  level {k:+d}: {lp_block(f, k, dec).max_abs():.4f}")

g = Field.from_values(grid, rng.standard_normal(grid.shape))
lt, res, gt = bony_split(f, g, dec)
err = (lt + res + gt - f * g).max_abs()
print(f"\nBony identity |lt+res+gt - fg|_inf = {err:.2e}")

idx = BesovIndex(-0.5)
print(f"Besov norm B^-1/2_inf,inf of a white sample: {besov_norm(f, idx, dec):.4f}")

print("\nheat smoothing exponent fits (target -(alpha-beta)/2):")
for diff in (0.5, 1.0, 1.5):
    r = fit_inequality_exponent("heat_smoothing", 8, 42, alpha=diff, beta=0.0, p=2.0)
    print(f"  alpha-beta={diff}: fitted {r.exponent:+.4f}  target {-diff/2:+.3f}")

r = fit_inequality_exponent("interpolation", 50, 7)
print(f"\ninterpolation worst constant (exactly 1 in theory): {r.worst_constant:.12f}")
