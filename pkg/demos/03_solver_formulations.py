"""The three formulations agree: direct vs paracontrolled under shared noise.

Runs the direct renormalized equation and the paracontrolled (v, w) system
from the same initial data on one noise path, reconstructs X from the
decomposition, and shows first-order convergence of the gap as the step is
refined.  Also demonstrates the splitting-constant invariance of v + w.

Run:  python3 demos/03_solver_formulations.py  (about a minute)
"""

import numpy as np

from phi4field import Field, build_dyadic_partition, make_grid
from phi4field.diagrams import initial_diagrams
from phi4field.harness import band_limited_profile
from phi4field.noise import member_rng, wick_c2_exact
from phi4field.solver import (
    ModelParams,
    init_state,
    reconstruct_x,
    simulate_direct,
    simulate_paracontrolled,
)

grid = make_grid(3, 16)
dec = build_dyadic_partition(grid)
c2 = wick_c2_exact(grid, dec, dt=5e-4)
w0 = band_limited_profile(grid)
horizon = 0.125
dts = [8e-4, 4e-4, 2e-4]
dt_min = min(dts)
params = ModelParams(m=0.0, c=1.0)

print("dt        |X_para - X_direct|_inf   |(v+w)_c1 - (v+w)_c50|_inf")
for dt in dts:
    n = int(round(horizon / dt))
    sub = int(round(dt / dt_min))

    rng = member_rng(42)
    ds = initial_diagrams(grid, rng, dec, c2=c2)
    st = init_state(Field.zeros(grid), w0, ds, params)
    tp = simulate_paracontrolled(st, dt, n, rng, dec, record_every=n, substeps=sub)
    x_para = reconstruct_x(tp.final_state)

    rng = member_rng(42)
    ds_d = initial_diagrams(grid, rng, dec, c2=c2)
    x0 = ds_d.x1 - ds_d.x30 + w0
    td = simulate_direct(x0, dt, n, ds_d, params.m, rng, dec, record_every=n, substeps=sub)
    gap = (x_para - td.final_state).max_abs()

    sums = []
    for c in (1.0, 50.0):
        rng = member_rng(42)
        ds_c = initial_diagrams(grid, rng, dec, c2=c2)
        st_c = init_state(Field.zeros(grid), w0, ds_c, ModelParams(m=0.0, c=c))
        tc = simulate_paracontrolled(st_c, dt, n, rng, dec, record_every=n, substeps=sub)
        sums.append(tc.final_state.v + tc.final_state.w)
    c_gap = (sums[0] - sums[1]).max_abs()
    print(f"{dt:.1e}   {gap:.3e}               {c_gap:.3e}")

print("\nboth gaps shrink linearly with dt: the reconstruction solves the")
print("same renormalized equation, and v + w does not feel the splitting.")
