"""Spectral simulation toolkit for the renormalized dynamic Phi^4 model on the torus.

Library layout:

- :mod:`phi4field.grid` -- torus geometry, FFTs, heat-semigroup and
  exponential-integrator multipliers
- :mod:`phi4field.besov` -- Littlewood-Paley blocks, Besov norms,
  paraproducts, resonant products, commutators
- :mod:`phi4field.inequalities` -- empirical scaling-exponent fits for the
  functional inequalities used by the analysis
- :mod:`phi4field.noise` -- white-noise sampling, exact Ornstein-Uhlenbeck
  updates, Wick constants
- :mod:`phi4field.diagrams` -- the renormalized stochastic diagram set and
  its evolution
- :mod:`phi4field.solver` -- direct / Da Prato-Debussche / paracontrolled
  time steppers and diagnostics
- :mod:`phi4field.gronwall` -- singular Gronwall kernels and constants
- :mod:`phi4field.harness` -- orchestrated experiments with pass/fail verdicts
- :mod:`phi4field.config`, :mod:`phi4field.fieldio`, :mod:`phi4field.cli` --
  configuration, binary field snapshots, command line
"""

from .grid import (
    Field,
    TorusGrid,
    apply_heat_semigroup,
    apply_phi1_weight,
    make_grid,
    transform,
)
from .besov import (
    BesovIndex,
    DyadicDecomposition,
    besov_norm,
    bony_split,
    build_dyadic_partition,
    commutator_heat_lt,
    commutator_lt_res,
    lp_block,
    lp_norm,
    paraproduct_gt,
    paraproduct_lt,
    resonant_prod,
)

__version__ = "0.1.0"
