"""Discrete torus geometry, Fourier transforms, and spectral multipliers.

The spatial domain is the torus [-1, 1]^d (period 2), discretized with n
points per axis.  The frequency lattice is zeta = pi * k with integer
k in {-n/2, ..., n/2 - 1} per axis, so the mode functions are
exp(i * pi * k . x).

Transform normalization: a constant field c has a single nonzero Fourier
coefficient equal to c at k = 0.  Spectra are stored in this "continuum
coefficient" convention, i.e. ``Field.spectrum[k]`` is the coefficient of
exp(i * pi * k . x); it differs from the raw FFT output by the phase
(-1)^(k_1 + ... + k_d) coming from the grid offset x_j = -1 + 2j/n.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.fft as _sfft

__all__ = [
    "TorusGrid",
    "Field",
    "make_grid",
    "transform",
    "apply_heat_semigroup",
    "apply_phi1_weight",
    "apply_multiplier",
    "phi1",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the torus [-1, 1]^d.

    Attributes
    ----------
    d : int
        Spatial dimension (1, 2 or 3).
    n : int
        Points per axis; a power of two, at least 8.
    side : float
        Physical period (always 2).
    cell_volume : float
        Quadrature weight (2/n)^d of one grid cell.
    """

    d: int
    n: int
    side: float = 2.0
    # derived arrays, filled in __post_init__
    cell_volume: float = dc_field(init=False, repr=False)
    shape: tuple = dc_field(init=False, repr=False)
    k_lattice: tuple = dc_field(init=False, repr=False)
    zeta2: np.ndarray = dc_field(init=False, repr=False)
    phase: np.ndarray = dc_field(init=False, repr=False)
    rshape: tuple = dc_field(init=False, repr=False)
    zeta2_r: np.ndarray = dc_field(init=False, repr=False)
    k_lattice_r: tuple = dc_field(init=False, repr=False)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"points per axis must be a power of two >= 8, got {self.n}")
        object.__setattr__(self, "cell_volume", (self.side / self.n) ** self.d)
        object.__setattr__(self, "shape", (self.n,) * self.d)
        # integer wavenumbers in FFT layout: [0, 1, .., n/2-1, -n/2, .., -1]
        k1 = np.fft.fftfreq(self.n, d=1.0 / self.n)
        axes = tuple(np.arange(self.d))
        ks = np.meshgrid(*([k1] * self.d), indexing="ij")
        object.__setattr__(self, "k_lattice", tuple(k.astype(np.int64) for k in ks))
        zeta2 = np.zeros(self.shape)
        for k in ks:
            zeta2 += (np.pi * k) ** 2
        object.__setattr__(self, "zeta2", _readonly(zeta2))
        ktot = np.zeros(self.shape, dtype=np.int64)
        for k in self.k_lattice:
            ktot = ktot + k
        object.__setattr__(self, "phase", _readonly(np.where(ktot % 2 == 0, 1.0, -1.0)))
        # half-spectrum (rfft) lattice used by the performance-critical paths
        rshape = self.shape[:-1] + (self.n // 2 + 1,)
        object.__setattr__(self, "rshape", rshape)
        k_half = np.arange(self.n // 2 + 1)
        rks = np.meshgrid(*([k1] * (self.d - 1) + [k_half]), indexing="ij")
        zeta2_r = np.zeros(rshape)
        for k in rks:
            zeta2_r += (np.pi * k) ** 2
        object.__setattr__(self, "zeta2_r", _readonly(zeta2_r))
        object.__setattr__(self, "k_lattice_r", tuple(k.astype(np.int64) for k in rks))
        del axes

    @property
    def size(self) -> int:
        """Total number of grid points n^d."""
        return self.n**self.d

    @property
    def volume(self) -> float:
        """Volume of the torus, side^d."""
        return self.side**self.d

    def coordinates(self):
        """Return the d coordinate arrays x_a on the grid (values in [-1, 1))."""
        x1 = -1.0 + 2.0 * np.arange(self.n) / self.n
        return np.meshgrid(*([x1] * self.d), indexing="ij")

    def nyquist_radius(self) -> float:
        """Largest |zeta| represented on the lattice (the corner mode)."""
        return np.pi * (self.n // 2) * np.sqrt(self.d)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def make_grid(d: int, n: int) -> TorusGrid:
    """Create a torus grid with d dimensions and n points per axis.

    Raises ValueError unless d is in {1, 2, 3} and n is a power of two >= 8.
    """
    return TorusGrid(d=d, n=int(n))


class Field:
    """Real scalar field on a :class:`TorusGrid`.

    Immutable: every operation returns a new field.  Physical values and the
    Fourier spectrum are cached lazily; either representation may be supplied
    at construction.
    """

    __slots__ = ("grid", "_values", "_spectrum", "_cache")

    def __init__(self, grid: TorusGrid, values=None, spectrum=None):
        if values is None and spectrum is None:
            raise ValueError("need values or spectrum")
        self.grid = grid
        self._cache = {}
        if values is not None:
            values = np.asarray(values, dtype=np.float64)
            if values.shape != grid.shape:
                raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
            values = _readonly(values.copy())
        if spectrum is not None:
            spectrum = np.asarray(spectrum, dtype=np.complex128)
            if spectrum.shape != grid.shape:
                raise ValueError(f"spectrum shape {spectrum.shape} != grid shape {grid.shape}")
            spectrum = _readonly(spectrum.copy())
        self._values = values
        self._spectrum = spectrum

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_values(cls, grid: TorusGrid, values) -> "Field":
        return cls(grid, values=values)

    @classmethod
    def from_spectrum(cls, grid: TorusGrid, spectrum) -> "Field":
        return cls(grid, spectrum=spectrum)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "Field":
        return cls(grid, values=np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: TorusGrid, c: float) -> "Field":
        return cls(grid, values=np.full(grid.shape, float(c)))

    # -- representations ---------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        """Physical-space values (read-only array)."""
        if self._values is None:
            v = _sfft.ifftn(self._spectrum * self.grid.phase, norm="forward")
            self._values = _readonly(v.real)
        return self._values

    @property
    def spectrum(self) -> np.ndarray:
        """Fourier coefficients of exp(i pi k.x), read-only array in FFT layout."""
        if self._spectrum is None:
            s = _sfft.fftn(self._values, norm="forward") * self.grid.phase
            self._spectrum = _readonly(s)
        return self._spectrum

    # -- arithmetic (pointwise, returns new fields) -------------------------

    def _check(self, other: "Field"):
        if other.grid is not self.grid and other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, values=self.values + other.values)
        return Field(self.grid, values=self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, values=self.values - other.values)
        return Field(self.grid, values=self.values - float(other))

    def __rsub__(self, other):
        return Field(self.grid, values=float(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, values=self.values * other.values)
        return Field(self.grid, values=self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, values=-self.values)

    # -- reductions ---------------------------------------------------------

    def max_abs(self) -> float:
        """Sup norm max|f| over the grid."""
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        """Spatial average of the field."""
        return float(np.mean(self.values))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


def field_rspec(f: Field) -> np.ndarray:
    """Half-lattice (rfft) spectrum of a field, cached on the instance.

    Internal fast path: no continuum phase is applied; radial multipliers
    are insensitive to it.
    """
    spec = f._cache.get("rspec")
    if spec is None:
        spec = _sfft.rfftn(f.values, norm="forward")
        f._cache["rspec"] = spec
    return spec


def field_from_rspec(grid: TorusGrid, rspec: np.ndarray) -> Field:
    """Build a field from its half-lattice spectrum, seeding the cache."""
    values = _sfft.irfftn(rspec, s=grid.shape, norm="forward")
    f = Field(grid, values=values)
    f._cache["rspec"] = rspec
    return f


def transform(f: Field, direction: str) -> Field:
    """Realize the forward or inverse Fourier transform of a field.

    ``direction="forward"`` returns a field with the spectral cache
    populated; ``direction="inverse"`` returns one with physical values
    populated.  Both representations describe the same field.
    """
    if direction == "forward":
        f.spectrum
        return f
    if direction == "inverse":
        f.values
        return f
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def apply_multiplier(f: Field, multiplier: np.ndarray) -> Field:
    """Apply a real Fourier multiplier m(zeta): coefficient-wise product."""
    return Field(f.grid, spectrum=f.spectrum * multiplier)


def apply_heat_semigroup(f: Field, t: float, mass: float = 0.0) -> Field:
    """Apply exp(t(Laplacian - mass)): per-mode factor exp(-t(|zeta|^2 + mass)).

    t = 0, mass = 0 is the identity.  Negative t is rejected.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if mass < 0:
        raise ValueError(f"mass must be >= 0, got {mass}")
    if t == 0.0:
        return f
    return apply_multiplier(f, np.exp(-t * (f.grid.zeta2 + mass)))


def phi1(z: np.ndarray) -> np.ndarray:
    """First exponential-integrator weight phi_1(z) = (e^z - 1)/z, phi_1(0) = 1.

    Evaluated by Taylor series below |z| < 1e-6 to avoid cancellation.
    """
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < 1e-6
    zs = np.where(small, 1.0, z)  # avoid 0/0 in the generic branch
    out = np.expm1(zs) / zs
    series = 1.0 + z / 2.0 + z * z / 6.0
    return np.where(small, series, out)


def apply_phi1_weight(f: Field, t: float, mass: float = 0.0) -> Field:
    """Apply phi_1(-t(|zeta|^2 + mass)) mode by mode.  Requires t > 0."""
    if t <= 0:
        raise ValueError(f"time must be > 0, got {t}")
    if mass < 0:
        raise ValueError(f"mass must be >= 0, got {mass}")
    return apply_multiplier(f, phi1(-t * (f.grid.zeta2 + mass)))
