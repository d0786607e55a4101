"""Singular Gronwall kernels, their Gamma-function series, and constant helpers.

For kernels k1(s) = e^(-cs) s^(-sigma') and k2(s) = K0 e^(-cs) s^(-sigma), a
bound f <= g + k1*h + k2*f implies f <= g + kbar2*g + kbar1*h with the
explicit series kernels

    kbar1(s) = e^(-cs) s^(-sigma') sum_n (K0 Gamma(1-sigma))^n
               Gamma(1-sigma') / Gamma(n(1-sigma) + (1-sigma')) s^(n(1-sigma))
    kbar2(s) = e^(-cs) s^(-sigma)  sum_n (K0 Gamma(1-sigma))^(n+1)
               / Gamma((n+1)(1-sigma)) s^(n(1-sigma))

The series are entire in s^(1-sigma); terms are evaluated in log space and
summation stops when the next term falls below 1e-16 of the partial sum.
The asymptotic growth rate of the sums is (K0 Gamma(1-sigma))^(1/(1-sigma)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "GronwallParams",
    "GronwallConstants",
    "kbar",
    "log_kbar",
    "mittag_series",
    "series_growth_rate",
    "measured_growth_rate",
    "gronwall_apply",
    "constants",
]

_REL_TOL = 1e-16
_MAX_TERMS = 10_000


@dataclass(frozen=True)
class GronwallParams:
    """Parameters of the singular Gronwall kernels."""

    sigma: float
    sigma_prime: float
    K0: float
    c: float = 0.0

    def __post_init__(self):
        if not (0 < self.sigma < 1):
            raise ValueError(f"sigma must be in (0,1), got {self.sigma}")
        if not (0 < self.sigma_prime < 1):
            raise ValueError(f"sigma_prime must be in (0,1), got {self.sigma_prime}")
        if not self.K0 > 0:
            raise ValueError(f"K0 must be > 0, got {self.K0}")


def _log_gamma_series(s: float, sigma: float, log_coeff_base: float, offset: float, lead: int) -> float:
    """log of sum_n exp((n + lead) log_coeff_base) s^(n(1-sigma))
    / Gamma(n(1-sigma) + offset), accumulated in log space.

    The terms decay super-exponentially through the Gamma denominator, so the
    running maximum-shifted accumulation converges; summation stops when the
    next term is below 1e-16 of the partial sum.
    """
    one_ms = 1.0 - sigma
    log_s = math.log(s)
    log_terms = []
    peak = -math.inf
    for n in range(_MAX_TERMS):
        lt = (n + lead) * log_coeff_base + n * one_ms * log_s - gammaln(n * one_ms + offset)
        log_terms.append(lt)
        peak = max(peak, lt)
        if n > 0 and lt - peak < math.log(_REL_TOL):
            break
    total = sum(math.exp(lt - peak) for lt in log_terms)
    return peak + math.log(total)


def log_kbar(s: float, params: GronwallParams):
    """Natural logs of the iterated kernels (log kbar1, log kbar2) at s > 0.

    Safe for arguments where the kernels overflow double precision.
    """
    if s <= 0:
        raise ValueError(f"s must be > 0, got {s}")
    sig, sigp, K0, c = params.sigma, params.sigma_prime, params.K0, params.c
    log_base = math.log(K0) + gammaln(1.0 - sig)
    log1 = (
        -c * s
        - sigp * math.log(s)
        + gammaln(1.0 - sigp)
        + _log_gamma_series(s, sig, log_base, 1.0 - sigp, lead=0)
    )
    log2 = -c * s - sig * math.log(s) + _log_gamma_series(s, sig, log_base, 1.0 - sig, lead=1)
    return float(log1), float(log2)


def kbar(s: float, params: GronwallParams):
    """Evaluate the iterated kernels (kbar1, kbar2) at s > 0.

    Values that exceed double precision come back as +inf; use
    :func:`log_kbar` to stay in log space.
    """
    log1, log2 = log_kbar(s, params)
    k1 = math.exp(log1) if log1 < 709 else math.inf
    k2 = math.exp(log2) if log2 < 709 else math.inf
    return k1, k2


def mittag_series(x: float, sigma: float) -> float:
    """The comparison series sum_n x^(n(1-sigma)) / Gamma(n(1-sigma) + 1).

    For x >= 1 it is bounded by floor(1/(1-sigma) + 1) * x * exp(x).
    """
    if x <= 0:
        raise ValueError(f"x must be > 0, got {x}")
    return math.exp(_log_gamma_series(x, sigma, 0.0, 1.0, lead=0))


def series_growth_rate(sigma: float, K0: float = 1.0) -> float:
    """Asymptotic exponential rate (K0 Gamma(1-sigma))^(1/(1-sigma)) of the sums."""
    return (K0 * math.gamma(1.0 - sigma)) ** (1.0 / (1.0 - sigma))


def measured_growth_rate(s: float, sigma: float, K0: float = 1.0) -> float:
    """(1/s) log of the kbar2 Gamma-series with its s^-sigma prefactor removed.

    Converges to :func:`series_growth_rate` as s grows; evaluated in log
    space so large rates do not overflow.
    """
    params = GronwallParams(sigma=sigma, sigma_prime=0.5, K0=K0, c=0.0)
    _, log2 = log_kbar(s, params)
    return (log2 + sigma * math.log(s)) / s


def _singular_weights(m: int, dt: float, sigma: float) -> np.ndarray:
    """Quadrature weights for int_0^{m dt} u^(-sigma) phi(u) du on nodes u_j = j dt.

    The power-law factor is integrated exactly against a piecewise-linear
    interpolant of phi, which handles the u -> 0 endpoint without special
    casing; sigma in (0, 1).
    """
    j = np.arange(m + 1, dtype=np.float64)
    a, b = 1.0 - sigma, 2.0 - sigma
    # I0[i] = int_{i}^{i+1} u^-sigma du,  I1[i] = int_{i}^{i+1} u^(1-sigma) du
    edges = j * dt
    p0 = edges**a / a
    p1 = edges**b / b
    I0 = np.diff(p0)
    I1 = np.diff(p1)
    w = np.zeros(m + 1)
    # phi linear on [u_i, u_{i+1}]: phi = phi_i (u_{i+1}-u)/dt + phi_{i+1} (u-u_i)/dt
    left = (edges[1:] * I0 - I1) / dt
    right = (I1 - edges[:-1] * I0) / dt
    w[:-1] += left
    w[1:] += right
    return w


def gronwall_apply(g, h, params: GronwallParams, times) -> np.ndarray:
    """Evaluate the bound g(t) + int_0^t (kbar2(t-s) g(s) + kbar1(t-s) h(s)) ds
    on a uniform time grid.

    g and h are arrays sampled at the given times; the singular endpoints of
    the kernels are handled with exact power-law quadrature per cell.
    """
    times = np.asarray(times, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if times.ndim != 1 or len(times) < 2:
        raise ValueError("need a time grid with at least two points")
    dts = np.diff(times)
    dt = dts[0]
    if not np.allclose(dts, dt, rtol=1e-10, atol=1e-14):
        raise ValueError("time grid must be uniform")
    if g.shape != times.shape or h.shape != times.shape:
        raise ValueError("g, h must be sampled on the time grid")
    m = len(times) - 1
    # kernel = u^-sigma * A(u) with A smooth; fold A into the sampled function
    u = np.arange(1, m + 1) * dt
    k1u = np.array([kbar(ui, params)[0] for ui in u])
    k2u = np.array([kbar(ui, params)[1] for ui in u])
    A1 = np.concatenate([[_limit_factor(params, prime=True)], k1u * u**params.sigma_prime])
    A2 = np.concatenate([[_limit_factor(params, prime=False)], k2u * u**params.sigma])
    bound = g.copy()
    for i in range(1, m + 1):
        w1 = _singular_weights(i, dt, params.sigma_prime)
        w2 = _singular_weights(i, dt, params.sigma)
        # integrand at s = times[j]: kernel(t_i - s) * g(s); kernel argument
        # decreases from t_i to 0 as j runs 0..i
        phi2 = A2[i::-1] * g[: i + 1]
        phi1 = A1[i::-1] * h[: i + 1]
        bound[i] += float(w2[::-1] @ phi2) + float(w1[::-1] @ phi1)
    return bound


def _limit_factor(params: GronwallParams, prime: bool) -> float:
    """u -> 0 limit of kbar_i(u) * u^sigma_i (the n = 0 series coefficient)."""
    if prime:
        return 1.0  # Gamma(1-sigma') / Gamma(1-sigma') = 1
    return params.K0 * math.gamma(1.0 - params.sigma) / math.gamma(1.0 - params.sigma)


@dataclass(frozen=True)
class GronwallConstants:
    """Splitting constant c = c0 K^(30p) and surplus rate unc = c - (8K)^8.

    When c overflows double precision the field ``c`` is +inf and ``log_c``
    (natural log, always finite) should be used instead; ``c_is_log`` records
    whether the printable value had to stay in log space.
    """

    c: float
    log_c: float
    c_is_log: bool
    unc: float

    def __iter__(self):
        return iter((self.c if not self.c_is_log else self.log_c, self.unc))


def constants(K: float, p: int, c0: float) -> GronwallConstants:
    """Compute c = c0 * K^(30 p) and unc = c - (8 K)^8 for a diagram bound K >= 1."""
    if K < 1:
        raise ValueError(f"diagram bound K must be >= 1, got {K}")
    if c0 <= 0:
        raise ValueError(f"c0 must be > 0, got {c0}")
    log_c = math.log(c0) + 30.0 * p * math.log(K)
    is_log = log_c > 300.0 * math.log(10.0)
    c = math.inf if is_log else math.exp(log_c)
    eight_k_8 = (8.0 * K) ** 8
    unc = c - eight_k_8
    return GronwallConstants(c=c, log_c=log_c, c_is_log=is_log, unc=unc)
