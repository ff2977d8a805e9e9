"""Closed-form second-order quantities of the swarm return signal.

The autocorrelation of the return is a truncated harmonic series: a constant
floor plus cosines at multiples of ``n_blades * mean_speed`` whose
coefficients are squared Bessel values, each damped by a Gaussian in lag
whenever the rotor-speed distribution has spread.  Its spectrum is a Dirac
mass at zero plus a symmetric mixture of Gaussian kernels.  With
deterministic rotor speed the autocorrelation collapses to an exact finite
double sum over blade pairs, which doubles as an independent cross-check of
the series form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ValidationError
from .model import SwarmParams, DerivedParams, band_edge, derive
from .special import MAX_ORDER, bessel_j, bessel_j_many

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
# twice the first zero of J_0 (2.404825557695773), rounded
MAINLOBE_CONSTANT = 4.8


def _prefactor(params: SwarmParams) -> float:
    """|gain|^2 * n_drones * n_rotors * n_blades^2, the series scale."""
    count = params.n_drones * params.n_rotors * params.n_blades ** 2
    return params.gain_magnitude ** 2 * count


def truncation_index(electrical_size: float, n_blades: int) -> int:
    """Smallest harmonic index beyond which the series coefficients vanish.

    A Bessel function is negligible before its order reaches its argument,
    so squared coefficients at order ``n_blades*n`` of argument
    ``electrical_size/2`` die once ``n`` exceeds
    ``electrical_size / (2*n_blades)``.
    """
    if electrical_size <= 0:
        raise ValidationError(f"electrical_size must be > 0, got {electrical_size!r}")
    if isinstance(n_blades, bool) or not isinstance(n_blades, int) or n_blades < 1:
        raise ValidationError(f"n_blades must be a positive integer, got {n_blades!r}")
    return math.ceil(electrical_size / (2.0 * n_blades))


def _series_margin(cutoff: int) -> int:
    # cutoff is a first-order estimate; the margin is validated by the
    # truncation-soundness test
    return max(20, math.ceil(0.2 * cutoff))


def harmonic_coefficients(electrical_size: float, n_blades: int, n_max: int) -> np.ndarray:
    """Squared-Bessel coefficients c_n = J_{n_blades*n}(electrical_size/2)^2.

    Returns c_1..c_n_max.  Orders beyond the Bessel evaluation envelope are
    returned as exact zeros: for any in-envelope argument (<= 2000) the
    squared value at order >= 3000 is below 1e-250 and cannot move a
    double-precision cumulative sum.
    """
    if isinstance(n_max, bool) or not isinstance(n_max, int) or n_max < 1:
        raise ValidationError(f"n_max must be a positive integer, got {n_max!r}")
    half = electrical_size / 2.0
    top = min(n_blades * n_max, MAX_ORDER)
    column = bessel_j_many(top, half)
    coeffs = np.zeros(n_max)
    reachable = top // n_blades
    orders = n_blades * np.arange(1, reachable + 1)
    coeffs[:reachable] = column[orders] ** 2
    return coeffs


@dataclass(frozen=True)
class AcfSeries:
    """Truncated harmonic-series form of the return autocorrelation."""

    params: SwarmParams
    derived: DerivedParams
    n_terms: int
    coefficients: np.ndarray   # c_1..c_{n_terms}, all >= 0
    j0_squared: float          # J_0(electrical_size/2)^2
    dc_level: float            # prefactor * j0_squared; the large-lag floor

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


def build_acf(params: SwarmParams, n_terms: int | None = None) -> AcfSeries:
    """Assemble the series coefficients for the given swarm.

    ``n_terms`` defaults to the truncation index plus a safety margin; it may
    be overridden (e.g. to probe truncation soundness).
    """
    d = derive(params)
    if n_terms is None:
        cutoff = truncation_index(d.electrical_size, params.n_blades)
        n_terms = cutoff + _series_margin(cutoff)
    coeffs = harmonic_coefficients(d.electrical_size, params.n_blades, n_terms)
    j0_sq = bessel_j(0, d.mod_index) ** 2
    return AcfSeries(params=params, derived=d, n_terms=n_terms, coefficients=coeffs,
                     j0_squared=j0_sq, dc_level=_prefactor(params) * j0_sq)


def acf_eval(acf: AcfSeries, tau):
    """Evaluate the series autocorrelation at lag(s) ``tau`` (seconds).

    Even in ``tau`` by construction.  For nonzero speed spread the value
    decays to ``dc_level`` at large lags.
    """
    p = acf.params
    t = np.abs(np.asarray(tau, dtype=float))
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    n = np.arange(1, acf.n_terms + 1, dtype=float)
    base_freq = p.n_blades * p.mean_speed
    phases = np.outer(n, base_freq * t)
    damping = np.exp(-0.5 * p.speed_variance * p.n_blades ** 2 * np.outer(n ** 2, t ** 2))
    series = acf.coefficients @ (np.cos(phases) * damping)
    values = _prefactor(p) * (acf.j0_squared + 2.0 * series)
    return float(values[0]) if scalar else values


def acf_deterministic_eval(params: SwarmParams, tau):
    """Exact autocorrelation for deterministic rotor speed (no truncation).

    A finite sum of J_0 terms over blade-index offsets; the speed variance in
    ``params`` is ignored.
    """
    d = derive(params)
    t = np.asarray(tau, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    nb = params.n_blades
    theta = 0.5 * params.mean_speed * t
    offsets = np.arange(-(nb - 1), nb)
    mult = (nb - np.abs(offsets)).astype(float)
    args = d.electrical_size * np.sin(theta[None, :] - (np.pi / nb) * offsets[:, None])
    j0_vals = bessel_j(0, args)
    values = (params.gain_magnitude ** 2 * params.n_drones * params.n_rotors) \
        * (mult @ j0_vals)
    return float(values[0]) if scalar else values


def mainlobe_width(params: SwarmParams) -> float:
    """Width scale of the autocorrelation main lobe, seconds.

    ``4.8 / (electrical_size * mean_speed)``: twice the first zero of J_0
    divided by the product, which tracks the first zero crossing of the
    deterministic-speed autocorrelation.
    """
    d = derive(params)
    return MAINLOBE_CONSTANT / (d.electrical_size * params.mean_speed)


@dataclass(frozen=True)
class PsdMixture:
    """Spectrum of the return: DC Dirac mass plus Gaussian kernels.

    Kernels come in mirror pairs at ``+-n_blades*n*mean_speed`` with standard
    deviation ``speed_std*n*n_blades``; ``side_masses[n-1]`` is the integral
    of each member of pair ``n``.  ``convention_constant`` is the single
    global factor relating :func:`psd_eval` to the plain integral transform
    of the autocorrelation, pinned by the transform round-trip check.
    """

    params: SwarmParams
    derived: DerivedParams
    dc_weight: float
    centers: np.ndarray       # positive centers, pair n at index n-1
    stds: np.ndarray
    side_masses: np.ndarray
    convention_constant: float = 1.0

    def __post_init__(self) -> None:
        for name in ("centers", "stds", "side_masses"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def kernels(self):
        """All kernels as (center, std, mass) tuples, mirror pairs included."""
        pos = [(c, s, m) for c, s, m in zip(self.centers, self.stds, self.side_masses)]
        neg = [(-c, s, m) for c, s, m in pos]
        return tuple(sorted(neg + pos))


def build_psd(params: SwarmParams, n_terms: int | None = None) -> PsdMixture:
    """Assemble the Gaussian-mixture spectrum for the given swarm.

    Requires a spread rotor-speed distribution; in the zero-variance limit
    the kernels degenerate to Dirac lines, handled by
    :func:`psd_line_spectrum` instead.
    """
    if params.speed_variance == 0.0:
        raise DomainError(
            "speed_variance is zero: the spectrum is a line spectrum; "
            "use psd_line_spectrum"
        )
    acf = build_acf(params, n_terms)
    p = params
    n = np.arange(1, acf.n_terms + 1, dtype=float)
    centers = p.n_blades * p.mean_speed * n
    stds = p.speed_std * p.n_blades * n
    side_masses = 2.0 * np.pi * _prefactor(p) * acf.coefficients
    dc_weight = SQRT_TWO_PI * acf.dc_level
    return PsdMixture(params=p, derived=acf.derived, dc_weight=dc_weight,
                      centers=centers, stds=stds, side_masses=side_masses)


def psd_eval(psd: PsdMixture, freq):
    """Continuous part of the spectrum at angular frequency ``freq`` (rad/s).

    The DC Dirac mass is reported separately in ``psd.dc_weight``, never as a
    density sample.  Mirror kernels are summed pairwise, so the result is
    exactly even in ``freq``.
    """
    f = np.asarray(freq, dtype=float)
    scalar = f.ndim == 0
    f = np.atleast_1d(f)
    c = psd.centers[:, None]
    s = psd.stds[:, None]
    m = psd.side_masses[:, None]
    pair = np.exp(-0.5 * ((f[None, :] - c) / s) ** 2) \
        + np.exp(-0.5 * ((f[None, :] + c) / s) ** 2)
    values = np.sum(m / (SQRT_TWO_PI * s) * pair, axis=0)
    return float(values[0]) if scalar else values


def psd_support(params: SwarmParams) -> tuple[float, float]:
    """Frequency interval (rad/s) that carries the whole spectrum tail.

    Symmetric: ``+-(electrical_size/2) * (mean_speed + 5*speed_std)``; the
    five-standard-deviation margin beyond the outermost kernel captures its
    tail entirely.
    """
    edge = band_edge(params)
    return (-edge, edge)


@dataclass(frozen=True)
class SpectralLine:
    """A Dirac component of the zero-spread spectrum."""

    frequency: float   # rad/s
    weight: float      # mean power carried by the line


def psd_line_spectrum(params: SwarmParams) -> list[SpectralLine]:
    """Dirac-line spectrum in the deterministic-speed (zero-variance) limit.

    Lines sit at 0 and ``+-n_blades*n*mean_speed`` up to the truncation
    index, so mirror pairs are counted separately and the pair count is the
    electrical size over the blade count.  Weights are the mean power per
    line; they sum to the zero-lag autocorrelation (within truncation).
    """
    if params.speed_variance != 0.0:
        raise DomainError(
            f"line spectrum requires speed_variance == 0, got {params.speed_variance!r}"
        )
    d = derive(params)
    cutoff = truncation_index(d.electrical_size, params.n_blades)
    coeffs = harmonic_coefficients(d.electrical_size, params.n_blades, cutoff)
    scale = _prefactor(params)
    spacing = params.n_blades * params.mean_speed
    j0_sq = bessel_j(0, d.mod_index) ** 2
    lines = [SpectralLine(frequency=0.0, weight=scale * j0_sq)]
    for n in range(1, cutoff + 1):
        weight = scale * float(coeffs[n - 1])
        lines.append(SpectralLine(frequency=n * spacing, weight=weight))
        lines.append(SpectralLine(frequency=-n * spacing, weight=weight))
    return sorted(lines, key=lambda ln: ln.frequency)


def coefficient_power_fraction(electrical_size: float, n_blades: int,
                               fraction: float, *, order: str = "magnitude",
                               n_max: int = 10_000) -> int:
    """Number of coefficients needed to hold ``fraction`` of the series power.

    Power is the cumulative sum of c_n over the first ``n_max`` coefficients.
    ``order`` selects the cumulation rule: ``"magnitude"`` sorts coefficients
    in descending size first, ``"index"`` keeps natural harmonic order.  Both
    are exposed because neither ordering is canonical.
    """
    if isinstance(fraction, bool) or not isinstance(fraction, (int, float)) \
            or not 0.0 < fraction < 1.0:
        raise ValidationError(f"fraction must lie strictly in (0, 1), got {fraction!r}")
    if order not in ("magnitude", "index"):
        raise ValidationError(f"order must be 'magnitude' or 'index', got {order!r}")
    coeffs = harmonic_coefficients(electrical_size, n_blades, n_max)
    if order == "magnitude":
        coeffs = np.sort(coeffs)[::-1]
    cumulative = np.cumsum(coeffs)
    target = fraction * cumulative[-1]
    return int(np.searchsorted(cumulative, target) + 1)
