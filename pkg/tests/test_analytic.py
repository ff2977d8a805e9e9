import math

import numpy as np
import pytest
import scipy.optimize
import scipy.special

import swarmdoppler as sd
from swarmdoppler.exceptions import DomainError, ValidationError
from helpers import (mavic_params, fit_convention_constant, random_params,
                     transform_of_analytic_acf)

# 40-digit-arithmetic references at the exact float inputs of the reference
# configuration (blade 0.21 m, wavelength 0.03 m, mean speed 523 rad/s)
MAVIC_DC_LEVEL = 0.05773234942134046
MAVIC_J0_SQ = 0.0036082718388337786
MAVIC_RDET_ZERO = 8.340045034754912
MAVIC_C1 = 0.0037737419761765816
MAVIC_MAINLOBE = 5.216769508611702e-05
MAVIC_FIRST_NULL = 5.405415692826266e-05


def test_truncation_index_reference():
    assert sd.truncation_index(175.9292, 2) == 44


def test_truncation_index_exact_integer_edge():
    assert sd.truncation_index(2.0, 1) == 1


def test_truncation_index_three_blades():
    assert sd.truncation_index(175.9292, 3) == 30


def test_truncation_index_validation():
    with pytest.raises(ValidationError):
        sd.truncation_index(0.0, 2)
    with pytest.raises(ValidationError):
        sd.truncation_index(10.0, 0)


def test_build_acf_reference_values():
    acf = sd.build_acf(mavic_params())
    assert acf.n_terms == 44 + 20
    assert acf.dc_level == pytest.approx(MAVIC_DC_LEVEL, rel=1e-11)
    assert acf.j0_squared == pytest.approx(MAVIC_J0_SQ, rel=1e-11)
    assert acf.coefficients[0] == pytest.approx(MAVIC_C1, rel=1e-10)
    assert np.all(acf.coefficients >= 0.0)


def test_build_acf_doubling_drone_count_scales_exactly():
    base = sd.build_acf(mavic_params())
    doubled = sd.build_acf(mavic_params(n_drones=2))
    taus = np.linspace(0.0, 3e-4, 17)
    assert np.array_equal(sd.acf_eval(doubled, taus), 2.0 * sd.acf_eval(base, taus))
    assert doubled.dc_level == 2.0 * base.dc_level


def test_acf_large_lag_settles_to_floor():
    acf = sd.build_acf(mavic_params())
    assert sd.acf_eval(acf, 1e6) == acf.dc_level


def test_acf_zero_lag_matches_deterministic_form():
    params = mavic_params()
    acf = sd.build_acf(params)
    series = sd.acf_eval(acf, 0.0)
    exact = sd.acf_deterministic_eval(params, 0.0)
    assert exact == pytest.approx(MAVIC_RDET_ZERO, rel=1e-12)
    assert series == pytest.approx(exact, rel=1e-6)


def test_acf_evenness_is_exact():
    acf = sd.build_acf(mavic_params())
    rng = np.random.default_rng(3)
    taus = rng.uniform(0.0, 1e-2, 64)
    assert np.array_equal(sd.acf_eval(acf, taus), sd.acf_eval(acf, -taus))


def test_acf_bounded_by_zero_lag():
    rng = np.random.default_rng(11)
    for _ in range(20):
        params = random_params(rng)
        acf = sd.build_acf(params)
        peak = sd.acf_eval(acf, 0.0)
        taus = rng.uniform(0.0, 1.0, 200)
        assert np.all(np.abs(sd.acf_eval(acf, taus)) <= peak * (1.0 + 1e-9))


def test_acf_series_truncation_soundness():
    rng = np.random.default_rng(5)
    for params in [mavic_params()] + [random_params(rng) for _ in range(5)]:
        acf = sd.build_acf(params)
        extended = sd.build_acf(params, n_terms=math.ceil(1.5 * acf.n_terms))
        taus = np.linspace(0.0, 10.0 * sd.mainlobe_width(params), 300)
        base = sd.acf_eval(acf, taus)
        longer = sd.acf_eval(extended, taus)
        scale = abs(sd.acf_eval(acf, 0.0))
        assert np.max(np.abs(longer - base)) <= 1e-9 * scale


def test_series_matches_deterministic_form_without_spread():
    rng = np.random.default_rng(17)
    cases = [mavic_params(speed_variance=0.0)]
    cases += [random_params(rng, sigma_zero=True) for _ in range(3)]
    for params in cases:
        acf = sd.build_acf(params)
        taus = np.linspace(0.0, 10.0 * sd.mainlobe_width(params), 1000)
        series = sd.acf_eval(acf, taus)
        exact = sd.acf_deterministic_eval(params, taus)
        rel = np.max(np.abs(series - exact)) / abs(sd.acf_eval(acf, 0.0))
        assert rel <= 1e-6


def test_deterministic_single_blade_zero_lag():
    params = mavic_params(n_blades=1, speed_variance=0.0)
    expected = params.gain_magnitude ** 2 * params.n_drones * params.n_rotors
    assert sd.acf_deterministic_eval(params, 0.0) == pytest.approx(expected, rel=1e-12)


def test_deterministic_single_blade_periodicity():
    params = mavic_params(n_blades=1, speed_variance=0.0)
    period = 2.0 * math.pi / params.mean_speed
    taus = np.linspace(0.0, period, 50)
    a = sd.acf_deterministic_eval(params, taus)
    b = sd.acf_deterministic_eval(params, taus + period)
    assert np.allclose(a, b, rtol=1e-9, atol=1e-9)


def test_mainlobe_width_reference_value():
    assert sd.mainlobe_width(mavic_params()) == pytest.approx(MAVIC_MAINLOBE, rel=1e-12)


def test_mainlobe_width_scalings():
    params = mavic_params()
    base = sd.mainlobe_width(params)
    assert sd.mainlobe_width(mavic_params(mean_speed=1046.0)) == \
        pytest.approx(base / 2.0, rel=1e-12)
    assert sd.mainlobe_width(mavic_params(blade_length=0.42)) == \
        pytest.approx(base / 2.0, rel=1e-12)


def _first_null(params):
    width = sd.mainlobe_width(params)

    def value(tau):
        return sd.acf_deterministic_eval(params, float(tau))

    taus = np.linspace(1e-9, 3.0 * width, 2000)
    vals = sd.acf_deterministic_eval(params, taus)
    sign_change = np.nonzero(vals[:-1] * vals[1:] < 0)[0][0]
    return scipy.optimize.brentq(value, taus[sign_change], taus[sign_change + 1],
                                 xtol=1e-16)


def test_first_null_tracks_width_estimate():
    params = mavic_params()
    null = _first_null(params)
    assert null == pytest.approx(MAVIC_FIRST_NULL, rel=1e-6)
    assert abs(null - sd.mainlobe_width(params)) / sd.mainlobe_width(params) <= 0.05


def test_build_psd_reference_kernels():
    params = mavic_params()
    psd = sd.build_psd(params)
    n = np.arange(1, psd.centers.size + 1)
    assert np.array_equal(psd.centers, 1046.0 * n)
    assert np.array_equal(psd.stds, params.speed_std * 2.0 * n)
    assert psd.dc_weight == pytest.approx(math.sqrt(2 * math.pi) * MAVIC_DC_LEVEL,
                                          rel=1e-11)
    # mirror pairs with equal masses
    kernels = psd.kernels
    assert len(kernels) == 2 * psd.centers.size
    for center, std, mass in kernels:
        mirrored = (-center, std, mass)
        assert mirrored in kernels
    # the cutoff kernel sits at the band edge mean_speed * size/2
    cutoff = sd.truncation_index(sd.derive(params).electrical_size, params.n_blades)
    edge = sd.derive(params).mod_index * params.mean_speed
    assert psd.centers[cutoff - 1] == pytest.approx(edge, rel=1e-2)


def test_build_psd_rejects_zero_variance():
    with pytest.raises(DomainError, match="line"):
        sd.build_psd(mavic_params(speed_variance=0.0))


def test_psd_eval_symmetry_is_exact():
    psd = sd.build_psd(mavic_params())
    rng = np.random.default_rng(23)
    freqs = rng.uniform(0.0, 5e4, 200)
    assert np.array_equal(sd.psd_eval(psd, freqs), sd.psd_eval(psd, -freqs))


def test_psd_eval_nonnegative_and_decays():
    psd = sd.build_psd(mavic_params())
    lo, hi = sd.psd_support(mavic_params())
    freqs = np.linspace(lo, hi, 2001)
    values = sd.psd_eval(psd, freqs)
    assert np.all(values >= 0.0)
    assert sd.psd_eval(psd, 4.0 * hi) < 1e-12 * values.max()


def test_psd_peak_sits_on_first_kernel():
    psd = sd.build_psd(mavic_params())
    freqs = np.linspace(900.0, 1200.0, 4001)
    values = sd.psd_eval(psd, freqs)
    peak = freqs[np.argmax(values)]
    assert abs(peak - 1046.0) <= psd.stds[0]


def test_psd_scaling_with_rotor_count_exact():
    base = sd.build_psd(mavic_params())
    scaled = sd.build_psd(mavic_params(n_rotors=8))
    freqs = np.linspace(-5e4, 5e4, 101)
    assert np.array_equal(sd.psd_eval(scaled, freqs), 2.0 * sd.psd_eval(base, freqs))


def test_psd_support_reference_interval():
    lo, hi = sd.psd_support(mavic_params())
    assert lo == -hi
    assert hi == pytest.approx(48290.87001810405, rel=1e-12)
    params0 = mavic_params(speed_variance=0.0)
    lo0, hi0 = sd.psd_support(params0)
    assert hi0 == sd.derive(params0).mod_index * params0.mean_speed
    doubled = sd.psd_support(mavic_params(blade_length=0.42))[1]
    assert doubled == pytest.approx(2.0 * hi, rel=1e-12)


def test_line_spectrum_reference_layout():
    params = mavic_params(speed_variance=0.0)
    lines = sd.psd_line_spectrum(params)
    freqs = np.array([ln.frequency for ln in lines])
    weights = np.array([ln.weight for ln in lines])
    assert len(lines) == 2 * 44 + 1
    # paired components land within one of electrical_size / n_blades
    size = sd.derive(params).electrical_size
    assert abs((len(lines) - 1) - size / params.n_blades) <= 1.0
    positive = freqs[freqs > 0]
    assert np.array_equal(np.diff(positive), np.full(43, 1046.0))
    assert np.array_equal(freqs, -freqs[::-1])
    acf = sd.build_acf(params)
    assert weights.sum() == pytest.approx(sd.acf_eval(acf, 0.0), rel=0.05)
    mirrored = {(-ln.frequency, ln.weight) for ln in lines}
    assert mirrored == {(ln.frequency, ln.weight) for ln in lines}


def test_line_spectrum_minimal_case():
    with pytest.warns(UserWarning):   # deliberately long carrier
        params = sd.SwarmParams(n_drones=1, n_rotors=1, n_blades=1,
                                blade_length=2.0 / (8.0 * math.pi),
                                wavelength=1.0, mean_speed=1.0,
                                speed_variance=0.0)
    lines = sd.psd_line_spectrum(params)
    assert [ln.frequency for ln in lines] == [-1.0, 0.0, 1.0]


def test_line_spectrum_rejects_spread_speeds():
    with pytest.raises(DomainError):
        sd.psd_line_spectrum(mavic_params())


def test_harmonic_coefficients_match_direct_bessel():
    size = sd.derive(mavic_params()).electrical_size
    coeffs = sd.harmonic_coefficients(size, 2, 80)
    n = np.arange(1, 81)
    reference = scipy.special.jv(2 * n, size / 2.0) ** 2
    assert np.allclose(coeffs, reference, rtol=5e-9, atol=1e-18)


def test_harmonic_coefficients_zero_beyond_envelope():
    coeffs = sd.harmonic_coefficients(20.0, 2, 10_000)
    assert coeffs[1500:].max() == 0.0
    assert coeffs[:10].max() > 0.0


def test_power_fraction_reference_values():
    size = sd.derive(mavic_params()).electrical_size
    # pinned beforehand by a direct cumulative sum over 10,000 coefficients
    assert sd.coefficient_power_fraction(size, 2, 0.5) == 11
    assert sd.coefficient_power_fraction(size, 2, 0.9) == 28
    assert sd.coefficient_power_fraction(size, 2, 0.95) == 32
    assert sd.coefficient_power_fraction(size, 2, 0.99) == 40
    assert sd.coefficient_power_fraction(size, 2, 0.5, order="index") == 31
    assert sd.coefficient_power_fraction(size, 2, 0.99, order="index") == 45


def test_power_fraction_against_brute_force():
    size = sd.derive(mavic_params()).electrical_size
    n = np.arange(1, 10_001)
    coeffs = scipy.special.jv(2 * n, size / 2.0) ** 2
    for fraction in (0.5, 0.9, 0.95, 0.99):
        for order in ("magnitude", "index"):
            ordered = np.sort(coeffs)[::-1] if order == "magnitude" else coeffs
            brute = int(np.searchsorted(np.cumsum(ordered),
                                        fraction * coeffs.sum()) + 1)
            assert sd.coefficient_power_fraction(size, 2, fraction,
                                                 order=order) == brute


def test_power_fraction_monotone_in_fraction():
    size = sd.derive(mavic_params()).electrical_size
    ks = [sd.coefficient_power_fraction(size, 2, f)
          for f in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.9999)]
    assert ks == sorted(ks)


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5, 1.5])
def test_power_fraction_rejects_boundary_fractions(fraction):
    with pytest.raises(ValidationError):
        sd.coefficient_power_fraction(100.0, 2, fraction)


def test_transform_round_trip_matches_mixture():
    # lag-step-scaled transform of the sampled series autocorrelation must
    # reproduce the mixture density pointwise with a unit scale constant
    curve, psd = transform_of_analytic_acf(mavic_params())
    scale, max_rel, n_bins = fit_convention_constant(curve, psd)
    assert abs(scale - psd.convention_constant) <= 1e-3
    assert max_rel <= 0.01
    assert n_bins > 1000
