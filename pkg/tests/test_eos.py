import math

import numpy as np
import pytest
from scipy.special import dawsn

from qvf_eos import (
    REDUCED,
    Constant,
    GaussianAutocorrelation,
    GeometryConfig,
    Identity,
    Lorentz,
    MultiLorentz,
    PhysicalConstants,
    RectLowpass,
    SpectrumTrace,
    Vacuum,
    discrete_spectrum_weights,
    filter_response,
    kspace_time_correlation,
    polariton_spectrum,
    ratio_spectrum,
    time_correlation,
    vacuum_spectrum,
)
from qvf_eos.eos import filter_from_dict, mode_sum_correlation, vacuum_mode_sum
from qvf_eos.errors import BandEdge, DivergentIntegral


def gaussian_vacuum_correlation(tau, t_p, eps_r=1.0, S=1.0):
    """(1/pi) int_0^inf w/(4 sqrt(eps_r) S) exp(-w^2 t_p^2 / 2) cos(w tau) dw via Dawson's function."""
    a = t_p**2 / 2
    b = np.asarray(tau, dtype=float)
    integral = 1 / (2 * a) - b / (2 * a**1.5) * dawsn(b / (2 * math.sqrt(a)))
    return integral / (4 * math.sqrt(eps_r) * S * math.pi)


def test_vacuum_zero_delay_value(geometry, gaussian):
    g0 = time_correlation(Vacuum(1.0), REDUCED, geometry, gaussian, [0.0]).values[0]
    assert g0 == pytest.approx(1 / (4 * math.pi), rel=1e-10)


@pytest.mark.parametrize("t_p,eps_r,S", [(1.0, 1.0, 1.0), (0.5, 2.25, 3.0), (2.0, 11.7, 0.1)])
def test_vacuum_correlation_closed_form(t_p, eps_r, S):
    tau = np.linspace(-15, 15, 61)
    got = time_correlation(Vacuum(eps_r), REDUCED, GeometryConfig(S=S), GaussianAutocorrelation(t_p), tau)
    expected = gaussian_vacuum_correlation(tau, t_p, eps_r, S)
    np.testing.assert_allclose(got.values, expected, rtol=0, atol=1e-9 * abs(expected[30]))


def test_rect_filter_closed_form(geometry):
    wc = 3.0
    tau = np.array([0.5, 1.0, 2.5])
    # (1/pi) int_0^wc w/4 cos(w tau) dw
    expected = (wc * np.sin(wc * tau) / tau + (np.cos(wc * tau) - 1) / tau**2) / (4 * math.pi)
    got = time_correlation(Vacuum(1.0), REDUCED, geometry, RectLowpass(wc), tau).values
    np.testing.assert_allclose(got, expected, atol=1e-10)


def test_identity_filter_diverges(geometry, lorentz):
    with pytest.raises(DivergentIntegral):
        time_correlation(lorentz, REDUCED, geometry, Identity(), [0.0])


def test_spectrum_values(lorentz, geometry, gaussian):
    expected = 0.5 / 4 * math.exp(-0.125) / math.sqrt(1 + 4 / 3)
    assert polariton_spectrum(lorentz, REDUCED, geometry, gaussian, 0.5) == pytest.approx(expected, rel=1e-14)
    assert polariton_spectrum(lorentz, REDUCED, geometry, gaussian, 1.2) == 0.0
    assert vacuum_spectrum(REDUCED, geometry, 4.0, gaussian, -2.0) == pytest.approx(2 / 8 * math.exp(-2))


def test_spectrum_near_band_edge_raises(lorentz, geometry, gaussian):
    with pytest.raises(BandEdge):
        polariton_spectrum(lorentz, REDUCED, geometry, gaussian, math.sqrt(2) * (1 + 1e-14))


def test_ratio_is_spectrum_quotient(multi, geometry, gaussian):
    w = np.linspace(0.05, 6.0, 300)
    w = w[np.all([np.abs(w - p) > 1e-3 for p in multi.poles], axis=0)]
    ratio = ratio_spectrum(multi, w).values
    quotient = polariton_spectrum(multi, REDUCED, geometry, gaussian, w) / vacuum_spectrum(
        REDUCED, geometry, multi.eps_r, gaussian, w
    )
    np.testing.assert_allclose(ratio, quotient, rtol=1e-13)


def test_ratio_nan_on_edge(lorentz):
    trace = ratio_spectrum(lorentz, [0.5, math.sqrt(2)])
    assert trace.values[0] == pytest.approx(math.sqrt(3 / 7))
    assert trace.values[1] == 0.0 or math.isnan(trace.values[1])
    assert trace.quantity == "ratio"


def test_si_spectrum_scales_with_constants(geometry):
    si = PhysicalConstants.si()
    filt = GaussianAutocorrelation(1e-13)
    w = np.array([1e12, 5e12])
    reduced = vacuum_spectrum(REDUCED, geometry, 2.0, filt, w)
    scaled = vacuum_spectrum(si, geometry, 2.0, filt, w)
    np.testing.assert_allclose(scaled, reduced * si.hbar / (si.eps0 * si.c), rtol=1e-15)


def test_discrete_weights_match_mode_sum():
    model = Lorentz(2.0, 1.0, 0.4)
    geometry = GeometryConfig(S=1.0, L=50.0)
    filt = GaussianAutocorrelation(1.0)
    ks = 2 * math.pi * np.arange(1, 40) / geometry.L
    tau = np.linspace(0, 6, 7)
    weights = discrete_spectrum_weights(model, REDUCED, geometry, filt, ks)
    # G(t) = (1/2pi) sum_k 2 w_k cos(omega_k t)
    from_weights = sum(wt / math.pi * np.cos(w * tau) for w, wt in weights)
    np.testing.assert_allclose(from_weights, mode_sum_correlation(model, REDUCED, geometry, filt, ks, tau),
                               rtol=1e-12)


def test_vacuum_mode_sum_approaches_continuum():
    geometry = GeometryConfig(L=4000.0)
    filt = GaussianAutocorrelation(1.0)
    ks = 2 * math.pi * np.arange(1, 8000) / geometry.L
    tau = np.array([0.0, 1.0, 3.0])
    discrete = vacuum_mode_sum(REDUCED, geometry, 1.0, filt, ks, tau)
    np.testing.assert_allclose(discrete, gaussian_vacuum_correlation(tau, 1.0), atol=1e-6)


@pytest.mark.parametrize("model", [
    Lorentz(1.0, 1.0, 0.5),
    Lorentz(3.0, 2.0, 0.2),
    MultiLorentz(1.5, ((1.0, 0.3), (2.5, 0.4))),
], ids=["lorentz", "background", "multi"])
def test_spectral_and_kspace_routes_agree(model, geometry):
    filt = GaussianAutocorrelation(1.0 / model.reference_frequency)
    tau = np.linspace(-8, 8, 24) / model.reference_frequency
    spectral = time_correlation(model, REDUCED, geometry, filt, tau).values
    direct = kspace_time_correlation(model, REDUCED, geometry, filt, tau)
    assert np.linalg.norm(spectral - direct) / np.linalg.norm(direct) < 1e-8


def test_correlation_is_even_and_independent_of_length(lorentz, gaussian):
    tau = np.array([-2.0, -0.5, 0.5, 2.0])
    a = time_correlation(lorentz, REDUCED, GeometryConfig(L=1.0), gaussian, tau).values
    b = time_correlation(lorentz, REDUCED, GeometryConfig(L=1e6), gaussian, tau).values
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(a, a[::-1], rtol=1e-12)


def test_uncoupled_correlation_equals_vacuum(geometry, gaussian):
    tau = np.linspace(0, 5, 11)
    a = time_correlation(Constant(2.0), REDUCED, geometry, gaussian, tau).values
    b = time_correlation(Vacuum(2.0), REDUCED, geometry, gaussian, tau).values
    np.testing.assert_array_equal(a, b)


def test_filter_helpers():
    assert filter_response(GaussianAutocorrelation(2.0), 1.0) == pytest.approx(math.exp(-1))
    assert filter_from_dict({"kind": "rect", "omega_c": 2.0}) == RectLowpass(2.0)
    assert filter_from_dict(GaussianAutocorrelation(0.3).to_dict()) == GaussianAutocorrelation(0.3)
    with pytest.raises(ValueError):
        GaussianAutocorrelation(0.0)
    with pytest.raises(ValueError):
        filter_from_dict({"kind": "boxcar"})


def test_trace_validation():
    with pytest.raises(ValueError):
        SpectrumTrace("ratio", [1.0, 0.5], [1.0, 1.0])
    with pytest.raises(ValueError):
        SpectrumTrace("ratio", [], [])
