import math

import numpy as np
import pytest

from debroglie.exceptions import DomainError
from debroglie.interferometer import DelayConfig
from debroglie.rates import (
    distinguishable_envelopes,
    distinguishable_rate,
    fringe_period_length,
    fringe_period_time,
    hom_rate,
    separable_rate,
    singles_rate,
    source_envelopes,
    source_rate,
    spdc_debroglie_rate,
    spdc_envelopes,
)
from debroglie.spectra import NM, wavelength_to_angular_frequency

OMEGA0 = wavelength_to_angular_frequency(810 * NM)
WIDTH = 8.6e12
WIDTH_E = 7.3e12


def test_hom_rate_values():
    assert hom_rate(WIDTH, 0.0) == 0.0
    assert hom_rate(WIDTH, math.sqrt(2) / WIDTH) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert hom_rate(WIDTH, 50 / WIDTH) == pytest.approx(1.0)
    tau = np.linspace(0, 10 / WIDTH, 200)
    assert np.all(np.diff(hom_rate(WIDTH, tau)) >= 0)
    with pytest.raises(DomainError):
        hom_rate(0.0, 1e-13)


def test_noon_null_is_exact():
    assert spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, 0.0) == 0.0


def test_spdc_rate_limits():
    assert spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, 100 / WIDTH_E) == pytest.approx(1.0)
    tau1 = 40 / WIDTH
    assert spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, tau1, tau1) == pytest.approx(1.25, abs=1e-9)


def test_spdc_rate_at_zero_tau1_reduces_to_fringe():
    tau2 = np.linspace(-3, 3, 301) / WIDTH_E
    expected = 1 - np.cos(2 * OMEGA0 * tau2) * np.exp(-0.5 * (WIDTH_E * tau2) ** 2)
    assert np.allclose(spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, tau2), expected, atol=1e-12)


def test_spdc_rate_is_even_in_both_delays():
    rng = np.random.default_rng(1)
    tau1, tau2 = rng.uniform(-4, 4, size=(2, 200)) / WIDTH
    rate = spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, tau1, tau2)
    assert np.allclose(spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, -tau1, tau2), rate, atol=1e-12)
    assert np.allclose(spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, tau1, -tau2), rate, atol=1e-12)


def test_separable_identity_randomised():
    rng = np.random.default_rng(0)
    omega0 = rng.uniform(1e15, 4e15, 1000)
    width = rng.uniform(1e12, 5e13, 1000)
    tau1 = rng.uniform(-5, 5, 1000) / width
    tau2 = rng.uniform(-5, 5, 1000) / width
    for args in zip(omega0, width, tau1, tau2, strict=True):
        w0, w, t1, t2 = args
        assert abs(separable_rate(w0, w, t1, t2) - spdc_debroglie_rate(w0, w, w, t1, t2)) <= 1e-12


def test_distinguishable_is_separable_at_large_tau1():
    rng = np.random.default_rng(2)
    omega0 = rng.uniform(1e15, 4e15, 1000)
    width = rng.uniform(1e12, 5e13, 1000)
    tau2 = rng.uniform(-5, 5, 1000) / width
    for w0, w, t2 in zip(omega0, width, tau2, strict=True):
        assert abs(distinguishable_rate(w0, w, t2) - separable_rate(w0, w, 20 / w, t2)) <= 1e-6


def test_distinguishable_rate_values():
    assert distinguishable_rate(OMEGA0, WIDTH, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert distinguishable_rate(OMEGA0, WIDTH, 100 / WIDTH) == pytest.approx(1.0)
    tau2 = np.linspace(-6, 6, 20001) / WIDTH
    rate = distinguishable_rate(OMEGA0, WIDTH, tau2)
    assert rate.min() >= -1e-15
    assert rate.max() <= 1.0 + 1e-12


@pytest.mark.parametrize("tau1_units", [0.0, 5.0, 50.0])
def test_fringe_visibility_is_unity_near_zero_tau2(tau1_units):
    period = fringe_period_time(OMEGA0)
    tau2 = np.linspace(-period, period, 2001)
    rate = spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, tau1_units / WIDTH, tau2)
    assert (rate.max() - rate.min()) / (rate.max() + rate.min()) == pytest.approx(1.0, abs=1e-6)


def test_visibility_factor_scales_fringe_term():
    tau2 = np.linspace(-1, 1, 101) / WIDTH
    ideal = spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, tau2)
    flat = spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, tau2, visibility=0.0)
    degraded = spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, tau2, visibility=0.98)
    assert np.allclose(flat, 1.0)
    assert np.allclose(degraded - 1.0, 0.98 * (ideal - 1.0))
    with pytest.raises(DomainError):
        spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, 0.0, 0.0, visibility=1.2)


def test_envelopes_bound_the_rate():
    tau1 = 200e-6 / 3e8
    tau2 = np.linspace(-1e-12, 1e-12, 5001)
    rate = spdc_debroglie_rate(OMEGA0, WIDTH, WIDTH_E, tau1, tau2)
    upper, lower = spdc_envelopes(WIDTH, WIDTH_E, tau1, tau2)
    assert np.all(rate <= upper + 1e-12)
    assert np.all(rate >= lower - 1e-12)
    upper, lower = distinguishable_envelopes(WIDTH, tau2)
    rate = distinguishable_rate(OMEGA0, WIDTH, tau2)
    assert np.all((rate <= upper + 1e-12) & (rate >= lower - 1e-12))


def test_source_rate_dispatch(spdc_source, separable_source, distinguishable_source):
    omega0 = spdc_source.photon.center_frequency
    width = spdc_source.photon.gaussian_width
    t1, t2 = 1e-13, 2e-13
    assert source_rate(spdc_source, t1, t2) == pytest.approx(
        spdc_debroglie_rate(omega0, width, spdc_source.effective_width, t1, t2)
    )
    assert source_rate(separable_source, t1, t2) == pytest.approx(separable_rate(omega0, width, t1, t2))
    assert source_rate(distinguishable_source, t1, t2) == pytest.approx(
        distinguishable_rate(omega0, width, t2)
    )


def test_source_envelopes_touch_the_rate(spdc_source, separable_source, distinguishable_source):
    omega0 = spdc_source.photon.center_frequency
    k = np.arange(-40, 41)
    bright = (2 * k + 1) * math.pi / (2 * omega0)
    dark = k * math.pi / omega0
    tau1 = 1e-13
    for source in (spdc_source, separable_source, distinguishable_source):
        upper, _ = source_envelopes(source, tau1, bright, 0.9)
        _, lower = source_envelopes(source, tau1, dark, 0.9)
        assert np.allclose(upper, source_rate(source, tau1, bright, 0.9), atol=1e-9)
        assert np.allclose(lower, source_rate(source, tau1, dark, 0.9), atol=1e-9)


def test_singles_rate_is_flat(spdc_source, distinguishable_source):
    assert singles_rate(spdc_source, DelayConfig()) == 0.5
    assert singles_rate(distinguishable_source, DelayConfig(tau1=1e-12, tau2=3e-13)) == 0.5


def test_fringe_period():
    assert fringe_period_length(wavelength_to_angular_frequency(810 * NM)) == pytest.approx(405 * NM)
    assert fringe_period_length(wavelength_to_angular_frequency(1550 * NM)) == pytest.approx(775 * NM)
    assert fringe_period_time(OMEGA0) == pytest.approx(math.pi / OMEGA0)
