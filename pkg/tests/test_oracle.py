import math

import numpy as np
import pytest

from debroglie.exceptions import ConvergenceError, DomainError
from debroglie.experiments import build_source
from debroglie.interferometer import DelayConfig, enumerate_paths
from debroglie.oracle import (
    OracleConfig,
    PathIntegralOracle,
    numeric_coincidence_rate,
    numeric_hom_rate,
    numeric_singles_rate,
    relative_error,
)
from debroglie.rates import (
    distinguishable_rate,
    fringe_period_time,
    hom_rate,
    separable_rate,
    source_rate,
    spdc_debroglie_rate,
)
from debroglie.sources import SinglePhotonKernel, SpdcBroadbandPump, SpdcPairKernel
from debroglie.spectra import NM

TOLERANCE = 1e-3


def test_noon_null(spdc_source, oracle_cfg):
    assert abs(numeric_coincidence_rate(spdc_source, DelayConfig(), oracle_cfg)) < 1e-9


@pytest.mark.parametrize("units", [0.0, math.sqrt(2.0), 10.0])
def test_hom_dip_matches_closed_form(separable_source, spdc_source, oracle_cfg, units):
    for source in (separable_source, spdc_source):
        width = source.photon.gaussian_width
        tau1 = units / width
        assert numeric_hom_rate(source, tau1, oracle_cfg) == pytest.approx(
            hom_rate(width, tau1), abs=TOLERANCE
        )


def test_separable_scan_matches_closed_form(separable_source, oracle_cfg):
    omega0 = separable_source.photon.center_frequency
    width = separable_source.photon.gaussian_width
    tau1 = 3.0 / width
    for tau2 in np.linspace(-4.0, 4.0, 9) / width:
        numeric = numeric_coincidence_rate(separable_source, DelayConfig(tau1=tau1, tau2=tau2), oracle_cfg)
        assert numeric == pytest.approx(separable_rate(omega0, width, tau1, tau2), abs=TOLERANCE)


def test_spdc_points_match_closed_form(spdc_source, oracle_cfg):
    width = spdc_source.photon.gaussian_width
    for tau1, tau2 in [(0.0, 0.7), (2.0, 1.3), (40.0, 40.0), (5.0, -2.2)]:
        d = DelayConfig(tau1=tau1 / width, tau2=tau2 / width)
        assert numeric_coincidence_rate(spdc_source, d, oracle_cfg) == pytest.approx(
            source_rate(spdc_source, d.tau1, d.tau2), abs=TOLERANCE
        )


def test_distinguishable_at_quarter_period(distinguishable_source, oracle_cfg):
    omega0 = distinguishable_source.photon.center_frequency
    width = distinguishable_source.photon.gaussian_width
    tau2 = math.pi / (4.0 * omega0)
    expected = 0.25 * (4.0 - 2.0 * math.exp(-0.5 * (tau2 * width) ** 2))
    for tau1 in (0.0, 7.0 / width):
        numeric = numeric_coincidence_rate(distinguishable_source, DelayConfig(tau1=tau1, tau2=tau2), oracle_cfg)
        assert numeric == pytest.approx(expected, abs=TOLERANCE)
        assert numeric == pytest.approx(distinguishable_rate(omega0, width, tau2), abs=TOLERANCE)


def test_singles_are_flat(spdc_source, separable_source, distinguishable_source, oracle_cfg):
    width = separable_source.photon.gaussian_width
    for source in (spdc_source, separable_source, distinguishable_source):
        for tau1, tau2 in [(0.0, 0.0), (0.0, 0.3), (2.0, 1.0), (30.0, -0.8)]:
            d = DelayConfig(tau1=tau1 / width, tau2=tau2 / width)
            assert numeric_singles_rate(source, d, oracle_cfg) == pytest.approx(0.5, abs=TOLERANCE)


@pytest.mark.parametrize("tau1_units", [0.0, 3.0])
def test_singles_stay_flat_across_tau2_scan(
    spdc_source, separable_source, distinguishable_source, oracle_cfg, tau1_units
):
    width = separable_source.photon.gaussian_width
    for source in (spdc_source, separable_source, distinguishable_source):
        singles = np.array([
            numeric_singles_rate(source, DelayConfig(tau1=tau1_units / width, tau2=tau2), oracle_cfg)
            for tau2 in np.linspace(-4.0, 4.0, 50) / width
        ])
        assert np.ptp(singles) <= 2e-3
        assert np.allclose(singles, 0.5, atol=TOLERANCE)


def _two_time_amplitude(source, d, t, t_prime):
    """Signed path sum of kernel products; a is detected at t′ on exchanged paths."""
    if isinstance(source, SpdcBroadbandPump):
        pair = SpdcPairKernel(source.filter, source.pump.center_frequency)

        def product(time_a, time_b, path):
            return pair(time_a - path.shift_a, time_b - path.shift_b)
    else:
        kernel = SinglePhotonKernel(source.photon)

        def product(time_a, time_b, path):
            return kernel(time_a, path.shift_a) * kernel(time_b, path.shift_b)

    total = np.zeros(np.broadcast(t, t_prime).shape, dtype=complex)
    for path in enumerate_paths(source, d):
        time_a, time_b = (t_prime, t) if path.exchange else (t, t_prime)
        total += path.sign * product(time_a, time_b, path)
    return total


def test_two_time_amplitude_is_exchange_symmetric(spdc_source, separable_source):
    rng = np.random.default_rng(3)
    width = separable_source.photon.gaussian_width
    d = DelayConfig(tau1=2.0 / width, tau2=0.8 / width)
    t, t_prime = rng.uniform(-6.0, 8.0, size=(2, 200)) / width
    for source in (spdc_source, separable_source):
        forward = _two_time_amplitude(source, d, t, t_prime)
        swapped = _two_time_amplitude(source, d, t_prime, t)
        assert np.max(np.abs(forward)) > 0.0
        assert np.allclose(forward, swapped, rtol=1e-12, atol=1e-12 * np.max(np.abs(forward)))


def test_two_time_amplitude_vanishes_without_delays(spdc_source, separable_source):
    width = separable_source.photon.gaussian_width
    t, t_prime = np.meshgrid(np.linspace(-4.0, 4.0, 21) / width, np.linspace(-4.0, 4.0, 21) / width)
    for source in (spdc_source, separable_source):
        reference = _two_time_amplitude(source, DelayConfig(tau2=1.0 / width), t, t_prime)
        null = _two_time_amplitude(source, DelayConfig(), t, t_prime)
        assert np.max(np.abs(null)) <= 1e-12 * np.max(np.abs(reference))


def test_pump_average_uses_effective_bandwidth(oracle_cfg):
    # pump and filter bandwidths equal in angular frequency, so Δω_e = Δω/√2
    source = build_source("spdc", 810 * NM, 5 * NM, 1.25 * NM)
    width = source.photon.gaussian_width
    assert source.effective_width == pytest.approx(width / math.sqrt(2.0), rel=1e-9)
    period = fringe_period_time(source.photon.center_frequency)
    tau2 = round(1.5 / width / period) * period
    numeric = numeric_coincidence_rate(source, DelayConfig(tau2=tau2), oracle_cfg)
    effective = spdc_debroglie_rate(
        source.photon.center_frequency, width, source.effective_width, 0.0, tau2
    )
    filter_only = separable_rate(source.photon.center_frequency, width, 0.0, tau2)
    assert effective == pytest.approx(0.430, abs=2e-3)
    assert filter_only == pytest.approx(0.675, abs=2e-3)
    assert numeric == pytest.approx(effective, abs=TOLERANCE)


def test_cw_pump_matches_closed_form(oracle_cfg):
    source = build_source("spdc", 810 * NM, 5 * NM, 0.0)
    assert source.effective_width == 0.0
    width = source.photon.gaussian_width
    for tau1, tau2 in [(0.0, 0.7), (3.0, 1.3), (0.0, 20.0), (2.0, 200.0)]:
        d = DelayConfig(tau1=tau1 / width, tau2=tau2 / width)
        assert numeric_coincidence_rate(source, d, oracle_cfg) == pytest.approx(
            source_rate(source, d.tau1, d.tau2), abs=TOLERANCE
        )


def _aliased_delay(source, cfg):
    """τ₂ whose pair-phase advances by exactly 2π between neighbouring pump nodes."""
    sigma = source.effective_width
    step = 8.0 * sigma / (cfg.pump_samples - 1)
    period = fringe_period_time(source.photon.center_frequency)
    return round(2.0 * math.pi / step / period) * period


def test_unconverged_grid_raises(spdc_source):
    cfg = OracleConfig(time_samples_per_axis=128, max_refinements=1)
    d = DelayConfig(tau2=_aliased_delay(spdc_source, cfg))
    with pytest.raises(ConvergenceError) as info:
        numeric_coincidence_rate(spdc_source, d, cfg)
    assert info.value.diagnostics["quantity"] == "coincidence"
    assert info.value.diagnostics["change"] > cfg.relative_tolerance


def test_refinement_recovers_from_aliased_grid(spdc_source):
    cfg = OracleConfig(time_samples_per_axis=128)
    d = DelayConfig(tau2=_aliased_delay(spdc_source, cfg))
    assert numeric_coincidence_rate(spdc_source, d, cfg) == pytest.approx(
        source_rate(spdc_source, 0.0, d.tau2), abs=TOLERANCE
    )


def test_hom_rejects_distinguishable(distinguishable_source, oracle_cfg):
    with pytest.raises(DomainError):
        PathIntegralOracle(distinguishable_source, oracle_cfg).hom_rate(0.0)


def test_oracle_config_bounds():
    with pytest.raises(ValueError):
        OracleConfig(time_half_window=4.0)
    with pytest.raises(ValueError):
        OracleConfig(time_samples_per_axis=32)
    with pytest.raises(ValueError):
        OracleConfig(relative_tolerance=0.0)
    refined = OracleConfig().refined(2)
    assert refined.time_samples_per_axis == 511 * 4 + 1
    assert refined.pump_samples == 63 * 4 + 1
    assert OracleConfig().refined(0) == OracleConfig()


def test_relative_error_is_floored_at_unit_baseline():
    assert relative_error(1e-4, 0.0) == pytest.approx(1e-4)
    assert relative_error(2.2, 2.0) == pytest.approx(0.1)
