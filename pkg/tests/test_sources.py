import math

import numpy as np
import pytest
from pydantic import TypeAdapter
from scipy.integrate import trapezoid

from debroglie.exceptions import DegenerateProfileError, SourceConstructionError
from debroglie.sources import (
    DistinguishablePolarized,
    Polarization,
    SeparableIdentical,
    SourceModel,
    SpdcBroadbandPump,
    fringe_coherence_time,
    packet_coherence_time,
    single_photon_kernel,
    spdc_pair_kernel,
)
from debroglie.spectra import SpectralProfile


def test_spdc_requires_energy_conservation(filter_profile):
    with pytest.raises(SourceConstructionError):
        SpdcBroadbandPump(pump=SpectralProfile.from_nm(420, 1), filter=filter_profile)
    source = SpdcBroadbandPump(pump=SpectralProfile.from_nm(406, 1), filter=filter_profile)
    assert source.photon == filter_profile


def test_spdc_requires_filter_bandwidth():
    with pytest.raises(SourceConstructionError):
        SpdcBroadbandPump(pump=SpectralProfile.from_nm(405, 1), filter=SpectralProfile.from_nm(810, 0))


def test_monochromatic_pump_has_zero_effective_width(filter_profile):
    source = SpdcBroadbandPump(pump=SpectralProfile.from_nm(405, 0), filter=filter_profile)
    assert source.effective_width == 0.0
    assert fringe_coherence_time(source) == math.inf
    assert packet_coherence_time(source) == pytest.approx(filter_profile.coherence_time)


def test_source_union_dispatches_on_kind(filter_profile):
    adapter = TypeAdapter(SourceModel)
    photon = filter_profile.model_dump()
    assert isinstance(adapter.validate_python({"kind": "separable", "photon": photon}), SeparableIdentical)
    source = adapter.validate_python({"kind": "distinguishable", "photon": photon})
    assert isinstance(source, DistinguishablePolarized)
    assert source.polarizations == (Polarization.H, Polarization.V)


def test_sources_are_hashable(spdc_source, separable_source):
    assert len({spdc_source, separable_source, spdc_source}) == 2


def test_single_photon_kernel_normalisation(filter_profile):
    g = single_photon_kernel(filter_profile)
    tc = filter_profile.coherence_time
    t = np.linspace(-12 * tc, 12 * tc, 20001)
    assert trapezoid(np.abs(g(t)) ** 2, t) == pytest.approx(1.0, abs=1e-6)
    assert np.argmax(np.abs(g(t))) == t.size // 2
    assert abs(g(tc)) / abs(g(0.0)) == pytest.approx(math.exp(-1), rel=1e-12)


def test_single_photon_kernel_shift(filter_profile):
    g = single_photon_kernel(filter_profile)
    tc = filter_profile.coherence_time
    assert g(tc + 0.3 * tc, shift=0.3 * tc) == pytest.approx(g(tc))


def test_single_photon_kernel_needs_bandwidth():
    with pytest.raises(DegenerateProfileError):
        single_photon_kernel(SpectralProfile.from_nm(810, 0))


def test_pair_kernel_exchange_symmetry(filter_profile):
    kernel = spdc_pair_kernel(filter_profile, 2 * filter_profile.center_frequency)
    tc = filter_profile.coherence_time
    assert kernel(0.7 * tc, -0.2 * tc) == pytest.approx(kernel(-0.2 * tc, 0.7 * tc))


def test_pair_kernel_global_phase(filter_profile):
    omega_p = 2 * filter_profile.center_frequency
    kernel = spdc_pair_kernel(filter_profile, omega_p)
    tc = filter_profile.coherence_time
    shift = 3.3 * tc
    shifted = kernel(0.4 * tc + shift, -0.1 * tc + shift)
    assert shifted == pytest.approx(np.exp(-1j * omega_p * shift) * kernel(0.4 * tc, -0.1 * tc))


def test_pair_kernel_quadrature_matches_closed_form(filter_profile):
    width = filter_profile.gaussian_width
    # pump detuned by a fraction of the filter width
    kernel = spdc_pair_kernel(filter_profile, 2 * filter_profile.center_frequency + 0.4 * width)
    tc = filter_profile.coherence_time
    t_s = np.array([0.0, 0.5, -1.2, 2.0]) * tc
    t_i = np.array([0.0, -0.3, 0.8, 1.0]) * tc
    exact = kernel(t_s, t_i)
    numeric = kernel.quadrature(t_s, t_i)
    assert np.max(np.abs(numeric - exact) / np.abs(exact)) < 1e-6
