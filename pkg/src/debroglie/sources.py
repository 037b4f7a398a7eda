"""Input states feeding the interferometer and their time-domain kernels.

Three sources are modelled: a filtered SPDC pair from a (possibly broadband)
cw pump, two separable identical single photons, and two separable photons
with orthogonal polarisations. Kernels are closed-form Gaussians; the SPDC
kernel can also be evaluated by direct frequency quadrature as a cross-check.
"""

import math
from enum import Enum
from typing import Annotated, Literal

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid

from .exceptions import DegenerateProfileError, SourceConstructionError
from .spectra import SpectralProfile, amplitude, coherence_time, effective_bandwidth

ENERGY_MISMATCH_TOLERANCE = 0.01


class Polarization(str, Enum):
    H = "H"
    V = "V"


class SpdcBroadbandPump(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["spdc"] = "spdc"
    pump: SpectralProfile
    filter: SpectralProfile

    @model_validator(mode="after")
    def check_energy_conservation(self) -> "SpdcBroadbandPump":
        expected = self.filter.center_wavelength / 2.0
        mismatch = abs(self.pump.center_wavelength - expected) / expected
        if mismatch > ENERGY_MISMATCH_TOLERANCE:
            raise SourceConstructionError(
                f"pump at {self.pump.center_wavelength:.4g} m is not half the filter "
                f"center {self.filter.center_wavelength:.4g} m (mismatch {mismatch:.2%})"
            )
        if self.filter.is_monochromatic:
            raise SourceConstructionError("SPDC filter bandwidth must be positive")
        return self

    @property
    def photon(self) -> SpectralProfile:
        return self.filter

    @property
    def effective_width(self) -> float:
        if self.pump.is_monochromatic:
            return 0.0
        return effective_bandwidth(self.pump.gaussian_width, self.filter.gaussian_width).value

    @property
    def polarizations(self) -> tuple[Polarization, Polarization]:
        return (Polarization.H, Polarization.H)


class SeparableIdentical(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["separable"] = "separable"
    photon: SpectralProfile

    @property
    def effective_width(self) -> float:
        return self.photon.gaussian_width

    @property
    def polarizations(self) -> tuple[Polarization, Polarization]:
        return (Polarization.H, Polarization.H)


class DistinguishablePolarized(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["distinguishable"] = "distinguishable"
    photon: SpectralProfile

    @property
    def effective_width(self) -> float:
        return self.photon.gaussian_width

    @property
    def polarizations(self) -> tuple[Polarization, Polarization]:
        return (Polarization.H, Polarization.V)


SourceModel = Annotated[
    SpdcBroadbandPump | SeparableIdentical | DistinguishablePolarized,
    Field(discriminator="kind"),
]


def fringe_coherence_time(source: SourceModel) -> float:
    """Envelope scale of the 2ω₀ fringe around τ₂ = 0 (√2/Δω_e for SPDC)."""
    return coherence_time(source.effective_width)


def packet_coherence_time(source: SourceModel) -> float:
    """Like ``fringe_coherence_time`` but falls back to the filter for a cw-locked pump."""
    width = source.effective_width or source.photon.gaussian_width
    return coherence_time(width)


class SinglePhotonKernel:
    """Filtered single-photon temporal mode g(t) = (Δω²/π)^¼ e^{−Δω²t²/2} e^{−iω₀t}."""

    def __init__(self, photon: SpectralProfile):
        if photon.gaussian_width == 0:
            raise DegenerateProfileError("single-photon kernel needs a positive bandwidth")
        self.width = photon.gaussian_width
        self.carrier = photon.center_frequency
        self._norm = (self.width**2 / math.pi) ** 0.25

    def envelope(self, t: ArrayLike, shift: ArrayLike = 0.0) -> np.ndarray:
        x = np.asarray(t, dtype=float) - shift
        return self._norm * np.exp(-0.5 * (self.width * x) ** 2)

    def __call__(self, t: ArrayLike, shift: float = 0.0) -> np.ndarray:
        x = np.asarray(t, dtype=float) - shift
        return self.envelope(x) * np.exp(-1j * self.carrier * x)


class SpdcPairKernel:
    """Two-time pair amplitude for one pump frequency ω_p.

    A(t_s, t_i) = ∫dω_s φ(ω_s) φ(ω_p − ω_s) e^{−iω_s t_s} e^{−i(ω_p − ω_s) t_i}

    Completing the square about ω_p/2 gives
    e^{−δ²/Δω²} e^{−iω_p(t_s + t_i)/2} e^{−Δω²(t_s − t_i)²/4} with δ = ω_p/2 − ω₀.
    """

    def __init__(self, filter: SpectralProfile, pump_frequency: float):
        if filter.gaussian_width == 0:
            raise DegenerateProfileError("SPDC kernel needs a positive filter bandwidth")
        self.filter = filter
        self.width = filter.gaussian_width
        self.pump_frequency = pump_frequency
        detuning = pump_frequency / 2.0 - filter.center_frequency
        self.weight = math.exp(-((detuning / self.width) ** 2))

    def relative_envelope(self, dt: ArrayLike) -> np.ndarray:
        return np.exp(-0.25 * (self.width * np.asarray(dt, dtype=float)) ** 2)

    def __call__(self, t_s: ArrayLike, t_i: ArrayLike) -> np.ndarray:
        t_s = np.asarray(t_s, dtype=float)
        t_i = np.asarray(t_i, dtype=float)
        phase = np.exp(-0.5j * self.pump_frequency * (t_s + t_i))
        return self.weight * phase * self.relative_envelope(t_s - t_i)

    def quadrature(self, t_s: ArrayLike, t_i: ArrayLike, samples: int = 2049) -> np.ndarray:
        """Evaluate the defining frequency integral numerically over ±8Δω."""
        t_s = np.asarray(t_s, dtype=float)[..., None]
        t_i = np.asarray(t_i, dtype=float)[..., None]
        # ω_s = ω_p/2 + ν keeps the optical carrier out of the sampled integrand
        nu = np.linspace(-8.0 * self.width, 8.0 * self.width, samples)
        half = self.pump_frequency / 2.0
        spectral = amplitude(self.filter, half + nu) * amplitude(self.filter, half - nu)
        integrand = spectral * np.exp(-1j * nu * (t_s - t_i))
        carrier = np.exp(-1j * half * (t_s[..., 0] + t_i[..., 0]))
        return carrier * trapezoid(integrand, nu, axis=-1)


def single_photon_kernel(photon: SpectralProfile) -> SinglePhotonKernel:
    return SinglePhotonKernel(photon)


def spdc_pair_kernel(filter: SpectralProfile, pump_frequency: float) -> SpdcPairKernel:
    return SpdcPairKernel(filter, pump_frequency)
