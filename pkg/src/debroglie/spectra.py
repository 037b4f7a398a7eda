"""Gaussian spectral lines, bandwidth conversions and the effective bandwidth.

All quantities are SI: wavelengths in metres, angular frequencies in rad/s.
Quoted wavelength bandwidths are the FWHM of the *intensity* spectrum.
"""

import math

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field
from scipy.constants import c as SPEED_OF_LIGHT

from .exceptions import DegenerateProfileError, DomainError

NM = 1e-9
_FWHM_FACTOR = 2.0 * math.sqrt(math.log(2.0))


def fwhm_to_gaussian_width(fwhm_lambda: float, center_lambda: float) -> float:
    """Gaussian width Δω whose intensity |φ|² has the given wavelength FWHM."""
    if center_lambda <= 0:
        raise DomainError(f"center wavelength must be positive, got {center_lambda}")
    if fwhm_lambda < 0:
        raise DomainError(f"FWHM must be non-negative, got {fwhm_lambda}")
    fwhm_omega = 2.0 * math.pi * SPEED_OF_LIGHT * fwhm_lambda / center_lambda**2
    return fwhm_omega / _FWHM_FACTOR


def gaussian_width_to_fwhm(width: float, center_lambda: float) -> float:
    if center_lambda <= 0:
        raise DomainError(f"center wavelength must be positive, got {center_lambda}")
    if width < 0:
        raise DomainError(f"width must be non-negative, got {width}")
    return width * _FWHM_FACTOR * center_lambda**2 / (2.0 * math.pi * SPEED_OF_LIGHT)


def wavelength_to_angular_frequency(wavelength: float) -> float:
    if wavelength <= 0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    return 2.0 * math.pi * SPEED_OF_LIGHT / wavelength


def coherence_time(width: float) -> float:
    """1/e half-width √2/Δω of the |g(t)| envelope; infinite for a zero width."""
    return math.inf if width == 0 else math.sqrt(2.0) / width


def coherence_length(width: float) -> float:
    return SPEED_OF_LIGHT * coherence_time(width)


class SpectralProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    center_wavelength: float = Field(gt=0, description="metres")
    fwhm_wavelength: float = Field(ge=0, description="metres, intensity FWHM")

    @classmethod
    def from_nm(cls, center_nm: float, fwhm_nm: float) -> "SpectralProfile":
        return cls(center_wavelength=center_nm * NM, fwhm_wavelength=fwhm_nm * NM)

    @property
    def center_frequency(self) -> float:
        return wavelength_to_angular_frequency(self.center_wavelength)

    @property
    def gaussian_width(self) -> float:
        return fwhm_to_gaussian_width(self.fwhm_wavelength, self.center_wavelength)

    @property
    def is_monochromatic(self) -> bool:
        return self.fwhm_wavelength == 0

    @property
    def coherence_time(self) -> float:
        return coherence_time(self.gaussian_width)


class EffectiveBandwidth(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0, description="Δω_e in rad/s")


def amplitude(p: SpectralProfile, omega: ArrayLike) -> np.ndarray:
    """Filter amplitude φ(ω), normalised so that ∫|φ|²dω = 1."""
    width = p.gaussian_width
    if width == 0:
        raise DegenerateProfileError("zero-bandwidth profile has no amplitude representation")
    detuning = np.asarray(omega, dtype=float) - p.center_frequency
    return np.exp(-(detuning**2) / (2.0 * width**2)) / math.sqrt(width * math.sqrt(math.pi))


def pump_density(p: SpectralProfile, omega: ArrayLike) -> np.ndarray:
    """Pump spectral power density 𝒮(ω), normalised so that ∫𝒮dω = 1.

    A monochromatic pump is a delta line; callers branch on
    ``p.is_monochromatic`` instead of evaluating this.
    """
    width = p.gaussian_width
    if width == 0:
        raise DegenerateProfileError("monochromatic pump: use the single-frequency path")
    detuning = np.asarray(omega, dtype=float) - p.center_frequency
    return np.exp(-(detuning**2) / (2.0 * width**2)) / (width * math.sqrt(2.0 * math.pi))


def effective_bandwidth(pump_width: float, filter_width: float) -> EffectiveBandwidth:
    """Combined width with 1/Δω_e² = 1/Δω_p² + 1/Δω².

    A monochromatic pump (zero width) gives Δω_e = 0. An infinite pump width
    leaves the filter width unchanged. The filter width must be positive.
    """
    if pump_width < 0:
        raise DomainError("pump bandwidth must be non-negative")
    if filter_width <= 0:
        raise DomainError("filter bandwidth must be positive")
    if pump_width == 0:
        return EffectiveBandwidth(value=0.0)
    inverse_sq = 1.0 / pump_width**2 + 1.0 / filter_width**2
    return EffectiveBandwidth(value=1.0 / math.sqrt(inverse_sq))

