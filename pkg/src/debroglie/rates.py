"""Closed-form normalised detection rates.

Every rate is normalised to 1 at τ₂ → ∞ (τ₁ → ∞ for the HOM dip). All
functions accept scalars or numpy arrays for the delays and broadcast.
``visibility`` scales the 2ω₀ fringe term; 1 is the ideal theory curve.
"""

import math

import numpy as np
from numpy.typing import ArrayLike
from scipy.constants import c as SPEED_OF_LIGHT

from .exceptions import DomainError
from .interferometer import DelayConfig
from .sources import SourceModel

SINGLES_LEVEL = 0.5


def _gauss(tau: ArrayLike, width: float) -> np.ndarray:
    return np.exp(-0.5 * (np.asarray(tau, dtype=float) * width) ** 2)


def _require_positive(**widths: float) -> None:
    for name, value in widths.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")


def _check_visibility(visibility: float) -> None:
    if not 0.0 <= visibility <= 1.0:
        raise DomainError(f"visibility factor must lie in [0, 1], got {visibility}")


def hom_rate(width: float, tau1: ArrayLike) -> np.ndarray | float:
    """D1×D2 coincidences: 1 − exp(−Δω²τ₁²/2)."""
    _require_positive(width=width)
    return 1.0 - _gauss(tau1, width)


def spdc_debroglie_rate(
    omega0: float,
    width: float,
    effective_width: float,
    tau1: ArrayLike,
    tau2: ArrayLike,
    visibility: float = 1.0,
) -> np.ndarray | float:
    """D3×D4 coincidences for a filtered SPDC pair with a Gaussian pump."""
    _require_positive(width=width)
    if effective_width < 0:
        raise DomainError(f"effective width must be non-negative, got {effective_width}")
    _check_visibility(visibility)
    tau1 = np.asarray(tau1, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    packet = _gauss(tau1 - tau2, width) + _gauss(tau1 + tau2, width) - 2.0 * _gauss(tau2, width)
    fringe = 2.0 * np.cos(2.0 * omega0 * tau2) * _gauss(tau2, effective_width)
    return 0.25 * (4.0 + packet - visibility * fringe * (1.0 + _gauss(tau1, width)))


def separable_rate(
    omega0: float, width: float, tau1: ArrayLike, tau2: ArrayLike, visibility: float = 1.0
) -> np.ndarray | float:
    """Two separable identical photons: the SPDC result with Δω_e → Δω."""
    return spdc_debroglie_rate(omega0, width, width, tau1, tau2, visibility)


def distinguishable_rate(
    omega0: float, width: float, tau2: ArrayLike, visibility: float = 1.0
) -> np.ndarray | float:
    """Orthogonally polarised photons; independent of τ₁."""
    _require_positive(width=width)
    _check_visibility(visibility)
    envelope = _gauss(tau2, width)
    fringe = 2.0 * np.cos(2.0 * omega0 * np.asarray(tau2, dtype=float)) * envelope
    return 0.25 * (4.0 - 2.0 * envelope - visibility * fringe)


def spdc_envelopes(
    width: float,
    effective_width: float,
    tau1: ArrayLike,
    tau2: ArrayLike,
    visibility: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower fringe envelopes (cos 2ω₀τ₂ = ∓1) of ``spdc_debroglie_rate``."""
    _require_positive(width=width)
    tau1 = np.asarray(tau1, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    packet = _gauss(tau1 - tau2, width) + _gauss(tau1 + tau2, width) - 2.0 * _gauss(tau2, width)
    swing = 2.0 * visibility * _gauss(tau2, effective_width) * (1.0 + _gauss(tau1, width))
    return 0.25 * (4.0 + packet + swing), 0.25 * (4.0 + packet - swing)


def distinguishable_envelopes(
    width: float, tau2: ArrayLike, visibility: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    _require_positive(width=width)
    envelope = _gauss(tau2, width)
    return (
        0.25 * (4.0 - 2.0 * envelope + 2.0 * visibility * envelope),
        0.25 * (4.0 - 2.0 * envelope - 2.0 * visibility * envelope),
    )


def source_envelopes(
    source: SourceModel, tau1: ArrayLike, tau2: ArrayLike, visibility: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower fringe envelopes of ``source_rate``."""
    width = source.photon.gaussian_width
    if source.kind == "distinguishable":
        return distinguishable_envelopes(width, np.broadcast_arrays(tau1, tau2)[1], visibility)
    effective = source.effective_width if source.kind == "spdc" else width
    return spdc_envelopes(width, effective, tau1, tau2, visibility)


def source_rate(
    source: SourceModel, tau1: ArrayLike, tau2: ArrayLike, visibility: float = 1.0
) -> np.ndarray | float:
    """Dispatch to the closed form matching ``source``."""
    omega0 = source.photon.center_frequency
    width = source.photon.gaussian_width
    if source.kind == "spdc":
        return spdc_debroglie_rate(omega0, width, source.effective_width, tau1, tau2, visibility)
    if source.kind == "separable":
        return separable_rate(omega0, width, tau1, tau2, visibility)
    return distinguishable_rate(omega0, width, np.broadcast_arrays(tau1, tau2)[1], visibility)


def singles_rate(source: SourceModel, d: DelayConfig) -> float:
    """Single-detector rate at D3 or D4.

    The mode-a and mode-b single-photon contributions at mode e carry the
    same τ₂ envelope with opposite sign, so no first-order fringe survives.
    """
    return SINGLES_LEVEL


def fringe_period_length(omega0: float) -> float:
    """x₂ period πc/ω₀ = λ₀/2 of the cos(2ω₀τ₂) fringe."""
    _require_positive(omega0=omega0)
    return math.pi * SPEED_OF_LIGHT / omega0


def fringe_period_time(omega0: float) -> float:
    _require_positive(omega0=omega0)
    return math.pi / omega0
