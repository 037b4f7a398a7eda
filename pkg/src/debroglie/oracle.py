"""Brute-force evaluation of the detection integrals from the Feynman paths.

The oracle never touches the closed forms in ``rates``. It builds the
two-time detection amplitude as the signed sum of kernel products over the
enumerated paths and integrates |A|² with the trapezoid rule on uniform grids.

Optical carriers are factored out per path: for single-photon kernels every
path carries e^{−iω₀(t+t′)} times a constant phase e^{iω₀(s_a+s_b)}; for the
SPDC pair the common factor is e^{−iω_p(t+t′)/2}. The grids therefore only
resolve Gaussian envelopes. Time axes are built from windows of
±``time_half_window`` coherence times around every path shift, merged where
they overlap, so large input delays do not inflate the grid.

SPDC pairs from a cw pump are stationary: |A|² depends on t − t′ only, and
the reported quantity is the rate per unit mean detection time, integrated
over relative time and then averaged over the pump spectrum at the rate level.
"""

import logging
import math
from collections.abc import Callable, Sequence
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from .exceptions import ConvergenceError, DomainError
from .interferometer import DelayConfig, enumerate_paths, hom_output_fields, hom_paths
from .sources import (
    DistinguishablePolarized,
    SinglePhotonKernel,
    SourceModel,
    SpdcBroadbandPump,
    SpdcPairKernel,
    packet_coherence_time,
)
from .spectra import coherence_time, effective_bandwidth, pump_density

logger = logging.getLogger("debroglie.oracle")

BASELINE_COHERENCE_MULTIPLE = 50.0
SINGLES_LEVEL = 0.5


class OracleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    time_half_window: float = Field(default=8.0, ge=5.0)
    time_samples_per_axis: int = Field(default=512, ge=64)
    pump_samples: int = Field(default=64, ge=64)
    relative_tolerance: float = Field(default=1e-3, gt=0.0)
    max_refinements: int = Field(default=3, ge=1)

    def refined(self, level: int) -> "OracleConfig":
        if level == 0:
            return self
        factor = 2**level
        return self.model_copy(
            update={
                "time_samples_per_axis": (self.time_samples_per_axis - 1) * factor + 1,
                "pump_samples": (self.pump_samples - 1) * factor + 1,
            }
        )


class _Term(NamedTuple):
    """coefficient · ψ(t_a − shift_a, t_b − shift_b); a is detected at t′ when exchanged."""

    coefficient: complex
    shift_a: float
    shift_b: float
    exchange: bool


def relative_error(value: float, reference: float) -> float:
    """Error relative to the reference, floored at the unit baseline."""
    return abs(value - reference) / max(abs(reference), 1.0)


def _trapezoid_nodes(centers: Sequence[float], half_width: float, samples: int):
    """Nodes and trapezoid weights on merged windows [c − W, c + W]."""
    step = 2.0 * half_width / (samples - 1)
    intervals: list[list[float]] = []
    for center in sorted(centers):
        lo, hi = center - half_width, center + half_width
        if intervals and lo <= intervals[-1][1]:
            intervals[-1][1] = max(intervals[-1][1], hi)
        else:
            intervals.append([lo, hi])
    nodes, weights = [], []
    for lo, hi in intervals:
        n = int(math.ceil((hi - lo) / step - 1e-9)) + 1
        x = np.linspace(lo, hi, n)
        w = np.full(n, (hi - lo) / (n - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _coincidence_groups(source: SourceModel, d: DelayConfig) -> list[list[_Term]]:
    groups: dict[int, list[_Term]] = {}
    for path in enumerate_paths(source, d):
        groups.setdefault(path.group, []).append(
            _Term(complex(path.sign), path.shift_a, path.shift_b, path.exchange)
        )
    return [groups[key] for key in sorted(groups)]


def _hom_groups(d: DelayConfig) -> list[list[_Term]]:
    return [[_Term(complex(p.sign), p.shift_a, p.shift_b, p.exchange) for p in hom_paths(d)]]


def _singles_groups(d: DelayConfig) -> list[list[_Term]]:
    """First-order mode-e intensity: the a photon detected (b traced out), then b."""
    terms = hom_output_fields(d).mode_e_terms()
    photon_a = [_Term(t.coefficient, t.delay, 0.0, False) for t in terms if t.input_mode == "a"]
    photon_b = [_Term(t.coefficient, 0.0, t.delay, True) for t in terms if t.input_mode == "b"]
    return [photon_a, photon_b]


class PathIntegralOracle:
    def __init__(self, source: SourceModel, cfg: OracleConfig | None = None):
        self.source = source
        self.cfg = cfg or OracleConfig()
        self.width = source.photon.gaussian_width
        self.window = self.cfg.time_half_window * coherence_time(self.width)

    # -- integrals ---------------------------------------------------------

    def _product_rate(self, groups: list[list[_Term]], cfg: OracleConfig) -> float:
        kernel = SinglePhotonKernel(self.source.photon)
        omega0 = kernel.carrier
        shifts = {s for group in groups for term in group for s in (term.shift_a, term.shift_b)}
        t, w = _trapezoid_nodes(sorted(shifts), self.window, cfg.time_samples_per_axis)
        total = 0.0
        for group in groups:
            alpha = np.array([term.coefficient * np.exp(1j * omega0 * (term.shift_a + term.shift_b))
                              for term in group])
            first = [term.shift_b if term.exchange else term.shift_a for term in group]
            second = [term.shift_a if term.exchange else term.shift_b for term in group]
            u = kernel.envelope(t[None, :], np.array(first)[:, None])
            v = kernel.envelope(t[None, :], np.array(second)[:, None])
            gram_u = (u * w) @ u.T
            gram_v = (v * w) @ v.T
            total += float(np.real(np.einsum("m,n,mn,mn->", alpha, alpha.conj(), gram_u, gram_v)))
        return total

    def _pump_grid(self, cfg: OracleConfig) -> tuple[np.ndarray, np.ndarray]:
        source = self.source
        assert isinstance(source, SpdcBroadbandPump)
        pump = source.pump
        if pump.is_monochromatic:
            return np.array([pump.center_frequency]), np.ones(1)
        # 𝒮(ω_p)·|pair weight|² is Gaussian with width Δω_e; sample ±4 widths of it.
        pump_width = pump.gaussian_width
        sigma = effective_bandwidth(pump_width, self.width).value
        center = sigma**2 * (
            pump.center_frequency / pump_width**2
            + 2.0 * source.filter.center_frequency / self.width**2
        )
        omega_p = np.linspace(center - 4.0 * sigma, center + 4.0 * sigma, cfg.pump_samples)
        weights = np.full(omega_p.size, omega_p[1] - omega_p[0])
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return omega_p, weights * pump_density(pump, omega_p)

    def _spdc_rate(self, groups: list[list[_Term]], cfg: OracleConfig) -> float:
        source = self.source
        assert isinstance(source, SpdcBroadbandPump)
        omega_p, pump_weights = self._pump_grid(cfg)
        kernels = [SpdcPairKernel(source.filter, float(w)) for w in omega_p]
        pair_weight = np.array([k.weight for k in kernels])
        envelope = kernels[0].relative_envelope
        total = 0.0
        for group in groups:
            # ψ depends on t_a − t_b; with u = t − t′ the exchanged term flips u.
            offsets = np.array([term.shift_a - term.shift_b for term in group])
            flips = np.array([-1.0 if term.exchange else 1.0 for term in group])
            centers = offsets * flips
            u, w = _trapezoid_nodes(centers, self.window, cfg.time_samples_per_axis)
            profiles = envelope(flips[:, None] * u[None, :] - offsets[:, None])
            gram = (profiles * w) @ profiles.T
            sums = np.array([term.shift_a + term.shift_b for term in group])
            coefficients = np.array([term.coefficient for term in group])
            alpha = coefficients[None, :] * np.exp(0.5j * omega_p[:, None] * sums[None, :])
            per_pump = np.real(np.einsum("pm,pn,mn->p", alpha, alpha.conj(), gram))
            total += float(np.sum(pump_weights * pair_weight**2 * per_pump))
        return total

    def _raw(self, groups: list[list[_Term]], cfg: OracleConfig) -> float:
        if isinstance(self.source, SpdcBroadbandPump):
            return self._spdc_rate(groups, cfg)
        return self._product_rate(groups, cfg)

    # -- baselines ---------------------------------------------------------

    def baseline_tau2(self) -> float:
        """≈50 coherence times, snapped to a zero of the pair-phase cosine."""
        far = BASELINE_COHERENCE_MULTIPLE * packet_coherence_time(self.source)
        if isinstance(self.source, SpdcBroadbandPump):
            pair_frequency = self._pump_grid(self.cfg)[0].mean()
        else:
            pair_frequency = 2.0 * self.source.photon.center_frequency
        period = 2.0 * math.pi / pair_frequency
        return (round(far / period) + 0.25) * period

    def baseline_tau1(self) -> float:
        return BASELINE_COHERENCE_MULTIPLE * coherence_time(self.width)

    # -- converged rates ---------------------------------------------------

    def _converged(self, evaluate: Callable[[OracleConfig], float], label: str) -> float:
        rtol = self.cfg.relative_tolerance
        for attempt in Retrying(
            stop=stop_after_attempt(self.cfg.max_refinements),
            retry=retry_if_exception_type(ConvergenceError),
            reraise=True,
        ):
            with attempt:
                level = attempt.retry_state.attempt_number - 1
                coarse = evaluate(self.cfg.refined(level))
                fine = evaluate(self.cfg.refined(level + 1))
                change = relative_error(coarse, fine)
                if change > rtol:
                    diagnostics = {
                        "quantity": label,
                        "refinement": level,
                        "coarse": coarse,
                        "fine": fine,
                        "change": change,
                        "tolerance": rtol,
                    }
                    logger.warning("Grid not converged", extra={"event": "oracle.refine", **diagnostics})
                    raise ConvergenceError(f"{label} changed by {change:.3g} on refinement", diagnostics)
        logger.debug(
            "Grid converged",
            extra={"event": "oracle.converged", "quantity": label, "refinement": level, "value": fine},
        )
        return fine

    def coincidence_rate(self, d: DelayConfig) -> float:
        reference = DelayConfig(tau1=0.0, tau2=self.baseline_tau2())
        return self._converged(
            lambda cfg: self._raw(_coincidence_groups(self.source, d), cfg)
            / _cached_baseline(self.source, "coincidence", reference, cfg),
            "coincidence",
        )

    def hom_rate(self, tau1: float) -> float:
        if isinstance(self.source, DistinguishablePolarized):
            raise DomainError("HOM dip is defined for SPDC or separable identical photons")
        reference = DelayConfig(tau1=self.baseline_tau1())
        d = DelayConfig(tau1=tau1)
        return self._converged(
            lambda cfg: self._raw(_hom_groups(d), cfg) / _cached_baseline(self.source, "hom", reference, cfg),
            "hom",
        )

    def singles_rate(self, d: DelayConfig) -> float:
        reference = DelayConfig(tau1=0.0, tau2=self.baseline_tau2())
        return self._converged(
            lambda cfg: SINGLES_LEVEL
            * self._raw(_singles_groups(d), cfg)
            / _cached_baseline(self.source, "singles", reference, cfg),
            "singles",
        )


_GROUP_BUILDERS = {
    "coincidence": _coincidence_groups,
    "hom": lambda source, d: _hom_groups(d),
    "singles": lambda source, d: _singles_groups(d),
}


@lru_cache(maxsize=256)
def _cached_baseline(source: SourceModel, kind: str, reference: DelayConfig, cfg: OracleConfig) -> float:
    oracle = PathIntegralOracle(source, cfg)
    return oracle._raw(_GROUP_BUILDERS[kind](source, reference), cfg)


def numeric_coincidence_rate(
    source: SourceModel, d: DelayConfig, cfg: OracleConfig | None = None
) -> float:
    return PathIntegralOracle(source, cfg).coincidence_rate(d)


def numeric_hom_rate(source: SourceModel, tau1: float, cfg: OracleConfig | None = None) -> float:
    return PathIntegralOracle(source, cfg).hom_rate(tau1)


def numeric_singles_rate(
    source: SourceModel, d: DelayConfig, cfg: OracleConfig | None = None
) -> float:
    return PathIntegralOracle(source, cfg).singles_rate(d)
