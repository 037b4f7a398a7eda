"""Mach-Zehnder interferometer with a two-photon detector on output mode e.

Mode a carries the delay τ₁ before BS1; mode d carries the path imbalance τ₂
before BS2. Every beam splitter is 50:50 with an i phase on reflection. The
BS3 split onto D3/D4 is a constant factor that normalisation removes, so a
two-photon detection is modelled as both photons leaving BS2 through mode e.
"""

import math
from enum import Enum
from itertools import combinations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.constants import c as SPEED_OF_LIGHT

from .exceptions import DomainError
from .sources import DistinguishablePolarized, Polarization, SourceModel

BEAM_SPLITTER = np.array([[1j, 1.0], [1.0, 1j]]) / math.sqrt(2.0)
# Common prefactor of every two-photon mode-e amplitude.
PATH_PREFACTOR = 0.25j
INDISTINGUISHABLE_FRACTION = 0.1
DISTINGUISHABLE_MULTIPLE = 5.0


class DelayConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    tau1: float = Field(default=0.0, allow_inf_nan=False, description="seconds, x₁/c")
    tau2: float = Field(default=0.0, allow_inf_nan=False, description="seconds, x₂/c")

    @classmethod
    def from_lengths(cls, x1: float = 0.0, x2: float = 0.0) -> "DelayConfig":
        return cls(tau1=x1 / SPEED_OF_LIGHT, tau2=x2 / SPEED_OF_LIGHT)

    @property
    def x1(self) -> float:
        return self.tau1 * SPEED_OF_LIGHT

    @property
    def x2(self) -> float:
        return self.tau2 * SPEED_OF_LIGHT


class ModeTerm(BaseModel):
    """One input photon's route to an output mode: coefficient and time shift."""

    model_config = ConfigDict(frozen=True)

    input_mode: str
    route: str
    delay: float
    coefficient: complex


class FeynmanPath(BaseModel):
    model_config = ConfigDict(frozen=True)

    line: int
    shift_a: float
    shift_b: float
    sign: int
    exchange: bool
    group: int = 0
    pol_pair: tuple[Polarization, Polarization] = (Polarization.H, Polarization.H)


class OverlapClass(str, Enum):
    ALL_INDISTINGUISHABLE = "all_indistinguishable"
    PARTIALLY = "partially"
    FULLY_DISTINGUISHABLE = "fully_distinguishable"


class MziTransform(BaseModel):
    """BS1 → (τ₁ on a, τ₂ on d) → BS2 field transformation."""

    model_config = ConfigDict(frozen=True)

    delays: DelayConfig

    @property
    def bs1(self) -> np.ndarray:
        """Rows (c, d), columns (a, b)."""
        return BEAM_SPLITTER

    @property
    def bs2(self) -> np.ndarray:
        """Rows (e, f), columns (c, d)."""
        return BEAM_SPLITTER

    def is_unitary(self, atol: float = 1e-12) -> bool:
        for matrix in (self.bs1, self.bs2, self.bs2 @ self.bs1):
            if not np.allclose(matrix @ matrix.conj().T, np.eye(2), atol=atol):
                return False
        return True

    def hom_terms(self) -> list[ModeTerm]:
        """Contributions of modes a and b to the BS1 outputs c and d."""
        terms = []
        for row, route in enumerate(("c", "d")):
            terms.append(ModeTerm(input_mode="a", route=route, delay=self.delays.tau1,
                                  coefficient=complex(self.bs1[row, 0])))
            terms.append(ModeTerm(input_mode="b", route=route, delay=0.0,
                                  coefficient=complex(self.bs1[row, 1])))
        return terms

    def mode_e_terms(self) -> list[ModeTerm]:
        """Contributions of modes a and b to mode e, routed through c or d."""
        route_delay = {"c": 0.0, "d": self.delays.tau2}
        route_coefficient = {"c": self.bs2[0, 0], "d": self.bs2[0, 1]}
        terms = []
        for term in self.hom_terms():
            terms.append(
                ModeTerm(
                    input_mode=term.input_mode,
                    route=term.route,
                    delay=term.delay + route_delay[term.route],
                    coefficient=complex(term.coefficient * route_coefficient[term.route]),
                )
            )
        return terms

    def mode_e_coefficient(self, input_mode: str) -> complex:
        """Net mode-e coefficient of one input mode at zero delays."""
        return sum(
            (t.coefficient for t in self.mode_e_terms() if t.input_mode == input_mode), 0j
        )


def hom_output_fields(d: DelayConfig) -> MziTransform:
    return MziTransform(delays=d)


# Line order of the mode-e amplitude: (route of a, route of b).
_LINE_ROUTES = (("d", "d"), ("c", "c"), ("c", "d"), ("d", "c"))


def _path_lines(d: DelayConfig) -> list[tuple[int, float, float, int]]:
    """(line, shift_a, shift_b, sign) for the four mode-e routes.

    The sign is the line coefficient relative to the common i/4.
    """
    terms = {(t.input_mode, t.route): t for t in hom_output_fields(d).mode_e_terms()}
    lines = []
    for line, (route_a, route_b) in enumerate(_LINE_ROUTES, start=1):
        term_a, term_b = terms["a", route_a], terms["b", route_b]
        ratio = term_a.coefficient * term_b.coefficient / PATH_PREFACTOR
        lines.append((line, term_a.delay, term_b.delay, int(round(ratio.real))))
    return lines


def enumerate_paths(source: SourceModel, d: DelayConfig) -> list[FeynmanPath]:
    """The eight two-photon detection amplitudes at mode e.

    Each line appears once per time ordering. For orthogonally polarised
    photons the two orderings are separate polarisation channels (``group``
    0 and 1) that never interfere.
    """
    distinguishable = isinstance(source, DistinguishablePolarized)
    return [
        FeynmanPath(
            line=line,
            shift_a=shift_a,
            shift_b=shift_b,
            sign=sign,
            exchange=exchange,
            group=int(exchange) if distinguishable else 0,
            pol_pair=source.polarizations,
        )
        for line, shift_a, shift_b, sign in _path_lines(d)
        for exchange in (False, True)
    ]


def hom_paths(d: DelayConfig) -> list[FeynmanPath]:
    """D1×D2 amplitudes: a photon in c at time t with b in d at t′, and the swap."""
    terms = {(t.input_mode, t.route): t for t in hom_output_fields(d).hom_terms()}
    paths = []
    for exchange, (route_a, route_b) in ((False, ("c", "d")), (True, ("d", "c"))):
        term_a, term_b = terms["a", route_a], terms["b", route_b]
        ratio = term_a.coefficient * term_b.coefficient / 0.5
        paths.append(
            FeynmanPath(
                line=1,
                shift_a=term_a.delay,
                shift_b=term_b.delay,
                sign=int(round(ratio.real)),
                exchange=exchange,
            )
        )
    return paths


def path_overlap_class(d: DelayConfig, coherence_time: float) -> OverlapClass:
    if coherence_time <= 0:
        raise DomainError("coherence time must be positive")
    if abs(d.tau2) < INDISTINGUISHABLE_FRACTION * coherence_time:
        return OverlapClass.ALL_INDISTINGUISHABLE
    shifts = [(shift_a, shift_b) for _, shift_a, shift_b, _ in _path_lines(d)]
    separations = [
        max(abs(a1 - a2), abs(b1 - b2)) for (a1, b1), (a2, b2) in combinations(shifts, 2)
    ]
    if min(separations) > DISTINGUISHABLE_MULTIPLE * coherence_time:
        return OverlapClass.FULLY_DISTINGUISHABLE
    return OverlapClass.PARTIALLY
