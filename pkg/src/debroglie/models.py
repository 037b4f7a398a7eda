from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MAX_RATE = 2.5
SPACING_TOLERANCE = 1e-9


class RatePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis_value: float
    rate: float = Field(ge=0.0, le=MAX_RATE)


class CurveMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    source_kind: Literal["spdc", "separable", "distinguishable"]
    axis: Literal["x1", "x2"] = "x2"
    x1: float = 0.0
    x2: float = 0.0
    center_wavelength: float
    filter_fwhm: float
    pump_fwhm: float | None = None
    coherence_length: float
    fringe_period: float
    visibility_factor: float = 1.0


class RateCurve(BaseModel):
    """Uniformly sampled rate scan; the axis is a length in metres."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: np.ndarray
    rates: np.ndarray
    oracle_rates: np.ndarray | None = None
    meta: CurveMeta

    @field_validator("axis", "rates", "oracle_rates", mode="before")
    @classmethod
    def as_float_array(cls, v):
        if v is None:
            return v
        arr = np.array(v, dtype=float)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def check_samples(self) -> "RateCurve":
        if self.axis.ndim != 1 or self.axis.size < 2:
            raise ValueError("axis must be one-dimensional with at least two samples")
        if self.rates.shape != self.axis.shape:
            raise ValueError("axis and rates must have equal lengths")
        if self.oracle_rates is not None and self.oracle_rates.shape != self.axis.shape:
            raise ValueError("axis and oracle rates must have equal lengths")
        steps = np.diff(self.axis)
        if np.any(steps <= 0):
            raise ValueError("axis must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > SPACING_TOLERANCE * steps.mean() + 1e-15:
            raise ValueError("axis spacing must be uniform")
        if not np.all(np.isfinite(self.rates)) or np.any(self.rates < 0):
            raise ValueError("rates must be finite and non-negative")
        return self

    @property
    def step(self) -> float:
        return float((self.axis[-1] - self.axis[0]) / (self.axis.size - 1))

    def points(self) -> list[RatePoint]:
        return [RatePoint(axis_value=x, rate=r) for x, r in zip(self.axis, self.rates, strict=True)]

    def scaled(self, factor: float) -> "RateCurve":
        return self.model_copy(update={"rates": self.rates * factor})


class EnvelopeClass(str, Enum):
    SYMMETRIC_GAUSSIAN = "symmetric_gaussian"
    ASYMMETRIC = "asymmetric"
    DOUBLE_HUMP_SINGLE_DIP = "double_hump_single_dip"
    SIDE_PEAKS = "side_peaks"
    FLAT = "flat"


class EnvelopeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    upper: list[tuple[float, float]]
    lower: list[tuple[float, float]]
    baseline: float
    classification: EnvelopeClass


class SidePeak(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: float
    height: float


class HomDipFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    bandwidth: float = Field(description="fitted Δω in rad/s")
    visibility: float
    dip_minimum: float
    residual: float
