"""Observables extracted from sampled rate curves.

Extrema are located one fringe period at a time and refined with a
three-point parabola. Envelope rules act on rates normalised to the curve's
own far-field baseline, so they are invariant under a global rescaling.
"""

import logging
import math

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.ndimage import uniform_filter1d
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from .exceptions import AperiodicInputError, FitError, ResolutionError, UndefinedVisibilityError
from .models import EnvelopeClass, EnvelopeReport, HomDipFit, RateCurve, SidePeak

logger = logging.getLogger("debroglie.analysis")

MIN_SAMPLES_PER_PERIOD = 16
MIN_VISIBILITY_PERIODS = 2

# Envelope classification thresholds, applied to baseline-normalised rates.
EVENNESS_TOLERANCE = 0.02
PEAK_PROMINENCE = 0.01
CENTRAL_PEAK_EXCESS = 0.1
SIDE_PEAK_EXCESS = 0.1
SIDE_PEAK_COHERENCE_MULTIPLE = 3.0
SETTLE_TOLERANCE = 0.01
BASELINE_EDGE_FRACTION = 0.05
SIDE_PEAK_REPORT_EXCESS = 0.05


def _parabolic(x: np.ndarray, y: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vertex of the parabola through samples idx−1, idx, idx+1 (uniform spacing)."""
    idx = np.asarray(idx)
    interior = (idx > 0) & (idx < y.size - 1)
    safe = np.clip(idx, 1, y.size - 2)
    left, mid, right = y[safe - 1], y[safe], y[safe + 1]
    curvature = left - 2.0 * mid + right
    denom = np.where(curvature != 0, curvature, 1.0)
    offset = 0.5 * (left - right) / denom
    # edge samples of a monotone stretch are not extrema; leave them unrefined
    usable = interior & (curvature != 0) & (np.abs(offset) <= 0.5)
    offset = np.where(usable, offset, 0.0)
    step = x[1] - x[0]
    xv = x[idx] + offset * step
    yv = np.where(usable, mid - 0.25 * (left - right) * offset, y[idx])
    return xv, yv


def _samples_per_period(curve: RateCurve) -> float:
    return curve.meta.fringe_period / curve.step


def _crossings(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    positive = y >= 0
    idx = np.nonzero(positive[:-1] != positive[1:])[0]
    y0, y1 = y[idx], y[idx + 1]
    return x[idx] + (x[idx + 1] - x[idx]) * y0 / (y0 - y1)


def visibility(curve: RateCurve, center: float, window: float) -> float:
    """(max − min)/(max + min) of the fringe inside ``center ± window/2``."""
    per_period = _samples_per_period(curve)
    if per_period < MIN_SAMPLES_PER_PERIOD * (1 - 1e-6):
        raise ResolutionError(
            f"{per_period:.1f} samples per fringe period, need {MIN_SAMPLES_PER_PERIOD}"
        )
    if window < MIN_VISIBILITY_PERIODS * curve.meta.fringe_period * (1 - 1e-6):
        raise ResolutionError("visibility window must span at least two fringe periods")
    inside = np.nonzero(np.abs(curve.axis - center) <= 0.5 * window)[0]
    if inside.size < 3:
        raise ResolutionError("visibility window holds too few samples")
    y = curve.rates
    i_max = inside[np.argmax(y[inside])]
    i_min = inside[np.argmin(y[inside])]
    _, top = _parabolic(curve.axis, y, np.array([i_max]))
    _, bottom = _parabolic(curve.axis, y, np.array([i_min]))
    top, bottom = float(top[0]), max(float(bottom[0]), 0.0)
    if top + bottom == 0:
        raise UndefinedVisibilityError("visibility undefined for an all-zero window")
    return (top - bottom) / (top + bottom)


def estimate_period(curve: RateCurve) -> float:
    """Dominant modulation period from zero crossings of the detrended curve."""
    x, y = curve.axis, curve.rates
    crossings = _crossings(x, y - y.mean())
    if crossings.size < 2:
        raise AperiodicInputError("curve has no modulation to measure")
    rough = 2.0 * (crossings[-1] - crossings[0]) / (crossings.size - 1)
    samples = int(round(rough / curve.step))
    if samples < MIN_SAMPLES_PER_PERIOD:
        raise ResolutionError(f"{samples} samples per period, need {MIN_SAMPLES_PER_PERIOD}")
    trend = uniform_filter1d(y, size=samples, mode="nearest")
    margin = samples
    if x.size > 2 * margin + samples:
        x, y, trend = x[margin:-margin], y[margin:-margin], trend[margin:-margin]
    crossings = _crossings(x, y - trend)
    if crossings.size < 2:
        raise AperiodicInputError("no crossings left after detrending")
    return float(2.0 * (crossings[-1] - crossings[0]) / (crossings.size - 1))


def _window_extrema(curve: RateCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Upper and lower envelope samples, one refined extremum per fringe period."""
    per_period = max(3, int(round(_samples_per_period(curve))))
    windows = curve.axis.size // per_period
    if windows < 3:
        raise ResolutionError("curve spans fewer than three fringe periods")
    y = curve.rates
    block = y[: windows * per_period].reshape(windows, per_period)
    offsets = np.arange(windows) * per_period
    upper_x, upper_y = _parabolic(curve.axis, y, offsets + np.argmax(block, axis=1))
    lower_x, lower_y = _parabolic(curve.axis, y, offsets + np.argmin(block, axis=1))
    return upper_x, upper_y, lower_x, lower_y


def _edge_baseline(upper: np.ndarray, lower: np.ndarray) -> float:
    edge = max(1, int(BASELINE_EDGE_FRACTION * upper.size))
    mid = 0.5 * (upper + lower)
    return float(np.mean(np.concatenate([mid[:edge], mid[-edge:]])))


def _coherence_length(curve: RateCurve, override: float | None) -> float:
    return override if override is not None else curve.meta.coherence_length


def _resolved(x: np.ndarray, upper: np.ndarray, lower: np.ndarray, peak_x: float) -> bool:
    """True when the envelope settles to baseline somewhere between centre and peak."""
    between = (np.sign(x) == np.sign(peak_x)) & (np.abs(x) < abs(peak_x))
    deviation = np.maximum(np.abs(upper - 1.0), np.abs(lower - 1.0))
    return bool(np.any(deviation[between] < SETTLE_TOLERANCE))


def _classify(
    x: np.ndarray, upper: np.ndarray, lower: np.ndarray, coherence_len: float
) -> EnvelopeClass:
    if np.ptp(upper) < PEAK_PROMINENCE and np.ptp(lower) < PEAK_PROMINENCE:
        return EnvelopeClass.FLAT

    peaks, _ = find_peaks(upper, prominence=PEAK_PROMINENCE)
    for p in peaks:
        if (
            abs(x[p]) > SIDE_PEAK_COHERENCE_MULTIPLE * coherence_len
            and upper[p] >= 1.0 + SIDE_PEAK_EXCESS
            and _resolved(x, upper, lower, x[p])
        ):
            return EnvelopeClass.SIDE_PEAKS

    dips, _ = find_peaks(-lower, prominence=PEAK_PROMINENCE)
    center = int(np.argmin(np.abs(x)))
    single_dip = dips.size <= 1 and abs(int(np.argmin(lower)) - center) <= 1

    top = int(np.argmax(upper))
    mirrored = np.interp(-x, x, upper)
    even = np.max(np.abs(upper - mirrored)) <= EVENNESS_TOLERANCE * upper[top]
    if (
        single_dip
        and abs(top - center) <= 1
        and peaks.size <= 1
        and upper[top] >= 1.0 + CENTRAL_PEAK_EXCESS
        and even
    ):
        return EnvelopeClass.SYMMETRIC_GAUSSIAN

    humps = np.count_nonzero(x[peaks] > 0)
    if single_dip and humps >= 2:
        return EnvelopeClass.DOUBLE_HUMP_SINGLE_DIP
    return EnvelopeClass.ASYMMETRIC


def extract_envelope(curve: RateCurve, coherence_length: float | None = None) -> EnvelopeReport:
    upper_x, upper_y, lower_x, lower_y = _window_extrema(curve)
    baseline = _edge_baseline(upper_y, lower_y)
    if baseline <= 0:
        raise UndefinedVisibilityError("curve has no positive baseline to normalise against")
    classification = _classify(
        upper_x,
        upper_y / baseline,
        np.interp(upper_x, lower_x, lower_y) / baseline,
        _coherence_length(curve, coherence_length),
    )
    logger.debug(
        "Envelope classified",
        extra={"event": "envelope.classify", "classification": classification.value,
               "x1": curve.meta.x1},
    )
    return EnvelopeReport(
        upper=list(zip(upper_x.tolist(), upper_y.tolist(), strict=True)),
        lower=list(zip(lower_x.tolist(), lower_y.tolist(), strict=True)),
        baseline=baseline,
        classification=classification,
    )


def find_side_peaks(
    curve: RateCurve, baseline: float, coherence_length: float | None = None
) -> list[SidePeak]:
    """Upper-envelope maxima outside the central packet, above baseline + 0.05."""
    upper_x, upper_y, _, _ = _window_extrema(curve)
    limit = SIDE_PEAK_COHERENCE_MULTIPLE * _coherence_length(curve, coherence_length)
    peaks, _ = find_peaks(
        upper_y, height=baseline + SIDE_PEAK_REPORT_EXCESS, prominence=PEAK_PROMINENCE
    )
    found = []
    for p in peaks:
        if abs(upper_x[p]) <= limit or p == 0 or p == upper_y.size - 1:
            continue
        dx = upper_x[p - 1 : p + 2] - upper_x[p]
        a, b, c = np.polyfit(dx, upper_y[p - 1 : p + 2], 2)
        if a < 0 and abs(b / (2.0 * a)) <= np.max(np.abs(dx)):
            position = upper_x[p] - b / (2.0 * a)
            height = c - b * b / (4.0 * a)
        else:
            position, height = upper_x[p], upper_y[p]
        found.append(SidePeak(position=float(position), height=float(height)))
    return found


def _dip_model(scaled_tau: np.ndarray, depth: float, scaled_width: float) -> np.ndarray:
    return 1.0 - depth * np.exp(-0.5 * (scaled_width * scaled_tau) ** 2)


def fit_hom_dip(curve: RateCurve) -> HomDipFit:
    """Least-squares fit of 1 − V·exp(−Δω²τ₁²/2) to a scan over x₁."""
    tau = curve.axis / SPEED_OF_LIGHT
    rates = curve.rates
    scale = float(np.max(np.abs(tau)))
    if scale == 0:
        raise FitError("HOM scan has zero extent")
    depth0 = float(1.0 - rates.min())
    inside = np.abs(tau[rates < 1.0 - 0.5 * depth0]) if depth0 > 0 else np.array([])
    half_width = float(inside.max()) if inside.size else 0.25 * scale
    width0 = math.sqrt(2.0 * math.log(2.0)) / max(half_width, curve.step / SPEED_OF_LIGHT)
    try:
        params, _ = curve_fit(
            _dip_model, tau / scale, rates, p0=(depth0 or 1.0, width0 * scale), maxfev=10_000
        )
    except (RuntimeError, ValueError) as e:
        raise FitError(f"HOM dip fit did not converge: {e}")
    depth, scaled_width = params
    bandwidth = abs(scaled_width) / scale
    residual = float(np.sqrt(np.mean((_dip_model(tau / scale, *params) - rates) ** 2)))
    if scale * bandwidth < 4.0:
        raise ResolutionError("HOM scan must span at least ±4/Δω")
    return HomDipFit(
        bandwidth=bandwidth,
        visibility=float(depth),
        dip_minimum=float(1.0 - depth),
        residual=residual,
    )
