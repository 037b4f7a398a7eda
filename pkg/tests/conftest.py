import os
import sys

import numpy as np
import pytest

# Ensure src directory is on path for package resolution
SRC_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), "src")
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)

from debroglie.experiments import build_source  # noqa: E402
from debroglie.models import CurveMeta, RateCurve  # noqa: E402
from debroglie.oracle import OracleConfig  # noqa: E402
from debroglie.spectra import NM, SpectralProfile  # noqa: E402


@pytest.fixture
def filter_profile():
    return SpectralProfile.from_nm(810, 5)


@pytest.fixture
def spdc_source():
    return build_source("spdc", 810 * NM, 5 * NM, 2 * NM)


@pytest.fixture
def separable_source():
    return build_source("separable", 810 * NM, 5 * NM)


@pytest.fixture
def distinguishable_source():
    return build_source("distinguishable", 810 * NM, 5 * NM)


@pytest.fixture
def oracle_cfg():
    return OracleConfig(time_samples_per_axis=256, pump_samples=64)


@pytest.fixture
def make_curve():
    """RateCurve from raw samples with metadata for an 810 nm line."""

    def build(axis, rates, fringe_period=405 * NM, coherence_length=50e-6, kind="spdc"):
        meta = CurveMeta(
            source_kind=kind,
            center_wavelength=810 * NM,
            filter_fwhm=5 * NM,
            coherence_length=coherence_length,
            fringe_period=fringe_period,
        )
        return RateCurve(axis=np.asarray(axis), rates=np.asarray(rates), meta=meta)

    return build
