"""debroglie package: two-photon de Broglie wave interference in a Mach-Zehnder.
Exposes the closed-form rates, the Feynman-path oracle and the scan helpers.
"""

from .analysis import estimate_period, extract_envelope, find_side_peaks, fit_hom_dip, visibility
from .interferometer import DelayConfig, enumerate_paths, hom_output_fields, path_overlap_class
from .oracle import OracleConfig, numeric_coincidence_rate, numeric_hom_rate, numeric_singles_rate
from .rates import (
    distinguishable_rate,
    fringe_period_length,
    hom_rate,
    separable_rate,
    singles_rate,
    spdc_debroglie_rate,
)
from .sources import (
    DistinguishablePolarized,
    SeparableIdentical,
    SourceModel,
    SpdcBroadbandPump,
    single_photon_kernel,
    spdc_pair_kernel,
)
from .spectra import SpectralProfile, amplitude, effective_bandwidth, fwhm_to_gaussian_width, pump_density
