"""homlink: two-photon interference over long fiber links.

Analytic toolkit plus Monte-Carlo engine for Hong-Ou-Mandel interference
between two independent pulsed single-photon emitters, covering source
imperfections, quantum frequency conversion, fiber transmission and
detection, with a link-budget calculator for rate/SNR projections.
"""

from .channel import (FiberParams, apply_channel, beta2_from_dispersion,
                      fit_effective_dispersion, group_delay_spread,
                      transmission_probability)
from .detection import (ClickBatch, CoincidenceHistogram, DetectorParams,
                        accumulate_histogram, apply_detector, extract_g2_zero,
                        extract_visibility, hom_sample_pair,
                        sample_pair_interference)
from .emission import (PhotonBatch, PhotonRecord, companion_prob_from_g2,
                       sample_emission_batch, sample_frequency_offset,
                       sample_pulse_emission)
from .emitter import (DephasingDecomposition, EmitterParams,
                      decompose_dephasing, transform_limit_ratio)
from .linkbudget import (ScenarioParams, calibrate_kappa, coincidence_rate,
                         find_snr_crossing, snr_db, sweep_curves)
from .overlap import (GridSpec, ResolutionError, SpectralAmplitude,
                      overlap_closed_form, overlap_numeric)
from .qfc import (QfcParams, apply_conversion, calibrate_raman_coeff,
                  conversion_efficiency, conversion_snr, converted_wavelength,
                  pzt_frequency_step, solve_pump_wavelength)
from .rng import RngStreamSpec, stream
from .timeresolved import delay_density, windowed_visibility
from .visibility import corrected_visibility, raw_from_intrinsic, \
    remote_visibility

__version__ = "0.1.0"

__all__ = [
    "ClickBatch", "CoincidenceHistogram", "DephasingDecomposition",
    "DetectorParams", "EmitterParams", "FiberParams", "GridSpec",
    "PhotonBatch", "PhotonRecord", "QfcParams", "ResolutionError",
    "RngStreamSpec", "ScenarioParams", "SpectralAmplitude",
    "accumulate_histogram", "apply_channel", "apply_conversion",
    "apply_detector", "beta2_from_dispersion", "calibrate_kappa",
    "calibrate_raman_coeff", "coincidence_rate", "companion_prob_from_g2",
    "conversion_efficiency", "conversion_snr", "converted_wavelength",
    "corrected_visibility", "decompose_dephasing", "delay_density",
    "extract_g2_zero", "extract_visibility", "find_snr_crossing",
    "fit_effective_dispersion", "group_delay_spread", "hom_sample_pair",
    "overlap_closed_form", "overlap_numeric", "pzt_frequency_step",
    "raw_from_intrinsic", "remote_visibility", "sample_emission_batch",
    "sample_frequency_offset", "sample_pair_interference",
    "sample_pulse_emission", "snr_db", "solve_pump_wavelength", "stream",
    "sweep_curves", "transmission_probability", "transform_limit_ratio",
    "windowed_visibility",
]
