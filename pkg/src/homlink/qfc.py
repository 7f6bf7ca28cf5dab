"""Difference-frequency conversion stage.

Energy conservation ties the wavelengths together, 1/lc = 1/ls - 1/lp.
The conversion efficiency follows the standard depletion curve
eta(P) = eta_max sin^2((pi/2) sqrt(P/P_max)) pinned by the quoted
(eta_max, P_max) point of each device, and conversion noise within the
final filter band is linear in pump power (Raman-dominated) with one
calibration constant per device fixed by the quoted SNR at P_max.

Conversion is coherence-preserving: a surviving photon keeps its frequency
offset, decay rate, polarization and timing; only the carrier moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .emission import PhotonBatch
from .units import C_NM_PER_PS


@dataclass(frozen=True)
class QfcParams:
    """One conversion device."""

    eta_max: float                    # peak end-to-end efficiency
    p_max_mw: float                   # pump power at peak efficiency
    raman_coeff_hz_per_mw: float      # noise rate per mW inside filter band
    pump_wavelength_nm: float
    pzt_step_pm: float = 0.03
    filter_band_ghz: float = 25.0

    def __post_init__(self):
        if not (0.0 < self.eta_max <= 1.0):
            raise ValueError(f"eta_max must lie in (0, 1], got {self.eta_max}")
        if self.p_max_mw <= 0.0:
            raise ValueError(f"p_max_mw must be positive, got {self.p_max_mw}")
        if self.raman_coeff_hz_per_mw < 0.0:
            raise ValueError(
                f"raman_coeff_hz_per_mw must be >= 0, got {self.raman_coeff_hz_per_mw}")


def solve_pump_wavelength(signal_nm: float, target_nm: float) -> float:
    """Pump wavelength for down-conversion signal -> target (vacuum nm)."""
    if signal_nm <= 0.0:
        raise ValueError(f"signal_nm must be positive, got {signal_nm}")
    if signal_nm >= target_nm:
        raise ValueError(
            f"no pump solution: need signal_nm < target_nm for down-conversion, "
            f"got {signal_nm} >= {target_nm}")
    return 1.0 / (1.0 / signal_nm - 1.0 / target_nm)


def converted_wavelength(signal_nm: float, pump_nm: float) -> float:
    """Energy conservation 1/lc = 1/ls - 1/lp."""
    if signal_nm <= 0.0:
        raise ValueError(f"signal_nm must be positive, got {signal_nm}")
    if pump_nm <= signal_nm:
        raise ValueError(
            f"pump_nm must exceed signal_nm, got {pump_nm} <= {signal_nm}")
    return 1.0 / (1.0 / signal_nm - 1.0 / pump_nm)


def pzt_frequency_step(delta_lambda_pm: float, at_wavelength_nm: float) -> float:
    """Wavelength step (pm) -> frequency step (MHz) at a given wavelength."""
    if at_wavelength_nm <= 0.0:
        raise ValueError(
            f"at_wavelength_nm must be positive, got {at_wavelength_nm}")
    dlam_nm = delta_lambda_pm * 1e-3
    dnu_per_ps = C_NM_PER_PS * dlam_nm / at_wavelength_nm ** 2   # 1/ps
    return dnu_per_ps * 1e6  # 1/ps = 1e12 Hz = 1e6 MHz


def conversion_efficiency(pump_mw: float, qfc: QfcParams) -> float:
    """eta(P) = eta_max sin^2((pi/2) sqrt(P/P_max)).

    Monotone up to P_max; overdriving beyond P_max follows the sin^2
    roll-off.
    """
    if pump_mw < 0.0:
        raise ValueError(f"pump_mw must be >= 0, got {pump_mw}")
    return qfc.eta_max * math.sin(
        0.5 * math.pi * math.sqrt(pump_mw / qfc.p_max_mw)) ** 2


def conversion_snr(pump_mw: float, signal_rate_hz: float, qfc: QfcParams) -> float:
    """10 log10(converted signal rate / noise rate), in dB.

    Zero noise (zero pump or zero Raman coefficient) returns +inf as a
    distinct sentinel.
    """
    if signal_rate_hz <= 0.0:
        raise ValueError(
            f"signal_rate_hz must be positive, got {signal_rate_hz}")
    if pump_mw < 0.0:
        raise ValueError(f"pump_mw must be >= 0, got {pump_mw}")
    noise = qfc.raman_coeff_hz_per_mw * pump_mw
    if noise == 0.0:
        return math.inf
    sig = signal_rate_hz * conversion_efficiency(pump_mw, qfc)
    if sig == 0.0:
        return -math.inf
    return 10.0 * math.log10(sig / noise)


def calibrate_raman_coeff(eta_max: float, p_max_mw: float,
                          signal_rate_hz: float, snr_db_at_pmax: float) -> float:
    """Raman coefficient making the device reproduce its quoted SNR at P_max."""
    if signal_rate_hz <= 0.0 or p_max_mw <= 0.0:
        raise ValueError("signal rate and p_max must be positive")
    return signal_rate_hz * eta_max / (p_max_mw * 10.0 ** (snr_db_at_pmax / 10.0))


def apply_conversion(photons: PhotonBatch, qfc: QfcParams, pump_mw: float,
                     rng: np.random.Generator, period_ps: float,
                     n_pulses: int | None = None
                     ) -> tuple[PhotonBatch, np.ndarray]:
    """Convert a photon batch; returns (surviving batch, noise click times).

    Survival is Bernoulli(eta(P)); survivors keep freq_offset, gamma,
    polarization and timing, with the carrier replaced by the converted
    wavelength.  Noise photons are Poisson at rate raman_coeff * P, uniform
    over each pulse period spanned by the batch.
    """
    eta = conversion_efficiency(pump_mw, qfc)
    keep = rng.random(len(photons)) < eta
    out = photons.select(keep & photons.alive)
    out.carrier_nm = converted_wavelength(photons.carrier_nm,
                                          qfc.pump_wavelength_nm)

    if n_pulses is None:
        n_pulses = int(photons.pulse_index.max()) + 1 if len(photons) else 0
    span_ps = n_pulses * period_ps
    mean_noise = qfc.raman_coeff_hz_per_mw * pump_mw * span_ps * 1e-12
    n_noise = rng.poisson(mean_noise) if mean_noise > 0.0 else 0
    noise_times = rng.random(n_noise) * span_ps
    return out, noise_times
