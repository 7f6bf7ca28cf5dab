"""Unit conventions and conversions.

Internal convention used everywhere in this package:
    rates            1/ps
    times            ps
    angular freq     rad/ps
    wavelengths      nm
    powers           mW

Configuration boundaries accept GHz, dB/km, Hz, km etc.; every conversion
lives here so it is written (and tested) exactly once.
"""

from __future__ import annotations

import math

# speed of light
C_M_PER_S = 299_792_458.0
C_NM_PER_PS = C_M_PER_S * 1e-3          # 2.99792458e5 nm/ps

# Gaussian FWHM -> sigma divisor used for detector jitter throughout.
FWHM_TO_SIGMA = 2.355

PS_PER_S = 1e12
PS_PER_HR = 3600.0 * 1e12


def ghz_to_rad_per_ps(f_ghz: float) -> float:
    """Ordinary frequency in GHz -> angular frequency in rad/ps."""
    return 2.0 * math.pi * f_ghz * 1e-3


def rad_per_ps_to_ghz(w: float) -> float:
    return w * 1e3 / (2.0 * math.pi)


def db_to_transmission(db: float) -> float:
    return 10.0 ** (-db / 10.0)


def transmission_to_db(t: float) -> float:
    if t <= 0.0:
        raise ValueError(f"transmission must be positive, got {t}")
    return -10.0 * math.log10(t)


def fwhm_to_sigma(fwhm: float) -> float:
    return fwhm / FWHM_TO_SIGMA


def lorentzian_fwhm_hz(t2_ps: float) -> float:
    """Ordinary-frequency FWHM of a Lorentzian line with coherence time T2.

    |g1(tau)| = exp(-|tau|/T2) Fourier-transforms to a Lorentzian of full
    width 1/(pi T2) in ordinary frequency.
    """
    if t2_ps <= 0.0:
        raise ValueError(f"t2_ps must be positive, got {t2_ps}")
    return 1.0 / (math.pi * t2_ps * 1e-12)


def pulse_period_ps(rep_rate_hz: float) -> float:
    if rep_rate_hz <= 0.0:
        raise ValueError(f"rep_rate_hz must be positive, got {rep_rate_hz}")
    return PS_PER_S / rep_rate_hz
