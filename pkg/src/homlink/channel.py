"""Fiber propagation: loss, chromatic dispersion, polarization and timing drift.

Dispersion enters as accumulated quadratic spectral phase beta2 * L on the
photon record; identical accumulation on both arms cancels in the overlap
(the testable statement of dispersion-immune symmetric transmission), while
a one-arm imbalance strictly reduces it.

Polarization is a single angle relative to the receiver's polarizer: the
slow wander over a run is one Gaussian draw of scale
pol_drift_rad_per_sqrt_hr * sqrt(elapsed), and the exit polarizer projects
onto the reference axis (survival cos^2, survivors re-aligned).  Arrival
time drifts deterministically within a batch, bounded by
time_drift_ps_per_hr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .emission import PhotonBatch
from .units import C_NM_PER_PS, lorentzian_fwhm_hz


@dataclass(frozen=True)
class FiberParams:
    length_km: float
    loss_db_per_km: float = 0.19
    dispersion_ps_nm_km: float = 18.0
    pol_drift_rad_per_sqrt_hr: float = 0.22
    time_drift_ps_per_hr: float = 10.0
    temp_stability_k: float = 0.1

    def __post_init__(self):
        for name in ("length_km", "loss_db_per_km", "pol_drift_rad_per_sqrt_hr",
                     "time_drift_ps_per_hr", "temp_stability_k"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


def transmission_probability(length_km: float, loss_db_per_km: float) -> float:
    """10^(-alpha L / 10)."""
    if length_km < 0.0 or loss_db_per_km < 0.0:
        raise ValueError("length and loss must be >= 0")
    return 10.0 ** (-loss_db_per_km * length_km / 10.0)


def beta2_from_dispersion(dispersion_ps_nm_km: float, wavelength_nm: float) -> float:
    """beta2 = -D lambda^2 / (2 pi c), in ps^2/km."""
    if wavelength_nm <= 0.0:
        raise ValueError(f"wavelength_nm must be positive, got {wavelength_nm}")
    return -dispersion_ps_nm_km * wavelength_nm ** 2 / (2.0 * math.pi * C_NM_PER_PS)


def group_delay_spread(coherence_time_ps: float, length_km: float,
                       dispersion_ps_nm_km: float, wavelength_nm: float) -> float:
    """Arrival-time spread D * L * dlambda for a Lorentzian line.

    dlambda = lambda^2/c * dnu with dnu = 1/(pi T2) (FWHM).  Diagnostic
    quantity; also sets quadrature guards downstream.
    """
    if coherence_time_ps <= 0.0 or length_km < 0.0:
        raise ValueError("coherence time must be > 0 and length >= 0")
    dnu_hz = lorentzian_fwhm_hz(coherence_time_ps)
    dlam_nm = wavelength_nm ** 2 / (C_NM_PER_PS * 1e12) * dnu_hz
    return dispersion_ps_nm_km * length_km * dlam_nm


def fit_effective_dispersion(target_spread_ps: float, coherence_time_ps: float,
                             length_km: float, wavelength_nm: float) -> float:
    """D_eff reproducing a measured spread (inverse of group_delay_spread)."""
    per_unit = group_delay_spread(coherence_time_ps, length_km, 1.0, wavelength_nm)
    if per_unit <= 0.0:
        raise ValueError("zero-length fiber cannot be fitted")
    return target_spread_ps / per_unit


def sample_drift(fiber: FiberParams, elapsed_wallclock_hr: float,
                 rng: np.random.Generator) -> tuple[float, float]:
    """One (pol_angle, delay_ps) draw for a trial batch.

    Deterministic within the batch; the time drift magnitude never exceeds
    time_drift_ps_per_hr * elapsed.
    """
    if elapsed_wallclock_hr < 0.0:
        raise ValueError("elapsed_wallclock_hr must be >= 0")
    if elapsed_wallclock_hr == 0.0:
        return 0.0, 0.0
    pol = fiber.pol_drift_rad_per_sqrt_hr * math.sqrt(elapsed_wallclock_hr) \
        * rng.standard_normal()
    pol = abs(pol) % math.pi
    delay = fiber.time_drift_ps_per_hr * elapsed_wallclock_hr \
        * rng.uniform(-1.0, 1.0)
    return pol, delay


def apply_channel(photons: PhotonBatch, fiber: FiberParams,
                  elapsed_wallclock_hr: float, rng: np.random.Generator,
                  sample_loss: bool = True) -> PhotonBatch:
    """Propagate a batch through one fiber arm.

    Order: transmission survival, dispersion phase accumulation, batch-wide
    arrival-time drift, polarization wander plus exit-polarizer projection
    (survival cos^2 angle, survivors re-aligned to the reference axis).
    gamma and freq_offset are untouched.  With sample_loss=False the
    Bernoulli survival steps are skipped (post-selected / thinned runs);
    phase, drift and polarization still apply.
    """
    out = photons
    if sample_loss:
        p = transmission_probability(fiber.length_km, fiber.loss_db_per_km)
        keep = rng.random(len(out)) < p
        out = out.select(keep & out.alive)
    else:
        out = out.select(out.alive)

    b2l = beta2_from_dispersion(fiber.dispersion_ps_nm_km, out.carrier_nm) \
        * fiber.length_km
    out.quad_phase_ps2 = out.quad_phase_ps2 + b2l

    pol, delay = sample_drift(fiber, elapsed_wallclock_hr, rng)
    out.extra_delay_ps = out.extra_delay_ps + delay
    if pol != 0.0:
        angle = (out.pol_angle_rad + pol) % math.pi
        if sample_loss:
            keep = rng.random(len(out)) < np.cos(angle) ** 2
            out = out.select(keep)
        # polarizer projects survivors back onto the reference axis
        out.pol_angle_rad = np.zeros(len(out))
    return out
