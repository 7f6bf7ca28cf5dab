"""Analytic coincidence-rate and SNR curves versus fiber length.

Symmetric link, each arm L/2:

    p_arm  = kappa_sys * eta_sys * eta_qfc * eta_det * 10^(-alpha (L/2)/10)
    rate   = nu * p_arm^2 / 2            (cross-detector fraction for a
                                          distinguishable reference)

Accidentals pair dark counts with the photon flux arriving at the
detectors; kappa_sys calibrates two-photon-specific losses (temporal and
spectral overlap of the coincidence measurement) and therefore does not
thin the singles flux, nor does the detector quantum efficiency scale the
dark rate:

    p_flux      = eta_sys * eta_qfc * 10^(-alpha (L/2)/10)
    q           = dark_rate * tau_w      (per-gate dark probability)
    accidentals = nu (2 p_flux q + q^2) / 2
    SNR         = 10 log10(rate / accidentals)

kappa_sys is meant to be fitted once to a known (length, rate) anchor and
then frozen; `calibrate_kappa` does exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import transmission_probability


@dataclass(frozen=True)
class ScenarioParams:
    name: str
    rep_rate_hz: float
    eta_sys: float
    eta_det: float = 0.76
    eta_qfc: float = 1.0
    loss_db_per_km: float = 0.19
    dark_rate_hz: float = 300.0
    coincidence_window_ps: float = 100.0
    kappa_sys: float = 1.0

    def __post_init__(self):
        for name in ("eta_sys", "eta_det", "eta_qfc"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        for name in ("rep_rate_hz", "coincidence_window_ps", "kappa_sys"):
            v = getattr(self, name)
            if v <= 0.0:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.dark_rate_hz < 0.0:
            raise ValueError(
                f"dark_rate_hz must be >= 0, got {self.dark_rate_hz}")
        if self.loss_db_per_km < 0.0:
            raise ValueError(
                f"loss_db_per_km must be >= 0, got {self.loss_db_per_km}")


def arm_probability(total_length_km: float, s: ScenarioParams,
                    with_kappa: bool = True, with_det: bool = True) -> float:
    if total_length_km < 0.0:
        raise ValueError("length must be >= 0")
    p = s.eta_sys * s.eta_qfc * transmission_probability(
        total_length_km / 2.0, s.loss_db_per_km)
    if with_det:
        p *= s.eta_det
    if with_kappa:
        p *= s.kappa_sys
    return p


def coincidence_rate(total_length_km: float, s: ScenarioParams) -> float:
    """Two-photon coincidence rate in Hz for a symmetric link."""
    p = arm_probability(total_length_km, s)
    return s.rep_rate_hz * p * p / 2.0


def accidental_rate(total_length_km: float, s: ScenarioParams) -> float:
    """Dark-signal and dark-dark gate coincidences in Hz."""
    p_flux = arm_probability(total_length_km, s, with_kappa=False,
                             with_det=False)
    q = s.dark_rate_hz * s.coincidence_window_ps * 1e-12
    return s.rep_rate_hz * (2.0 * p_flux * q + q * q) / 2.0


def snr_db(total_length_km: float, s: ScenarioParams) -> float:
    """10 log10(rate / accidentals); +inf sentinel when accidentals vanish."""
    acc = accidental_rate(total_length_km, s)
    rate = coincidence_rate(total_length_km, s)
    if acc == 0.0:
        return math.inf
    return 10.0 * math.log10(rate / acc)


def calibrate_kappa(s: ScenarioParams, anchor_length_km: float,
                    anchor_rate_hz: float) -> ScenarioParams:
    """Return the scenario with kappa_sys fitted to a (length, rate) anchor."""
    if anchor_rate_hz <= 0.0:
        raise ValueError("anchor rate must be positive")
    base = replace(s, kappa_sys=1.0)
    raw = coincidence_rate(anchor_length_km, base)
    kappa = math.sqrt(anchor_rate_hz / raw)
    return replace(s, kappa_sys=kappa)


def find_snr_crossing(s: ScenarioParams, target_db: float,
                      lo_km: float, hi_km: float,
                      tol_km: float = 1e-3) -> float | None:
    """Bisection for the length where SNR crosses target; None if outside."""
    f_lo = snr_db(lo_km, s) - target_db
    f_hi = snr_db(hi_km, s) - target_db
    if not (f_lo > 0.0 >= f_hi or f_lo <= 0.0 < f_hi):
        return None
    while hi_km - lo_km > tol_km:
        mid = 0.5 * (lo_km + hi_km)
        if (snr_db(mid, s) - target_db > 0.0) == (f_lo > 0.0):
            lo_km = mid
        else:
            hi_km = mid
    return 0.5 * (lo_km + hi_km)


def sweep_curves(lengths_km, scenarios, snr_target_db: float | None = None):
    """Rate/SNR rows per scenario plus SNR-target crossings.

    Returns (rows, crossings): rows are (length_km, rate_hz, snr_db, name)
    tuples; crossings maps scenario name -> length or None when the
    crossing lies outside the grid.
    """
    lengths = list(lengths_km)
    rows = []
    crossings = {}
    for s in scenarios:
        for length in lengths:
            rows.append((float(length), coincidence_rate(length, s),
                         snr_db(length, s), s.name))
        if snr_target_db is not None and lengths:
            crossings[s.name] = find_snr_crossing(
                s, snr_target_db, min(lengths), max(lengths))
    return rows, crossings
