"""Emitter description and dephasing decomposition.

A pulsed solid-state emitter is summarized by its radiative lifetime T1,
coherence time T2, the indistinguishability M of two photons emitted one
pulse period apart, its multiphoton purity g2(0), emission wavelength and
system efficiency.

The total linewidth 1/T2 = Gamma/2 + gamma*_fast + gamma_slow splits into
 * Gamma/2          radiative (lifetime-limited) part,
 * gamma*_fast      pure dephasing that decorrelates photon-to-photon,
 * gamma_slow       spectral diffusion that is static over one pulse period
                    but decorrelates between sources and across trials.
M at one-period separation is blind to gamma_slow, while interference
between independent sources feels gamma*_fast + gamma_slow; comparing M
with T2/(2 T1) therefore fixes the split:

    gamma_fast_total = Gamma / (2 M)            (= Gamma/2 + gamma*_fast)
    gamma_slow       = 1/T2 - gamma_fast_total
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def transform_limit_ratio(t1_ps: float, t2_ps: float) -> float:
    """Degree of transform limit T2/(2 T1) in [0, 1]."""
    if t1_ps <= 0.0:
        raise ValueError(f"t1_ps must be positive, got {t1_ps}")
    if t2_ps <= 0.0:
        raise ValueError(f"t2_ps must be positive, got {t2_ps}")
    if t2_ps > 2.0 * t1_ps:
        raise ValueError(
            f"t2_ps={t2_ps} violates the transform limit t2_ps <= 2*t1_ps={2.0 * t1_ps}")
    return t2_ps / (2.0 * t1_ps)


@dataclass(frozen=True)
class EmitterParams:
    """Physical description of one pulsed single-photon source."""

    label: str
    t1_ps: float
    t2_ps: float
    m_consecutive: float
    g2_zero: float
    wavelength_nm: float
    eta_sys: float
    rep_rate_hz: float

    def __post_init__(self):
        transform_limit_ratio(self.t1_ps, self.t2_ps)  # validates T1, T2
        tl = self.t2_ps / (2.0 * self.t1_ps)
        if not (0.0 < self.m_consecutive <= 1.0):
            raise ValueError(
                f"m_consecutive must lie in (0, 1], got {self.m_consecutive}")
        if self.m_consecutive < tl - 1e-12:
            raise ValueError(
                f"m_consecutive={self.m_consecutive} below the transform-limit "
                f"floor t2/(2*t1)={tl:.6f}; slow diffusion rate would be negative")
        if not (0.0 <= self.g2_zero < 1.0):
            raise ValueError(f"g2_zero must lie in [0, 1), got {self.g2_zero}")
        if self.wavelength_nm <= 0.0:
            raise ValueError(
                f"wavelength_nm must be positive, got {self.wavelength_nm}")
        if not (0.0 < self.eta_sys <= 1.0):
            raise ValueError(f"eta_sys must lie in (0, 1], got {self.eta_sys}")
        if self.rep_rate_hz <= 0.0:
            raise ValueError(
                f"rep_rate_hz must be positive, got {self.rep_rate_hz}")

    @property
    def gamma_rad(self) -> float:
        """Radiative rate 1/T1 in 1/ps."""
        return 1.0 / self.t1_ps

    @property
    def gamma_total(self) -> float:
        """Total linewidth 1/T2 in 1/ps."""
        return 1.0 / self.t2_ps

    @property
    def transform_limit(self) -> float:
        return transform_limit_ratio(self.t1_ps, self.t2_ps)

    @property
    def pulse_period_ps(self) -> float:
        return 1e12 / self.rep_rate_hz


@dataclass(frozen=True)
class DephasingDecomposition:
    """Split of the total linewidth into radiative / fast / slow parts (1/ps)."""

    gamma_rad: float
    gamma_fast_star: float
    gamma_slow: float

    def __post_init__(self):
        if self.gamma_rad <= 0.0:
            raise ValueError(f"gamma_rad must be positive, got {self.gamma_rad}")
        if self.gamma_fast_star < 0.0:
            raise ValueError(
                f"gamma_fast_star must be >= 0, got {self.gamma_fast_star}")
        if self.gamma_slow < 0.0:
            raise ValueError(f"gamma_slow must be >= 0, got {self.gamma_slow}")

    @property
    def total_linewidth(self) -> float:
        """Gamma/2 + gamma*_fast + gamma_slow = 1/T2."""
        return self.gamma_rad / 2.0 + self.gamma_fast_star + self.gamma_slow

    @property
    def cauchy_scale_total(self) -> float:
        """Scale of the per-photon frequency offset in independent mode."""
        return self.gamma_fast_star + self.gamma_slow


def decompose_dephasing(emitter: EmitterParams) -> DephasingDecomposition:
    """Infer the fast/slow dephasing split from M(one period) and T2.

    gamma_fast_total := Gamma / (2 M) is the half-linewidth seen by two
    photons one period apart (slow diffusion common-mode), so

        gamma_fast_star = gamma_fast_total - Gamma/2
        gamma_slow      = 1/T2 - gamma_fast_total
    """
    gamma = emitter.gamma_rad
    gamma_fast_total = gamma / (2.0 * emitter.m_consecutive)
    fast_star = gamma_fast_total - gamma / 2.0
    slow = emitter.gamma_total - gamma_fast_total
    if slow < 0.0:
        # reachable only through float corner cases; the emitter invariant
        # m >= t2/(2 t1) already excludes genuinely negative values
        if slow > -1e-15:
            slow = 0.0
        else:
            raise ValueError(
                f"inconsistent emitter {emitter.label!r}: m_consecutive="
                f"{emitter.m_consecutive} forces negative slow-diffusion rate {slow}")
    if fast_star < 0.0:
        if fast_star > -1e-15:
            fast_star = 0.0
        else:
            raise ValueError(
                f"inconsistent emitter {emitter.label!r}: m_consecutive > 1 "
                f"would force negative fast dephasing {fast_star}")
    return DephasingDecomposition(gamma_rad=gamma,
                                  gamma_fast_star=fast_star,
                                  gamma_slow=slow)
