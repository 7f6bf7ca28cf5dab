"""Stochastic emission engine: per-pulse photon records.

Each pulse attempts a primary photon (probability eta_sys) and, modeling
residual multiphoton emission, an independent companion photon with
probability eta_sys * beta.  beta is fixed by the measured g2(0): with the
companion model the central peak of a pulsed intensity-correlation
histogram sits at 2 beta / (1 + beta)^2 of the side-peak level.

Frequency offsets are Cauchy draws (fast scale gamma*_fast, slow scale
gamma_slow).  The slow draw is shared within a pulse window (primary and
companion) and, in consecutive-pair mode, across the two photons of a
pulse pair; fast draws are always fresh.  Offsets are not truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .emitter import DephasingDecomposition, EmitterParams

ORIGIN_SIGNAL = 0
ORIGIN_COMPANION = 1
ORIGIN_NOISE = 2
ORIGIN_DARK = 3

CORRELATION_MODES = ("independent", "consecutive-pair")


@dataclass(frozen=True)
class PhotonRecord:
    """One emitted photon."""

    source_id: int
    pulse_index: int
    nominal_emit_time_ps: float
    freq_offset: float                 # rad/ps, from common reference
    pol_angle_rad: float = 0.0
    quad_phase_ps2: float = 0.0        # accumulated beta2 * L
    extra_delay_ps: float = 0.0
    is_companion: bool = False
    alive: bool = True

    def __post_init__(self):
        if self.source_id not in (1, 2):
            raise ValueError(f"source_id must be 1 or 2, got {self.source_id}")
        if self.pulse_index < 0:
            raise ValueError(f"pulse_index must be >= 0, got {self.pulse_index}")
        if not math.isfinite(self.freq_offset):
            raise ValueError("freq_offset must be finite")
        if not (0.0 <= self.pol_angle_rad < math.pi):
            raise ValueError(
                f"pol_angle_rad must lie in [0, pi), got {self.pol_angle_rad}")


@dataclass
class PhotonBatch:
    """Struct-of-arrays photon container used by the vectorized pipeline."""

    source_id: np.ndarray
    pulse_index: np.ndarray
    nominal_emit_time_ps: np.ndarray
    freq_offset: np.ndarray
    pol_angle_rad: np.ndarray
    quad_phase_ps2: np.ndarray
    extra_delay_ps: np.ndarray
    is_companion: np.ndarray
    alive: np.ndarray
    gamma_rad: np.ndarray = field(default=None)
    carrier_nm: float = 0.0

    def __len__(self):
        return len(self.pulse_index)

    @classmethod
    def empty(cls, carrier_nm: float = 0.0) -> "PhotonBatch":
        z = np.zeros(0)
        return cls(source_id=np.zeros(0, np.int8),
                   pulse_index=np.zeros(0, np.int64),
                   nominal_emit_time_ps=z.copy(), freq_offset=z.copy(),
                   pol_angle_rad=z.copy(), quad_phase_ps2=z.copy(),
                   extra_delay_ps=z.copy(),
                   is_companion=np.zeros(0, bool), alive=np.zeros(0, bool),
                   gamma_rad=z.copy(), carrier_nm=carrier_nm)

    def select(self, mask: np.ndarray) -> "PhotonBatch":
        return PhotonBatch(
            source_id=self.source_id[mask],
            pulse_index=self.pulse_index[mask],
            nominal_emit_time_ps=self.nominal_emit_time_ps[mask],
            freq_offset=self.freq_offset[mask],
            pol_angle_rad=self.pol_angle_rad[mask],
            quad_phase_ps2=self.quad_phase_ps2[mask],
            extra_delay_ps=self.extra_delay_ps[mask],
            is_companion=self.is_companion[mask],
            alive=self.alive[mask],
            gamma_rad=self.gamma_rad[mask],
            carrier_nm=self.carrier_nm)

    def records(self) -> list[PhotonRecord]:
        return [PhotonRecord(source_id=int(self.source_id[i]),
                             pulse_index=int(self.pulse_index[i]),
                             nominal_emit_time_ps=float(self.nominal_emit_time_ps[i]),
                             freq_offset=float(self.freq_offset[i]),
                             pol_angle_rad=float(self.pol_angle_rad[i]),
                             quad_phase_ps2=float(self.quad_phase_ps2[i]),
                             extra_delay_ps=float(self.extra_delay_ps[i]),
                             is_companion=bool(self.is_companion[i]),
                             alive=bool(self.alive[i]))
                for i in range(len(self))]


def companion_prob_from_g2(g2_zero: float) -> float:
    """Solve 2 beta / (1 + beta)^2 = g2(0) for the smaller root."""
    if not (0.0 <= g2_zero < 1.0):
        raise ValueError(f"g2_zero must lie in [0, 1), got {g2_zero}")
    if g2_zero == 0.0:
        return 0.0
    # g2 b^2 + (2 g2 - 2) b + g2 = 0
    disc = (2.0 * g2_zero - 2.0) ** 2 - 4.0 * g2_zero * g2_zero
    if disc < 0.0:
        raise ValueError(f"no real companion probability for g2={g2_zero}")
    beta = ((2.0 - 2.0 * g2_zero) - math.sqrt(disc)) / (2.0 * g2_zero)
    if not (0.0 <= beta < 1.0):
        raise ValueError(f"companion probability {beta} outside [0, 1) "
                         f"for g2={g2_zero}")
    return beta


def sample_frequency_offset(decomposition: DephasingDecomposition,
                            correlation_mode: str,
                            rng: np.random.Generator):
    """Draw frequency offsets per the fast/slow Cauchy model.

    independent       -> a single offset (fresh fast and slow draws);
    consecutive-pair  -> a pair of offsets sharing one slow draw.
    """
    if correlation_mode not in CORRELATION_MODES:
        raise ValueError(f"correlation_mode must be one of {CORRELATION_MODES}, "
                         f"got {correlation_mode!r}")
    gf = decomposition.gamma_fast_star
    gs = decomposition.gamma_slow
    if correlation_mode == "independent":
        return gf * rng.standard_cauchy() + gs * rng.standard_cauchy()
    slow = gs * rng.standard_cauchy()
    return np.array([gf * rng.standard_cauchy() + slow,
                     gf * rng.standard_cauchy() + slow])


def sample_offsets_batch(decomposition: DephasingDecomposition, n: int,
                         rng: np.random.Generator,
                         slow_shared_pairs: bool = False) -> np.ndarray:
    """Vectorized offsets; if slow_shared_pairs, returns shape (n, 2) with
    the slow term drawn once per row."""
    gf = decomposition.gamma_fast_star
    gs = decomposition.gamma_slow
    if not slow_shared_pairs:
        return gf * rng.standard_cauchy(n) + gs * rng.standard_cauchy(n)
    slow = gs * rng.standard_cauchy(n)[:, None]
    return gf * rng.standard_cauchy((n, 2)) + slow


def sample_pulse_emission(emitter: EmitterParams,
                          decomposition: DephasingDecomposition,
                          pulse_index: int,
                          rng: np.random.Generator,
                          beta: float | None = None) -> list[PhotonRecord]:
    """Sample the photon records of one excitation pulse."""
    if beta is None:
        beta = companion_prob_from_g2(emitter.g2_zero)
    period = emitter.pulse_period_ps
    t0 = pulse_index * period
    records = []
    slow = decomposition.gamma_slow * rng.standard_cauchy()
    if rng.random() < emitter.eta_sys:
        off = decomposition.gamma_fast_star * rng.standard_cauchy() + slow
        records.append(PhotonRecord(source_id=1, pulse_index=pulse_index,
                                    nominal_emit_time_ps=t0, freq_offset=off))
    if beta > 0.0 and rng.random() < emitter.eta_sys * beta:
        off = decomposition.gamma_fast_star * rng.standard_cauchy() + slow
        records.append(PhotonRecord(source_id=1, pulse_index=pulse_index,
                                    nominal_emit_time_ps=t0, freq_offset=off,
                                    is_companion=True))
    return records


def sample_emission_batch(emitter: EmitterParams,
                          decomposition: DephasingDecomposition,
                          n_pulses: int,
                          rng: np.random.Generator,
                          beta: float | None = None,
                          source_id: int = 1,
                          start_pulse: int = 0) -> PhotonBatch:
    """Vectorized emission over a block of pulses.

    Primary and companion of one pulse share the slow offset draw; note the
    slow draw is consumed per *emitting* pulse so the stream advances
    deterministically with the emission pattern.
    """
    if beta is None:
        beta = companion_prob_from_g2(emitter.g2_zero)
    period = emitter.pulse_period_ps

    has_primary = rng.random(n_pulses) < emitter.eta_sys
    if beta > 0.0:
        has_companion = rng.random(n_pulses) < emitter.eta_sys * beta
    else:
        has_companion = np.zeros(n_pulses, bool)

    emitting = has_primary | has_companion
    idx = np.nonzero(emitting)[0]
    slow = decomposition.gamma_slow * rng.standard_cauchy(len(idx))

    prim_sel = has_primary[idx]
    comp_sel = has_companion[idx]
    pulse_idx = np.concatenate([idx[prim_sel], idx[comp_sel]]) + start_pulse
    slow_all = np.concatenate([slow[prim_sel], slow[comp_sel]])
    n_prim = int(prim_sel.sum())
    n_tot = len(pulse_idx)
    fast = decomposition.gamma_fast_star * rng.standard_cauchy(n_tot)

    order = np.argsort(pulse_idx, kind="stable")
    is_comp = np.zeros(n_tot, bool)
    is_comp[n_prim:] = True
    z = np.zeros(n_tot)
    return PhotonBatch(
        source_id=np.full(n_tot, source_id, np.int8)[order],
        pulse_index=pulse_idx.astype(np.int64)[order],
        nominal_emit_time_ps=(pulse_idx * period)[order],
        freq_offset=(fast + slow_all)[order],
        pol_angle_rad=z.copy(),
        quad_phase_ps2=z.copy(),
        extra_delay_ps=z.copy(),
        is_companion=is_comp[order],
        alive=np.ones(n_tot, bool),
        gamma_rad=np.full(n_tot, emitter.gamma_rad),
        carrier_nm=emitter.wavelength_nm)
