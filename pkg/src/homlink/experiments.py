"""Experiment presets: deterministic, trial-parallel orchestrations.

Work is partitioned into fixed-size chunks; every chunk owns a random
stream keyed by (master seed, preset, run tag, chunk index) and results
are reduced in chunk order, so the output is byte-identical for any worker
count.

Remote interference runs are "thinned": loss only removes samples without
touching any photon property, so the engine simulates post-selected
two-photon events directly.  Multiphoton contamination enters through the
event-type mixture (which two photons made it to the beamsplitter),
sampled with the exact pairwise weights of the lossy experiment:

    pp : p1c2 : c1p2 : p1c1 : p2c2 : c1c2
     1 :  b2  :  b1  : b1 r : b2/r : b1 b2,   r = arrival ratio arm1/arm2

Same-source pairs share the slow spectral-diffusion draw and enter the
beamsplitter through one port (never interfere); companions are treated
as fully distinguishable from everything else.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import apply_channel, beta2_from_dispersion
from .config import ExperimentConfig, config_hash, render_config
from .detection import (ClickBatch, CoincidenceHistogram, accumulate_histogram,
                        apply_detector, extract_g2_zero, extract_visibility,
                        sample_pair_interference)
from .emission import (ORIGIN_COMPANION, ORIGIN_SIGNAL, PhotonBatch,
                       companion_prob_from_g2, sample_emission_batch,
                       sample_offsets_batch)
from .emitter import decompose_dephasing
from .linkbudget import snr_db as scenario_snr_db
from .linkbudget import coincidence_rate, sweep_curves
from .overlap import GridSpec, SpectralAmplitude, overlap_numeric_offsets
from .overlap import overlap_numeric
from .qfc import conversion_efficiency, conversion_snr, pzt_frequency_step, \
    solve_pump_wavelength, converted_wavelength
from .rng import stream
from .timeresolved import windowed_visibility
from .visibility import corrected_visibility, remote_visibility

CHUNK_PAIRS = 100_000
CHUNK_PULSES = 500_000

HIST_BIN_PS = 10.0
HIST_RANGE_PS = 100_000.0          # covers +-8 side peaks at 80.3 MHz
PAIR_BIN_PS = 5.0
PAIR_RANGE_PS = 2_000.0
PAIR_SPACING_PS = 1.0e6            # isolates single-pair trials in time


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)


@dataclass
class ResultBundle:
    preset: str
    seed: int
    config_hash: str
    effective_config: str
    summary: list[dict] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)

    def record(self, name: str, value: float, stderr: float = 0.0,
               **context) -> None:
        """Summary record; stderr 0.0 marks analytically exact quantities."""
        rec = {"name": name, "value": value, "stderr": stderr,
               "preset": self.preset, "seed": self.seed,
               "config_hash": self.config_hash}
        rec.update(context)
        self.summary.append(rec)


def _chunk_sizes(total: int, chunk: int) -> list[tuple[int, int, int]]:
    """(chunk_index, start, count) partition, independent of worker count."""
    out = []
    start = 0
    idx = 0
    while start < total:
        count = min(chunk, total - start)
        out.append((idx, start, count))
        idx += 1
        start += count
    return out

def _run_chunks(parts, fn, workers: int):
    if workers <= 1:
        return [fn(*p) for p in parts]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda p: fn(*p), parts))


def _merge_histograms(hists) -> CoincidenceHistogram:
    out = hists[0]
    for h in hists[1:]:
        out = out.merge(h)
    return out


# ---------------------------------------------------------------------------
# HBT (intensity correlation of one source)
# ---------------------------------------------------------------------------

def run_hbt(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    for tag, emitter in (("qd1", cfg.emitter1), ("qd2", cfg.emitter2)):
        decomp = decompose_dephasing(emitter)
        beta = companion_prob_from_g2(emitter.g2_zero) \
            if cfg.include_multiphoton else 0.0
        period = emitter.pulse_period_ps

        def chunk(idx, start, count, emitter=emitter, decomp=decomp,
                  beta=beta, period=period, tag=tag):
            rng = stream(cfg.master_seed, cfg.preset, tag, idx)
            batch = sample_emission_batch(emitter, decomp, count, rng,
                                          beta=beta, start_pulse=start)
            n = len(batch)
            t = batch.nominal_emit_time_ps \
                + rng.exponential(1.0, n) / batch.gamma_rad
            det_id = rng.integers(1, 3, n).astype(np.int8)
            origin = np.where(batch.is_companion, ORIGIN_COMPANION,
                              ORIGIN_SIGNAL).astype(np.int8)
            clicks = apply_detector(ClickBatch(t, det_id, origin),
                                    cfg.detector, rng, n_gates=count,
                                    gate_period_ps=period, gate_start=start)
            # pairing is chunk-local: the few boundary pairs lost are
            # ~8/CHUNK_PULSES of the side-peak area
            return accumulate_histogram(clicks, HIST_BIN_PS, HIST_RANGE_PS,
                                        warn_period_ps=period)

        parts = _chunk_sizes(cfg.trials, CHUNK_PULSES)
        hist = _merge_histograms(_run_chunks(parts, chunk, workers))
        hist.metadata.update(label=f"hbt-{tag}", seed=cfg.master_seed,
                             config_hash=bundle.config_hash)
        bundle.histograms[f"hbt_{tag}"] = hist
        g2, err = extract_g2_zero(hist, period)
        bundle.record("g2_zero", g2, err, source=tag,
                      beta_companion=beta, pulses=cfg.trials)
    return bundle


# ---------------------------------------------------------------------------
# consecutive-photon HOM of one source
# ---------------------------------------------------------------------------

def run_hom_consecutive(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    det = replace(cfg.detector, efficiency=1.0)
    for tag, emitter in (("qd1", cfg.emitter1), ("qd2", cfg.emitter2)):
        decomp = decompose_dephasing(emitter)
        hists = {}
        for run, cos2 in (("parallel", 1.0), ("orthogonal", 0.0)):

            def chunk(idx, start, count, decomp=decomp, emitter=emitter,
                      cos2=cos2, run=run, tag=tag):
                rng = stream(cfg.master_seed, cfg.preset, tag, run, idx)
                offs = sample_offsets_batch(decomp, count, rng,
                                            slow_shared_pairs=True)
                gam = np.full(count, emitter.gamma_rad)
                zero = np.zeros(count)
                det1, det2, t1, t2 = sample_pair_interference(
                    gam, gam, offs[:, 1] - offs[:, 0], zero, zero,
                    np.full(count, cos2), np.ones(count, bool), rng)
                base = (start + np.arange(count)) * PAIR_SPACING_PS
                clicks = ClickBatch(
                    np.concatenate([t1 + base, t2 + base]),
                    np.concatenate([det1, det2]),
                    np.zeros(2 * count, np.int8))
                clicks = apply_detector(clicks, det, rng, n_gates=count,
                                        gate_period_ps=PAIR_SPACING_PS,
                                        gate_start=start)
                return accumulate_histogram(clicks, PAIR_BIN_PS, PAIR_RANGE_PS)

            parts = _chunk_sizes(cfg.trials, CHUNK_PAIRS)
            hist = _merge_histograms(_run_chunks(parts, chunk, workers))
            hist.metadata.update(label=f"hom-consecutive-{tag}-{run}",
                                 seed=cfg.master_seed,
                                 config_hash=bundle.config_hash)
            hists[run] = hist
            bundle.histograms[f"hom_consecutive_{tag}_{run}"] = hist
        v, err, n_res, n_ref = extract_visibility(
            hists["parallel"], hists["orthogonal"], 2.0 * PAIR_RANGE_PS)
        bundle.record("m_consecutive", v, err, source=tag,
                      expected=emitter.m_consecutive,
                      n_res=n_res, n_ref=n_ref)
    return bundle


# ---------------------------------------------------------------------------
# remote two-photon interference (thinned pair engine)
# ---------------------------------------------------------------------------

# event types: members (source of photon A, source of photon B),
# whether A/B is a companion, and whether the pair interferes
_TYPE_SRC_A = np.array([1, 1, 1, 1, 2, 1], np.int8)
_TYPE_SRC_B = np.array([2, 2, 2, 1, 2, 2], np.int8)
_TYPE_COMP_A = np.array([False, False, True, False, False, True])
_TYPE_COMP_B = np.array([False, True, False, True, True, True])
_TYPE_SHARED_SLOW = np.array([False, False, False, True, True, False])
_TYPE_INTERFERES = np.array([True, False, False, False, False, False])


def _pair_type_weights(cfg: ExperimentConfig) -> np.ndarray:
    """Relative central-window weights of the two-photon event types."""
    if not cfg.include_multiphoton:
        return np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    b1 = companion_prob_from_g2(cfg.emitter1.g2_zero)
    b2 = companion_prob_from_g2(cfg.emitter2.g2_zero)
    eta1 = cfg.emitter1.eta_sys * conversion_efficiency(cfg.pump1_mw, cfg.qfc1)
    eta2 = cfg.emitter2.eta_sys * conversion_efficiency(cfg.pump2_mw, cfg.qfc2)
    r = eta1 / eta2
    return np.array([1.0, b2, b1, b1 * r, b2 / r, b1 * b2])


def _remote_pair_chunk(cfg: ExperimentConfig, length_km: float,
                       detuning_rad: float, cos2pol: float, run_tag: str,
                       idx: int, start: int, count: int,
                       weights: np.ndarray) -> CoincidenceHistogram:
    rng = stream(cfg.master_seed, cfg.preset, run_tag, idx)
    decomp1 = decompose_dephasing(cfg.emitter1)
    decomp2 = decompose_dephasing(cfg.emitter2)

    w = weights / weights.sum()
    types = rng.choice(len(w), size=count, p=w)

    src_a = _TYPE_SRC_A[types]
    src_b = _TYPE_SRC_B[types]
    shared = _TYPE_SHARED_SLOW[types]
    interf = _TYPE_INTERFERES[types]

    def scale_for(src, fast: bool) -> np.ndarray:
        v1 = decomp1.gamma_fast_star if fast else decomp1.gamma_slow
        v2 = decomp2.gamma_fast_star if fast else decomp2.gamma_slow
        return np.where(src == 1, v1, v2)

    slow_a = scale_for(src_a, False) * rng.standard_cauchy(count)
    slow_b = scale_for(src_b, False) * rng.standard_cauchy(count)
    slow_b = np.where(shared, slow_a, slow_b)   # same pulse window of one source
    fast_a = scale_for(src_a, True) * rng.standard_cauchy(count)
    fast_b = scale_for(src_b, True) * rng.standard_cauchy(count)
    off_a = fast_a + slow_a + np.where(src_a == 2, detuning_rad, 0.0)
    off_b = fast_b + slow_b + np.where(src_b == 2, detuning_rad, 0.0)

    gam = {1: cfg.emitter1.gamma_rad, 2: cfg.emitter2.gamma_rad}
    gam_a = np.where(src_a == 1, gam[1], gam[2])
    gam_b = np.where(src_b == 1, gam[1], gam[2])

    # push each photon through its arm (no loss sampling in thinned mode)
    batch_a = _bare_batch(src_a, off_a, gam_a, cfg)
    batch_b = _bare_batch(src_b, off_b, gam_b, cfg)
    arm_fibers = (replace(cfg.fiber1, length_km=length_km / 2.0),
                  replace(cfg.fiber2, length_km=length_km / 2.0))
    for batch in (batch_a, batch_b):
        for arm in (1, 2):
            sel = batch.source_id == arm
            if not sel.any():
                continue
            sub = batch.select(sel)
            sub = apply_channel(sub, arm_fibers[arm - 1], cfg.elapsed_hours,
                                rng, sample_loss=False)
            _write_back(batch, sel, sub)

    db = batch_b.quad_phase_ps2 - batch_a.quad_phase_ps2
    if np.abs(db).max() > 1e-9:
        raise ValueError(
            "asymmetric dispersion between the arms: time-resolved sampling "
            "is only defined for a symmetric link (use dispersion-demo for "
            "port statistics under imbalance)")

    pol_b = batch_b.pol_angle_rad + math.acos(math.sqrt(cos2pol)) \
        if cos2pol < 1.0 else batch_b.pol_angle_rad
    cos2 = np.cos(batch_a.pol_angle_rad - pol_b) ** 2

    det1, det2, t1, t2 = sample_pair_interference(
        gam_a, gam_b, off_b - off_a,
        batch_a.extra_delay_ps, batch_b.extra_delay_ps,
        cos2, interf, rng)

    base = (start + np.arange(count)) * PAIR_SPACING_PS
    clicks = ClickBatch(np.concatenate([t1 + base, t2 + base]),
                        np.concatenate([det1, det2]),
                        np.zeros(2 * count, np.int8))
    det_params = replace(cfg.detector, efficiency=1.0)
    clicks = apply_detector(clicks, det_params, rng, n_gates=count,
                            gate_period_ps=PAIR_SPACING_PS, gate_start=start)
    return accumulate_histogram(clicks, PAIR_BIN_PS, PAIR_RANGE_PS)


def _bare_batch(src, off, gam, cfg: ExperimentConfig) -> PhotonBatch:
    n = len(src)
    return PhotonBatch(source_id=src.astype(np.int8),
                       pulse_index=np.arange(n, dtype=np.int64),
                       nominal_emit_time_ps=np.zeros(n),
                       freq_offset=np.asarray(off, float),
                       pol_angle_rad=np.zeros(n),
                       quad_phase_ps2=np.zeros(n),
                       extra_delay_ps=np.zeros(n),
                       is_companion=np.zeros(n, bool),
                       alive=np.ones(n, bool),
                       gamma_rad=np.asarray(gam, float),
                       carrier_nm=cfg.target_wavelength_nm)


def _write_back(batch: PhotonBatch, mask: np.ndarray, sub: PhotonBatch) -> None:
    for name in ("freq_offset", "pol_angle_rad", "quad_phase_ps2",
                 "extra_delay_ps"):
        arr = getattr(batch, name).copy()
        arr[mask] = getattr(sub, name)
        setattr(batch, name, arr)


def _remote_visibility_run(cfg: ExperimentConfig, length_km: float,
                           n_pairs: int, workers: int, run_label: str,
                           reference: str = "detuned",
                           pure: bool = False):
    """One resonant + one reference exposure; returns (hist_res, hist_ref)."""
    weights = _pair_type_weights(cfg) if not pure \
        else np.array([1.0, 0, 0, 0, 0, 0])
    parts = _chunk_sizes(n_pairs, CHUNK_PAIRS)

    def res_chunk(idx, start, count):
        return _remote_pair_chunk(cfg, length_km, cfg.detuning_rad_per_ps,
                                  1.0, f"{run_label}-res", idx, start, count,
                                  weights)

    if reference == "detuned":
        ref_det, ref_pol = cfg.reference_detuning_rad_per_ps, 1.0
    elif reference == "orthogonal":
        ref_det, ref_pol = cfg.detuning_rad_per_ps, 0.0
    else:
        raise ValueError(f"unknown reference mode {reference!r}")

    def ref_chunk(idx, start, count):
        return _remote_pair_chunk(cfg, length_km, ref_det, ref_pol,
                                  f"{run_label}-ref", idx, start, count,
                                  weights)

    hist_res = _merge_histograms(_run_chunks(parts, res_chunk, workers))
    hist_ref = _merge_histograms(_run_chunks(parts, ref_chunk, workers))
    return hist_res, hist_ref


def run_hom_remote(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    g2a, g2b = cfg.emitter1.g2_zero, cfg.emitter2.g2_zero
    for length in cfg.lengths_km:
        hist_res, hist_ref = _remote_visibility_run(
            cfg, length, cfg.trials, workers, f"L{length:g}")
        for name, h in (("res", hist_res), ("ref", hist_ref)):
            h.metadata.update(label=f"hom-remote-{length:g}km-{name}",
                              seed=cfg.master_seed,
                              config_hash=bundle.config_hash)
            bundle.histograms[f"hom_remote_{_km_tag(length)}_{name}"] = h
        v, err, n_res, n_ref = extract_visibility(hist_res, hist_ref,
                                                  2.0 * PAIR_RANGE_PS)
        bundle.record("visibility_raw", v, err, length_km=length,
                      n_res=n_res, n_ref=n_ref)
        bundle.record("visibility_corrected", corrected_visibility(
            max(0.0, min(1.0, v)), g2a, g2b), err, length_km=length)
    return bundle


def run_length_sweep(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    v_pure = remote_visibility(cfg.emitter1, cfg.emitter2,
                               cfg.detuning_rad_per_ps)
    v_ref = remote_visibility(cfg.emitter1, cfg.emitter2,
                              cfg.reference_detuning_rad_per_ps)
    u = float(_pair_type_weights(cfg)[1:].sum())
    v_theory = (v_pure - v_ref) / (1.0 - v_ref + u)
    table = Table(["length_km", "visibility_raw", "stderr",
                   "visibility_theory"])
    for length in cfg.lengths_km:
        hist_res, hist_ref = _remote_visibility_run(
            cfg, length, cfg.trials, workers, f"sweep-L{length:g}")
        v, err, _, _ = extract_visibility(hist_res, hist_ref,
                                          2.0 * PAIR_RANGE_PS)
        table.rows.append((length, v, err, v_theory))
        bundle.record("visibility_raw", v, err, length_km=length,
                      theory=v_theory)
    bundle.tables["visibility_vs_length"] = table
    return bundle


def run_window_sweep(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    """Raw visibility versus coincidence window, pure-source configuration.

    The analytic oracle (jitter-convolved coincidence density) describes
    the dispersion-compensated signal alone, so this preset runs without
    multiphoton contamination at zero effective length.
    """
    bundle = _new_bundle(cfg)
    hist_res, hist_ref = _remote_visibility_run(
        cfg, 0.0, cfg.trials, workers, "window", pure=True)
    for name, h in (("res", hist_res), ("ref", hist_ref)):
        h.metadata.update(label=f"window-sweep-{name}", seed=cfg.master_seed,
                          config_hash=bundle.config_hash)
        bundle.histograms[f"window_sweep_{name}"] = h
    table = Table(["window_ps", "visibility", "stderr", "n_res", "n_ref",
                   "visibility_theory"])
    for w in cfg.windows_ps:
        v, err, n_res, n_ref = extract_visibility(hist_res, hist_ref, w)
        v_th = windowed_visibility(
            w, cfg.emitter1, cfg.emitter2, cfg.detuning_rad_per_ps,
            cfg.reference_detuning_rad_per_ps, cfg.detector.jitter_fwhm_ps)
        table.rows.append((w, v, err, n_res, n_ref, v_th))
        bundle.record("visibility_windowed", v, err, window_ps=w, theory=v_th)
    bundle.tables["visibility_vs_window"] = table
    return bundle


# ---------------------------------------------------------------------------
# QFC curves
# ---------------------------------------------------------------------------

def run_qfc_curves(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    table = Table(["device", "pump_mw", "efficiency", "snr_db"])
    for tag, emitter, qfc in (("qfc1", cfg.emitter1, cfg.qfc1),
                              ("qfc2", cfg.emitter2, cfg.qfc2)):
        signal_rate = emitter.eta_sys * emitter.rep_rate_hz
        pump_grid = np.linspace(0.0, 1.2 * qfc.p_max_mw, 61)
        for p in pump_grid:
            eta = conversion_efficiency(p, qfc)
            s = conversion_snr(p, signal_rate, qfc) if p > 0 else math.inf
            table.rows.append((tag, float(p), eta, s))
        pump = solve_pump_wavelength(emitter.wavelength_nm,
                                     cfg.target_wavelength_nm)
        bundle.record("pump_wavelength_nm", pump, device=tag,
                      signal_nm=emitter.wavelength_nm,
                      target_nm=cfg.target_wavelength_nm)
        bundle.record("converted_wavelength_nm",
                      converted_wavelength(emitter.wavelength_nm, pump),
                      device=tag)
        bundle.record("pzt_step_mhz",
                      pzt_frequency_step(qfc.pzt_step_pm,
                                         cfg.target_wavelength_nm),
                      device=tag, pzt_step_pm=qfc.pzt_step_pm)
        bundle.record("efficiency_at_pmax",
                      conversion_efficiency(qfc.p_max_mw, qfc),
                      device=tag, pump_mw=qfc.p_max_mw)
    bundle.tables["qfc_curves"] = table
    return bundle


# ---------------------------------------------------------------------------
# dispersion demo
# ---------------------------------------------------------------------------

def run_dispersion_demo(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    e1, e2 = cfg.emitter1, cfg.emitter2
    lam = cfg.target_wavelength_nm
    beta2 = beta2_from_dispersion(cfg.fiber1.dispersion_ps_nm_km, lam)
    grid = GridSpec()

    table = Table(["length_km", "overlap_symmetric", "overlap_asymmetric"])
    o_sym0 = overlap_numeric(
        SpectralAmplitude(e1.gamma_rad, 0.0, 0.0, grid),
        SpectralAmplitude(e2.gamma_rad, 0.0, 0.0, grid))
    for length in cfg.lengths_km:
        b = beta2 * length
        o_sym = overlap_numeric(
            SpectralAmplitude(e1.gamma_rad, 0.0, b, grid),
            SpectralAmplitude(e2.gamma_rad, 0.0, b, grid))
        o_asym = overlap_numeric(
            SpectralAmplitude(e1.gamma_rad, 0.0, 0.0, grid),
            SpectralAmplitude(e2.gamma_rad, 0.0, b, grid))
        table.rows.append((length, o_sym, o_asym))
    bundle.tables["dispersion_overlap"] = table

    l_max = max(cfg.lengths_km)
    b_max = beta2 * l_max
    bundle.record("asymmetric_overlap_penalty",
                  o_sym0 - overlap_numeric(
                      SpectralAmplitude(e1.gamma_rad, 0.0, 0.0, grid),
                      SpectralAmplitude(e2.gamma_rad, 0.0, b_max, grid)),
                  length_km=l_max)

    # ensemble Monte Carlo of the port statistics, symmetric vs asymmetric
    s1 = decompose_dephasing(e1).cauchy_scale_total
    s2 = decompose_dephasing(e2).cauchy_scale_total
    for run, db in (("symmetric", 0.0), ("asymmetric", b_max)):
        rng = stream(cfg.master_seed, cfg.preset, run)
        n = cfg.trials
        d1 = s1 * rng.standard_cauchy(n)
        d2 = s2 * rng.standard_cauchy(n) + cfg.detuning_rad_per_ps
        if db == 0.0:
            a = 0.5 * (e1.gamma_rad + e2.gamma_rad)
            o = e1.gamma_rad * e2.gamma_rad / (a * a + (d2 - d1) ** 2)
        else:
            o = overlap_numeric_offsets(e1.gamma_rad, e2.gamma_rad,
                                        d1, d2, db, grid)
        cross_res = rng.random(n) < 0.5 * (1.0 - o)
        cross_ref = rng.random(n) < 0.5
        n_res, n_ref = int(cross_res.sum()), int(cross_ref.sum())
        v = 1.0 - n_res / n_ref
        err = (n_res / n_ref) * math.sqrt(1.0 / max(1, n_res) + 1.0 / n_ref)
        bundle.record("visibility_mc", v, err, arm_dispersion=run,
                      length_km=l_max, mean_overlap=float(o.mean()))
    return bundle


# ---------------------------------------------------------------------------
# link budget
# ---------------------------------------------------------------------------

def run_linkbudget(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    bundle = _new_bundle(cfg)
    scenarios = (cfg.scenario_current, cfg.scenario_improved)
    rows, crossings = sweep_curves(cfg.lengths_km, scenarios,
                                   snr_target_db=10.0)
    table = Table(["length_km", "rate_hz", "snr_db", "scenario"])
    table.rows = rows
    bundle.tables["linkbudget_curves"] = table
    for s in scenarios:
        bundle.record("kappa_sys", s.kappa_sys, scenario=s.name)
        bundle.record("rate_hz_at_302km", coincidence_rate(302.0, s),
                      scenario=s.name)
        bundle.record("rate_hz_at_600km", coincidence_rate(600.0, s),
                      scenario=s.name)
        bundle.record("snr_db_at_600km", scenario_snr_db(600.0, s),
                      scenario=s.name)
        crossing = crossings.get(s.name)
        bundle.record("snr_10db_crossing_km",
                      crossing if crossing is not None else math.nan,
                      scenario=s.name, found=crossing is not None)
    return bundle


# ---------------------------------------------------------------------------
# end-to-end rate Monte Carlo (lossy chain, no thinning shortcuts)
# ---------------------------------------------------------------------------

def mc_end_to_end_rate(cfg: ExperimentConfig, total_length_km: float,
                       n_pulses: int, workers: int = 1,
                       run_tag: str = "ratecheck") -> tuple[int, float]:
    """Count distinguishable-pair coincidences through the full lossy chain.

    Every stage samples its own survival (emission, conversion, fiber,
    detector); surviving photons from the two arms are matched by pulse
    index and routed 50:50.  Multiphoton and conversion noise are off so
    the count is comparable to the analytic signal rate; polarization and
    timing drift are off (elapsed 0).  Returns (coincidences, expected)
    where expected = n_pulses * p1 * p2 / 2 from the same constants.
    """
    decomp1 = decompose_dephasing(cfg.emitter1)
    decomp2 = decompose_dephasing(cfg.emitter2)
    arms = (
        (cfg.emitter1, decomp1, cfg.qfc1, cfg.pump1_mw,
         replace(cfg.fiber1, length_km=total_length_km / 2.0,
                 pol_drift_rad_per_sqrt_hr=0.0)),
        (cfg.emitter2, decomp2, cfg.qfc2, cfg.pump2_mw,
         replace(cfg.fiber2, length_km=total_length_km / 2.0,
                 pol_drift_rad_per_sqrt_hr=0.0)),
    )

    from .channel import transmission_probability
    from .qfc import apply_conversion

    def chunk(idx, start, count) -> int:
        survivors = []
        for arm_no, (emitter, decomp, qfc, pump, fiber) in enumerate(arms, 1):
            rng = stream(cfg.master_seed, cfg.preset, run_tag, arm_no, idx)
            batch = sample_emission_batch(emitter, decomp, count, rng,
                                          beta=0.0, start_pulse=start)
            noiseless = replace(qfc, raman_coeff_hz_per_mw=0.0)
            batch, _ = apply_conversion(batch, noiseless, pump, rng,
                                        emitter.pulse_period_ps,
                                        n_pulses=count)
            batch = apply_channel(batch, fiber, 0.0, rng, sample_loss=True)
            keep = rng.random(len(batch)) < cfg.detector.efficiency
            survivors.append(batch.pulse_index[keep])
        joint = np.intersect1d(survivors[0], survivors[1])
        rng = stream(cfg.master_seed, cfg.preset, run_tag, "bs", idx)
        return int((rng.random(len(joint)) < 0.5).sum())

    parts = _chunk_sizes(n_pulses, 10 * CHUNK_PULSES)
    counts = _run_chunks(parts, chunk, workers)
    p = []
    for emitter, _, qfc, pump, fiber in arms:
        p.append(emitter.eta_sys * conversion_efficiency(pump, qfc)
                 * transmission_probability(fiber.length_km,
                                            fiber.loss_db_per_km)
                 * cfg.detector.efficiency)
    expected = n_pulses * p[0] * p[1] / 2.0
    return int(sum(counts)), expected


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_RUNNERS = {
    "hbt": run_hbt,
    "hom-consecutive": run_hom_consecutive,
    "qfc-curves": run_qfc_curves,
    "hom-remote": run_hom_remote,
    "window-sweep": run_window_sweep,
    "length-sweep": run_length_sweep,
    "dispersion-demo": run_dispersion_demo,
    "linkbudget": run_linkbudget,
}


def _new_bundle(cfg: ExperimentConfig) -> ResultBundle:
    return ResultBundle(preset=cfg.preset, seed=cfg.master_seed,
                        config_hash=config_hash(cfg),
                        effective_config=render_config(cfg))


def _km_tag(length: float) -> str:
    return f"{length:g}km".replace(".", "p")


def run_preset(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    if cfg.preset not in _RUNNERS:
        raise ValueError(f"unknown preset {cfg.preset!r}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return _RUNNERS[cfg.preset](cfg, workers)
