import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homlink.emission import PhotonBatch
from homlink.qfc import (QfcParams, apply_conversion, calibrate_raman_coeff,
                         conversion_efficiency, conversion_snr,
                         converted_wavelength, pzt_frequency_step,
                         solve_pump_wavelength)
from homlink.rng import stream

QFC1 = QfcParams(eta_max=0.48, p_max_mw=271.0,
                 raman_coeff_hz_per_mw=calibrate_raman_coeff(
                     0.48, 271.0, 20.2e6, 29.8),
                 pump_wavelength_nm=2049.98)


def test_pump_solutions_paper():
    assert solve_pump_wavelength(893.16, 1582.75) == pytest.approx(2049.98, abs=0.02)
    assert solve_pump_wavelength(891.92, 1582.75) == pytest.approx(2043.46, abs=0.02)


def test_pump_no_solution():
    with pytest.raises(ValueError, match="no pump solution"):
        solve_pump_wavelength(800.0, 800.0)


def test_converted_wavelength_paper():
    assert converted_wavelength(893.16, 2049.98) == pytest.approx(1582.75, abs=0.02)
    assert converted_wavelength(891.92, 2043.46) == pytest.approx(1582.75, abs=0.02)
    with pytest.raises(ValueError, match="pump_nm"):
        converted_wavelength(900.0, 890.0)


@given(ls=st.floats(500.0, 1200.0), lc=st.floats(1300.0, 1700.0))
def test_energy_conservation_round_trip(ls, lc):
    pump = solve_pump_wavelength(ls, lc)
    assert converted_wavelength(ls, pump) == pytest.approx(lc, abs=1e-6)


def test_pzt_step_values():
    assert pzt_frequency_step(0.03, 1582.75) == pytest.approx(3.59, rel=0.02)
    assert pzt_frequency_step(0.0, 1582.75) == 0.0
    # same formula at the signal wavelength (exact c, frozen)
    assert pzt_frequency_step(0.03, 893.16) == pytest.approx(11.274, abs=0.01)


def test_efficiency_anchors():
    assert conversion_efficiency(271.0, QFC1) == pytest.approx(0.48, rel=1e-12)
    assert conversion_efficiency(0.0, QFC1) == 0.0
    assert conversion_efficiency(271.0 / 4.0, QFC1) == pytest.approx(0.24, rel=1e-9)
    with pytest.raises(ValueError, match="pump_mw"):
        conversion_efficiency(-1.0, QFC1)


def test_efficiency_monotone_to_peak():
    grid = np.linspace(0.0, 271.0, 100)
    vals = [conversion_efficiency(p, QFC1) for p in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # overdriving rolls off
    assert conversion_efficiency(1.4 * 271.0, QFC1) < 0.48


def test_snr_calibrated_point_exact():
    assert conversion_snr(271.0, 20.2e6, QFC1) == pytest.approx(29.8, abs=1e-9)


def test_snr_monotone_decreasing_in_pump():
    grid = np.linspace(10.0, 271.0, 40)
    vals = [conversion_snr(p, 20.2e6, QFC1) for p in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_snr_half_pump_formula():
    # closed-form check: SNR(P/2) - SNR(Pmax) = 10 log10(eta(P/2)/eta(Pmax) * 2)
    lhs = conversion_snr(135.5, 20.2e6, QFC1) - conversion_snr(271.0, 20.2e6, QFC1)
    rhs = 10 * math.log10(conversion_efficiency(135.5, QFC1) / 0.48 * 2.0)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_snr_sentinels():
    assert conversion_snr(0.0, 20.2e6, QFC1) == math.inf
    clean = QfcParams(eta_max=0.5, p_max_mw=100.0, raman_coeff_hz_per_mw=0.0,
                      pump_wavelength_nm=2050.0)
    assert conversion_snr(50.0, 1e6, clean) == math.inf
    with pytest.raises(ValueError, match="signal_rate_hz"):
        conversion_snr(10.0, 0.0, QFC1)


def _batch(n, carrier=893.16):
    z = np.zeros(n)
    return PhotonBatch(source_id=np.ones(n, np.int8),
                       pulse_index=np.arange(n, dtype=np.int64),
                       nominal_emit_time_ps=z.copy(),
                       freq_offset=np.linspace(-1e-3, 1e-3, n),
                       pol_angle_rad=z.copy(), quad_phase_ps2=z.copy(),
                       extra_delay_ps=z.copy(),
                       is_companion=np.zeros(n, bool),
                       alive=np.ones(n, bool),
                       gamma_rad=np.full(n, 1 / 78.0), carrier_nm=carrier)


def test_apply_conversion_passthrough_ideal():
    ideal = QfcParams(eta_max=1.0, p_max_mw=100.0, raman_coeff_hz_per_mw=0.0,
                      pump_wavelength_nm=2049.98)
    batch = _batch(500)
    out, noise = apply_conversion(batch, ideal, 100.0, stream(0, "qfc"), 12453.3)
    assert len(out) == 500
    assert len(noise) == 0
    assert out.carrier_nm == pytest.approx(
        converted_wavelength(893.16, 2049.98), rel=1e-12)
    assert np.array_equal(out.freq_offset, batch.freq_offset)
    assert np.array_equal(out.gamma_rad, batch.gamma_rad)
    assert np.array_equal(out.nominal_emit_time_ps, batch.nominal_emit_time_ps)


def test_apply_conversion_survival_binomial():
    batch = _batch(1_000_000)
    out, _ = apply_conversion(batch, QFC1, 271.0, stream(1, "qfc"), 12453.3)
    frac = len(out) / len(batch)
    assert frac == pytest.approx(0.48, abs=3 * math.sqrt(0.48 * 0.52 / 1e6))


def test_apply_conversion_noise_rate():
    batch = _batch(100)
    period = 12453.3
    n_pulses = 1_000_000
    rng = stream(2, "noise")
    _, noise = apply_conversion(batch, QFC1, 271.0, rng, period,
                                n_pulses=n_pulses)
    span_s = n_pulses * period * 1e-12
    mean = QFC1.raman_coeff_hz_per_mw * 271.0 * span_s
    assert len(noise) == pytest.approx(mean, abs=4 * math.sqrt(mean))
    assert noise.min() >= 0.0 and noise.max() <= n_pulses * period
    # gated arithmetic: per 1-ns gate each 12.4533-ns period, the noise
    # probability matches the calibrated 29.8 dB SNR against the
    # converted signal rate
    noise_rate = QFC1.raman_coeff_hz_per_mw * 271.0
    per_gate = noise_rate * 1e-9
    signal_per_pulse = 20.2e6 * 0.48 / 80.3e6
    snr_lin = signal_per_pulse / (noise_rate / 80.3e6)
    assert 10 * math.log10(snr_lin) == pytest.approx(29.8, abs=1e-9)
    assert per_gate == pytest.approx(noise_rate * 1e-9, rel=1e-12)
