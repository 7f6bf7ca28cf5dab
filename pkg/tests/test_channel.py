import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homlink.channel import (FiberParams, apply_channel, beta2_from_dispersion,
                             fit_effective_dispersion, group_delay_spread,
                             transmission_probability)
from homlink.emission import PhotonBatch
from homlink.overlap import SpectralAmplitude, overlap_numeric
from homlink.rng import stream


def test_transmission_paper_loss():
    # 300 km at 0.19 dB/km is 57 dB
    assert 0.19 * 300.0 == pytest.approx(57.0, rel=1e-12)
    assert transmission_probability(300.0, 0.19) == pytest.approx(1.995e-6, rel=1e-3)
    assert transmission_probability(0.0, 0.19) == 1.0
    assert transmission_probability(151.0, 0.19) == pytest.approx(1.352e-3, rel=1e-3)


@given(l1=st.floats(0.0, 400.0), l2=st.floats(0.0, 400.0))
def test_transmission_multiplicative(l1, l2):
    t = transmission_probability
    assert t(l1 + l2, 0.19) == pytest.approx(t(l1, 0.19) * t(l2, 0.19),
                                             rel=1e-12, abs=1e-300)


def test_beta2_values():
    assert beta2_from_dispersion(18.0, 1582.75) == pytest.approx(-23.94, abs=5e-3)
    assert beta2_from_dispersion(0.0, 1582.75) == 0.0
    assert beta2_from_dispersion(17.0, 1582.75) == pytest.approx(-22.61, abs=5e-3)


def test_group_delay_spread_values():
    # D = 18: frozen arithmetic; fitted D_eff reproduces the measured spreads
    assert group_delay_spread(126.0, 151.0, 18.0, 1582.75) == pytest.approx(57.4, abs=0.05)
    assert group_delay_spread(126.0, 0.0, 18.0, 1582.75) == 0.0
    d_eff1 = fit_effective_dispersion(66.5, 126.0, 151.0, 1582.75)
    d_eff2 = fit_effective_dispersion(89.4, 105.0, 151.0, 1582.75)
    assert d_eff1 == pytest.approx(20.86, abs=5e-3)
    assert d_eff2 == pytest.approx(23.37, abs=5e-3)
    assert group_delay_spread(126.0, 151.0, d_eff1, 1582.75) == pytest.approx(66.5, rel=1e-9)
    assert group_delay_spread(105.0, 151.0, d_eff2, 1582.75) == pytest.approx(89.4, rel=1e-9)


def _batch(n, carrier=1582.75):
    z = np.zeros(n)
    return PhotonBatch(source_id=np.ones(n, np.int8),
                       pulse_index=np.arange(n, dtype=np.int64),
                       nominal_emit_time_ps=z.copy(),
                       freq_offset=np.linspace(-0.01, 0.01, n),
                       pol_angle_rad=z.copy(), quad_phase_ps2=z.copy(),
                       extra_delay_ps=z.copy(),
                       is_companion=np.zeros(n, bool),
                       alive=np.ones(n, bool),
                       gamma_rad=np.full(n, 1 / 78.0), carrier_nm=carrier)


def test_apply_channel_identity():
    fiber = FiberParams(length_km=0.0)
    batch = _batch(100)
    out = apply_channel(batch, fiber, 0.0, stream(0, "ch"))
    assert len(out) == 100
    assert np.array_equal(out.freq_offset, batch.freq_offset)
    assert np.array_equal(out.quad_phase_ps2, batch.quad_phase_ps2)
    assert np.array_equal(out.extra_delay_ps, batch.extra_delay_ps)


def test_apply_channel_survival():
    fiber = FiberParams(length_km=151.0)
    batch = _batch(1_000_000)
    out = apply_channel(batch, fiber, 0.0, stream(1, "ch"))
    p = transmission_probability(151.0, 0.19)
    assert len(out) == pytest.approx(1e6 * p, abs=3 * math.sqrt(1e6 * p))


def test_apply_channel_phase_accumulation_and_invariants():
    fiber = FiberParams(length_km=151.0)
    batch = _batch(2000)
    out = apply_channel(batch, fiber, 0.0, stream(2, "ch"), sample_loss=False)
    b2l = beta2_from_dispersion(18.0, 1582.75) * 151.0
    assert out.quad_phase_ps2 == pytest.approx(np.full(2000, b2l), rel=1e-12)
    # gamma and offsets untouched
    assert np.array_equal(out.gamma_rad, batch.gamma_rad)
    assert np.array_equal(out.freq_offset, batch.freq_offset)


def test_symmetric_dispersion_invariance():
    fiber = FiberParams(length_km=151.0)
    a = apply_channel(_batch(1), fiber, 0.0, stream(3, "a"), sample_loss=False)
    b = apply_channel(_batch(1), fiber, 0.0, stream(3, "b"), sample_loss=False)
    g1, g2 = 1 / 78.0, 1 / 69.9
    pre = overlap_numeric(SpectralAmplitude(g1), SpectralAmplitude(g2))
    post = overlap_numeric(
        SpectralAmplitude(g1, 0.0, float(a.quad_phase_ps2[0])),
        SpectralAmplitude(g2, 0.0, float(b.quad_phase_ps2[0])))
    assert post == pytest.approx(pre, abs=1e-9)


def test_asymmetric_dispersion_penalty_monotone():
    g1, g2 = 1 / 78.0, 1 / 69.9
    pre = overlap_numeric(SpectralAmplitude(g1), SpectralAmplitude(g2))
    vals = [pre]
    for length in (25.0, 75.0, 151.0):
        fiber = FiberParams(length_km=length)
        a = apply_channel(_batch(1), fiber, 0.0, stream(4, "a"), sample_loss=False)
        vals.append(overlap_numeric(
            SpectralAmplitude(g1),
            SpectralAmplitude(g2, 0.0, float(a.quad_phase_ps2[0]))))
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_time_drift_bounded():
    fiber = FiberParams(length_km=10.0, time_drift_ps_per_hr=10.0)
    worst = 0.0
    for k in range(200):
        out = apply_channel(_batch(1), fiber, 1.0, stream(k, "drift"),
                            sample_loss=False)
        worst = max(worst, abs(float(out.extra_delay_ps[0])))
    assert worst <= 10.0


def test_polarization_walk_mean_loss_near_ten_percent():
    # paper-scale walk over a multi-hour run transforms the wander into a
    # ~10% average filtering loss
    fiber = FiberParams(length_km=10.0, loss_db_per_km=0.0,
                        pol_drift_rad_per_sqrt_hr=0.22)
    n = 3000
    kept = 0
    total = 0
    rng = stream(11, "pol")
    for hours in np.linspace(0.25, 5.0, 20):
        for _ in range(15):
            batch = _batch(200)
            out = apply_channel(batch, fiber, float(hours), rng)
            kept += len(out)
            total += len(batch)
    loss = 1.0 - kept / total
    assert 0.06 <= loss <= 0.14
    # survivors are projected onto the reference axis
    assert np.all(out.pol_angle_rad == 0.0)


def test_fiber_params_validation():
    with pytest.raises(ValueError, match="length_km"):
        FiberParams(length_km=-1.0)
    with pytest.raises(ValueError, match="loss_db_per_km"):
        FiberParams(length_km=1.0, loss_db_per_km=-0.1)
