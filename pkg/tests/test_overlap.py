import numpy as np
import pytest
from hypothesis import given, strategies as st

from homlink.channel import beta2_from_dispersion
from homlink.overlap import (GridSpec, ResolutionError, SpectralAmplitude,
                             overlap_closed_form, overlap_numeric,
                             overlap_numeric_offsets)

from .oracles import overlap_chirped_exact, overlap_quadrature

G1, G2 = 1.0 / 78.0, 1.0 / 69.9


def test_closed_form_identical():
    assert overlap_closed_form(G1, G1, 0.0) == 1.0


def test_closed_form_delta_equals_mean_rate():
    assert overlap_closed_form(G1, G1, G1) == pytest.approx(0.5, rel=1e-14)


def test_closed_form_paper_rates():
    # frozen from the adaptive-quadrature oracle
    got = overlap_closed_form(G1, G2, 0.0)
    assert got == pytest.approx(0.9970006048163129, abs=1e-9)
    assert got == pytest.approx(overlap_quadrature(G1, G2), abs=2e-7)


def test_closed_form_validation():
    with pytest.raises(ValueError, match="gamma1"):
        overlap_closed_form(0.0, G2, 0.0)
    with pytest.raises(ValueError, match="gamma2"):
        overlap_closed_form(G1, -1.0, 0.0)


def test_numeric_matches_closed_form_paper_case():
    a = SpectralAmplitude(G1)
    b = SpectralAmplitude(G2)
    assert overlap_numeric(a, b) == pytest.approx(0.9970006048163129, abs=1e-6)


def test_numeric_randomized_agreement():
    rng = np.random.default_rng(1)
    grid = GridSpec()
    worst = 0.0
    for _ in range(300):
        g1, g2 = rng.uniform(0.001, 0.1, 2)
        d1, d2 = rng.uniform(-0.25, 0.25, 2)
        got = overlap_numeric(SpectralAmplitude(g1, d1, 0.0, grid),
                              SpectralAmplitude(g2, d2, 0.0, grid))
        worst = max(worst, abs(got - overlap_closed_form(g1, g2, d2 - d1)))
    assert worst <= 1e-6


@given(g1=st.floats(0.001, 0.1), g2=st.floats(0.001, 0.1),
       d=st.floats(-0.5, 0.5))
def test_numeric_agreement_property(g1, g2, d):
    got = overlap_numeric(SpectralAmplitude(g1, 0.0),
                          SpectralAmplitude(g2, d))
    assert abs(got - overlap_closed_form(g1, g2, d)) <= 1e-6


def test_common_chirp_cancels_exactly():
    b = beta2_from_dispersion(18.0, 1582.75) * 151.0
    plain = overlap_numeric(SpectralAmplitude(G1, 0.01),
                            SpectralAmplitude(G2, -0.02))
    chirped = overlap_numeric(SpectralAmplitude(G1, 0.01, b),
                              SpectralAmplitude(G2, -0.02, b))
    assert chirped == plain


def test_asymmetric_chirp_vs_exact_oracle():
    beta2 = beta2_from_dispersion(18.0, 1582.75)
    for length in (10.0, 50.0, 151.0):
        b = beta2 * length
        got = overlap_numeric(SpectralAmplitude(G1, 0.0, 0.0),
                              SpectralAmplitude(G2, 0.0, b))
        assert got == pytest.approx(overlap_chirped_exact(G1, G2, b), abs=2e-3)


def test_asymmetric_chirp_monotone_penalty():
    beta2 = beta2_from_dispersion(18.0, 1582.75)
    values = []
    for length in (0.0, 10.0, 25.0, 50.0, 75.0, 100.0, 125.0, 151.0):
        values.append(overlap_numeric(
            SpectralAmplitude(G1), SpectralAmplitude(G2, 0.0, beta2 * length)))
    assert values[0] == pytest.approx(0.9970006048163129, abs=1e-6)
    assert all(b < a for a, b in zip(values, values[1:]))


def test_offsets_batch_matches_scalar():
    rng = np.random.default_rng(2)
    d1 = rng.uniform(-0.05, 0.05, 8)
    d2 = rng.uniform(-0.05, 0.05, 8)
    b = -3614.7
    batch = overlap_numeric_offsets(G1, G2, d1, d2, b)
    for i in range(8):
        one = overlap_numeric(SpectralAmplitude(G1, d1[i], 0.0),
                              SpectralAmplitude(G2, d2[i], b))
        assert batch[i] == pytest.approx(one, rel=1e-12)


def test_normalization_invariant():
    for g, d in ((G1, 0.0), (0.001, 0.3), (0.1, -0.4)):
        amp = SpectralAmplitude(g, d)
        assert abs(amp.norm_on_grid() - 1.0) <= 1e-6
        amp.validate_normalization()


def test_grid_guard_rejects_small_span():
    with pytest.raises(ResolutionError, match="span_mult"):
        GridSpec(span_mult=10.0)
    with pytest.raises(ResolutionError, match="points"):
        GridSpec(points=8)


def test_incompatible_grids_rejected():
    a = SpectralAmplitude(G1, grid_spec=GridSpec(points=1024))
    b = SpectralAmplitude(G2, grid_spec=GridSpec(points=2048))
    with pytest.raises(ValueError, match="incompatible grids"):
        overlap_numeric(a, b)
