"""Closed-form interference visibility between two emitters.

Dephasing model: each photon carries a Lorentzian-distributed (Cauchy)
angular-frequency offset of scale gamma*_fast + gamma_slow (independent
mode).  Averaging the shot-level squared overlap

    O = G1 G2 / (A^2 + delta^2),   A = (G1 + G2)/2

over the offset difference (Cauchy of scale sigma1 + sigma2, centered on
the deliberate detuning Delta) gives

    V(Delta) = [G1 G2 / A] * S / (S^2 + Delta^2),   S = 1/T2_1 + 1/T2_2

because sigma_i + G_i/2 = 1/T2_i, and the convolution of two Lorentzians
adds their widths.  For two photons emitted by the *same* source one pulse
apart the slow offsets cancel, leaving S = Gamma + 2 gamma*_fast and
V = M(one period).
"""

from __future__ import annotations

from .emitter import EmitterParams, decompose_dephasing


def remote_visibility(e1: EmitterParams, e2: EmitterParams,
                      detuning_rad_per_ps: float = 0.0,
                      shared_slow: bool = False) -> float:
    """Ensemble-averaged two-photon visibility at center detuning Delta.

    Parameters
    ----------
    e1, e2 : EmitterParams
        The two sources (pass the same emitter twice for a consecutive-
        photon experiment).
    detuning_rad_per_ps : float
        Deliberate center-frequency offset between the photons (rad/ps).
    shared_slow : bool
        If True, treat slow spectral diffusion as common mode (consecutive
        photons from one source); requires the emitters' M values to fix
        the fast/slow split.
    """
    g1, g2 = e1.gamma_rad, e2.gamma_rad
    a = 0.5 * (g1 + g2)
    if shared_slow:
        s = (g1 / 2.0 + decompose_dephasing(e1).gamma_fast_star
             + g2 / 2.0 + decompose_dephasing(e2).gamma_fast_star)
    else:
        s = e1.gamma_total + e2.gamma_total
    d = detuning_rad_per_ps
    return (g1 * g2 / a) * s / (s * s + d * d)


def corrected_visibility(v_raw: float, g2_a: float, g2_b: float) -> float:
    """Additive multiphoton correction: V_corr = V_raw + (g2_a + g2_b)/2.

    Clamped to [0, 1]; `raw_from_intrinsic` is the inverse direction.
    """
    _check_vis_args(v_raw, g2_a, g2_b)
    return min(1.0, max(0.0, v_raw + 0.5 * (g2_a + g2_b)))


def raw_from_intrinsic(v_intrinsic: float, g2_a: float, g2_b: float) -> float:
    """Predicted raw visibility given the intrinsic one (subtracts the
    same additive multiphoton term)."""
    _check_vis_args(v_intrinsic, g2_a, g2_b)
    return min(1.0, max(0.0, v_intrinsic - 0.5 * (g2_a + g2_b)))


def _check_vis_args(v: float, g2_a: float, g2_b: float) -> None:
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    for name, g in (("g2_a", g2_a), ("g2_b", g2_b)):
        if not (0.0 <= g < 1.0):
            raise ValueError(f"{name} must lie in [0, 1), got {g}")
