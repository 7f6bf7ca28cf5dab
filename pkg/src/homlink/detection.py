"""Beamsplitter interference, detection, histogramming and extraction.

Port statistics: a photon pair with per-shot squared overlap
O = overlap * cos^2(pol angle difference) leaves on opposite ports with
probability (1 - O)/2 and on a common (random) port with (1 + O)/2.

Detection-time pairs for interfering shots are drawn from the exact
(anti)symmetrized joint densities

    D_-+(t1, t2) ~ P1(t1) P2(t2) + P1(t2) P2(t1)
                   -+ 2 cos^2(chi) Re[psi1(t1) psi1*(t2) psi2(t2) psi2*(t1)]

by rejection from the product-marginal mixture with envelope factor 2
(pointwise bound |a - b|^2 <= 2(|a|^2 + |b|^2)); no time discretization.
For equal decay rates the cross-port acceptance degenerates as O -> 1, so
that case switches to an exact two-step sampler (analytic CDF in the time
sum, bisection inversion in the difference).

Detectors apply efficiency thinning, per-click Gaussian jitter
(sigma = FWHM/2.355) and Poisson dark counts uniform in each gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .emission import ORIGIN_DARK
from .units import fwhm_to_sigma

_MAX_REJECTION_ROUNDS = 500_000


@dataclass(frozen=True)
class DetectorParams:
    efficiency: float = 0.76
    jitter_fwhm_ps: float = 70.0
    dark_rate_hz: float = 300.0
    gate_window_ps: float = 12453.3

    def __post_init__(self):
        if not (0.0 < self.efficiency <= 1.0):
            raise ValueError(
                f"efficiency must lie in (0, 1], got {self.efficiency}")
        if self.jitter_fwhm_ps < 0.0:
            raise ValueError(
                f"jitter_fwhm_ps must be >= 0, got {self.jitter_fwhm_ps}")
        if self.dark_rate_hz < 0.0:
            raise ValueError(
                f"dark_rate_hz must be >= 0, got {self.dark_rate_hz}")
        if self.gate_window_ps <= 0.0:
            raise ValueError(
                f"gate_window_ps must be positive, got {self.gate_window_ps}")


@dataclass
class ClickBatch:
    """Detected clicks: timestamps, detector ids (1|2) and origin tags.

    Origin tags are diagnostics only; no extraction step reads them.
    """

    timestamp_ps: np.ndarray
    detector_id: np.ndarray
    origin: np.ndarray

    def __len__(self):
        return len(self.timestamp_ps)

    @classmethod
    def empty(cls) -> "ClickBatch":
        return cls(np.zeros(0), np.zeros(0, np.int8), np.zeros(0, np.int8))

    @classmethod
    def concat(cls, parts: list["ClickBatch"]) -> "ClickBatch":
        if not parts:
            return cls.empty()
        return cls(np.concatenate([p.timestamp_ps for p in parts]),
                   np.concatenate([p.detector_id for p in parts]),
                   np.concatenate([p.origin for p in parts]))


# ---------------------------------------------------------------------------
# beamsplitter pair sampling
# ---------------------------------------------------------------------------

def _cross_term(g1, g2, d, t1, t2, t01, t02):
    """Re[psi1(t1) psi1*(t2) psi2(t2) psi2*(t1)] for exponential wavepackets."""
    support = (t1 >= t01) & (t2 >= t01) & (t1 >= t02) & (t2 >= t02)
    val = np.sqrt(
        g1 * np.exp(-g1 * (t1 - t01)) * g1 * np.exp(-g1 * (t2 - t01)) *
        g2 * np.exp(-g2 * (t1 - t02)) * g2 * np.exp(-g2 * (t2 - t02)))
    return np.where(support, val * np.cos(d * (t1 - t2)), 0.0)


def _pdf_exp(g, t, t0):
    out = np.zeros_like(t)
    ok = t >= t0
    out[ok] = g * np.exp(-g * (t[ok] - t0))
    return out


def _sample_pair_times_rejection(g1, g2, d, t01, t02, k, sign,
                                 rng: np.random.Generator):
    """Rejection sampling of interfering pair times (vectorized over shots).

    sign=-1 for cross-port (antisymmetrized), +1 for same-port.  k is the
    cos^2 polarization factor per shot.
    """
    n = len(g1)
    t1 = np.empty(n)
    t2 = np.empty(n)
    pending = np.arange(n)
    rounds = 0
    while len(pending):
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:
            raise RuntimeError(
                f"time-pair rejection failed to converge for {len(pending)} shots")
        m = len(pending)
        pg1, pg2 = g1[pending], g2[pending]
        p01, p02 = t01[pending], t02[pending]
        # proposal: product marginals, randomly swapped (the mixture)
        swap = rng.random(m) < 0.5
        ea = rng.exponential(1.0, m)
        eb = rng.exponential(1.0, m)
        c1 = np.where(swap, p02 + ea / pg2, p01 + ea / pg1)
        c2 = np.where(swap, p01 + eb / pg1, p02 + eb / pg2)
        prod = _pdf_exp(pg1, c1, p01) * _pdf_exp(pg2, c2, p02)
        prod_sw = _pdf_exp(pg1, c2, p01) * _pdf_exp(pg2, c1, p02)
        cross = _cross_term(pg1, pg2, d[pending], c1, c2, p01, p02)
        target = prod + prod_sw + sign * 2.0 * k[pending] * cross
        envelope = 2.0 * (prod + prod_sw)
        accept = rng.random(m) * envelope < target
        sel = pending[accept]
        t1[sel] = c1[accept]
        t2[sel] = c2[accept]
        pending = pending[~accept]
    return t1, t2


def _sample_cross_times_equal_gamma(g, d, k, t0, rng: np.random.Generator):
    """Exact cross-port sampler for equal rates and common arrival time.

    Density ~ e^{-g u} (1 - k cos(d tau)), u = t1'+t2', |tau| <= u.  Split
    into the plain product part (weight 1-k) and the (1 - cos) part
    (weight k); the latter is sampled by analytic-CDF bisection in u, then
    in tau given u.  Exact for any overlap, including O -> 1.
    """
    n = len(g)
    t1 = np.empty(n)
    t2 = np.empty(n)
    o_freq = 1.0 / (1.0 + (d / g) ** 2)
    p_plain = np.where(k < 1.0, (1.0 - k) / (1.0 - k * o_freq), 0.0)
    plain = rng.random(n) < p_plain

    if plain.any():
        m = int(plain.sum())
        t1[plain] = rng.exponential(1.0, m) / g[plain]
        t2[plain] = rng.exponential(1.0, m) / g[plain]

    rest = ~plain
    if rest.any():
        gr, dr = g[rest], d[rest]
        m = int(rest.sum())
        u = _invert_u_cdf(gr, dr, rng.random(m))
        tau = _invert_tau_cdf(u, dr, rng.random(m))
        t1[rest] = 0.5 * (u + tau)
        t2[rest] = 0.5 * (u - tau)
    return t0 + t1, t0 + t2


def _u_cdf_unnorm(g, d, u):
    """int_0^u e^{-g v}(v - sin(d v)/d) dv, elementwise, stable for d u -> 0."""
    gu = g * u
    egu = np.exp(-gu)
    first = (1.0 - egu * (1.0 + gu)) / g ** 2
    d2 = d * d
    small = np.abs(d) * u < 1e-4
    safe_d = np.where(d == 0.0, 1.0, d)
    # int_0^u e^{-gv} sin(dv)/d dv
    second = (d - egu * (d * np.cos(d * u) + g * np.sin(d * u))) \
        / ((d2 + g * g) * safe_d)
    exact = first - second
    # sin(dv)/d ~ v - d^2 v^3/6: CDF ~ (d^2/6) int v^3 e^{-gv}
    third_moment = (6.0 - egu * (gu * (gu * (gu + 3.0) + 6.0) + 6.0)) / g ** 4
    series = d2 * third_moment / 6.0
    return np.where(small, series, exact)


def _u_mass(g, d):
    """int_0^inf e^{-g v}(v - sin(d v)/d) dv = d^2 / (g^2 (g^2 + d^2))."""
    return d * d / (g * g * (g * g + d * d))


def _invert_u_cdf(g, d, v, iters=60):
    """Bisection solve of the normalized u-CDF against uniforms v."""
    target = v * _u_mass(g, d)
    hi = 80.0 / g
    lo = np.zeros_like(g)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        less = _u_cdf_unnorm(g, d, mid) < target
        lo = np.where(less, mid, lo)
        hi = np.where(less, hi, mid)
    return 0.5 * (lo + hi)


def _tau_cdf_unnorm(u, d, tau):
    """int_{-u}^{tau} (1 - cos(d s)) ds, stable for d u -> 0."""
    du = d * u
    small = np.abs(du) < 1e-4
    safe_d = np.where(d == 0.0, 1.0, d)
    exact = (tau + u) - (np.sin(d * tau) + np.sin(du)) / safe_d
    series = d * d * (tau ** 3 + u ** 3) / 6.0
    return np.where(small, series, exact)


def _invert_tau_cdf(u, d, v, iters=60):
    """Bisection for tau in [-u, u] with density ~ (1 - cos(d tau))."""
    target = v * _tau_cdf_unnorm(u, d, u)
    lo = -u.copy()
    hi = u.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        less = _tau_cdf_unnorm(u, d, mid) < target
        lo = np.where(less, mid, lo)
        hi = np.where(less, hi, mid)
    return 0.5 * (lo + hi)


def sample_pair_interference(gamma1, gamma2, delta, t01, t02, cos2pol,
                             interfering, rng: np.random.Generator,
                             want_times: bool = True):
    """Vectorized beamsplitter outcome for aligned photon pairs.

    Parameters are per-shot arrays: decay rates, angular frequency
    difference (photon2 - photon1), arrival times, cos^2 of the
    polarization angle difference, and an `interfering` mask (False for
    pairs that are distinguishable by construction, e.g. multiphoton
    companions or conversion noise).

    Returns (det1, det2, t1, t2): detector ids in {1, 2} per photon and
    detection times (pre-jitter).  Time sampling requires equal quadratic
    phases on both photons (enforced by the caller).
    """
    n = len(gamma1)
    dt = t02 - t01
    gamma_early = np.where(dt >= 0.0, gamma1, gamma2)
    o_freq = gamma1 * gamma2 / (0.25 * (gamma1 + gamma2) ** 2 + delta ** 2) \
        * np.exp(-gamma_early * np.abs(dt))
    o_eff = np.where(interfering, cos2pol * o_freq, 0.0)

    cross = rng.random(n) < 0.5 * (1.0 - o_eff)
    side = rng.integers(1, 3, n).astype(np.int8)      # 1 or 2
    det1 = side
    det2 = np.where(cross, 3 - side, side).astype(np.int8)

    if not want_times:
        return det1, det2, None, None

    t1 = np.empty(n)
    t2 = np.empty(n)
    keff = np.where(interfering, cos2pol, 0.0)

    # non-interfering shots: independent exponentials (swap symmetrizes)
    simple = keff == 0.0
    if simple.any():
        m = int(simple.sum())
        a = t01[simple] + rng.exponential(1.0, m) / gamma1[simple]
        b = t02[simple] + rng.exponential(1.0, m) / gamma2[simple]
        sw = rng.random(m) < 0.5
        t1[simple] = np.where(sw, b, a)
        t2[simple] = np.where(sw, a, b)

    hard = ~simple
    eq = hard & np.isclose(gamma1, gamma2, rtol=1e-12, atol=0.0) \
        & (np.abs(dt) < 1e-12)
    gen = hard & ~eq

    for mask, sign in ((gen & cross, -1.0), (gen & ~cross, +1.0)):
        if mask.any():
            a, b = _sample_pair_times_rejection(
                gamma1[mask], gamma2[mask], delta[mask], t01[mask], t02[mask],
                keff[mask], sign, rng)
            t1[mask], t2[mask] = a, b

    eqc = eq & cross
    if eqc.any():
        a, b = _sample_cross_times_equal_gamma(
            gamma1[eqc], delta[eqc], keff[eqc], t01[eqc], rng)
        t1[eqc], t2[eqc] = a, b
    eqs = eq & ~cross
    if eqs.any():
        # same-port acceptance is >= 1/2; plain rejection is safe
        a, b = _sample_pair_times_rejection(
            gamma1[eqs], gamma2[eqs], delta[eqs], t01[eqs], t02[eqs],
            keff[eqs], +1.0, rng)
        t1[eqs], t2[eqs] = a, b
    return det1, det2, t1, t2


def hom_sample_pair(p1, p2, rng: np.random.Generator, gamma1: float,
                    gamma2: float, interfering: bool = True):
    """Single-pair convenience wrapper: (port1, port2, t1_ps, t2_ps).

    p1, p2 are PhotonRecord-like objects (need freq_offset, pol_angle_rad,
    nominal_emit_time_ps, extra_delay_ps, quad_phase_ps2, alive).
    """
    if not (p1.alive and p2.alive):
        return None
    if interfering and p1.quad_phase_ps2 != p2.quad_phase_ps2:
        raise ValueError(
            "time sampling requires equal quadratic phases; apply symmetric "
            "dispersion or use overlap_numeric for the port statistics only")
    c = math.cos(p1.pol_angle_rad - p2.pol_angle_rad) ** 2
    det1, det2, t1, t2 = sample_pair_interference(
        np.array([gamma1]), np.array([gamma2]),
        np.array([p2.freq_offset - p1.freq_offset]),
        np.array([p1.nominal_emit_time_ps + p1.extra_delay_ps]),
        np.array([p2.nominal_emit_time_ps + p2.extra_delay_ps]),
        np.array([c]), np.array([interfering]), rng)
    return int(det1[0]), int(det2[0]), float(t1[0]), float(t2[0])


# ---------------------------------------------------------------------------
# detector
# ---------------------------------------------------------------------------

def apply_detector(clicks: ClickBatch, det: DetectorParams,
                   rng: np.random.Generator,
                   n_gates: int = 0, gate_period_ps: float = 0.0,
                   gate_start: int = 0) -> ClickBatch:
    """Efficiency thinning, Gaussian jitter, and dark counts in gates.

    Dark clicks are Poisson(dark_rate * gate_window * n_gates) per
    detector, uniform within each gate; gates are centered on multiples of
    gate_period_ps starting at gate index gate_start.
    """
    keep = rng.random(len(clicks)) < det.efficiency if det.efficiency < 1.0 \
        else np.ones(len(clicks), bool)
    ts = clicks.timestamp_ps[keep]
    ids = clicks.detector_id[keep]
    origin = clicks.origin[keep]
    if det.jitter_fwhm_ps > 0.0:
        ts = ts + fwhm_to_sigma(det.jitter_fwhm_ps) * rng.standard_normal(len(ts))

    parts = [ClickBatch(ts, ids, origin)]
    if det.dark_rate_hz > 0.0 and n_gates > 0:
        mean = det.dark_rate_hz * det.gate_window_ps * 1e-12 * n_gates
        for did in (1, 2):
            n_dark = rng.poisson(mean)
            gate = rng.integers(0, n_gates, n_dark) + gate_start
            t = gate * gate_period_ps + det.gate_window_ps * (rng.random(n_dark) - 0.5)
            parts.append(ClickBatch(t, np.full(n_dark, did, np.int8),
                                    np.full(n_dark, ORIGIN_DARK, np.int8)))
    return ClickBatch.concat(parts)


# ---------------------------------------------------------------------------
# coincidence histogram
# ---------------------------------------------------------------------------

@dataclass
class CoincidenceHistogram:
    """Binned delay-time coincidences (t_det1 - t_det2)."""

    bin_width_ps: float
    delay_range_ps: float            # symmetric: bins span [-range, +range)
    counts: np.ndarray
    overflow: int = 0
    total_pairs: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = int(round(2.0 * self.delay_range_ps / self.bin_width_ps))
        if abs(n * self.bin_width_ps - 2.0 * self.delay_range_ps) > 1e-9:
            raise ValueError(
                f"bin_width_ps={self.bin_width_ps} must divide the range "
                f"2*{self.delay_range_ps}")
        if len(self.counts) != n:
            raise ValueError(f"counts must have {n} bins, got {len(self.counts)}")

    @property
    def bin_centers(self) -> np.ndarray:
        n = len(self.counts)
        return (np.arange(n) + 0.5) * self.bin_width_ps - self.delay_range_ps

    def merge(self, other: "CoincidenceHistogram") -> "CoincidenceHistogram":
        if (self.bin_width_ps != other.bin_width_ps
                or self.delay_range_ps != other.delay_range_ps):
            raise ValueError("histograms have different binning")
        return CoincidenceHistogram(
            self.bin_width_ps, self.delay_range_ps,
            self.counts + other.counts,
            self.overflow + other.overflow,
            self.total_pairs + other.total_pairs,
            dict(self.metadata))

    def counts_in_window(self, window_ps: float, center_ps: float = 0.0) -> int:
        """Total counts with |tau - center| <= window/2 (bin-aligned)."""
        lo = center_ps - 0.5 * window_ps
        hi = center_ps + 0.5 * window_ps
        edges = np.arange(len(self.counts) + 1) * self.bin_width_ps - self.delay_range_ps
        sel = (edges[:-1] >= lo - 1e-9) & (edges[1:] <= hi + 1e-9)
        return int(self.counts[sel].sum())


def accumulate_histogram(clicks: ClickBatch, bin_width_ps: float,
                         delay_range_ps: float,
                         metadata: dict | None = None,
                         warn_period_ps: float | None = None
                         ) -> CoincidenceHistogram:
    """Pair clicks across the two detectors and bin t1 - t2.

    Cross-detector pairs within +-delay_range are found by a sorted sliding
    window, so the cost is n_clicks * mean partners.  Counts are conserved:
    binned + overflow equals the number of recorded pairs.
    """
    if bin_width_ps <= 0.0:
        raise ValueError(f"bin_width_ps must be positive, got {bin_width_ps}")
    if warn_period_ps is not None and 2.0 * delay_range_ps < warn_period_ps:
        import warnings
        warnings.warn("histogram range is below one pulse period; side peaks "
                      "will be lost", stacklevel=2)
    t1 = np.sort(clicks.timestamp_ps[clicks.detector_id == 1])
    t2 = np.sort(clicks.timestamp_ps[clicks.detector_id == 2])
    n_bins = int(round(2.0 * delay_range_ps / bin_width_ps))
    counts = np.zeros(n_bins, np.int64)
    overflow = 0
    total = 0
    if len(t1) and len(t2):
        lo = np.searchsorted(t2, t1 - delay_range_ps, side="left")
        hi = np.searchsorted(t2, t1 + delay_range_ps, side="right")
        npair = hi - lo
        total = int(npair.sum())
        if total:
            starts = np.repeat(lo, npair)
            offs = np.arange(total) - np.repeat(
                np.cumsum(npair) - npair, npair)
            tau = np.repeat(t1, npair) - t2[starts + offs]
            idx = np.floor((tau + delay_range_ps) / bin_width_ps).astype(np.int64)
            ok = (idx >= 0) & (idx < n_bins)
            overflow = int((~ok).sum())
            np.add.at(counts, idx[ok], 1)
    return CoincidenceHistogram(bin_width_ps, delay_range_ps, counts,
                                overflow, total, metadata or {})


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------

def extract_g2_zero(hist: CoincidenceHistogram, pulse_period_ps: float,
                    n_side: int | None = None) -> tuple[float, float]:
    """g2(0) = central peak area / mean side peak area, with Poisson error."""
    if pulse_period_ps <= 0.0:
        raise ValueError("pulse_period_ps must be positive")
    k_max = int(math.floor((hist.delay_range_ps - 0.5 * pulse_period_ps)
                           / pulse_period_ps))
    if n_side is not None:
        k_max = min(k_max, n_side)
    if k_max < 3:
        raise ValueError(
            f"need >= 3 full side peaks on each side, range allows {k_max}")
    central = hist.counts_in_window(pulse_period_ps, 0.0)
    sides = [hist.counts_in_window(pulse_period_ps, k * pulse_period_ps)
             for k in range(1, k_max + 1)]
    sides += [hist.counts_in_window(pulse_period_ps, -k * pulse_period_ps)
              for k in range(1, k_max + 1)]
    side_total = sum(sides)
    if side_total == 0:
        raise ValueError("side peaks are empty; g2 undefined")
    side_mean = side_total / len(sides)
    g2 = central / side_mean
    err = g2 * math.sqrt(max(1, central) / central ** 2 + 1.0 / side_total) \
        if central > 0 else math.sqrt(1.0) / side_mean
    return g2, err


def extract_visibility(hist_res: CoincidenceHistogram,
                       hist_ref: CoincidenceHistogram,
                       window_ps: float) -> tuple[float, float, int, int]:
    """V = 1 - N_res / N_ref in the central window, with Poisson error.

    Histograms must come from identical pair-count exposure; the reference
    is conventionally the far-detuned run.
    Returns (visibility, stderr, n_res, n_ref).
    """
    if window_ps > 2.0 * hist_res.delay_range_ps:
        raise ValueError("window exceeds histogram range")
    n_res = hist_res.counts_in_window(window_ps)
    n_ref = hist_ref.counts_in_window(window_ps)
    if n_ref == 0:
        raise ValueError("no reference counts in window; visibility undefined")
    ratio = n_res / n_ref
    err = ratio * math.sqrt(1.0 / max(1, n_res) + 1.0 / n_ref) if n_res > 0 \
        else 1.0 / n_ref
    return 1.0 - ratio, err, n_res, n_ref
