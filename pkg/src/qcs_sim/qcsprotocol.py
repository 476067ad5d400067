"""The two-party sync primitive: precision bound and desk-scale protocol run.

The closed-form bound sets the smallest resolvable time offset for a pair of
moving clocks exchanging photon pairs; the Monte-Carlo path simulates the
timestamp streams and recovers the clock offset from the two cross-correlation
histograms, validating the bound's ingredients at desk scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qcs_sim.errors import NoSyncSignalError

C_LIGHT = 299_792_458.0

SOURCE_LOCAL = "local_pair"
SOURCE_PARTNER = "partner_pair"
SOURCE_BACKGROUND = "background"
_SOURCE_NAMES = (SOURCE_LOCAL, SOURCE_PARTNER, SOURCE_BACKGROUND)


@dataclass(frozen=True)
class PrecisionParams:
    """Knobs of the precision bound and of the stream simulation."""

    n_min: float = 100.0
    pair_rate_hz: float = 1e7
    timestamp_jitter_s: float = 1e-12
    acquisition_time_s: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("n_min", "pair_rate_hz", "timestamp_jitter_s", "acquisition_time_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"PrecisionParams.{name} must be positive")


@dataclass(frozen=True)
class PhotonStream:
    """Sorted detection timestamps at one party, with per-event source tags."""

    party: str
    timestamps: np.ndarray
    source: np.ndarray  # uint8 index into _SOURCE_NAMES

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=float)
        if ts.ndim != 1 or ts.shape != np.asarray(self.source).shape:
            raise ValueError("timestamps and source must be matching 1-d arrays")
        if ts.size and (np.any(np.diff(ts) < 0) or ts[0] < 0):
            raise ValueError("timestamps must be sorted ascending and non-negative")

    def source_names(self) -> list[str]:
        return [_SOURCE_NAMES[i] for i in self.source]

    def dump_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("party,timestamp_s,source_tag\n")
            for t, s in zip(self.timestamps, self.source):
                f.write(f"{self.party},{t!r},{_SOURCE_NAMES[s]}\n")


@dataclass(frozen=True)
class CorrelationHistogram:
    """Binned counts of pairwise detection lags."""

    bin_width_s: float
    lag_range_s: tuple[float, float]
    counts: np.ndarray

    def __post_init__(self) -> None:
        if self.bin_width_s <= 0:
            raise ValueError("bin_width_s must be positive")
        if np.any(np.asarray(self.counts) < 0):
            raise ValueError("counts must be non-negative")

    def bin_centers(self) -> np.ndarray:
        lo = self.lag_range_s[0]
        return lo + (np.arange(self.counts.size) + 0.5) * self.bin_width_s


@dataclass(frozen=True)
class SyncEstimate:
    """Offset and round trip recovered from the two correlation peaks."""

    delta_s: float
    round_trip_s: float
    peak_significance: float

    def __post_init__(self) -> None:
        if self.round_trip_s <= 0:
            raise ValueError("round_trip_s must be positive")
        if self.peak_significance < 0:
            raise ValueError("peak_significance must be >= 0")


def t_bin(v_rel_rad: float, eta: float, p: PrecisionParams) -> float:
    """Optimal sync precision for a moving pair, floored at the timestamp jitter.

    Smaller is better. The moving-clock term is N_min * |v| / (c * R * eta);
    at zero relative radial velocity only the time-stamping precision limits
    the result.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    moving = p.n_min * abs(v_rel_rad) / (C_LIGHT * p.pair_rate_hz * eta)
    return max(moving, p.timestamp_jitter_s)


def t_bin_arrays(v_rel_rad: np.ndarray, eta: np.ndarray, p: PrecisionParams) -> np.ndarray:
    """Vectorized :func:`t_bin`; returns +inf where eta underflows to zero."""
    scale = p.n_min / (C_LIGHT * p.pair_rate_hz)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        moving = scale * np.abs(v_rel_rad) / eta
    moving = np.where(eta > 0.0, moving, np.inf)
    return np.maximum(moving, p.timestamp_jitter_s)


def simulate_streams(
    true_delta_s: float,
    one_way_time_s: float,
    p: PrecisionParams,
    eta_each_way: float,
    background_rate_hz: float,
    rng_seed: int,
    one_way_drift_s_per_s: float = 0.0,
    pair_birth_jitter_s: float = 1e-13,
) -> tuple[PhotonStream, PhotonStream]:
    """Generate the two detection streams of one protocol run.

    Party B's clock runs ahead of A's by ``true_delta_s``. Pair generation is
    Poisson at the source rate on each side over the acquisition window; each
    pair is detected locally and, with probability ``eta_each_way``, remotely
    after the one-way flight time (optionally drifting linearly to emulate
    relative motion). Deterministic for a fixed seed.
    """
    if one_way_time_s <= 0:
        raise ValueError("one_way_time_s must be positive")
    if not 0.0 <= eta_each_way <= 1.0:
        raise ValueError("eta_each_way must be in [0, 1]")
    if background_rate_hz < 0:
        raise ValueError("background_rate_hz must be >= 0")
    rng = np.random.default_rng(rng_seed)
    t_acq = p.acquisition_time_s

    def one_way(epochs: np.ndarray) -> np.ndarray:
        return one_way_time_s + one_way_drift_s_per_s * epochs

    def detector_noise(n: int) -> np.ndarray:
        return rng.normal(0.0, p.timestamp_jitter_s, n) if n else np.empty(0)

    # Pairs born at A: one photon stamped locally, the partner at B.
    n_a = rng.poisson(p.pair_rate_hz * t_acq)
    born_a = np.sort(rng.uniform(0.0, t_acq, n_a))
    local_a = born_a + detector_noise(n_a)
    kept_a = rng.random(n_a) < eta_each_way
    arr_b = born_a[kept_a] + rng.normal(0.0, pair_birth_jitter_s, int(kept_a.sum()))
    partner_at_b = arr_b + one_way(born_a[kept_a]) + true_delta_s + detector_noise(int(kept_a.sum()))

    # Pairs born at B (B stamps its own clock, which reads true time + delta).
    n_b = rng.poisson(p.pair_rate_hz * t_acq)
    born_b = np.sort(rng.uniform(0.0, t_acq, n_b))
    local_b = born_b + true_delta_s + detector_noise(n_b)
    kept_b = rng.random(n_b) < eta_each_way
    arr_a = born_b[kept_b] + rng.normal(0.0, pair_birth_jitter_s, int(kept_b.sum()))
    partner_at_a = arr_a + one_way(born_b[kept_b]) + detector_noise(int(kept_b.sum()))

    # Uncorrelated detector triggers over each side's full detection span.
    span = t_acq + abs(one_way_time_s) + abs(one_way_drift_s_per_s) * t_acq + abs(true_delta_s)
    n_bg_a = rng.poisson(background_rate_hz * span)
    bg_a = rng.uniform(0.0, span, n_bg_a)
    n_bg_b = rng.poisson(background_rate_hz * span)
    bg_b = rng.uniform(0.0, span, n_bg_b)

    def assemble(party: str, locals_, partners, background) -> PhotonStream:
        ts = np.concatenate([locals_, partners, background])
        src = np.concatenate(
            [
                np.zeros(locals_.size, dtype=np.uint8),
                np.ones(partners.size, dtype=np.uint8),
                np.full(background.size, 2, dtype=np.uint8),
            ]
        )
        ts = np.maximum(ts, 0.0)  # detector noise may push an epoch-0 event negative
        order = np.argsort(ts, kind="stable")
        return PhotonStream(party, ts[order], src[order])

    return assemble("A", local_a, partner_at_a, bg_a), assemble("B", local_b, partner_at_b, bg_b)


def cross_correlate(
    a: PhotonStream,
    b: PhotonStream,
    bin_width_s: float,
    lag_range: tuple[float, float],
) -> CorrelationHistogram:
    """Exact pairwise-lag histogram of t_b - t_a restricted to lag_range.

    Bins are right-open: lag k covers [lo + k*w, lo + (k+1)*w). Empty streams
    produce an all-zero histogram.
    """
    lo, hi = lag_range
    if bin_width_s <= 0 or hi <= lo:
        raise ValueError("need bin_width_s > 0 and an increasing lag range")
    n_bins = int(math.ceil((hi - lo) / bin_width_s))
    counts = np.zeros(n_bins, dtype=np.int64)
    ta = np.asarray(a.timestamps)
    tb = np.asarray(b.timestamps)
    if ta.size == 0 or tb.size == 0:
        return CorrelationHistogram(bin_width_s, (lo, lo + n_bins * bin_width_s), counts)
    upper = lo + n_bins * bin_width_s
    starts = np.searchsorted(tb, ta + lo, side="left")
    stops = np.searchsorted(tb, ta + upper, side="left")
    sizes = stops - starts
    total = int(sizes.sum())
    if total:
        flat = np.repeat(starts - np.cumsum(sizes) + sizes, sizes) + np.arange(total)
        lags = tb[flat] - np.repeat(ta, sizes)
        idx = np.floor((lags - lo) / bin_width_s).astype(np.int64)
        np.clip(idx, 0, n_bins - 1, out=idx)
        counts = np.bincount(idx, minlength=n_bins).astype(np.int64)
    return CorrelationHistogram(bin_width_s, (lo, upper), counts)


def _peak_centroid(hist: CorrelationHistogram) -> tuple[float, float]:
    """Centroid of the dominant peak (peak bin and immediate neighbors), and its significance."""
    counts = np.asarray(hist.counts, dtype=float)
    if counts.size == 0 or counts.max() <= 0:
        raise NoSyncSignalError("correlation histogram is empty")
    k = int(np.argmax(counts))
    lo = max(0, k - 1)
    hi = min(counts.size, k + 2)
    centers = hist.bin_centers()
    window = counts[lo:hi]
    centroid = float((window * centers[lo:hi]).sum() / window.sum())
    bg = np.concatenate([counts[:lo], counts[hi:]])
    if bg.size == 0:
        return centroid, math.inf
    mean, std = float(bg.mean()), float(bg.std())
    if std == 0.0:
        sig = math.inf if counts[k] > mean else 0.0
    else:
        sig = (counts[k] - mean) / std
    return centroid, sig


def extract_offset(
    c_ab: CorrelationHistogram,
    c_ba: CorrelationHistogram,
    significance_threshold: float = 5.0,
) -> SyncEstimate:
    """Recover clock offset and round trip from the two correlation peaks.

    Raises :class:`NoSyncSignalError` when either peak fails the significance
    threshold, so callers can tell "not enough signal" apart from "no line of
    sight".
    """
    t_ab, sig_ab = _peak_centroid(c_ab)
    t_ba, sig_ba = _peak_centroid(c_ba)
    sig = min(sig_ab, sig_ba)
    if sig < significance_threshold:
        raise NoSyncSignalError(
            f"correlation peak significance {sig:.2f} below threshold {significance_threshold}"
        )
    return SyncEstimate(
        delta_s=0.5 * (t_ab - t_ba),
        round_trip_s=t_ab + t_ba,
        peak_significance=sig,
    )
