"""Small-scale estimators on a single CTF row: PDP, K-factor, D_s, B_c."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from .scenario import FrequencyGrid
from .units import SPEED_OF_LIGHT, power_to_db


@dataclass(frozen=True)
class Pdp:
    """Power delay profile on bins ``n * bin_width``.

    ``period`` is the alias period 1/f_step; an unwrapped profile spans two
    periods.
    """
    power: np.ndarray
    bin_width: float
    period: float
    window: str = "hann"

    @property
    def delays(self) -> np.ndarray:
        return np.arange(self.power.size) * self.bin_width

    @property
    def delay_distances(self) -> np.ndarray:
        return SPEED_OF_LIGHT * self.delays

    @property
    def max_distance(self) -> float:
        return SPEED_OF_LIGHT * self.period


def _row(h, grid: FrequencyGrid | None = None) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1:
        raise ValueError("expected a single CTF row")
    if grid is not None and h.size != grid.count:
        raise ValueError(f"row length {h.size} does not match grid count {grid.count}")
    return h


def compute_pdp(h, grid: FrequencyGrid) -> Pdp:
    """|IDFT(W * H)|^2 with a Hann window and 1/N scaling.

    Bin ``n`` sits at delay n / (N f_step), the exact DFT bin of an N-point
    sweep.
    """
    h = _row(h, grid)
    N = h.size
    w = windows.hann(N, sym=True)
    power = np.abs(np.fft.ifft(w * h)) ** 2
    return Pdp(power, 1.0 / (N * grid.f_step), 1.0 / grid.f_step)


def unwrap_pdp(pdp: Pdp, d: float, guard: int = 2) -> Pdp:
    """Extend to [0, 2 d_max) using the LoS as anchor.

    Anything arriving before the LoS must have wrapped around the alias
    period, so those bins move up by one period.  The ``guard`` bins just
    below the LoS bin hold the LoS's own window main lobe and stay put.
    """
    d_max = pdp.max_distance
    if not 0 < d < d_max:
        raise ValueError(f"LoS distance {d} m must lie in (0, {d_max:.4f}) m")
    N = pdp.power.size
    los_bin = int(round(d / SPEED_OF_LIGHT / pdp.bin_width)) % N
    cut = max(los_bin - guard, 0)
    ext = np.zeros(2 * N)
    ext[cut:N] = pdp.power[cut:]
    ext[N:N + cut] = pdp.power[:cut]
    return Pdp(ext, pdp.bin_width, pdp.period, pdp.window)


def k_factor_mom(h) -> float:
    """Rician K in dB from the 2nd and 4th moments of |H| across frequency.

    Returns +inf when the envelope has no spread at all and NaN when the
    sample is more spread than Rayleigh (K undefined).
    """
    p = np.abs(_row(h)) ** 2
    N = p.size
    if N < 2:
        raise ValueError("need at least two samples")
    ga = p.mean()
    if ga == 0:
        raise ValueError("all-zero CTF row")
    gv = (np.sum(p ** 2) - N * ga ** 2) / (N - 1)
    if gv <= 64 * np.finfo(float).eps * ga ** 2:
        return math.inf
    disc = ga ** 2 - gv
    if disc < 0:
        return math.nan
    root = math.sqrt(disc)
    return float(power_to_db(root / (ga - root)))


def delay_spread(pdp: Pdp, threshold_db: float | None = 20.0) -> tuple[float, float]:
    """(RMS delay spread, mean delay) in seconds.

    Bins more than ``threshold_db`` below the peak are zeroed first;
    ``None`` keeps every bin.
    """
    p = np.array(pdp.power, dtype=float)
    peak = p.max()
    if not peak > 0:
        raise ValueError("PDP has no positive bin")
    if threshold_db is not None:
        p[p < peak * 10 ** (-threshold_db / 10)] = 0.0
    tau = pdp.delays
    total = p.sum()
    mean = float(np.sum(p * tau) / total)
    spread = float(np.sqrt(np.sum(p * (tau - mean) ** 2) / total))
    return spread, mean


def frequency_correlation(h) -> np.ndarray:
    """Biased FCF R_H[dk] = sum_k H[k+dk] conj(H[k]) for dk = 0..N-1."""
    h = _row(h)
    N = h.size
    nfft = 1 << (2 * N - 1).bit_length()
    spec = np.fft.fft(h, nfft)
    return np.fft.ifft(np.abs(spec) ** 2)[:N]


def coherence_bandwidth(h, grid: FrequencyGrid, threshold: float = 0.9) -> float:
    """Smallest lag where |R_H / R_H[0]| drops below ``threshold``, in Hz.

    The crossing is linearly interpolated between neighbouring lags.  If the
    correlation never drops below the threshold the full bandwidth is
    returned (see ``coherence_bandwidth_flagged``).
    """
    return coherence_bandwidth_flagged(h, grid, threshold)[0]


def coherence_bandwidth_flagged(h, grid: FrequencyGrid, threshold: float = 0.9) -> tuple[float, bool]:
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    r = frequency_correlation(_row(h, grid))
    if r[0].real <= 0:
        raise ValueError("all-zero CTF row")
    mag = np.abs(r / r[0])
    below = np.flatnonzero(mag < threshold)
    if below.size == 0:
        return grid.bandwidth, False
    k = int(below[0])
    a, b = mag[k - 1], mag[k]
    lag = (k - 1) + (a - threshold) / (a - b)
    return float(lag * grid.f_step), True
