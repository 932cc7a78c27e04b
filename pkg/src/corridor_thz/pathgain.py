"""Large-scale analysis: fast-fading removal, path gain, power-law fit.

The fading window follows the Lee criterion mapped to frequency: averaging
over ``M`` wavelengths of LoS electrical length corresponds to a window of
``M * c / d`` Hz, i.e. ``M * d_max / d`` samples with ``d_max = c / f_step``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .antenna import AntennaModel, boresight_amplitude
from .scenario import CtfDataset, FrequencyGrid
from .units import amp_to_db

WINDOW_FORMS = ("derived", "literal-eq11")
EDGE_MODES = ("shrink", "truncate")


def window_size(d: float, grid: FrequencyGrid, M: int = 40, form: str = "derived") -> int:
    """Odd moving-average length L(d) in samples.

    ``derived``: ceil(M * d_max / d) + 1.  ``literal-eq11``:
    M * ceil(d_max / d) + 1, kept for comparison; it gives 81 instead of 45
    at 27.6 m.
    """
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    if not (isinstance(M, (int, np.integer)) and 20 <= M <= 40):
        raise ValueError(f"M must be an integer in [20, 40], got {M!r}")
    ratio = grid.max_distance / d
    if form == "derived":
        L = math.ceil(M * ratio) + 1
    elif form == "literal-eq11":
        L = M * math.ceil(ratio) + 1
    else:
        raise ValueError(f"unknown window form {form!r}; expected one of {WINDOW_FORMS}")
    if L % 2 == 0:
        L += 1
    cap = grid.count if grid.count % 2 else grid.count - 1
    return min(L, cap)


def moving_average(x: np.ndarray, L: int, edge: str = "shrink") -> np.ndarray:
    """Centred moving average of length ``L`` (odd).

    ``truncate`` keeps the nominal half-width and averages whatever samples
    exist near the band edges.  ``shrink`` narrows the window symmetrically
    so it stays centred; on a sloped response this avoids the one-sided
    bias of ``truncate``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    half = L // 2
    csum = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(n)
    if edge == "truncate":
        lo = np.maximum(idx - half, 0)
        hi = np.minimum(idx + half + 1, n)
    elif edge == "shrink":
        h = np.minimum(half, np.minimum(idx, n - 1 - idx))
        lo, hi = idx - h, idx + h + 1
    else:
        raise ValueError(f"unknown edge mode {edge!r}; expected one of {EDGE_MODES}")
    return (csum[hi] - csum[lo]) / (hi - lo)


def remove_fast_fading(ctf: CtfDataset, M: int = 40, form: str = "derived",
                       edge: str = "shrink") -> np.ndarray:
    out = np.empty(ctf.values.shape)
    mag = np.abs(ctf.values)
    for i, d in enumerate(ctf.distances):
        out[i] = moving_average(mag[i], window_size(d, ctf.grid, M, form), edge)
    return out


@dataclass
class PathGainSurface:
    grid: FrequencyGrid
    distances: np.ndarray
    pg: np.ndarray          # linear amplitude
    window_M: int
    labels: tuple[str, ...] = ()

    @property
    def pg_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return amp_to_db(self.pg)

    @classmethod
    def concat(cls, surfaces) -> "PathGainSurface":
        """Pool several corridors into one surface (same sweep required)."""
        surfaces = list(surfaces)
        grid = surfaces[0].grid
        if any(s.grid != grid for s in surfaces):
            raise ValueError("cannot pool path-gain surfaces over different sweeps")
        labels = tuple(l for s in surfaces for l in (s.labels or ("",) * len(s.distances)))
        return cls(grid, np.concatenate([s.distances for s in surfaces]),
                   np.vstack([s.pg for s in surfaces]), surfaces[0].window_M, labels)


def estimate_path_gain(ctf: CtfDataset, antenna: AntennaModel, M: int = 40,
                       form: str = "derived", edge: str = "shrink") -> PathGainSurface:
    """|H_w| with the Tx and Rx boresight gains divided out."""
    f = ctf.grid.frequencies
    if not antenna.covers(f):
        raise ValueError("antenna gain curve does not cover the frequency grid")
    g = boresight_amplitude(f, antenna)
    pg = remove_fast_fading(ctf, M, form, edge) / (g * g)
    return PathGainSurface(ctf.grid, ctf.distances.copy(), pg, M, (ctf.label,) * ctf.distances.size)


@dataclass(frozen=True)
class PowerLawFit:
    frequency: float
    exponent: float         # n(f)
    intercept: float        # A(f), dB at d0 = 1 m
    sigma: float            # RMS residual, dB


def _design(distances: np.ndarray, d0: float) -> np.ndarray:
    d = np.asarray(distances, dtype=float)
    if d.size < 3:
        raise ValueError(f"power-law fit needs at least 3 distances, got {d.size}")
    x = 10 * np.log10(d / d0)
    if np.ptp(x) == 0:
        raise ValueError("degenerate fit: all distances are equal")
    return np.column_stack([x, np.ones_like(x)])


def fit_columns(distances, pg_db: np.ndarray, d0: float = 1.0):
    """Least squares of PG_dB = A + 10 n log10(d/d0) for every column at once.

    Returns (n, A, sigma) arrays with one entry per column of ``pg_db``.
    """
    X = _design(distances, d0)
    y = np.asarray(pg_db, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("path gain has zero or non-finite samples")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    sigma = np.sqrt(np.mean(resid ** 2, axis=0))
    return coef[0], coef[1], sigma


def fit_power_law(surface: PathGainSurface, f: float, d0: float = 1.0) -> PowerLawFit:
    k = surface.grid.index_of(f)
    n, A, s = fit_columns(surface.distances, surface.pg_db[:, k], d0)
    return PowerLawFit(float(surface.grid.frequencies[k]), float(n), float(A), float(s))


def fit_sweep(surface: PathGainSurface, d0: float = 1.0) -> list[PowerLawFit]:
    n, A, s = fit_columns(surface.distances, surface.pg_db, d0)
    return [PowerLawFit(float(f), float(a), float(b), float(c))
            for f, a, b, c in zip(surface.grid.frequencies, n, A, s)]
