"""Run every estimator over one or more CTF datasets and collect a report."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .antenna import AntennaModel
from .pathgain import (EDGE_MODES, WINDOW_FORMS, PathGainSurface, PowerLawFit,
                       estimate_path_gain, fit_columns, window_size)
from .scenario import CtfDataset
from .smallscale import (coherence_bandwidth_flagged, compute_pdp, delay_spread,
                         k_factor_mom, unwrap_pdp)
from .units import power_to_db


@dataclass(frozen=True)
class AnalysisConfig:
    lee_m: int = 40
    window_form: str = "derived"
    edge: str = "shrink"
    pdp_threshold_db: float | None = 20.0
    fcf_threshold: float = 0.9
    fit_mode: str = "pooled"              # or "per-corridor"
    fit_frequencies: tuple[float, ...] | None = None   # None: every 5 GHz
    table_step: float = 5e9
    d0: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.lee_m, int) and 20 <= self.lee_m <= 40):
            raise ValueError(f"lee_m must be an integer in [20, 40], got {self.lee_m!r}")
        if self.window_form not in WINDOW_FORMS:
            raise ValueError(f"window_form must be one of {WINDOW_FORMS}")
        if self.edge not in EDGE_MODES:
            raise ValueError(f"edge must be one of {EDGE_MODES}")
        if self.pdp_threshold_db is not None and not self.pdp_threshold_db > 0:
            raise ValueError("pdp_threshold_db must be positive")
        if not 0 < self.fcf_threshold < 1:
            raise ValueError("fcf_threshold must be in (0, 1)")
        if self.fit_mode not in ("pooled", "per-corridor"):
            raise ValueError("fit_mode must be 'pooled' or 'per-corridor'")


@dataclass(frozen=True)
class SmallScaleRecord:
    corridor: str
    d: float
    k_factor: float          # dB; +inf = no envelope spread, NaN = undefined
    delay_spread: float      # s
    coherence_bw: float      # Hz
    mean_delay: float        # s
    window_L: int
    flags: tuple[str, ...] = ()


@dataclass
class FitSweep:
    """Power-law parameters at every sweep frequency (plot data)."""
    corridor: str
    frequencies: np.ndarray
    exponent: np.ndarray
    intercept: np.ndarray
    sigma: np.ndarray

    def record(self, f: float) -> PowerLawFit:
        k = int(np.argmin(np.abs(self.frequencies - f)))
        return PowerLawFit(float(self.frequencies[k]), float(self.exponent[k]),
                           float(self.intercept[k]), float(self.sigma[k]))


@dataclass
class PdpGrid:
    corridor: str
    distances: np.ndarray
    delay_distances: np.ndarray
    power_db: np.ndarray      # distance x delay, unwrapped over [0, 2 d_max)


@dataclass
class ChannelReport:
    fits: dict[str, list[PowerLawFit]]
    sweeps: dict[str, FitSweep]
    small_scale: list[SmallScaleRecord]
    pdp_grids: dict[str, PdpGrid] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    config: AnalysisConfig = field(default_factory=AnalysisConfig)

    def for_corridor(self, corridor: str) -> list[SmallScaleRecord]:
        return [r for r in self.small_scale if r.corridor == corridor]


def table_frequencies(grid, step: float) -> tuple[float, ...]:
    f0 = math.ceil(grid.f_start / step) * step
    out = []
    f = f0
    while f <= grid.f_stop + 1e-6:
        out.append(f)
        f += step
    return tuple(out)


def small_scale_row(h, d: float, grid, config: AnalysisConfig, corridor: str = ""):
    """Estimators for one distance; failures become flags, not exceptions."""
    flags = []
    try:
        k = k_factor_mom(h)
        if math.isinf(k):
            flags.append("K=inf (no envelope spread)")
        elif math.isnan(k):
            flags.append("K undefined (sub-Rayleigh sample)")
    except ValueError as exc:
        k = math.nan
        flags.append(f"K failed: {exc}")
    pdp = compute_pdp(h, grid)
    try:
        unwrapped = unwrap_pdp(pdp, d)
    except ValueError:
        unwrapped = None
        flags.append("LoS beyond alias range, PDP not unwrapped")
    try:
        ds, mean = delay_spread(unwrapped if unwrapped is not None else pdp, config.pdp_threshold_db)
    except ValueError as exc:
        ds = mean = math.nan
        flags.append(f"D_s failed: {exc}")
    try:
        bc, crossed = coherence_bandwidth_flagged(h, grid, config.fcf_threshold)
        if not crossed:
            flags.append("B_c: FCF never crossed threshold, full BW reported")
    except ValueError as exc:
        bc = math.nan
        flags.append(f"B_c failed: {exc}")
    L = window_size(d, grid, config.lee_m, config.window_form)
    record = SmallScaleRecord(corridor, float(d), k, ds, bc, mean, L, tuple(flags))
    if unwrapped is None:
        return record, np.concatenate([pdp.power, np.zeros_like(pdp.power)])
    return record, unwrapped.power


def analyze(datasets, antenna: AntennaModel, config: AnalysisConfig | None = None,
            threads: int | None = None) -> ChannelReport:
    """Large- and small-scale analysis of one or several CTF datasets.

    With ``fit_mode="pooled"`` the power law is fitted over the distances
    of all datasets together (key ``"pooled"``); otherwise one fit per
    dataset label.
    """
    config = config or AnalysisConfig()
    if isinstance(datasets, CtfDataset):
        datasets = [datasets]
    datasets = list(datasets)
    if not datasets:
        raise ValueError("no datasets to analyze")
    for ds in datasets:
        if ds.distances.size == 0:
            raise ValueError(f"dataset {ds.label!r} has an empty distance list")
    labels = [ds.label for ds in datasets]
    if len(set(labels)) != len(labels):
        labels = [f"{l}-{i}" for i, l in enumerate(labels)]

    failures: list[str] = []
    surfaces = []
    for ds, label in zip(datasets, labels):
        s = estimate_path_gain(ds, antenna, config.lee_m, config.window_form, config.edge)
        s.labels = (label,) * s.distances.size
        surfaces.append(s)

    if config.fit_mode == "pooled":
        groups = {"pooled": PathGainSurface.concat(surfaces)}
    else:
        groups = dict(zip(labels, surfaces))

    fit_f = config.fit_frequencies or table_frequencies(datasets[0].grid, config.table_step)
    fits: dict[str, list[PowerLawFit]] = {}
    sweeps: dict[str, FitSweep] = {}
    for key, surf in groups.items():
        try:
            n, A, s = fit_columns(surf.distances, surf.pg_db, config.d0)
        except ValueError as exc:
            failures.append(f"{key}: power-law fit failed: {exc}")
            continue
        sweep = FitSweep(key, surf.grid.frequencies, n, A, s)
        sweeps[key] = sweep
        fits[key] = [sweep.record(f) for f in fit_f]

    records: list[SmallScaleRecord] = []
    grids: dict[str, PdpGrid] = {}
    for ds, label in zip(datasets, labels):
        rows = [None] * ds.distances.size

        def work(i, ds=ds, label=label, rows=rows):
            rows[i] = small_scale_row(ds.values[i], ds.distances[i], ds.grid, config, label)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(ds.distances.size)))
        for rec, _ in rows:
            records.append(rec)
            failures.extend(f"{label} d={rec.d:g} m: {flag}" for flag in rec.flags
                            if "failed" in flag)
        ext = np.vstack([u for _, u in rows])
        with np.errstate(divide="ignore"):
            power_db = power_to_db(ext)
        N2 = ext.shape[1]
        bin_d = compute_pdp(ds.values[0], ds.grid).delay_distances[1]
        grids[label] = PdpGrid(label, ds.distances.copy(), np.arange(N2) * bin_d, power_db)

    return ChannelReport(fits, sweeps, records, grids, failures, config)
