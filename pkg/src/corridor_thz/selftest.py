"""Oracle checks behind ``corridor-thz selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from . import oracles
from .analysis import AnalysisConfig, analyze
from .antenna import AntennaModel
from .geometry import Branch, CorridorCrossSection, Plane, reflected_path
from .materials import MATERIAL_PERMITTIVITY, Material, brewster_angle, fresnel_te, fresnel_tm
from .scenario import PRESETS, SOUNDER_GRID, FrequencyGrid
from .smallscale import compute_pdp, frequency_correlation, k_factor_mom
from .synthesis import convergence_check, free_space, synthesize


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def check_materials() -> CheckResult:
    theta = np.linspace(0, math.pi / 2 - 1e-6, 2001)
    worst_null = 0.0
    worst_balance = 0.0
    for name, er in MATERIAL_PERMITTIVITY.items():
        try:
            mat = Material(name, er)
        except ValueError as exc:
            return CheckResult("materials", False, str(exc))
        te, tm = fresnel_te(theta, mat), fresnel_tm(theta, mat)
        if not (np.all(np.isfinite(te)) and np.all(np.abs(te) <= 1) and np.all(np.abs(tm) <= 1)):
            return CheckResult("materials", False, f"{name}: |R| > 1 or non-finite")
        worst_null = max(worst_null, abs(float(fresnel_tm(brewster_angle(mat), mat))))
        for th in (0.3, 0.9, 1.4):
            r_te, r_tm, _, _ = oracles.fresnel_energy_balance(th, er)
            worst_balance = max(worst_balance, abs(abs(fresnel_te(th, mat)) - r_te),
                                abs(abs(fresnel_tm(th, mat)) - r_tm))
    ok = worst_null < 1e-12 and worst_balance < 1e-9
    return CheckResult("materials", ok,
                       f"Brewster null {worst_null:.1e}, energy balance err {worst_balance:.1e}")


def check_geometry(seed: int, cases: int = 2000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        extent = rng.uniform(0.5, 4.0)
        offset = rng.uniform(-0.45, 0.45) * extent
        d = rng.uniform(0.1, 60.0)
        n = int(rng.integers(1, 7))
        cross = CorridorCrossSection(extent, offset, Plane.HORIZONTAL)
        for branch in Branch:
            ray = reflected_path(d, n, cross, branch)
            length, spacing, angle, _ = oracles.image_method(d, extent, offset, n, branch is Branch.PLUS)
            worst = max(worst, abs(ray.path_length - length) / length,
                        abs(ray.spacing - spacing) / spacing,
                        abs(ray.reflection_angle - angle) / angle)
    return CheckResult("geometry vs image method", worst < 1e-12,
                       f"{cases} cases x 2 branches, max rel err {worst:.1e}")


def check_pdp(seed: int, n: int = 256) -> CheckResult:
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    grid = FrequencyGrid(250e9, 10e6, n)
    fast = compute_pdp(h, grid).power
    slow = oracles.direct_idft_pdp(h, windows.hann(n, sym=True))
    err = float(np.max(np.abs(fast - slow)) / np.max(slow))
    r_fast = frequency_correlation(h)
    r_slow = oracles.direct_fcf(h)
    err_fcf = float(np.max(np.abs(r_fast - r_slow)) / np.abs(r_slow[0]))
    return CheckResult("PDP/FCF vs direct DFT", err < 1e-9 and err_fcf < 1e-9,
                       f"N={n}, PDP rel err {err:.1e}, FCF rel err {err_fcf:.1e}")


def check_rician(seed: int, trials: int = 100, n: int = 8001) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    parts = []
    for k_true in (0.0, 5.0, 10.0, 15.0):
        est = np.array([k_factor_mom(oracles.rician_row(k_true, n, rng)) for _ in range(trials)])
        bias = float(np.mean(est) - k_true)
        worst = max(worst, abs(bias))
        parts.append(f"{k_true:g}dB:{bias:+.2f}")
    return CheckResult("K-factor MoM Monte Carlo", worst < 1.0,
                       f"{trials} trials, N={n}, bias " + " ".join(parts))


def check_free_space() -> CheckResult:
    data = [synthesize(free_space(PRESETS[p]), SOUNDER_GRID, noise_floor_db=None) for p in ("citic", "cetic")]
    report = analyze(data, AntennaModel(), AnalysisConfig())
    sw = report.sweeps["pooled"]
    lam = oracles.C0 / sw.frequencies
    a_err = float(np.max(np.abs(sw.intercept - 20 * np.log10(lam / (4 * np.pi)))))
    n_err = float(np.max(np.abs(sw.exponent + 2)))
    return CheckResult("free-space fit", n_err <= 0.01,
                       f"n = {np.mean(sw.exponent):.3f} (max |n+2| {n_err:.1e}), "
                       f"max |A - FSPL| {a_err:.3f} dB")


def check_convergence(low: int, high: int, tol: float = 1e-5) -> CheckResult:
    delta = convergence_check(PRESETS["citic"], SOUNDER_GRID, low, high)
    return CheckResult(f"convergence citic N_b {low}->{high}", delta <= tol,
                       f"max |dH| = {delta:.2e} (tolerance {tol:g})")


def run(seed: int = 0, compare_bounces: tuple[int, int] = (5, 6)) -> list[CheckResult]:
    checks = [
        check_materials,
        lambda: check_geometry(seed),
        lambda: check_pdp(seed),
        lambda: check_rician(seed),
        check_free_space,
        lambda: check_convergence(*compare_bounces),
    ]
    results = []
    for check in checks:
        try:
            results.append(check())
        except Exception as exc:   # a broken check is a failed check
            results.append(CheckResult(getattr(check, "__name__", "check"), False, f"error: {exc}"))
    return results
