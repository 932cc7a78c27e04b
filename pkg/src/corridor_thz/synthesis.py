"""N-rays corridor channel: LoS (Friis) plus specular wall/floor/ceiling rays."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .antenna import AntennaModel, PatternPlane, boresight_amplitude, pattern_gain
from .geometry import Plane, RayPath, enumerate_rays
from .materials import Material, Polarization, SurfaceAssignment, reflection_factor
from .scenario import CorridorScenario, CtfDataset, FrequencyGrid, Provenance
from .units import SPEED_OF_LIGHT, db_to_amp, db_to_power


def _friis(f, r):
    f = np.asarray(f, dtype=float)
    lam = SPEED_OF_LIGHT / f
    return lam / (4 * np.pi * r) * np.exp(-2j * np.pi * r / lam)


def los_component(f, d: float, antenna: AntennaModel):
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    g = boresight_amplitude(f, antenna)
    return g * g * _friis(f, d)


def ray_gamma(ray: RayPath, surfaces: SurfaceAssignment) -> float:
    """Reflection factor: TE off the walls, TM off floor and ceiling.

    Floor and ceiling differ in material, so a vertical-plane ray picks up
    one coefficient power per surface it actually hits.
    """
    theta = ray.reflection_angle
    if ray.plane is Plane.HORIZONTAL:
        return float(reflection_factor(theta, surfaces.walls, ray.bounces, Polarization.TE))
    hits_ceiling, hits_floor = ray.surface_hits()
    gamma = 1.0
    if hits_ceiling:
        gamma *= reflection_factor(theta, surfaces.ceiling, hits_ceiling, Polarization.TM)
    if hits_floor:
        gamma *= reflection_factor(theta, surfaces.floor, hits_floor, Polarization.TM)
    return float(gamma)


def ray_amplitude(f, ray: RayPath, surfaces: SurfaceAssignment, antenna: AntennaModel):
    """gamma * G_tx * G_rx (amplitude) for one reflected ray."""
    plane = PatternPlane.H if ray.plane is Plane.HORIZONTAL else PatternPlane.E
    # Tx and Rx are aligned, so departure and arrival angles coincide.
    pat = db_to_amp(2 * pattern_gain(ray.departure_offboresight, plane, f, antenna))
    g = boresight_amplitude(f, antenna)
    return ray_gamma(ray, surfaces) * g * g * pat


def ray_component(f, ray: RayPath, surfaces: SurfaceAssignment, antenna: AntennaModel):
    if ray.is_los:
        raise ValueError("ray_component expects a reflected path; use los_component for LoS")
    return ray_amplitude(f, ray, surfaces, antenna) * _friis(f, ray.path_length)


def _row(scenario: CorridorScenario, f: np.ndarray, d: float, max_bounces: int) -> np.ndarray:
    rays = enumerate_rays(d, scenario.horizontal, scenario.vertical, max_bounces)
    h = los_component(f, d, scenario.antenna)
    for ray in rays[1:]:
        h = h + ray_component(f, ray, scenario.surfaces, scenario.antenna)
    return h


_SCENARIO = object()


def synthesize(scenario: CorridorScenario, grid: FrequencyGrid, *, max_bounces: int | None = None,
               noise_floor_db=_SCENARIO, seed: int = 0,
               threads: int | None = None) -> CtfDataset:
    """CTF matrix (distance x frequency) for every scenario distance.

    ``noise_floor_db`` adds circular complex Gaussian noise of that mean
    power (dB re 1); by default the scenario setting applies, ``None``
    disables noise.
    """
    nb = scenario.max_bounces if max_bounces is None else max_bounces
    floor = scenario.noise_floor_db if noise_floor_db is _SCENARIO else noise_floor_db
    f = grid.frequencies
    distances = np.asarray(scenario.distances, dtype=float)
    if not scenario.antenna.covers(f):
        raise ValueError("antenna gain curve does not cover the frequency grid")

    values = np.empty((distances.size, grid.count), dtype=complex)

    def work(i):
        values[i] = _row(scenario, f, distances[i], nb)

    if threads is None or threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(distances.size)))
    else:
        for i in range(distances.size):
            work(i)

    if floor is not None:
        rng = np.random.default_rng(seed)
        sigma = np.sqrt(db_to_power(floor) / 2)
        values += sigma * (rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape))

    meta = {"scenario": scenario.name, "max_bounces": nb,
            "noise_floor_db": floor, "seed": seed if floor is not None else None}
    return CtfDataset(grid, distances, values, Provenance.SIMULATED, meta)


def free_space(scenario: CorridorScenario) -> CorridorScenario:
    """Same scenario with every surface turned to air (all reflection factors 0)."""
    air = Material("air", 1.0)
    return replace(scenario, name=f"{scenario.name}-los", surfaces=SurfaceAssignment(air, air, air))


def convergence_check(scenario: CorridorScenario, grid: FrequencyGrid, nb_low: int, nb_high: int,
                      threads: int | None = None) -> float:
    """Largest |H_high - H_low| over the whole (distance, frequency) grid."""
    if not nb_low < nb_high:
        raise ValueError(f"nb_low ({nb_low}) must be below nb_high ({nb_high})")
    lo = synthesize(scenario, grid, max_bounces=nb_low, noise_floor_db=None, threads=threads)
    hi = synthesize(scenario, grid, max_bounces=nb_high, noise_floor_db=None, threads=threads)
    return float(np.max(np.abs(hi.values - lo.values)))
