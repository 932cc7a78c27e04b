"""Sweep grid, corridor scenario and CTF dataset types, plus built-in presets."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .antenna import AntennaModel
from .geometry import CorridorCrossSection, Plane
from .materials import SurfaceAssignment, default_surfaces
from .units import SPEED_OF_LIGHT


@dataclass(frozen=True)
class FrequencyGrid:
    f_start: float
    f_step: float
    count: int

    def __post_init__(self):
        if not self.f_step > 0:
            raise ValueError(f"f_step must be positive, got {self.f_step}")
        if self.count < 2:
            raise ValueError(f"count must be >= 2, got {self.count}")
        if not self.f_start > 0:
            raise ValueError(f"f_start must be positive, got {self.f_start}")

    @property
    def frequencies(self) -> np.ndarray:
        return self.f_start + self.f_step * np.arange(self.count)

    @property
    def f_stop(self) -> float:
        return self.f_start + self.f_step * (self.count - 1)

    @property
    def bandwidth(self) -> float:
        return (self.count - 1) * self.f_step

    @property
    def delay_resolution(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def max_excess_delay(self) -> float:
        return (self.count - 1) * self.delay_resolution

    @property
    def max_distance(self) -> float:
        """Unambiguous delay-domain range c / f_step."""
        return SPEED_OF_LIGHT / self.f_step

    def index_of(self, f: float) -> int:
        k = int(round((f - self.f_start) / self.f_step))
        if not 0 <= k < self.count or abs(self.f_start + k * self.f_step - f) > 1e-6 * self.f_step:
            raise ValueError(f"{f:g} Hz is not a point of the sweep")
        return k


# 250-330 GHz, 10 MHz step, 8001 points.
SOUNDER_GRID = FrequencyGrid(250e9, 10e6, 8001)


@dataclass(frozen=True)
class CorridorScenario:
    name: str
    width: float
    height: float
    tx_offset_w: float
    tx_height: float
    distances: tuple[float, ...]
    surfaces: SurfaceAssignment = field(default_factory=default_surfaces)
    antenna: AntennaModel = field(default_factory=AntennaModel)
    max_bounces: int = 6
    noise_floor_db: float | None = None

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("corridor width and height must be positive")
        d = np.asarray(self.distances, dtype=float)
        if d.size == 0:
            raise ValueError("distance list is empty")
        if not (np.all(d > 0) and np.all(np.diff(d) > 0)):
            raise ValueError("distances must be positive and strictly increasing")
        if self.max_bounces < 1:
            raise ValueError("max_bounces must be >= 1")
        # raise early on offsets outside the corridor
        self.horizontal
        self.vertical

    @property
    def tx_offset_h(self) -> float:
        return self.tx_height - self.height / 2

    @property
    def horizontal(self) -> CorridorCrossSection:
        return CorridorCrossSection(self.width, self.tx_offset_w, Plane.HORIZONTAL)

    @property
    def vertical(self) -> CorridorCrossSection:
        return CorridorCrossSection(self.height, self.tx_offset_h, Plane.VERTICAL)

    def with_overrides(self, **changes) -> "CorridorScenario":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


def _distance_range(start: float, step: float, count: int) -> tuple[float, ...]:
    return tuple(round(start + step * i, 10) for i in range(count))


PRESETS = {
    "citic": CorridorScenario(
        name="citic", width=2.00, height=2.65, tx_offset_w=0.08, tx_height=0.625,
        distances=_distance_range(0.6, 0.6, 27)),
    "cetic": CorridorScenario(
        name="cetic", width=1.80, height=2.65, tx_offset_w=0.10, tx_height=1.16,
        distances=_distance_range(1.2, 0.6, 45)),
}


def preset(name: str) -> CorridorScenario:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None


class Provenance(enum.Enum):
    SIMULATED = "simulated"
    MEASURED = "measured"


@dataclass
class CtfDataset:
    grid: FrequencyGrid
    distances: np.ndarray
    values: np.ndarray
    provenance: Provenance = Provenance.SIMULATED
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.distances = np.asarray(self.distances, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.distances.size, self.grid.count):
            raise ValueError(
                f"CTF matrix shape {self.values.shape} does not match "
                f"({self.distances.size} distances, {self.grid.count} frequencies)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("CTF contains non-finite samples")

    @property
    def label(self) -> str:
        return str(self.metadata.get("scenario", "dataset"))
