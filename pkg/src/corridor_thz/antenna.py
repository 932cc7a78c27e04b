"""Standard-gain-horn surrogate: boresight gain curve plus Gaussian main lobe.

Only the HPBW and the sidelobe levels of the horns are known, so the pattern
is a Gaussian main lobe (-3 dB at half the HPBW) clamped at a flat sidelobe
floor.  Gains are in dB; the synthesis turns them into amplitude factors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .units import db_to_amp


class PatternPlane(enum.Enum):
    H = "H"
    E = "E"


@dataclass(frozen=True)
class AntennaModel:
    boresight_curve: tuple[tuple[float, float], ...] = ((290e9, 20.0),)
    hpbw_h: float = math.radians(16.5)
    hpbw_e: float = math.radians(16.5)
    sidelobe_floor_h: float = 11.5
    sidelobe_floor_e: float = 32.5
    # Optional (frequency Hz, HPBW rad) curve applied to both planes.
    hpbw_curve: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not self.boresight_curve:
            raise ValueError("boresight gain curve needs at least one point")
        freqs = [p[0] for p in self.boresight_curve]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("boresight gain curve frequencies must be strictly increasing")
        if not all(math.isfinite(g) for _, g in self.boresight_curve):
            raise ValueError("boresight gain curve must be finite")
        for name in ("hpbw_h", "hpbw_e"):
            if not 0 < getattr(self, name) < math.pi:
                raise ValueError(f"{name} must lie in (0, pi)")
        for name in ("sidelobe_floor_h", "sidelobe_floor_e"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive (dB below boresight)")
        if self.hpbw_curve is not None:
            if not all(0 < h < math.pi for _, h in self.hpbw_curve):
                raise ValueError("HPBW curve values must lie in (0, pi)")

    @property
    def domain(self) -> tuple[float, float]:
        return self.boresight_curve[0][0], self.boresight_curve[-1][0]

    def covers(self, f) -> bool:
        if len(self.boresight_curve) == 1:
            return True
        lo, hi = self.domain
        f = np.asarray(f, dtype=float)
        return bool(np.all((f >= lo) & (f <= hi)))


def boresight_gain(f, model: AntennaModel):
    """Boresight gain in dB, linearly interpolated on the configured curve."""
    f = np.asarray(f, dtype=float)
    if len(model.boresight_curve) == 1:
        return np.full(f.shape, model.boresight_curve[0][1])[()]
    if not model.covers(f):
        lo, hi = model.domain
        raise ValueError(f"frequency outside antenna gain curve domain [{lo:g}, {hi:g}] Hz")
    fx, gy = zip(*model.boresight_curve)
    return np.interp(f, fx, gy)[()]


def boresight_amplitude(f, model: AntennaModel):
    return db_to_amp(boresight_gain(f, model))


def _hpbw(plane: PatternPlane, f, model: AntennaModel):
    if model.hpbw_curve is not None and f is not None:
        fx, hy = zip(*model.hpbw_curve)
        return np.interp(np.asarray(f, dtype=float), fx, hy)
    return model.hpbw_h if plane is PatternPlane.H else model.hpbw_e


def pattern_gain(offboresight, plane: PatternPlane, f, model: AntennaModel):
    """Gain relative to boresight in dB (<= 0)."""
    hpbw = _hpbw(plane, f, model)
    floor = model.sidelobe_floor_h if plane is PatternPlane.H else model.sidelobe_floor_e
    theta = np.asarray(offboresight, dtype=float)
    return np.maximum(-12.0 * (theta / hpbw) ** 2, -floor)[()]
