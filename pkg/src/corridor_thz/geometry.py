"""Specular ray enumeration in an ideal rectangular corridor.

Each transverse section (walls or floor/ceiling) is treated on its own: a
ray bouncing ``n`` times between two parallel surfaces separated by
``extent`` advances ``spacing`` metres along the corridor between
consecutive bounces.  Tx and Rx are aligned and share the same transverse
``offset`` from the corridor axis.

Branch convention: ``Branch.PLUS`` is the path whose first bounce is on the
surface at ``+extent/2`` (the side a positive offset points to);
``Branch.MINUS`` starts on the opposite surface.  For the vertical section
the positive side is the ceiling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class GeometryError(ValueError):
    """Raised when a bounce configuration has no physical solution."""


class Plane(enum.Enum):
    HORIZONTAL = "horizontal"   # wall pair, extent = width
    VERTICAL = "vertical"       # floor/ceiling, extent = height
    LOS = "los"


class Branch(enum.IntEnum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class CorridorCrossSection:
    extent: float
    offset: float
    plane: Plane

    def __post_init__(self):
        if not self.extent > 0:
            raise GeometryError(f"extent must be positive, got {self.extent}")
        if not abs(self.offset) < self.extent / 2:
            raise GeometryError(
                f"|offset| must be below extent/2 ({self.extent / 2}), got {self.offset}")
        if self.plane is Plane.LOS:
            raise GeometryError("a cross-section is either horizontal or vertical")


@dataclass(frozen=True)
class RayPath:
    plane: Plane
    bounces: int
    branch: Branch
    spacing: float
    path_length: float
    reflection_angle: float
    departure_offboresight: float

    @property
    def is_los(self) -> bool:
        return self.plane is Plane.LOS

    def surface_hits(self) -> tuple[int, int]:
        """Bounces on the (positive-side, negative-side) surface."""
        first = (self.bounces + 1) // 2
        second = self.bounces // 2
        if self.branch is Branch.PLUS:
            return first, second
        return second, first


def bounce_spacing(d: float, n: int, cross: CorridorCrossSection, branch: Branch) -> float:
    if not d > 0:
        raise GeometryError(f"distance must be positive, got {d}")
    if n < 1:
        raise GeometryError(f"bounce count must be >= 1, got {n}")
    parity = (-1) ** n - 1          # 0 for even n, -2 for odd n
    denom = n + int(branch) * parity * cross.offset / cross.extent
    if not denom > 0:
        raise GeometryError(
            f"no {branch.name} path with n={n}: offset {cross.offset} too large for extent {cross.extent}")
    return d / denom


def path_length(d: float, spacing: float, cross: CorridorCrossSection) -> float:
    if not spacing > 0:
        raise GeometryError(f"spacing must be positive, got {spacing}")
    # hypot avoids the cancellation of d*sqrt(1 + r**2) for grazing rays
    return math.hypot(d, d * cross.extent / spacing)


def reflection_angle(spacing: float, cross: CorridorCrossSection) -> float:
    """Angle from the surface normal; tends to pi/2 (grazing) as spacing grows."""
    if not spacing > 0:
        raise GeometryError(f"spacing must be positive, got {spacing}")
    return math.atan2(spacing, cross.extent)


def los_path(d: float) -> RayPath:
    return RayPath(Plane.LOS, 0, Branch.PLUS, math.inf, d, math.nan, 0.0)


def reflected_path(d: float, n: int, cross: CorridorCrossSection, branch: Branch) -> RayPath:
    delta = bounce_spacing(d, n, cross, branch)
    theta = reflection_angle(delta, cross)
    return RayPath(
        plane=cross.plane,
        bounces=n,
        branch=branch,
        spacing=delta,
        path_length=path_length(d, delta, cross),
        reflection_angle=theta,
        departure_offboresight=math.atan2(cross.extent, delta),
    )


def enumerate_rays(d: float, horizontal: CorridorCrossSection,
                   vertical: CorridorCrossSection, max_bounces: int) -> list[RayPath]:
    """LoS plus ``4 * max_bounces`` single-plane reflections.

    Corner-coupled paths (bouncing off walls and floor/ceiling) are not
    part of the model.
    """
    if max_bounces < 1:
        raise GeometryError(f"max_bounces must be >= 1, got {max_bounces}")
    rays = [los_path(d)]
    for cross in (horizontal, vertical):
        for n in range(1, max_bounces + 1):
            for branch in (Branch.PLUS, Branch.MINUS):
                rays.append(reflected_path(d, n, cross, branch))
    return rays
