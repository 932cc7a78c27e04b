"""Fresnel reflection off dielectric half-spaces, incident medium air.

Permittivities are real and frequency independent, so the coefficients are
real: any phase change is a sign flip.  TM sign convention follows the
(cos a - sqrt(er) cos t) form, which gives R_TM(0) = R_TE(0) = (1 - sqrt(er))/(1 + sqrt(er)).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# ITU-R P.2040 values used for the corridor surfaces.
MATERIAL_PERMITTIVITY = {
    "plasterboard": 2.56,
    "concrete": 5.17,
    "ceiling board": 1.52,
}


class Polarization(enum.Enum):
    TE = "TE"
    TM = "TM"


@dataclass(frozen=True)
class Material:
    name: str
    rel_permittivity: float

    def __post_init__(self):
        if not self.rel_permittivity >= 1.0:
            raise ValueError(
                f"{self.name}: relative permittivity must be >= 1, got {self.rel_permittivity}")


@dataclass(frozen=True)
class SurfaceAssignment:
    walls: Material
    floor: Material
    ceiling: Material


def material(name: str) -> Material:
    try:
        return Material(name, MATERIAL_PERMITTIVITY[name])
    except KeyError:
        raise KeyError(f"unknown material {name!r}; known: {sorted(MATERIAL_PERMITTIVITY)}") from None


def default_surfaces() -> SurfaceAssignment:
    return SurfaceAssignment(material("plasterboard"), material("concrete"), material("ceiling board"))


def refraction_angle(theta, mat: Material):
    return np.arcsin(np.sin(theta) / np.sqrt(mat.rel_permittivity))


def fresnel_te(theta, mat: Material):
    if mat.rel_permittivity == 1.0:     # no interface; avoid arcsin round-off
        return np.zeros_like(np.asarray(theta, dtype=float))[()]
    root = np.sqrt(mat.rel_permittivity)
    ci = np.cos(theta)
    ct = root * np.cos(refraction_angle(theta, mat))
    return (ci - ct) / (ci + ct)


def fresnel_tm(theta, mat: Material):
    if mat.rel_permittivity == 1.0:
        return np.zeros_like(np.asarray(theta, dtype=float))[()]
    root = np.sqrt(mat.rel_permittivity)
    ca = np.cos(refraction_angle(theta, mat))
    ci = root * np.cos(theta)
    return (ca - ci) / (ca + ci)


def brewster_angle(mat: Material) -> float:
    return float(np.arctan(np.sqrt(mat.rel_permittivity)))


def reflection_factor(theta, mat: Material, n: int, polarization: Polarization):
    """Cumulative factor after ``n`` bounces on the same material."""
    if n < 1:
        raise ValueError(f"bounce count must be >= 1, got {n}")
    coeff = fresnel_te if polarization is Polarization.TE else fresnel_tm
    return coeff(theta, mat) ** n
