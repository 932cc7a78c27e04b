"""Independent reference computations used by the tests and ``selftest``.

None of these call into the code they check: geometry comes from explicit
mirror images, the PDP from a direct O(N^2) DFT, Fresnel coefficients from
an energy balance, K-factor test data from a known-K Rician generator.
"""

from __future__ import annotations

import math

import numpy as np

C0 = 299_792_458.0


def image_method(d: float, extent: float, offset: float, n: int, first_positive: bool):
    """Unfold ``n`` mirror reflections and measure the straight line.

    Surfaces sit at +-extent/2 around the axis; Tx at (0, offset) and Rx at
    (d, offset).  The Rx is mirrored successively across the surfaces the
    ray meets (first the positive one if ``first_positive``).

    Returns (path_length, spacing_between_bounces, angle_from_normal,
    bounce_x_positions).
    """
    y = offset
    for k in range(n):
        wall = (2 * k + 1) * extent / 2
        wall = wall if first_positive else -wall
        y = 2 * wall - y
    dy = y - offset
    length = math.sqrt(d * d + dy * dy)
    sgn = 1.0 if first_positive else -1.0
    # crossings of the unfolded line with the mirrored surface copies
    xs = [d * (sgn * (2 * k + 1) * extent / 2 - offset) / dy for k in range(n)]
    spacing = (xs[1] - xs[0]) if n > 1 else d * extent / abs(dy)
    angle = math.atan2(d, abs(dy))
    return length, spacing, angle, xs


def fold(y: float, extent: float) -> float:
    """Map an unfolded transverse coordinate back into the corridor."""
    period = 2 * extent
    u = (y + extent / 2) % period
    return (u if u <= extent else period - u) - extent / 2


def direct_idft_pdp(h, window) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    N = h.size
    k = np.arange(N)
    kernel = np.exp(2j * np.pi * np.outer(k, k) / N)
    return np.abs(kernel @ (np.asarray(window) * h) / N) ** 2


def direct_fcf(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    N = h.size
    return np.array([np.sum(h[dk:] * np.conj(h[:N - dk])) for dk in range(N)])


def snell_refraction(theta: float, er: float) -> float:
    """Solve sin(theta) = sqrt(er) sin(alpha) by bisection."""
    lo, hi = 0.0, math.pi / 2
    target = math.sin(theta)
    for _ in range(200):
        mid = (lo + hi) / 2
        if math.sqrt(er) * math.sin(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def fresnel_energy_balance(theta: float, er: float):
    """(R_TE, R_TM, T_TE power, T_TM power) from amplitude transmission.

    Transmission coefficients t use the boundary conditions directly; the
    transmitted power fraction carries the impedance/projection factor
    sqrt(er) cos(alpha) / cos(theta).  Reflection magnitudes must satisfy
    |r|^2 + T = 1.
    """
    alpha = snell_refraction(theta, er)
    n2 = math.sqrt(er)
    ci, ct = math.cos(theta), math.cos(alpha)
    t_te = 2 * ci / (ci + n2 * ct)
    t_tm = 2 * ci / (ct + n2 * ci)
    factor = n2 * ct / ci
    T_te = factor * t_te ** 2
    T_tm = factor * t_tm ** 2
    return math.sqrt(max(0.0, 1 - T_te)), math.sqrt(max(0.0, 1 - T_tm)), T_te, T_tm


def rician_row(k_db: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. Rician samples with unit mean power and the given K."""
    k = 10 ** (k_db / 10)
    los = math.sqrt(k / (k + 1)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    diffuse = math.sqrt(1 / (2 * (k + 1))) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return los + diffuse


def image_source_field(f, d: float, extent: float, offset: float, n: int, first_positive: bool,
                       coeff: float, pattern_amp: float, gain_amp: float):
    """Scalar field of one image source: amplitude * lambda/(4 pi r) * e^{-jkr}."""
    r = image_method(d, extent, offset, n, first_positive)[0]
    lam = C0 / np.asarray(f, dtype=float)
    return coeff ** n * pattern_amp * gain_amp * lam / (4 * np.pi * r) * np.exp(-2j * np.pi * r / lam)
