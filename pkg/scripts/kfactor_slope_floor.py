"""How the in-band envelope slope sets K at short range.

Near the transmitter the reflected rays are weak, so the CTF envelope is
almost the LoS alone.  Across 250-330 GHz the Friis term still falls like
1/f (about 2.4 dB), and the method-of-moments K reads that deterministic
slope as "spread".  This script

1. computes K of a pure LoS envelope with an extra linear-in-dB slope
   added on top of the Friis 1/f,
2. finds the total slope that would bring K down to a target value, and
3. re-runs the CITIC preset with a sloped boresight-gain curve to show the
   near-range K following the same relation.

Usage: python scripts/kfactor_slope_floor.py [--target-k 15]
"""

import argparse

import numpy as np
from scipy.optimize import brentq

from corridor_thz.analysis import analyze
from corridor_thz.antenna import AntennaModel
from corridor_thz.scenario import SOUNDER_GRID, preset
from corridor_thz.smallscale import k_factor_mom
from corridor_thz.synthesis import synthesize


def los_k(extra_slope_db: float) -> float:
    f = SOUNDER_GRID.frequencies
    env_db = -20 * np.log10(f / f[0]) - extra_slope_db * (f - f[0]) / (f[-1] - f[0])
    return k_factor_mom(10 ** (env_db / 20))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--target-k", type=float, default=15.0)
    args = ap.parse_args()

    friis_db = 20 * np.log10(SOUNDER_GRID.f_stop / SOUNDER_GRID.f_start)
    print(f"Friis 1/f slope over the band: {friis_db:.2f} dB")
    print(f"{'extra slope dB':>15} {'total dB':>9} {'K LoS dB':>9}")
    for extra in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0):
        print(f"{extra:15.1f} {friis_db + extra:9.2f} {los_k(extra):9.2f}")
    need = brentq(lambda s: los_k(s) - args.target_k, 0.0, 6.0)
    print(f"K = {args.target_k:g} dB needs {need:.2f} dB of extra slope "
          f"({friis_db + need:.2f} dB total envelope drop)")

    # per antenna the gain falls by need/2 dB across the band
    half = need / 2
    sloped = AntennaModel(boresight_curve=((250e9, 20 + half / 2), (330e9, 20 - half / 2)))
    for label, ant in (("constant 20 dB", AntennaModel()), (f"sloped -{half:.2f} dB/antenna", sloped)):
        sc = preset("citic").with_overrides(antenna=ant)
        rep = analyze(synthesize(sc, SOUNDER_GRID), ant)
        k = [r.k_factor for r in rep.small_scale if r.d < 7.2]
        print(f"CITIC d < 7.2 m, {label:26s}: K {min(k):5.2f} .. {max(k):5.2f} dB")


if __name__ == "__main__":
    main()
