"""Max |H(N_b) - H(N_b - 1)| over the full sweep, for both presets.

Usage: python scripts/convergence_sweep.py [--max 8]
"""

import argparse

from corridor_thz.scenario import PRESETS, SOUNDER_GRID
from corridor_thz.synthesis import convergence_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max", type=int, default=8)
    args = ap.parse_args()
    print(f"{'N_b':>4} " + " ".join(f"{name:>10}" for name in sorted(PRESETS)))
    for nb in range(2, args.max + 1):
        deltas = [convergence_check(PRESETS[name], SOUNDER_GRID, nb - 1, nb) for name in sorted(PRESETS)]
        print(f"{nb:4d} " + " ".join(f"{d:10.2e}" for d in deltas))


if __name__ == "__main__":
    main()
