"""Simulate both corridors, analyze them jointly and print the headline numbers.

Writes the report tables and SVG figures to --out (default: results/).

Usage: python scripts/reproduce_model_results.py [--out results] [--lee-m 40]
"""

import argparse
import time
from pathlib import Path

import numpy as np

from corridor_thz.analysis import AnalysisConfig, analyze
from corridor_thz.dataio import write_report
from corridor_thz.scenario import SOUNDER_GRID, preset
from corridor_thz.synthesis import synthesize
from corridor_thz.units import SPEED_OF_LIGHT


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--lee-m", type=int, default=40)
    ap.add_argument("--fit-mode", choices=("pooled", "per-corridor"), default="pooled")
    args = ap.parse_args()

    t0 = time.perf_counter()
    data = [synthesize(preset(n), SOUNDER_GRID) for n in ("citic", "cetic")]
    report = analyze(data, preset("citic").antenna,
                     AnalysisConfig(lee_m=args.lee_m, fit_mode=args.fit_mode))
    files = write_report(report, args.out, svg=True)
    print(f"simulated + analyzed in {time.perf_counter() - t0:.1f} s; {len(files)} files in {args.out}")

    print("\nlarge scale (per fit):")
    for key, sw in report.sweeps.items():
        fs = 20 * np.log10(SPEED_OF_LIGHT / sw.frequencies / (4 * np.pi))
        print(f"  {key}: mean n {sw.exponent.mean():.3f} (range {sw.exponent.min():.3f}.."
              f"{sw.exponent.max():.3f}), mean sigma {sw.sigma.mean():.2f} dB, "
              f"A 250 GHz {sw.intercept[0]:.2f} dB, A 330 GHz {sw.intercept[-1]:.2f} dB, "
              f"mean excess loss vs free space {np.mean(fs - sw.intercept):.2f} dB")
        for r in report.fits[key][::4]:
            print(f"    {r.frequency / 1e9:5.0f} GHz  n {r.exponent:6.3f}  A {r.intercept:7.2f} dB"
                  f"  sigma {r.sigma:4.2f} dB")

    print("\nsmall scale (every 4th distance):")
    print(f"  {'corridor':8} {'d m':>6} {'K dB':>7} {'D_s ns':>7} {'B_c MHz':>8}")
    for c in ("citic", "cetic"):
        for r in report.for_corridor(c)[::4]:
            print(f"  {c:8} {r.d:6.1f} {r.k_factor:7.2f} {r.delay_spread * 1e9:7.3f} "
                  f"{r.coherence_bw / 1e6:8.1f}")


if __name__ == "__main__":
    main()
