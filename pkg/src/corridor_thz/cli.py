"""Command-line front end: simulate, analyze, report, selftest.

Every option can also come from the environment as ``CORRIDOR_THZ_<DEST>``
(e.g. ``CORRIDOR_THZ_LEE_M=30``); explicit flags win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import AnalysisConfig, analyze
from .antenna import AntennaModel
from .dataio import FormatError, ScenarioError, load_scenario, read_ctf, write_ctf, write_report
from .pathgain import EDGE_MODES, WINDOW_FORMS
from .scenario import PRESETS
from .synthesis import free_space, synthesize

ENV_PREFIX = "CORRIDOR_THZ_"
log = logging.getLogger("corridor_thz")


def _lee_m(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--lee-m expects an integer, got {text!r}") from None
    if not 20 <= m <= 40:
        raise argparse.ArgumentTypeError(f"--lee-m must lie in [20, 40], got {m}")
    return m


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text!r}")
    return v


def _add_source(p, required: bool):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--preset", choices=sorted(PRESETS), help="built-in corridor preset")
    g.add_argument("--scenario", type=Path, help="YAML scenario file")


def _add_sim(p):
    p.add_argument("--max-bounces", type=_positive_int, help="N_b (default 6)")
    p.add_argument("--noise-floor-db", type=float, help="add complex Gaussian noise at this level")
    p.add_argument("--seed", type=int, help="RNG seed for noise (default: scenario file, else 0)")
    p.add_argument("--los-only", action="store_true", help="drop all reflections (free space)")


def _add_analysis(p):
    p.add_argument("--lee-m", type=_lee_m, help="Lee constant M in [20, 40] (default 40)")
    p.add_argument("--pdp-threshold-db", type=_positive_float, help="PDP threshold for D_s (default 20)")
    p.add_argument("--fcf-threshold", type=_fraction, help="FCF threshold for B_c (default 0.9)")
    p.add_argument("--window-form", choices=WINDOW_FORMS, help="fading window formula")
    p.add_argument("--edge", choices=EDGE_MODES, help="moving-average band-edge handling")
    p.add_argument("--fit-mode", choices=("pooled", "per-corridor"), help="power-law fit pooling")
    p.add_argument("--svg", action="store_true", help="also render SVG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corridor-thz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize N-rays CTFs to a file")
    _add_source(p, required=True)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--format", choices=("binary", "text"), default="binary")
    _add_sim(p)
    p.add_argument("--threads", type=_positive_int)

    p = sub.add_parser("analyze", help="estimate large/small-scale parameters from CTF files")
    p.add_argument("inputs", nargs="+", type=Path, help="CTF files (binary or text)")
    _add_source(p, required=False)
    p.add_argument("--out", type=Path, required=True, help="report directory")
    _add_analysis(p)
    p.add_argument("--threads", type=_positive_int)

    p = sub.add_parser("report", help="simulate presets and analyze them jointly")
    p.add_argument("--preset", action="append", choices=sorted(PRESETS), dest="presets",
                   help="preset(s) to include (default: all)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--save-ctf", action="store_true", help="also write the simulated CTFs")
    _add_sim(p)
    _add_analysis(p)
    p.add_argument("--threads", type=_positive_int)

    p = sub.add_parser("selftest", help="run the oracle suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--compare-bounces", type=_positive_int, nargs=2, metavar=("LOW", "HIGH"),
                   default=(5, 6), help="N_b pair for the convergence check")

    _apply_env(parser)
    return parser


def _apply_env(parser: argparse.ArgumentParser, environ=None) -> None:
    environ = os.environ if environ is None else environ
    subs = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    for sp in subs[0].choices.values():
        for action in sp._actions:
            key = ENV_PREFIX + action.dest.upper()
            if key not in environ or action.dest == "help":
                continue
            value = environ[key]
            if isinstance(action, argparse._StoreTrueAction):
                action.default = value.lower() in ("1", "true", "yes", "on")
            elif action.nargs in (None, "?"):
                action.default = value       # argparse applies ``type`` to string defaults
            else:
                action.default = value.split()


def _scenario_source(args):
    if args.scenario is not None:
        return load_scenario(args.scenario)
    if args.preset is not None:
        return load_scenario(args.preset)
    return None


def _analysis_config(args, base: AnalysisConfig) -> AnalysisConfig:
    changes = {
        "lee_m": args.lee_m, "pdp_threshold_db": args.pdp_threshold_db,
        "fcf_threshold": args.fcf_threshold, "window_form": args.window_form,
        "edge": args.edge, "fit_mode": args.fit_mode,
    }
    return replace(base, **{k: v for k, v in changes.items() if v is not None})


def _simulate(sf, args):
    scenario = sf.scenario
    if args.los_only:
        scenario = free_space(scenario)
    scenario = scenario.with_overrides(max_bounces=args.max_bounces,
                                       noise_floor_db=args.noise_floor_db)
    seed = sf.seed if args.seed is None else args.seed
    return synthesize(scenario, sf.grid, seed=seed, threads=args.threads)


def cmd_simulate(args) -> int:
    sf = _scenario_source(args)
    ctf = _simulate(sf, args)
    args.out.mkdir(parents=True, exist_ok=True)
    suffix = ".ctf" if args.format == "binary" else ".csv"
    path = write_ctf(ctf, args.out / f"{sf.scenario.name}{suffix}", args.format)
    print(f"wrote {path} ({ctf.values.shape[0]} distances x {ctf.values.shape[1]} frequencies)")
    return 0


def _summary(report) -> None:
    for key, sw in report.sweeps.items():
        print(f"fit[{key}]: mean n = {np.mean(sw.exponent):.3f}, "
              f"A(250..330) = {sw.intercept[0]:.2f}..{sw.intercept[-1]:.2f} dB, "
              f"mean sigma = {np.mean(sw.sigma):.2f} dB")
    for corridor in sorted({r.corridor for r in report.small_scale}):
        recs = report.for_corridor(corridor)
        print(f"{corridor}: {len(recs)} distances, K {min(r.k_factor for r in recs):.1f}.."
              f"{max(r.k_factor for r in recs):.1f} dB, D_s max "
              f"{max(r.delay_spread for r in recs) * 1e9:.3f} ns, B_c min "
              f"{min(r.coherence_bw for r in recs) / 1e6:.0f} MHz")
    if report.failures:
        print(f"{len(report.failures)} estimator failure(s), see failures.txt")


def cmd_analyze(args) -> int:
    sf = _scenario_source(args)
    antenna = sf.scenario.antenna if sf else AntennaModel()
    config = _analysis_config(args, sf.analysis if sf else AnalysisConfig())
    datasets = [read_ctf(p) for p in args.inputs]
    report = analyze(datasets, antenna, config, threads=args.threads)
    files = write_report(report, args.out, svg=args.svg)
    _summary(report)
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def cmd_report(args) -> int:
    names = args.presets or sorted(PRESETS)
    datasets = []
    args.out.mkdir(parents=True, exist_ok=True)
    for name in dict.fromkeys(names):
        sf = load_scenario(name)
        t0 = time.perf_counter()
        ctf = _simulate(sf, args)
        log.info("simulated %s in %.2f s", name, time.perf_counter() - t0)
        if args.save_ctf:
            write_ctf(ctf, args.out / f"{name}.ctf")
        datasets.append(ctf)
    antenna = load_scenario(names[0]).scenario.antenna
    config = _analysis_config(args, AnalysisConfig())
    report = analyze(datasets, antenna, config, threads=args.threads)
    files = write_report(report, args.out, svg=args.svg)
    _summary(report)
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run
    results = run(seed=args.seed, compare_bounces=tuple(args.compare_bounces))
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"selftest: {len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "report": cmd_report,
            "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, FormatError, ValueError, KeyError, OSError) as exc:
        print(f"corridor-thz {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
