"""
Command line interface: ``outerlab <command> [options]``.

Usage:
    outerlab eval --family power --param beta=0.5 --point 0.9 --point 0.5+0.5j
    outerlab oscillation --family power --param beta=0.5 --out runs/b
    outerlab fit runs/b/profile.csv
    outerlab verify --scenario "scenario b[tag:B][beta:0.5][alpha:0.5]"
    outerlab suite --seed 7 --threads 4 --out runs/default
    outerlab kernel-check -n 2 --radius 2^-6,2^-8 --j 1,2
    outerlab slice-check -n 2 --family power --param beta=0.5

Exit codes: 0 when every verdict is consistent or inconclusive, 1 on a violation,
2 on a runtime error and 3 on a configuration error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..boundary import ModulusProfile, list_families, make_modulus, slice_constant
from ..config import DEFAULTS, coerce_value
from ..errors import ConfigError, OuterLabError, ScenarioError
from ..kernels import NORMALIZATIONS, kernel_diff_bound_check
from ..oscillation import fit_loglog, oscillation_profile
from ..outer import BallOuterEvaluator, DiscOuterEvaluator, ball_outer_from_lift
from ..sphere import NonisotropicBall, SeededSampler, SpherePoint
from . import run_scenario
from .report import write_reports
from .scenario import parse_scenario
from .suite import SuiteResult, load_suite, run_suite

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ["radius", "nu", "standard_error", "pivot_re", "pivot_im", "count"]
EXIT_CONFIG = 3
EXIT_RUNTIME = 2


def _pandas():
    try:
        import pandas as pd
    except ImportError:
        raise ImportError("pandas is required for the command line tables. Install with: pip install pandas")
    return pd


# --- ARGUMENT HELPERS ---

def _params(items: Sequence[str]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key.strip()] = coerce_value(value)
    return params


def _floats(raw: str) -> List[float]:
    value = coerce_value(raw)
    items = value if isinstance(value, tuple) else (value,)
    try:
        return [float(v) for v in items]
    except (TypeError, ValueError):
        raise ConfigError(f"expected numbers, got {raw!r}") from None


def _point(raw: str, n: int) -> np.ndarray:
    try:
        coords = np.array([complex(part.strip()) for part in raw.split(",")], dtype=complex)
    except ValueError:
        raise ConfigError(f"bad point {raw!r}; use comma separated complex numbers like 0.5+0.1j") from None
    if coords.size != n:
        raise ConfigError(f"point {raw!r} has {coords.size} coordinate(s), expected n={n}")
    return coords


def _profile(args) -> ModulusProfile:
    return make_modulus(args.family, _params(args.param), n=args.n)


def _outer_function(profile: ModulusProfile, args) -> Callable[[np.ndarray], np.ndarray]:
    if profile.dimension == 1:
        return DiscOuterEvaluator(profile)
    if profile.is_lift and args.evaluator != "mc":
        return ball_outer_from_lift(profile)
    if args.evaluator == "lift":
        raise ConfigError(f"profile '{profile.name}' is not a lift")
    return BallOuterEvaluator(profile, mc_count=args.mc_count, sampler=SeededSampler(args.seed).spawn(2))


def _emit(rows: List[Dict[str, Any]], args, filename: str, columns: List[str] = None) -> None:
    """Write a table as CSV or JSON, to ``--out/filename`` or stdout."""
    pd = _pandas()
    frame = pd.DataFrame(rows, columns=columns)
    if args.format == "json":
        text = frame.to_json(orient="records", indent=2) + "\n"
    else:
        text = frame.to_csv(index=False, float_format=f"%.{DEFAULTS.float_digits}g")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = filename.rsplit(".", 1)[0]
        path = out / f"{stem}.{args.format}"
        path.write_text(text, encoding="utf-8")
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(text)


# --- COMMANDS ---

def cmd_eval(args) -> int:
    profile = _profile(args)
    function = _outer_function(profile, args)
    rows = []
    for raw in args.point:
        value = complex(function(_point(raw, args.n)[np.newaxis, :])[0])
        rows.append({"point": raw, "re": value.real, "im": value.imag, "modulus": abs(value)})
    _emit(rows, args, "eval.csv")
    return 0


def cmd_oscillation(args) -> int:
    profile = _profile(args)
    function = _outer_function(profile, args)
    count = args.count if args.count == "auto" else int(args.count)
    radii = _floats(args.radii) if args.radii else list(DEFAULTS.default_radii)
    estimates = oscillation_profile(function, SpherePoint.one(args.n), radii, count,
                                    SeededSampler(args.seed).spawn(1), threads=args.threads)
    rows = [{"radius": e.radius, "nu": e.nu, "standard_error": e.standard_error,
             "pivot_re": e.pivot.real, "pivot_im": e.pivot.imag, "count": e.sample_count}
            for e in estimates]
    _emit(rows, args, "profile.csv", PROFILE_COLUMNS)
    return 0


def cmd_fit(args) -> int:
    pd = _pandas()
    try:
        frame = pd.read_csv(args.profile)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read profile {args.profile}: {exc}") from exc
    missing = {"radius", "nu", "standard_error"} - set(frame.columns)
    if missing:
        raise ConfigError(f"profile {args.profile} lacks column(s): {', '.join(sorted(missing))}")
    fit = fit_loglog(frame["radius"], frame["nu"], frame["standard_error"], weighted=args.weighted)
    row = {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
           "halfwidth": fit.confidence_halfwidth, "scales": len(fit.radii),
           "dropped": len(fit.dropped)}
    _emit([row], args, "fit.csv")
    return 0


def cmd_verify(args) -> int:
    if (args.scenario is None) == (args.config is None):
        raise ConfigError("verify needs exactly one of --scenario or --config")
    if args.scenario is not None:
        scenario = parse_scenario(args.scenario)
    else:
        _, scenarios = load_suite(args.config)
        chosen = [s for s in scenarios if args.name in (None, s.name)]
        if len(chosen) != 1:
            raise ConfigError(f"--name must pick one of: {', '.join(s.name for s in scenarios)}")
        scenario = chosen[0]
    if args.seed is not None:
        scenario.seed = args.seed
    report = run_scenario(scenario)
    result = SuiteResult([report])
    if args.format == "json":
        text = report.to_json() + "\n"
    else:
        text = result.summary
    if args.out:
        write_reports([report], args.out)
    sys.stdout.write(text)
    return result.exit_code


def cmd_suite(args) -> int:
    from ..data import get_config_path

    config = args.config or get_config_path("default_suite.cfg")
    result = run_suite(config=config, seed=args.seed, threads=args.threads, out_dir=args.out)
    if args.format == "json":
        sys.stdout.write(json.dumps([r.summary_row() for r in result.reports], indent=2) + "\n")
    else:
        sys.stdout.write(result.summary)
    return result.exit_code


def cmd_kernel_check(args) -> int:
    if args.normalization not in NORMALIZATIONS:
        raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
    sampler = SeededSampler(args.seed)
    centre = SpherePoint.one(args.n)
    rows = []
    for i, radius in enumerate(_floats(args.radius)):
        for j in (int(v) for v in _floats(args.j)):
            constant = kernel_diff_bound_check(NonisotropicBall(centre, radius), j, args.count,
                                               sampler.spawn(i, j), args.normalization)
            rows.append({"radius": radius, "j": j, "constant": constant,
                         "normalization": args.normalization})
    _emit(rows, args, "kernel.csv")
    return 0


def cmd_slice_check(args) -> int:
    profile = _profile(args)
    slices = slice_constant(profile, directions=args.directions, angles=args.angles,
                            sampler=SeededSampler(args.seed).spawn(4))
    worst = ",".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in slices.worst_direction.coords)
    _emit([{"family": profile.name, "n": args.n, "B_0": slices.value,
            "error_estimate": slices.error_estimate, "worst_direction": worst,
            "refined_nodes": slices.clamped_nodes}], args, "slice.csv")
    return 0


# --- PARSER ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default 0; suite keeps scenario seeds)")
    common.add_argument("--out", default=None, metavar="DIR", help="write results into DIR")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    profile = argparse.ArgumentParser(add_help=False)
    profile.add_argument("--family", default="power", help=f"one of: {', '.join(list_families())}")
    profile.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    profile.add_argument("-n", type=int, default=1, help="complex dimension")
    profile.add_argument("--evaluator", choices=("auto", "lift", "mc"), default="auto")
    profile.add_argument("--mc-count", type=int, default=DEFAULTS.ball_mc_count)

    parser = argparse.ArgumentParser(
        prog="outerlab",
        description="Numerical checks of smoothness for outer functions on the disc and the ball",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common, profile], help="evaluate an outer function at points")
    p.add_argument("--point", action="append", required=True, help="comma separated coordinates")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("oscillation", parents=[common, profile], help="mean oscillation profile at 1")
    p.add_argument("--radii", default=None, help="dyadic grid such as 2^-3..2^-12 (default)")
    p.add_argument("--count", default="auto")
    p.set_defaults(handler=cmd_oscillation)

    p = sub.add_parser("fit", parents=[common], help="exponent fit of a profile file")
    p.add_argument("profile", help="CSV with radius, nu and standard_error columns")
    p.add_argument("--weighted", action="store_true")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("verify", parents=[common], help="run one scenario")
    p.add_argument("--scenario", default=None, help="scenario line, e.g. 'scenario b[tag:B][alpha:0.5]'")
    p.add_argument("--config", default=None, metavar="PATH")
    p.add_argument("--name", default=None, help="scenario of --config to run")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("suite", parents=[common], help="run a suite config")
    p.add_argument("--config", default=None, metavar="PATH", help="defaults to the shipped suite")
    p.set_defaults(handler=cmd_suite)

    p = sub.add_parser("kernel-check", parents=[common], help="normalized kernel differences")
    p.add_argument("-n", type=int, default=2)
    p.add_argument("--radius", default="2^-6,2^-8")
    p.add_argument("--j", default="1,2,3")
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--normalization", default="lemma")
    p.set_defaults(handler=cmd_kernel_check)

    p = sub.add_parser("slice-check", parents=[common, profile], help="empirical slice constant B_0")
    p.add_argument("--directions", type=int, default=DEFAULTS.slice_directions)
    p.add_argument("--angles", type=int, default=DEFAULTS.slice_angles)
    p.set_defaults(handler=cmd_slice_check)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    if args.command != "suite" and args.seed is None:
        args.seed = 0 if args.command != "verify" else None
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_RUNTIME
    except OuterLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
