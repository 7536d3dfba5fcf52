"""Command-line entry point: ``optoqht {run,preset,csl-rate,validate}``."""
import argparse
import logging
import math
import sys
from pathlib import Path

from .csl import ADLER_GAMMA, R_C_DEFAULT, CslParams, csl_delta, csl_occupation
from .errors import InvalidArgumentError, NumericalError, StabilityError
from .experiments import PRESETS, TimeGrid, emit_csv, load, preset, run_scenario
from .model import MECHANICAL_QUALITY, REFERENCE, SystemParams

SEED_MAX = 2**64 - 1


def _seed(text):
    value = int(text, 0)
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _grid(text):
    try:
        return TimeGrid.parse(text)
    except (InvalidArgumentError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _sweep_args(p):
    p.add_argument("--out", type=Path, help="CSV path (default: <name>.csv in the working directory)")
    p.add_argument("--seed", type=_seed, help="64-bit seed recorded in the metadata")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads for propagation")
    p.add_argument("--grid", type=_grid, help="time grid as t_min,t_max,points,log|lin (t_max may be 'auto')")


def build_parser():
    parser = argparse.ArgumentParser(prog="optoqht", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a YAML scenario file")
    p.add_argument("config", type=Path)
    _sweep_args(p)

    p = sub.add_parser("preset", help="run a built-in figure scenario")
    p.add_argument("name", choices=sorted(PRESETS))
    _sweep_args(p)

    p = sub.add_parser("csl-rate", help="collapse-induced heating rate for a sphere")
    p.add_argument("--gamma", type=float, default=ADLER_GAMMA, help="collapse strength in m^3 Hz")
    p.add_argument("--r-c", type=float, default=R_C_DEFAULT, help="correlation length in m")
    p.add_argument("--mass", type=float, default=REFERENCE["m"], help="sphere mass in kg")
    p.add_argument("--radius", type=float, default=REFERENCE["R_sphere"], help="sphere radius in m")
    p.add_argument("--omega-m", type=float, default=REFERENCE["omega_m"], help="mechanical frequency in rad/s")
    p.add_argument("--two-pi", action="store_true", help="multiply the rate by 2 pi")

    sub.add_parser("validate", help="run the oracle and acceptance suite")
    return parser


def _run_sweep(cfg, args):
    if args.grid is not None:
        cfg = cfg.with_(time_grid=args.grid)
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    result = run_scenario(cfg, threads=args.threads)
    out = args.out or Path(f"{cfg.name}.csv")
    emit_csv(result, out, seed=cfg.seed)
    print(f"wrote {len(result.rows)} rows to {out}")
    return 0


def _csl_rate(args):
    csl = CslParams(gamma_csl=args.gamma, r_c=args.r_c, R_sphere=args.radius, m=args.mass)
    params = SystemParams(
        omega_m=args.omega_m, gamma_m=args.omega_m / MECHANICAL_QUALITY, m=args.mass, R_sphere=args.radius
    )
    delta = csl_delta(csl, args.omega_m, two_pi=args.two_pi)
    n_th = params.n_th
    print(f"delta_rads   {delta:.10g}")
    print(f"log10_delta  {math.log10(delta):.4f}")
    print(f"n_th         {n_th:.10g}")
    print(f"n_csl        {csl_occupation(n_th, delta, params.gamma_m):.10g}")
    print(f"alpha_sq     {params.alpha ** 2:.10g}")
    return 0


def _validate():
    from .validation import run_all

    results = run_all()
    failed = [r.criterion for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return _run_sweep(load(args.config), args)
        if args.command == "preset":
            return _run_sweep(preset(args.name), args)
        if args.command == "csl-rate":
            return _csl_rate(args)
        return _validate()
    except (InvalidArgumentError, StabilityError, NumericalError, FileNotFoundError) as exc:
        print(f"optoqht: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
