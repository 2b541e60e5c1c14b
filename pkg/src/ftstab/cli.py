"""Command-line entry point: ``ftstab run|sweep|validate|oracle``.

Exit codes: 0 all bounds satisfied, 2 a bound or check violated,
3 configuration or gain error, 4 numerical failure.
"""

import argparse
import json
import logging
import sys

from .errors import ConfigurationError, NumericalError
from .oracles import format_result, run_oracles
from .scenarios import OUT_DIR_ENV, parse_config, run_scenario, sweep_initial_conditions, validate_scenario

log = logging.getLogger("ftstab")

EXIT_OK = 0
EXIT_BOUND = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4


def _add_overrides(p):
    p.add_argument("config", help="JSON scenario file")
    p.add_argument("--h", type=float, help="time step")
    p.add_argument("--n", type=int, help="interior grid points")
    p.add_argument("--tmax", type=float, help="horizon")
    p.add_argument("--scheme", choices=["prox_splitting", "explicit_regularized"])
    p.add_argument("--out-dir", help=f"output directory (${OUT_DIR_ENV} takes precedence)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftstab", description="Finite/fixed-time stabilization of the controlled heat equation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one scenario and write time series, snapshots and report")
    _add_overrides(p)

    p = sub.add_parser("sweep", help="settling-time table over initial conditions")
    _add_overrides(p)
    p.add_argument("--y0", nargs="*", default=["sin_pi_x", "sin_2pi_x", "x_times_1mx", "gauss_bump"])
    p.add_argument("--scales", nargs="+", type=float, default=[1.0])
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("validate", help="gain and assumption checks only")
    _add_overrides(p)

    p = sub.add_parser("oracle", help="analytic scalar and prox checks")
    p.add_argument("--h", type=float, nargs="+", default=[1e-3, 1e-4])
    return parser


def _load(args):
    cfg = parse_config(args.config)
    scheme = {}
    if args.h is not None:
        scheme["h"] = args.h
    if args.tmax is not None:
        scheme["t_max"] = args.tmax
    if args.scheme is not None:
        scheme["name"] = args.scheme
    changes = {"scheme": scheme} if scheme else {}
    if args.n is not None:
        changes["grid"] = {"n": args.n, "modes": min(cfg.grid.modes, args.n)}
    return cfg.replace(**changes) if changes else cfg


def _cmd_run(args):
    cfg = _load(args)
    out = run_scenario(cfg, out_dir=args.out_dir)
    st = out.settling
    print(f"t_settle = {st.t_settle}")
    for name, value in st.bounds:
        print(f"bound {name} = {value:.6g}")
    ineq = out.inequality
    print(f"inequality worst violation = {ineq.worst_violation:.3e} (tol {ineq.tolerance:.1e})")
    print(f"report: {out.report_path}")
    return EXIT_OK if st.passed and ineq.passed else EXIT_BOUND


def _cmd_sweep(args):
    cfg = _load(args)
    rows, path = sweep_initial_conditions(cfg, args.y0, args.scales, jobs=args.jobs, out_dir=args.out_dir)
    for r in rows:
        ts = "not settled" if r.t_settle is None else f"{r.t_settle:.6g}"
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.y0} x{r.scale:g}: ||y0|| = {r.norm_y0:.6g}, t_settle = {ts}, uniform bound = {r.uniform_bound:.6g}")
        if r.error:
            print(f"      {r.error}")
    if path is not None:
        print(f"table: {path}")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_BOUND


def _cmd_validate(args):
    info = validate_scenario(_load(args))
    print(json.dumps(info, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_oracle(args):
    results = run_oracles(tuple(args.h))
    for r in results:
        print(format_result(r))
    return EXIT_OK if all(r.passed for r in results) else EXIT_BOUND


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "validate": _cmd_validate, "oracle": _cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    where = getattr(args, "config", None)
    prefix = f"{where}: " if where else ""
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {prefix}{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {prefix}{exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, ArithmeticError) as exc:
        # model/dimension errors from library calls
        print(f"error: {prefix}{exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ValueError) else EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
