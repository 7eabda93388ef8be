"""Command-line entry point.

Exit status is 0 on success, 1 for invalid arguments or configuration and
2 when a computation fails numerically.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds
from .errors import InvalidInputError, NotSolvableError, NumericError, ResourceLimitError
from .rate import alpha_mmse, computation_rate, quad_form, rate_upper_bound
from .scheduler import choose_k, schedule_slot
from .search import best_coeff
from .sim.config import EXPERIMENTS, load_config, make_config
from .sim.experiments import run_experiment
from .sim.output import rows_to_csv, write_csv
from .sim.rng import sample_channel, stream

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> np.ndarray:
    try:
        return np.array([int(x) for x in text.split(",") if x.strip()], dtype=np.int64)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _fmt(v) -> str:
    if isinstance(v, np.ndarray):
        return "(" + ",".join(str(int(x)) for x in v) + ")"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _emit(pairs) -> None:
    for key, value in pairs:
        print(f"{key}={_fmt(value)}")


def _channel(args) -> np.ndarray:
    if args.h is not None:
        return args.h
    if args.users is None:
        raise InvalidInputError("give either --h or --users")
    return sample_channel(args.users, stream(args.seed or 0))


def _cmd_rate(args):
    h = _channel(args)
    if args.a is None:
        raise InvalidInputError("--a is required")
    _emit(
        [
            ("rate", computation_rate(h, args.a, args.power)),
            ("f", quad_form(h, args.power, args.a)),
            ("alpha", alpha_mmse(h, args.a, args.power)),
            ("rate_upper_bound", rate_upper_bound(h, args.power)),
        ]
    )


def _cmd_search(args):
    h = _channel(args)
    r = best_coeff(h, args.power)
    _emit([("best", r.best), ("rate", r.rate), ("f", r.f_value), ("is_unit", int(r.is_unit))])


def _cmd_schedule(args):
    h = _channel(args)
    k = args.k if args.k is not None else choose_k(h.size)
    s = schedule_slot(h, k, args.power)
    _emit([("users", np.array(s.users)), ("coeff", s.coeff), ("rate", s.rate)])


def _cmd_bounds(args):
    L, P = args.users, args.power
    if L is None:
        raise InvalidInputError("--users is required")
    out = []

    def attempt(name, fn, *a):
        try:
            out.append((name, fn(*a)))
        except InvalidInputError as exc:
            out.append((name, f"undefined ({exc})"))

    attempt("k", choose_k, L)
    for n2 in (2, 3, 6):
        attempt(f"unit_pref_bound_beta[norm2={n2}]", bounds.unit_pref_bound_beta, n2, L)
        attempt(f"unit_pref_bound_exp[norm2={n2}]", bounds.unit_pref_bound_exp, n2, L)
    attempt("u_delta", bounds.u_delta, L)
    attempt("rate_lb", bounds.rate_lb_theorem5, L, P)
    attempt("sumrate_ub", bounds.sumrate_ub_theorem7, L, P)
    for key, value in out:
        if isinstance(value, tuple):
            value = ",".join("%.17g" % x for x in value)
        print(f"{key}={_fmt(value)}")
    for key, note in bounds.BOUND_NOTES.items():
        print(f"# {key}: {note}")


def _cmd_experiment(args):
    file_values = load_config(args.config) if args.config else {}
    cfg = make_config(
        args.name,
        file_values,
        L_grid=args.users_grid,
        M_grid=args.relays,
        P_grid=args.power_grid,
        k_override=args.k,
        trials=args.trials,
        seed=args.seed,
        out_path=args.out,
        workers=args.workers,
        rate=args.rate,
        exhaustive_trials=args.exhaustive_trials,
    )
    rows = run_experiment(cfg)
    if cfg.out_path:
        write_csv(rows, cfg.out_path)
    else:
        sys.stdout.write(rows_to_csv(rows))


def _grid(kind):
    from .sim.config import parse_grid

    def conv(text):
        try:
            return parse_grid(text, kind)
        except InvalidInputError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return conv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cfsched", description="Compute-and-forward rates, scheduling and experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def channel_args(sp, need_a=False):
        sp.add_argument("--h", type=_floats, help="channel gains, comma separated")
        sp.add_argument("-L", "--users", type=int, help="draw a standard normal channel of this length")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-P", "--power", type=float, default=10.0)
        if need_a:
            sp.add_argument("--a", type=_ints, help="integer coefficients, comma separated")

    channel_args(sub.add_parser("rate", help="computation rate of a given coefficient vector"), need_a=True)
    channel_args(sub.add_parser("search", help="rate-maximising coefficient vector"))
    sp = sub.add_parser("schedule", help="best window schedule for one slot")
    channel_args(sp)
    sp.add_argument("--k", type=int)

    sp = sub.add_parser("bounds", help="closed-form bounds at given L and P")
    sp.add_argument("-L", "--users", type=int)
    sp.add_argument("-P", "--power", type=float, default=1000.0)

    sp = sub.add_parser("experiment", help="run a Monte Carlo experiment and write CSV")
    sp.add_argument("name", choices=EXPERIMENTS)
    sp.add_argument("--config", help="key=value configuration file")
    sp.add_argument("-L", "--users", dest="users_grid", type=_grid(int), help="L grid, e.g. 4:40 or 20,50")
    sp.add_argument("-M", "--relays", type=_grid(int), help="relay count(s)")
    sp.add_argument("-P", "--power", dest="power_grid", type=_grid(float), help="power grid")
    sp.add_argument("--k", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--rate", type=float, help="target rate for sessions and outage")
    sp.add_argument("--exhaustive-trials", type=int, help="sessions that also get the exhaustive search")
    return p


_COMMANDS = {
    "rate": _cmd_rate,
    "search": _cmd_search,
    "schedule": _cmd_schedule,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"cfsched: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, NotSolvableError, ResourceLimitError, ArithmeticError, FloatingPointError) as exc:
        print(f"cfsched: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
