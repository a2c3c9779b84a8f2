"""Command-line entry point.

Subcommands: ``driver``, ``sample``, ``discrepancy``, ``criterion``,
``integrate``, ``experiment``.  Payloads go to stdout (CSV or JSON); errors
print one ``error: ...`` line to stderr.  Exit codes: 0 ok, 1 usage error,
2 domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as qio
from .criterion import DEFAULT_COST_CAP, default_R_for_fibonacci, qr_fibonacci, qr_general
from .density import from_config
from .discrepancy import EXACT_2D_MAX_POINTS, grid_oracle_1d, star_discrepancy_1d, star_discrepancy_2d_uniform
from .driver import FAMILIES, FIB_K_MAX, FIB_K_MIN, DriverSet, make_driver
from .errors import DomainError
from .experiments import ExperimentError, load_config, report_to_dict, reproduce_figures, run_convergence
from .integration import BUILTIN_INTEGRANDS, get_integrand, integration_report
from .sampler import SampleSet, ar_deterministic

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_driver_flags(p, required=True):
    p.add_argument("--family", choices=FAMILIES, required=required)
    p.add_argument("--k", type=int, help="Fibonacci index (fibonacci family)")
    p.add_argument("--m", type=int, help="number of points M (other families)")
    p.add_argument("--seed", type=int, help="seed (random family)")


def _driver_from_args(args) -> DriverSet:
    if args.family == "fibonacci":
        if args.k is None:
            raise UsageError("--family fibonacci requires --k")
        if not FIB_K_MIN <= args.k <= FIB_K_MAX:
            raise DomainError(f"--k must lie in [{FIB_K_MIN}, {FIB_K_MAX}]")
        return make_driver("fibonacci", args.k)
    if args.m is None:
        raise UsageError(f"--family {args.family} requires --m")
    if args.m < 1:
        raise DomainError("--m must be at least 1")
    if args.family == "random" and args.seed is None:
        raise UsageError("--family random requires --seed")
    return make_driver(args.family, args.m, args.seed)


def _load_density(spec: str, bound=None):
    if spec.endswith(".json"):
        with open(spec, encoding="utf-8") as fh:
            cfg = json.load(fh)
    else:
        cfg = spec
    d = from_config(cfg)
    if bound is not None:
        if not bound > 0:
            raise DomainError("--L must be positive")
        d = d.with_bound(bound)
    return d


def _emit(text: str, out=None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_driver(args):
    drivers = _driver_from_args(args)
    _emit(qio.driver_to_csv(drivers, args.hex), args.out)


def cmd_sample(args):
    d = _load_density(args.density, args.L)
    s = ar_deterministic(d, _driver_from_args(args))
    text = qio.write_csv(([y] for y in s.samples), ["y"], args.hex)
    sidecar = {
        "M": s.M_proposed,
        "N": s.N_accepted,
        "L": s.L_used,
        "C": d.norm,
        "rate": s.rate,
        "density": d.name,
        "family": args.family,
    }
    _emit(text, args.out)
    side_path = args.sidecar or (str(Path(args.out).with_suffix(".json")) if args.out else None)
    if side_path:
        Path(side_path).write_text(qio.dumps_json(sidecar), encoding="utf-8", newline="\n")


def _samples_for(args, d):
    if args.input:
        return qio.read_samples_csv(Path(args.input).read_text(encoding="utf-8"))
    if args.family is None:
        raise UsageError("give --input or driver flags (--family ...)")
    return ar_deterministic(d, _driver_from_args(args))


def cmd_discrepancy(args):
    if args.mode == "2d":
        if args.input:
            pts = qio.read_points_csv(Path(args.input).read_text(encoding="utf-8"))
        elif args.family:
            pts = _driver_from_args(args).points
        else:
            raise UsageError("--mode 2d needs --input or driver flags")
        res = star_discrepancy_2d_uniform(pts, args.max_points)
    else:
        if not args.density:
            raise UsageError(f"--mode {args.mode} requires --density")
        d = _load_density(args.density, args.L)
        samples = _samples_for(args, d)
        if args.mode == "1d":
            res = star_discrepancy_1d(d, samples)
        else:
            if args.grid < 1000:
                raise DomainError("--grid must be at least 1000")
            res = grid_oracle_1d(d, samples, args.grid)
    _emit(qio.dumps_json(res.to_dict()))


def cmd_criterion(args):
    if args.R is not None and args.R != "auto":
        try:
            R = int(args.R)
        except ValueError:
            raise UsageError("--R must be an integer or 'auto'") from None
        if R < 2:
            raise DomainError("--R must be at least 2")
    else:
        R = None
    if args.input:
        if R is None:
            raise UsageError("--input requires an explicit --R")
        pts = qio.read_points_csv(Path(args.input).read_text(encoding="utf-8"))
        res = qr_general(pts, R, args.cost_cap)
    elif args.family == "fibonacci":
        drivers = _driver_from_args(args)
        R = default_R_for_fibonacci(args.k) if R is None else R
        res = qr_general(drivers, R, args.cost_cap) if args.general else qr_fibonacci(args.k, R)
    elif args.family:
        if R is None:
            raise UsageError(f"--family {args.family} requires an explicit --R")
        res = qr_general(_driver_from_args(args), R, args.cost_cap)
    else:
        raise UsageError("give --family or --input")
    _emit(qio.dumps_json(res.to_dict()))


def cmd_integrate(args):
    f = get_integrand(args.f)
    d = _load_density(args.density, args.L)
    s: SampleSet = ar_deterministic(d, _driver_from_args(args))
    dstar = star_discrepancy_1d(d, s).value if s.N_accepted else None
    rep = integration_report(f, d, s, dstar)
    _emit(qio.dumps_json(rep.to_dict()))


def cmd_experiment(args):
    out = Path(args.out)
    if args.figures:
        summary = reproduce_figures(out)
        _emit(qio.dumps_json({k: {f: v["series"][f]["slope"] for f in v["series"]} for k, v in summary.items()}))
        return
    if not args.config:
        raise UsageError("give --config or --figures")
    cfg = load_config(args.config)
    rep = run_convergence(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(rep.to_csv(), encoding="utf-8", newline="\n")
    (out / "report.json").write_text(qio.dumps_json(report_to_dict(rep)), encoding="utf-8", newline="\n")
    _emit(qio.dumps_json(rep.summary()))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qmcar", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    q = sub.add_parser("driver", help="emit a driver point set as CSV j,x1,x2")
    _add_driver_flags(q)
    q.add_argument("--hex", action="store_true", help="write reals as hex floats")
    q.add_argument("--out", help="output file (default stdout)")
    q.set_defaults(func=cmd_driver)

    q = sub.add_parser("sample", help="deterministic acceptance-rejection samples")
    q.add_argument("--density", required=True, help="built-in name or JSON config path")
    _add_driver_flags(q)
    q.add_argument("--L", type=float, help="override the density bound")
    q.add_argument("--hex", action="store_true")
    q.add_argument("--out", help="sample CSV path (sidecar defaults to the same stem .json)")
    q.add_argument("--sidecar", help="JSON sidecar path")
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("discrepancy", help="star-discrepancy as JSON")
    q.add_argument("--mode", choices=("1d", "2d", "oracle"), required=True)
    q.add_argument("--density")
    q.add_argument("--input", help="sample CSV (1d/oracle) or point CSV (2d)")
    _add_driver_flags(q, required=False)
    q.add_argument("--L", type=float)
    q.add_argument("--grid", type=int, default=100_000, help="oracle grid size")
    q.add_argument("--max-points", type=int, default=EXACT_2D_MAX_POINTS)
    q.set_defaults(func=cmd_discrepancy)

    q = sub.add_parser("criterion", help="driver quality criterion Q_R as JSON")
    _add_driver_flags(q, required=False)
    q.add_argument("--input", help="point CSV")
    q.add_argument("--R", default=None, help="integer or 'auto' (fibonacci only)")
    q.add_argument("--general", action="store_true", help="force the general path for fibonacci")
    q.add_argument("--cost-cap", type=float, default=DEFAULT_COST_CAP)
    q.set_defaults(func=cmd_criterion)

    q = sub.add_parser("integrate", help="QMC integration error report as JSON")
    q.add_argument("--f", required=True, help=f"integrand: {', '.join(BUILTIN_INTEGRANDS)}")
    q.add_argument("--density", required=True)
    _add_driver_flags(q)
    q.add_argument("--L", type=float)
    q.set_defaults(func=cmd_integrate)

    q = sub.add_parser("experiment", help="convergence sweep from a JSON config")
    q.add_argument("--config", help="ExperimentConfig JSON")
    q.add_argument("--figures", action="store_true", help="reproduce both convergence figures")
    q.add_argument("--out", required=True, help="output directory")
    q.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_IO
    except (DomainError, ExperimentError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}".replace("\n", " "), file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
