"""Command-line interface for the hypergeometric regulator toolkit."""

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

import config
from db.tables import find_entry
from engine.ellcurve import WeierstrassModel, curve_invariants, family_model, minimal_model
from engine.errors import ConfigError, HgregError
from engine.hyper import HGSpec, pfq
from engine.lfunc import l_value
from engine.precision import Precision, parse_rational
from engine.regulators import (
    FermatFibration,
    GaussFibration,
    fermat_reg_delta,
    fermat_reg_delta_alt,
    fermat_reg_delta_digamma,
    fermat_reg_gamma,
    gauss_index_set,
    gauss_reg,
)
from engine.verify import IDENTITY_CHECKS, REGULATORS, compute_Rt, reproduce_tables, run_identity_suite

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger("hgreg")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3

_GLOBAL_DEFAULTS = {
    "prec": None,
    "qmax": config.RECON_QMAX,
    "tol": config.RECON_TOL,
    "format": None,
    "max_terms": config.MAX_SERIES_TERMS,
    "jobs": None,
    "seed": config.DEFAULT_SEED,
    "verbose": 0,
}


def rational_arg(text: str) -> Fraction:
    """argparse type for exact rationals; decimals are refused."""
    try:
        return parse_rational(text)
    except HgregError as e:
        raise argparse.ArgumentTypeError(str(e))


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--prec", type=int, default=default, help="decimal precision P")
    parent.add_argument("--qmax", type=int, default=default, help="largest reconstruction denominator")
    parent.add_argument("--tol", type=float, default=default, help="reconstruction tolerance")
    parent.add_argument("--format", choices=config.OUTPUT_FORMATS, default=default)
    parent.add_argument("--max-terms", dest="max_terms", type=int, default=default)
    parent.add_argument("--jobs", type=int, default=default, help="worker processes for tables")
    parent.add_argument("--seed", type=int, default=default)
    parent.add_argument("-v", "--verbose", action="count", default=default)
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _global_options(suppress=True)
    parser = argparse.ArgumentParser(prog="hgreg", description=__doc__, parents=[_global_options(suppress=True)])
    commands = parser.add_subparsers(dest="command", required=True)

    hyper = commands.add_parser("hyper", help="hypergeometric evaluation").add_subparsers(dest="action", required=True)
    hyper_eval = hyper.add_parser("eval", parents=[common])
    hyper_eval.add_argument("--pfq", required=True, help='"a1,a2,..;b1,..;z"')

    reg = commands.add_parser("reg", help="regulator values").add_subparsers(dest="family", required=True)
    for family in config.FAMILIES:
        sub = reg.add_parser(family, parents=[common])
        sub.add_argument("--t", type=rational_arg, required=True)
    fermat = reg.add_parser("fermat", parents=[common])
    for name in ("n", "m", "nu1", "nu2", "eps1", "eps2"):
        fermat.add_argument(f"--{name}", type=int, required=name in ("n", "m", "nu1", "nu2"), default=0)
    fermat.add_argument("--t", type=rational_arg, required=True)
    fermat.add_argument("--cycle", choices=("delta", "gamma"), default="delta")
    fermat.add_argument("--form", choices=("table", "digamma", "alt"), default="table")
    fermat.add_argument("--i0", type=int, default=1)
    fermat.add_argument("--j0", type=int, default=1)
    gauss = reg.add_parser("gauss", parents=[common])
    for name in ("N", "a", "b", "d"):
        gauss.add_argument(f"--{name}", type=int, required=True)
    gauss.add_argument("--lambda", dest="lambdas", required=True, help='"r1,r2,.." over I_e in ascending order')
    gauss.add_argument("--t", type=rational_arg, required=True)
    gauss.add_argument("--cycle", choices=("gamma0", "gamma1"), default="gamma1")

    curve = commands.add_parser("curve", help="elliptic curve data").add_subparsers(dest="action", required=True)
    info = curve.add_parser("info", parents=[common])
    _add_curve_source(info)

    lvalue = commands.add_parser("lvalue", parents=[common], help="L(E, 2)")
    _add_curve_source(lvalue)

    table = commands.add_parser("table", parents=[common], help="reproduce golden tables")
    table.add_argument("which", choices=config.FAMILIES + ("all",))

    verify = commands.add_parser("verify", help="verification").add_subparsers(dest="action", required=True)
    identities = verify.add_parser("identities", parents=[common])
    identities.add_argument("--count", type=int, default=config.DEFAULT_IDENTITY_COUNT, help="instances per check kind")
    identities.add_argument(
        "--kind", dest="kinds", action="append", choices=list(IDENTITY_CHECKS), help="run only this check kind (repeatable)"
    )
    beilinson = verify.add_parser("beilinson", parents=[common])
    beilinson.add_argument("--family", choices=config.FAMILIES, required=True)
    beilinson.add_argument("--t", type=rational_arg, required=True)
    beilinson.add_argument("--allow-nonintegral", action="store_true")
    return parser


def _add_curve_source(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--family", choices=config.FAMILIES)
    sub.add_argument("--t", type=rational_arg)
    sub.add_argument("--model", help="a1,a2,a3,a4,a6 as exact rationals")


def _curve_from_args(args) -> WeierstrassModel:
    if args.model:
        try:
            return WeierstrassModel.from_ainvs([parse_rational(x) for x in args.model.split(",")])
        except HgregError as e:
            raise ConfigError(f"bad --model: {e}")
    if args.family is None or args.t is None:
        raise ConfigError("give either --family and --t, or --model")
    return family_model(args.family, args.t)


def _parse_pfq(text: str):
    parts = text.split(";")
    if len(parts) != 3:
        raise ConfigError(f'--pfq must look like "a1,a2;b1;z", got {text!r}')
    try:
        upper = [parse_rational(x) for x in parts[0].split(",") if x.strip()]
        lower = [parse_rational(x) for x in parts[1].split(",") if x.strip()]
        z = parse_rational(parts[2])
    except HgregError as e:
        raise ConfigError(f"bad --pfq: {e}")
    return HGSpec(tuple(upper), tuple(lower), z)


# --- Output ----------------------------------------------------------------

def emit(records: List[Dict], fmt: str, title: str = "") -> None:
    """Write records as JSON, CSV or a rich table."""
    if fmt == "json":
        print(json.dumps(records if len(records) != 1 else records[0], indent=2))
        return
    if fmt == "csv":
        fields = []
        for record in records:
            fields.extend(k for k in record if k not in fields)
        writer = csv.DictWriter(sys.stdout, fieldnames=fields)
        writer.writeheader()
        writer.writerows(records)
        return
    if len(records) == 1:
        body = "\n".join(f"[bold cyan]{k}[/]: {v}" for k, v in records[0].items())
        console.print(Panel(body, title=title, box=box.ROUNDED))
        return
    table = Table(title=title, box=box.ROUNDED)
    columns = list(records[0]) if records else []
    for column in columns:
        table.add_column(column)
    for record in records:
        table.add_row(*(str(record.get(c, "")) for c in columns))
    console.print(table)


def _value_record(prec: Precision, value) -> Dict:
    ctx = prec.ctx
    if ctx.im(value) == 0:
        return {"value": prec.report(ctx.re(value))}
    return {"re": prec.report(ctx.re(value)), "im": prec.report(ctx.im(value))}


# --- Commands --------------------------------------------------------------

def cmd_hyper(args, prec: Precision) -> int:
    spec = _parse_pfq(args.pfq)
    emit([_value_record(prec, pfq(spec, prec))], args.format, "pFq")
    return EXIT_OK


def cmd_reg(args, prec: Precision) -> int:
    if args.family in REGULATORS:
        value = REGULATORS[args.family](args.t, prec)
        record = {"family": args.family, "t": str(args.t), **_value_record(prec, value)}
        emit([record], args.format, "regulator")
        return EXIT_OK

    if args.family == "fermat":
        fib = FermatFibration(args.n, args.m, args.nu1, args.nu2, args.eps1, args.eps2)
        if args.cycle == "gamma":
            result = fermat_reg_gamma(fib, (args.i0, args.j0), args.t, prec)
        else:
            evaluate = {"table": fermat_reg_delta, "digamma": fermat_reg_delta_digamma, "alt": fermat_reg_delta_alt}
            result = evaluate[args.form](fib, args.t, prec)
    else:
        values = [parse_rational(x) for x in args.lambdas.split(",") if x.strip()]
        index_set = gauss_index_set(args.N, args.d)
        if len(values) != len(index_set):
            raise ConfigError(f"--lambda needs {len(index_set)} values for I_e = {list(index_set)}")
        fib = GaussFibration(args.N, args.a, args.b, args.d, dict(zip(index_set, values)))
        result = gauss_reg(fib, args.t, args.cycle, prec)

    record = {"t": str(args.t), **_value_record(prec, result.value), "ambiguity": result.ambiguity.value}
    if result.branch_note:
        record["note"] = result.branch_note
    emit([record], args.format, f"{args.family} regulator")
    return EXIT_OK


def cmd_curve(args, prec: Precision) -> int:
    model = _curve_from_args(args)
    info = curve_invariants(model)
    minimal = minimal_model(model)
    record = {
        "minimal_model": str(minimal),
        "c4": str(info.c4),
        "c6": str(info.c6),
        "discriminant": str(info.discriminant),
        "j": str(info.j),
        "conductor": info.conductor,
    }
    local = [
        {"p": d.p, "kodaira": d.kodaira, "f_p": d.f_p, "reduction": d.reduction, "c_p": d.c_p}
        for d in info.local_data.values()
    ]
    if args.format == "text":
        emit([record], "text", "curve")
        emit(local, "text", "local data")
    else:
        record["local_data"] = local
        if args.format == "csv":
            record["local_data"] = json.dumps(local)
        emit([record], args.format)
    return EXIT_OK


def cmd_lvalue(args, prec: Precision) -> int:
    value, level, eps = l_value(_curve_from_args(args), prec)
    emit([{"L(E,2)": prec.report(value), "conductor": level, "root_number": eps}], args.format, "L-value")
    return EXIT_OK


def cmd_table(args, prec: Precision) -> int:
    families = config.FAMILIES if args.which == "all" else (args.which,)
    rows = reproduce_tables(
        prec, families=families, jobs=args.jobs, progress=args.format == "text", qmax=args.qmax, tol=args.tol
    )
    emit(rows, args.format, "R_t")
    return EXIT_OK if all(row["status"] == "match" for row in rows) else EXIT_MISMATCH


def cmd_verify(args, prec: Precision) -> int:
    if args.action == "identities":
        report = run_identity_suite(args.seed, args.count, prec, progress=args.format == "text", kinds=args.kinds)
        if args.format == "json":
            print(json.dumps(report.to_dict(), indent=2))
        else:
            rows = [
                {"check": c.name, "residual": f"{c.residual:.3e}", "tolerance": f"{c.tolerance:.1e}", "passed": c.passed}
                for c in report.checks
            ]
            emit(rows or [{"checks": 0, "passed": True}], args.format, "identities")
        return EXIT_OK if report.passed else EXIT_MISMATCH

    result = compute_Rt(args.family, args.t, prec, args.allow_nonintegral, args.qmax, args.tol)
    entry = find_entry(args.family, args.t)
    record = {
        "family": args.family,
        "t": str(args.t),
        "R_decimal": prec.report(result.R_decimal),
        "R_rational": None if result.R_rational is None else str(result.R_rational),
        "expected": None if entry is None else str(entry.expected_R),
        "conductor": result.conductor,
        "root_number": result.root_number,
    }
    emit([record], args.format, "R_t")
    if result.R_rational is None:
        return EXIT_MISMATCH
    if entry is not None and entry.expected_R != result.R_rational:
        return EXIT_MISMATCH
    return EXIT_OK


COMMANDS = {
    "hyper": cmd_hyper,
    "reg": cmd_reg,
    "curve": cmd_curve,
    "lvalue": cmd_lvalue,
    "table": cmd_table,
    "verify": cmd_verify,
}


def setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    for name, default in _GLOBAL_DEFAULTS.items():
        if getattr(args, name, None) is None:
            setattr(args, name, default)
    if args.format is None:
        args.format = config.REPORT_OUTPUT_FORMAT if args.command in config.REPORT_COMMANDS else config.DEFAULT_OUTPUT_FORMAT
    setup_logging(args.verbose)

    try:
        settings = config.Settings.from_env(
            precision=args.prec,
            max_series_terms=args.max_terms,
            qmax=args.qmax,
            recon_tol=args.tol,
            output=args.format,
            seed=args.seed,
            jobs=args.jobs,
        )
        prec = Precision(settings.precision, max_terms=settings.max_series_terms)
        return COMMANDS[args.command](args, prec)
    except ConfigError as e:
        err_console.print(f"[red]Usage error: {e}[/red]")
        return EXIT_USAGE
    except HgregError as e:
        err_console.print(f"[red]{type(e).__name__}: {e}[/red]")
        return EXIT_ERROR
    except KeyboardInterrupt:
        err_console.print("\n[yellow]Interrupted by user.[/yellow]")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
