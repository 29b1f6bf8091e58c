"""Command-line front end: ``ecfnorm test``, ``ecfnorm critvals`` and ``ecfnorm power``.

Exit status is 0 on success, 2 for usage and configuration errors, 3 for data
errors and 4 for table lookup or provenance errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .alternatives import AlternativeSpec
from .errors import ConfigError, DataError, EcfError, ParseError, TableLookupError
from .nullsim import (
    CriticalValueTable,
    NullSimConfig,
    check_provenance,
    decide,
    null_statistics,
    order_statistic_rank,
    p_value,
    simulate_null,
)
from .numerics import CIRCLE_TRAPEZOID, standardize
from .power import SUITE_SIZES, SUITES, PowerStudyConfig, run_suite
from .statistic import M1_MAX_N, QuadratureConfig, m1_exact, m_stat

log = logging.getLogger("ecfnorm")

REPORT_SCHEMA = "ecfnorm.test-report/1"
SMALL_N = 10


# ---------------------------------------------------------------------------
# input


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_matrix(path, delim=","):
    """Read a numeric CSV file into an (N, m) array.

    A first row that is not entirely numeric is taken as a header. Blank lines
    are skipped. Returns ``(matrix, header)`` with ``header`` None if absent.
    """
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(path, encoding="utf-8", newline="") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(lines, delimiter=delim))
            if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no data")
    header = None
    if not all(_is_number(c) for c in rows[0][1]):
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: header but no data rows")
    width = len(header) if header else len(rows[0][1])
    data = np.empty((len(rows), width))
    for k, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise DataError(f"{path}: line {lineno} has {len(cells)} fields, expected {width}")
        for j, cell in enumerate(cells):
            try:
                data[k, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}, column {j + 1}: not a number: {cell.strip()!r}"
                ) from None
            if not math.isfinite(data[k, j]):
                raise DataError(f"{path}: line {lineno}, column {j + 1}: non-finite value")
    return data, header


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(value):
    if value is not None:
        return value
    # no seed given: draw one from system entropy so it can be reported
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_test(args):
    seed = _seed(args.seed)
    X, header = read_matrix(args.file, args.delim)
    sample = standardize(X, ddof=args.ddof)
    n, m = sample.n_rows, sample.n_cols
    warnings = []
    if n < SMALL_N:
        warnings.append(f"small sample: N={n}")

    table = CriticalValueTable.load(args.critvals) if args.critvals else None
    if table is not None:
        if table.m != m or table.n != n:
            raise TableLookupError(
                f"table covers m={table.m}, n={table.n}; data has m={m}, n={n}")
        quad = table.quadrature_config()
        if args.Q is not None and args.Q != quad.Q:
            raise ConfigError(f"--Q {args.Q} conflicts with the table's Q={quad.Q}")
    else:
        if m > 2 and args.Q is None:
            raise ConfigError("more than two columns need an explicit --Q")
        quad = QuadratureConfig.default(m, node_seed=seed, Q=args.Q)

    if m == 1 and args.Q is None and n <= M1_MAX_N and quad.method == CIRCLE_TRAPEZOID:
        stat = m1_exact(sample)
    else:
        stat = m_stat(sample, quad, threads=args.threads)

    report = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "input": {"path": args.file, "N": n, "m": m, "columns": header},
        "statistic": {"value": stat.value, "method": stat.method, "ddof": stat.ddof},
        "alpha": args.alpha,
        "seed": seed,
        "quadrature": quad.descriptor(),
        "critical_value": None,
        "p_value": None,
        "decision": None,
        "calibration": None,
        "warnings": warnings,
    }
    if table is not None:
        check_provenance(stat, table)
        dec = decide(stat, table, args.alpha)
        report["critical_value"] = dec.critical_value
        report["decision"] = dec.label
        report["calibration"] = {"source": "table", "path": args.critvals,
                                 "replicates": table.replicates, "root_seed": table.root_seed}
    if args.replicates:
        order_statistic_rank(args.alpha, args.replicates)
        null = np.sort(null_statistics(m, n, args.replicates, quad, seed, args.ddof,
                                       args.threads))
        report["p_value"] = p_value(stat, null)
        if table is None:
            cv = float(null[order_statistic_rank(args.alpha, args.replicates) - 1])
            report["critical_value"] = cv
            report["decision"] = "reject" if stat.value > cv else "retain"
            report["calibration"] = {"source": "simulation", "replicates": args.replicates,
                                     "root_seed": seed}
    if args.seed is None:
        print(f"seed: {seed}", file=sys.stderr)
    _write(args.out, json.dumps(report, indent=2) + "\n")
    if args.summary:
        print(_summary(report), file=sys.stderr)
    return 0


def _summary(report):
    s = report["statistic"]
    lines = [f"N={report['input']['N']} m={report['input']['m']}  "
             f"statistic={s['value']:.6g} ({s['method']})"]
    if report["critical_value"] is not None:
        lines.append(f"critical value at alpha={report['alpha']:g}: "
                     f"{report['critical_value']:.6g} -> {report['decision']}")
    if report["p_value"] is not None:
        lines.append(f"Monte Carlo p-value: {report['p_value']:.4g}")
    lines.extend(f"warning: {w}" for w in report["warnings"])
    return "\n".join(lines)


def cmd_critvals(args):
    seed = _seed(args.seed)
    quad = QuadratureConfig.default(args.m, node_seed=seed, Q=args.Q)
    cfg = NullSimConfig(args.m, args.n, args.replicates, tuple(sorted(args.alphas)), quad,
                        seed, args.ddof)
    table = simulate_null(cfg, threads=args.threads, built="" if args.no_timestamp else None)
    if args.seed is None:
        print(f"seed: {seed}", file=sys.stderr)
    _write(args.out, table.dumps())
    return 0


def _read_alternatives(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return [ln.split("#", 1)[0].strip() for ln in lines if ln.split("#", 1)[0].strip()]


def cmd_power(args):
    seed = _seed(args.seed)
    if args.suite == "custom":
        texts = list(args.alt or [])
        if args.alternatives:
            texts += _read_alternatives(args.alternatives)
        if not texts:
            raise ConfigError("--suite custom needs --alt or --alternatives")
        alternatives = [AlternativeSpec.parse(t) for t in texts]
        sizes = args.n or [20]
    else:
        if args.alt or args.alternatives:
            raise ConfigError("--alt and --alternatives only apply to --suite custom")
        alternatives = list(SUITES[args.suite])
        sizes = args.n or list(SUITE_SIZES[args.suite])
    tables = {}
    for path in args.critvals or []:
        t = CriticalValueTable.load(path)
        tables[(t.m, t.n)] = t
    cfg = PowerStudyConfig(alternatives, sizes, args.alpha, args.replicates, seed,
                           args.null_replicates, tables, ddof=args.ddof)
    result = run_suite(cfg, threads=args.threads)
    if args.seed is None:
        print(f"seed: {seed}", file=sys.stderr)
    if args.json:
        _write(args.json, result.dumps())
    if args.text:
        _write(args.text, result.render_text())
    _write(None, result.dumps() if args.format == "json" else result.render_text())
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(
        prog="ecfnorm",
        description="Characteristic function test of joint normality and independence.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="root seed (default: drawn from entropy)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--ddof", type=int, default=0, choices=(0, 1),
                        help="variance divisor N - ddof used for standardization")

    t = sub.add_parser("test", parents=[common], help="test a data file")
    t.add_argument("file", help="CSV file, one observation per row ('-' for stdin)")
    t.add_argument("--critvals", help="critical value table (JSON)")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--replicates", type=int, default=0,
                   help="simulate this many null samples for a p-value")
    t.add_argument("--Q", type=int, help="quadrature node count")
    t.add_argument("--delim", default=",")
    t.add_argument("--out", help="report path (default stdout)")
    t.add_argument("--summary", action="store_true", help="print a short summary to stderr")
    t.set_defaults(func=cmd_test)

    c = sub.add_parser("critvals", parents=[common], help="simulate a critical value table")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--alphas", type=_float_list, default=[0.05])
    c.add_argument("--replicates", type=int, default=10000)
    c.add_argument("--Q", type=int)
    c.add_argument("--out", help="output path (default stdout)")
    c.add_argument("--no-timestamp", action="store_true",
                   help="leave the build time empty for byte-stable files")
    c.set_defaults(func=cmd_critvals)

    w = sub.add_parser("power", parents=[common], help="run a power study")
    w.add_argument("--suite", choices=("univariate", "bivariate", "custom"), default="custom")
    w.add_argument("--alt", action="append", help="alternative, e.g. 'PearVII(10)' (repeatable)")
    w.add_argument("--alternatives", help="file with one alternative per line")
    w.add_argument("--n", type=_int_list, help="comma-separated sample sizes")
    w.add_argument("--alpha", type=float, default=0.05)
    w.add_argument("--replicates", type=int, default=1000)
    w.add_argument("--null-replicates", type=int, default=10000)
    w.add_argument("--critvals", action="append", help="precomputed table (repeatable)")
    w.add_argument("--format", choices=("text", "json"), default="text")
    w.add_argument("--json", help="also write the JSON rendering here")
    w.add_argument("--text", help="also write the text rendering here")
    w.set_defaults(func=cmd_power)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except EcfError as exc:
        print(f"ecfnorm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        # malformed parameters that slipped past argparse
        print(f"ecfnorm: error: {exc}", file=sys.stderr)
        return ParseError.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
