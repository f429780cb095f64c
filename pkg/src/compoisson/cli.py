"""Command-line interface: ``compoisson {z,compare,pmf,sample,bench,invgamma}``.

stdout carries data, stderr diagnostics.  Exit codes: 0 success, 1 numerical
failure (no convergence), 2 domain or usage error, 3 validation breach in
``compare``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys
import time
from dataclasses import asdict, dataclass
from decimal import Decimal

import numpy as np

from . import compute
from .distribution import PmfTable, pmf, sample
from .errors import ConvergenceError, DomainError
from .gamma import floor_inverse_gamma, inverse_gamma
from .params import ComPoissonParams, ZResult

CSV_HEADER = ["lambda", "nu", "method", "value", "error_bound", "terms", "wall_time_ns"]
COMPARE_HEADER = ["lambda", "nu", "method", "value", "rel_dev", "status"]
DEFAULT_COMPARE_METHODS = "series,cahen-exact,cahen-quad"
BENCH_GRIDS = {
    "default": ([0.5, 2.0, 5.0], [0.5, 1.0, 2.0, 3.0]),
    "small": ([0.5, 2.0], [1.0, 2.0]),
}

EXIT_OK, EXIT_NUMERIC, EXIT_DOMAIN, EXIT_BREACH = 0, 1, 2, 3


def _fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass(frozen=True)
class RunRecord:
    lam: float
    nu: float
    method: str
    value: str
    error_bound: str | None
    terms: int
    wall_time_ns: int

    @classmethod
    def from_result(cls, params: ComPoissonParams, result: ZResult, wall_time_ns: int) -> "RunRecord":
        return cls(
            lam=params.lam,
            nu=params.nu,
            method=result.method.value,
            value=result.decimal_string(17),
            error_bound=result.error_bound_string(17),
            terms=result.terms_or_nodes,
            wall_time_ns=max(1, int(wall_time_ns)),
        )

    def to_json(self) -> str:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return json.dumps({k: d[k] for k in CSV_HEADER})

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        d = json.loads(text)
        return cls(
            lam=float(d["lambda"]),
            nu=float(d["nu"]),
            method=d["method"],
            value=d["value"],
            error_bound=d["error_bound"],
            terms=int(d["terms"]),
            wall_time_ns=int(d["wall_time_ns"]),
        )

    def csv_row(self) -> list[str]:
        return [
            repr(self.lam),
            repr(self.nu),
            self.method,
            self.value,
            "" if self.error_bound is None else self.error_bound,
            str(self.terms),
            str(self.wall_time_ns),
        ]

    @classmethod
    def from_csv_row(cls, row: list[str]) -> "RunRecord":
        return cls(
            lam=float(row[0]),
            nu=float(row[1]),
            method=row[2],
            value=row[3],
            error_bound=row[4] or None,
            terms=int(row[5]),
            wall_time_ns=int(row[6]),
        )

    def value_decimal(self) -> Decimal:
        return Decimal(self.value)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def parse_grid(text: str) -> list[float]:
    """Comma list ``a,b,c`` or inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"range grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if not step > 0 or stop < start:
            raise DomainError(f"bad range grid {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise DomainError(f"bad grid {text!r}: {exc}") from None


def _params(lam: float, nu: float) -> ComPoissonParams:
    if not lam > 0.0:
        raise DomainError(f"--lambda must be > 0, got {lam}")
    return ComPoissonParams(lam, nu)


def _timed(params, method, tol=None):
    t0 = time.perf_counter_ns()
    result = compute.compute_z(params, method, tol)
    return result, time.perf_counter_ns() - t0


def _emit_records(records: list[RunRecord], fmt: str, out) -> None:
    if fmt == "json":
        out.write("\n".join(r.to_json() for r in records) + "\n")
    elif fmt == "csv":
        out.write(_csv_text(CSV_HEADER, [r.csv_row() for r in records]))
    else:
        for r in records:
            bound = r.error_bound if r.error_bound is not None else "-"
            out.write(
                f"Z({r.lam!r}, {r.nu!r}) = {r.value}  [{r.method}, terms={r.terms}, "
                f"bound={bound}, {r.wall_time_ns} ns]\n"
            )


def cmd_z(args, out) -> int:
    params = _params(args.lam, args.nu)
    result, dt = _timed(params, args.method, args.tol)
    record = RunRecord.from_result(params, result, dt)
    _emit_records([record], args.format, out)
    if result.fallback:
        print(f"note: |lambda - 1| inside the guard band, {args.method} routed to the series", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    lams = parse_grid(args.lambda_grid)
    nus = parse_grid(args.nu_grid)
    methods = [compute.canonical_method(m.strip()) for m in args.methods.split(",") if m.strip()]
    rows = []
    breach = False
    for lam in lams:
        for nu in nus:
            params = _params(lam, nu)
            reference = compute.compute_z(params, "series")
            for method in methods:
                if not compute.applicable(method, params):
                    rows.append([repr(lam), repr(nu), method, "", "", "n/a"])
                    continue
                result = compute.compute_z(params, method)
                dev = result.rel_diff(reference)
                status = "fallback" if result.fallback else "ok"
                if not dev <= args.max_rel:
                    status = "breach"
                    breach = True
                rows.append([repr(lam), repr(nu), method, result.decimal_string(), format(dev, ".3e"), status])
    if args.format == "csv":
        out.write(_csv_text(COMPARE_HEADER, rows))
    elif args.format == "json":
        out.write(json.dumps([dict(zip(COMPARE_HEADER, r)) for r in rows], indent=1) + "\n")
    else:
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(COMPARE_HEADER)]
        out.write("  ".join(h.ljust(w) for h, w in zip(COMPARE_HEADER, widths)).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    if breach:
        print(f"compare: relative deviation above {args.max_rel:g}", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def cmd_pmf(args, out) -> int:
    params = _params(args.lam, args.nu)
    table = PmfTable.build(params, args.method)
    max_n = table.support_max if args.max_n is None else args.max_n
    if max_n < 0:
        raise DomainError(f"--max-n must be >= 0, got {max_n}")
    probs = [float(table.probs[n]) if n <= table.support_max else pmf(params, n, args.method) for n in range(max_n + 1)]
    cdf = np.cumsum(probs)
    if args.format == "json":
        doc = {
            "lambda": params.lam,
            "nu": params.nu,
            "support_max": table.support_max,
            "tail_mass_bound": table.tail_mass_bound,
            "probs": probs,
        }
        out.write(json.dumps(doc) + "\n")
    else:
        out.write(_csv_text(["n", "pmf", "cdf"], [[str(n), _fmt(p), _fmt(c)] for n, (p, c) in enumerate(zip(probs, cdf))]))
    return EXIT_OK


def cmd_sample(args, out) -> int:
    params = _params(args.lam, args.nu)
    if args.count < 0:
        raise DomainError(f"--count must be >= 0, got {args.count}")
    draws = sample(params, np.random.default_rng(args.seed), args.count, args.method)
    if args.format == "json":
        out.write(json.dumps({"lambda": params.lam, "nu": params.nu, "seed": args.seed, "draws": draws.tolist()}) + "\n")
    else:
        out.write("".join(f"{d}\n" for d in draws.tolist()))
    return EXIT_OK


def cmd_bench(args, out) -> int:
    if args.grid not in BENCH_GRIDS:
        raise DomainError(f"unknown grid {args.grid!r}; choose from {', '.join(BENCH_GRIDS)}")
    lams, nus = BENCH_GRIDS[args.grid]
    methods = [compute.canonical_method(m.strip()) for m in args.methods.split(",") if m.strip()]
    records, per_method = [], {m: [] for m in methods}
    for lam in lams:
        for nu in nus:
            params = _params(lam, nu)
            for method in methods:
                if not compute.applicable(method, params):
                    continue
                times = []
                for _ in range(args.repeat):
                    result, dt = _timed(params, method)
                    times.append(dt)
                median = int(statistics.median(times))
                per_method[method].append(median)
                records.append(RunRecord.from_result(params, result, median))
    summary = {m: int(statistics.median(v)) for m, v in per_method.items() if v}
    if args.format == "json":
        doc = {"records": [json.loads(r.to_json()) for r in records], "summary_median_ns": summary}
        out.write(json.dumps(doc, indent=1) + "\n")
    else:
        _emit_records(records, args.format, out)
        target = sys.stderr if args.format == "csv" else out
        for m, ns in sorted(summary.items(), key=lambda kv: kv[1]):
            print(f"median {m}: {ns} ns", file=target)
    return EXIT_OK


def cmd_invgamma(args, out) -> int:
    x = inverse_gamma(args.y)
    k = floor_inverse_gamma(args.y) if args.y >= 1.0 else int(math.floor(x))
    if args.format == "json":
        out.write(json.dumps({"y": args.y, "x": x, "floor": k}) + "\n")
    else:
        out.write(f"x = {_fmt(x)}, floor = {k}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compoisson", description="COM-Poisson normalizing constant toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    methods = ", ".join(compute.METHODS)

    def add_params(p):
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--nu", type=float, required=True)

    p = sub.add_parser("z", help="compute Z(lambda, nu) by one method")
    add_params(p)
    p.add_argument("--method", default="series", help=f"one of: {methods}")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    p.set_defaults(func=cmd_z)

    p = sub.add_parser("compare", help="cross-check methods against the series over a grid")
    p.add_argument("--lambda-grid", required=True)
    p.add_argument("--nu-grid", required=True)
    p.add_argument("--methods", default=DEFAULT_COMPARE_METHODS)
    p.add_argument("--max-rel", type=float, default=1e-9)
    p.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pmf", help="emit the probability table")
    add_params(p)
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--method", default="series")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("sample", help="seeded draws by exact inversion")
    add_params(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--method", default="series")
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bench", help="time every method over a fixed grid")
    p.add_argument("--grid", default="default")
    p.add_argument("--methods", default=",".join(compute.METHODS))
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("invgamma", help="increasing-branch inverse Gamma and its floor")
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.set_defaults(func=cmd_invgamma)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except DomainError as exc:
        print(f"compoisson {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, OverflowError) as exc:
        print(f"compoisson {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
