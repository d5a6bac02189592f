"""Command-line interface: connection files, subcommands and
machine-readable run reports.

Exit codes: 0 success, 1 domain error, 2 usage error.  Reports are
deterministic for a fixed seed: exact values are serialized as strings
("3/4+1/2i"), numeric values as IEEE doubles, never mixed in one field.
Wall time goes to stderr so that JSON reports stay byte-identical under
re-runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import fixtures as fixtures_mod
from .bundle import Divisor, Section, SplittingType, parse_divisor
from .connection import Connection, local_data
from .errors import ParseError, ToolkitError, ValidationFailed
from .exactalg import GaussRat, parse_gaussrat, parse_ratfun
from .monodromy import (
    achieve_multiplicity,
    monodromy_generators,
    ode_residual,
    period_jet,
)
from .wronskian import (
    apparent_singularities,
    cyclic_reduce,
    estimate_H,
    fuchs_check,
    generation_bound,
    h_bound,
    iterated,
    residue_identity_check,
    wronskian_determinant,
)

__all__ = ["parse_connection_file", "run_command", "main"]


# ---------------------------------------------------------------------------
# connection file format
# ---------------------------------------------------------------------------

def parse_connection_file(text: str, validate: bool = True) -> Connection:
    """Parse the line-oriented connection format (see the README)."""
    rank = None
    splitting = None
    points = []
    matrix_rows = []
    in_matrix = False
    saw_end = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if saw_end:
            raise ParseError("content after 'end'", line=lineno)
        if in_matrix:
            if line == "end":
                in_matrix = False
                saw_end = True
                continue
            try:
                row = [parse_ratfun(chunk) for chunk in line.split()]
            except ParseError as exc:
                raise ParseError(f"bad matrix entry: {exc}", line=lineno)
            matrix_rows.append(row)
            continue
        fields = line.split()
        if fields[0] == "rank":
            if rank is not None:
                raise ParseError("duplicate rank line", line=lineno)
            try:
                rank = int(fields[1])
            except (IndexError, ValueError):
                raise ParseError("rank needs one integer", line=lineno)
            if rank < 1:
                raise ParseError("rank must be >= 1", line=lineno)
        elif fields[0] == "splitting":
            try:
                splitting = SplittingType([int(f) for f in fields[1:]])
            except ValueError:
                raise ParseError("bad splitting line", line=lineno)
        elif fields[0] == "point":
            if len(fields) != 4 or fields[2] != "order":
                raise ParseError("expected: point <gauss-rat> order <posint>",
                                 line=lineno)
            try:
                pt = parse_gaussrat(fields[1])
            except ParseError as exc:
                raise ParseError(f"bad point: {exc}", line=lineno)
            try:
                order = int(fields[3])
            except ValueError:
                raise ParseError("order must be an integer", line=lineno)
            if order < 1:
                raise ParseError("order must be >= 1", line=lineno)
            if any(pt == q for q, _ in points):
                raise ParseError(f"duplicate point {pt}", line=lineno)
            points.append((pt, order))
        elif fields[0] == "matrix":
            in_matrix = True
        else:
            raise ParseError(f"unknown directive {fields[0]!r}", line=lineno)
    if rank is None:
        raise ParseError("missing rank line")
    if splitting is None:
        raise ParseError("missing splitting line")
    if splitting.rank != rank:
        raise ParseError(f"splitting has {splitting.rank} twists, rank is {rank}")
    if in_matrix or not saw_end:
        raise ParseError("matrix block not terminated by 'end'")
    if not points:
        # holomorphic everywhere with the required behavior at infinity
        # forces trivial monodromy; not an interesting input for the tool
        raise ParseError("at least one 'point' line is required")
    if len(matrix_rows) != rank or any(len(r) != rank for r in matrix_rows):
        raise ParseError(f"matrix must be {rank}x{rank}")
    conn = Connection(splitting, Divisor(points), matrix_rows)
    if validate:
        report = conn.validate()
        if not report.ok:
            raise ValidationFailed(report)
    return conn


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _cpx(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _mat(m) -> list:
    return [[_cpx(e) for e in row] for row in np.asarray(m)]


def _section_strings(section: Section) -> list:
    return [str(c) for c in section.comps]


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _emit(report: dict, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        json.dump(report, out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        _emit_text(report, out)


def _emit_text(obj, out, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                out.write(f"{pad}{k}:\n")
                _emit_text(v, out, indent + 1)
            else:
                out.write(f"{pad}{k}: {v}\n")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                _emit_text(v, out, indent)
            else:
                out.write(f"{pad}- {v}\n")
    else:
        out.write(f"{pad}{obj}\n")


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _load(args, validate=True):
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    conn = parse_connection_file(text, validate=validate)
    return conn, {"file": args.file, "sha256": _digest(text)}


def _section_from_arg(conn: Connection, arg: str | None) -> Section:
    if arg is None:
        # first standard section e_1
        comps = [parse_ratfun("1")] + [parse_ratfun("0")] * (conn.rank - 1)
    else:
        comps = [parse_ratfun(chunk) for chunk in arg.split(",")]
    return Section(comps, conn.splitting)


def _cmd_validate(args):
    conn, inputs = _load(args, validate=False)
    report = conn.validate()
    results = {
        "ok": report.ok,
        "violations": report.violations,
        "warnings": report.warnings,
        "rank": conn.rank,
        "splitting": list(conn.splitting.twists),
        "divisor": str(conn.divisor),
        "local_exponents": {},
    }
    if report.ok:
        for c, _ in conn.divisor.finite_entries():
            ld = local_data(conn, c)
            results["local_exponents"][str(c)] = [_cpx(z) for z in ld.exponents]
    return (0 if report.ok else 1), inputs, results


def _cmd_derive(args):
    conn, inputs = _load(args)
    section = _section_from_arg(conn, args.section)
    its = iterated(conn, section, args.order)
    return 0, inputs, {
        "order": args.order,
        "iterates": [_section_strings(s) for s in its],
    }


def _cmd_wronskian(args):
    conn, inputs = _load(args)
    section = _section_from_arg(conn, args.section)
    a = wronskian_determinant(conn, section)
    results = {"wronskian": str(a), "zero": a.is_zero()}
    if not a.is_zero():
        results["generation_bound"] = generation_bound(conn, section)
    return 0, inputs, results


def _cmd_ode(args):
    conn, inputs = _load(args)
    section = _section_from_arg(conn, args.section)
    ode = cyclic_reduce(conn, section)
    verdicts = fuchs_check(ode, conn.singular_points)
    return 0, inputs, {
        "order": ode.order,
        "coefficients": [str(c) for c in ode.coeffs],
        "fuchsian": [
            {"point": str(b), "ok": ok,
             "violations": [{"k": k, "pole": p, "allowed": al}
                            for k, p, al in bad]}
            for b, ok, bad in verdicts
        ],
        "residual_at_base": ode_residual(conn, section, ode,
                                         _default_probe(conn), tol=args.tol),
    }


def _default_probe(conn) -> complex:
    from .monodromy import default_base

    return default_base(conn) + 0.25j


def _cmd_classify(args):
    conn, inputs = _load(args)
    section = _section_from_arg(conn, args.section)
    app = apparent_singularities(conn, section)
    res = residue_identity_check(conn, section)
    return 0, inputs, {
        "apparent": [
            {
                "location": str(r.location) if r.exact else _cpx(r.location),
                "wronskian_valuation": r.val_wronskian,
                "log_coeff_residue": str(r.res_log_coeff) if r.exact
                else _cpx(r.res_log_coeff),
                "phi_bound": str(r.phi_bound) if r.exact else float(r.phi_bound),
                "exact": r.exact,
            }
            for r in app.records
        ],
        "residue_identity": [
            {"point": str(r.point), "lhs": str(r.lhs), "rhs": str(r.rhs),
             "in_divisor": r.in_divisor, "equal": r.equal}
            for r in res
        ],
    }


def _cmd_bound(args):
    conn, inputs = _load(args)
    return 0, inputs, {"n": args.n, "bound": h_bound(conn, args.n)}


def _divisor_from_args(conn, args) -> Divisor:
    if args.pole_divisor:
        return parse_divisor(args.pole_divisor)
    from .bundle import INF

    return Divisor([(INF, args.n)]) if args.n > 0 else Divisor([])


def _cmd_sample_h(args):
    conn, inputs = _load(args)
    E = _divisor_from_args(conn, args)
    report = estimate_H(conn, args.n, E, args.samples, args.seed)
    return 0, inputs, {
        "n": report.n,
        "twist_divisor": str(E),
        "bound": report.bound,
        "samples": report.samples,
        "max_observed_generation": report.max_observed_generation,
        "witness": report.witness,
        "violated": report.violated,
    }


def _cmd_monodromy(args):
    conn, inputs = _load(args)
    base = complex(args.base) if args.base else None
    report = monodromy_generators(conn, base=base, tol=args.tol,
                                  parallel=args.parallel)
    return 0, inputs, {
        "base": _cpx(report.base),
        "points": [_cpx(p) for p in report.points],
        "generators": [_mat(T) for T in report.matrices],
        "traces": [_cpx(np.trace(T)) for T in report.matrices],
        "product_defect": report.defect,
        "dual_defect": report.dual_defect,
        "transport_error_estimate": report.transport_error,
        "irreducible": report.irreducible.kind,
        "irreducible_margin": report.irreducible.margin,
    }


def _cmd_achieve(args):
    conn, inputs = _load(args)
    E = _divisor_from_args(conn, args)
    t0 = complex(args.base) if args.base else _default_probe(conn)
    section = achieve_multiplicity(conn, args.n, E, t0,
                                   dual_index=args.order, tol=args.tol)
    from .bundle import section_space_basis

    d = len(section_space_basis(conn.splitting, E))
    jets = period_jet(conn, section, t0, d, tol=args.tol).jet[:, args.order]
    return 0, inputs, {
        "n": args.n,
        "twist_divisor": str(E),
        "t0": _cpx(t0),
        "section": _section_strings(section),
        "jet_magnitudes": [float(abs(z)) for z in jets],
        "space_dimension": d,
    }


def _cmd_fixtures(args):
    if args.action == "list":
        return 0, {}, {"fixtures": fixtures_mod.fixture_names()}
    try:
        text = fixtures_mod.fixture_file(args.name)
    except KeyError as exc:
        raise ToolkitError(str(exc))
    path = args.path or f"{args.name}.conn"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return 0, {}, {"written": path, "sha256": _digest(text)}


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meroconn",
        description="meromorphic connections on the projective line: exact "
                    "Wronskian machinery and numerical monodromy",
    )
    parser.add_argument("--format", choices=["json", "text"], default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, needs_file=True):
        p = sub.add_parser(name)
        if needs_file:
            p.add_argument("file")
        p.add_argument("--n", type=int, default=0)
        p.add_argument("--samples", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--base", default=None)
        p.add_argument("--pole-divisor", dest="pole_divisor", default=None)
        p.add_argument("--section", default=None)
        p.add_argument("--order", type=int, default=0)
        p.add_argument("--parallel", action="store_true")
        p.set_defaults(func=func)
        return p

    add("validate", _cmd_validate)
    add("derive", _cmd_derive)
    add("wronskian", _cmd_wronskian)
    add("ode", _cmd_ode)
    add("classify", _cmd_classify)
    add("bound", _cmd_bound)
    add("sample-h", _cmd_sample_h)
    add("monodromy", _cmd_monodromy)
    add("achieve", _cmd_achieve)
    fx = add("fixtures", _cmd_fixtures, needs_file=False)
    fx.add_argument("action", choices=["list", "emit"])
    fx.add_argument("name", nargs="?")
    fx.add_argument("path", nargs="?")
    return parser


def run_command(argv):
    """Run one subcommand; returns (exit_code, run_report_dict)."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        code, inputs, results = args.func(args)
    except ValidationFailed as exc:
        report = {
            "command": list(argv),
            "error": "validation failed",
            "violations": exc.report.violations,
        }
        return 1, report
    except ToolkitError as exc:
        return 1, {"command": list(argv), "error": str(exc)}
    finally:
        elapsed = time.monotonic() - started
        print(f"wall time: {elapsed:.3f}s", file=sys.stderr)
    report = {
        "command": list(argv),
        "inputs": inputs,
        "seed": getattr(args, "seed", None),
        "tolerances": {"tol": getattr(args, "tol", None)},
        "results": results,
    }
    return code, report


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        code, report = run_command(argv)
    except SystemExit as exc:  # argparse usage errors
        return 2 if exc.code not in (0, None) else 0
    fmt = "json" if "--format" in argv and "json" in argv else None
    # --format is a top-level option; recover it via a light reparse
    if fmt is None:
        fmt = "text"
        for k, tok in enumerate(argv):
            if tok == "--format" and k + 1 < len(argv):
                fmt = argv[k + 1]
            elif tok.startswith("--format="):
                fmt = tok.split("=", 1)[1]
    _emit(report, fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
