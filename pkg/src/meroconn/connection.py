"""Meromorphic connections on the projective line.

A connection is stored by its rank, splitting type, finite pole divisor and
an exact rational connection matrix M (column convention: the covariant
derivative of a coordinate vector r is r' + M r, so flat sections solve
r' = -M r).  Validation checks the pole constraint at the finite divisor
and holomorphy of the connection form at infinity in the twisted frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import Divisor, Section, SplittingType, chern
from .errors import (
    InvalidConnection,
    NotASingularPoint,
    PoleOutsideAllowedSet,
    ZeroFunction,
)
from .exactalg import (
    GaussRat,
    Poly,
    RatFun,
    _coerce,
    infinity_degree,
    laurent_coefficients,
    residue,
)

__all__ = ["Connection", "ValidationReport", "LocalData",
           "validate", "covariant_derivative", "dual_connection",
           "det_connection", "local_data"]


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


class Connection:
    """Rank-alpha meromorphic connection with prescribed pole divisor."""

    def __init__(self, splitting: SplittingType, divisor: Divisor, matrix):
        if divisor.finite_entries() != list(divisor.entries):
            raise ValueError("the pole divisor must be supported at finite points")
        self.splitting = splitting
        self.divisor = divisor
        rows = [tuple(row) for row in matrix]
        if len(rows) != splitting.rank or any(len(r) != splitting.rank for r in rows):
            raise ValueError("connection matrix shape does not match the rank")
        self.matrix = tuple(rows)
        self._report = None

    @property
    def rank(self) -> int:
        return self.splitting.rank

    @property
    def singular_points(self):
        return self.divisor.finite_support()

    def trace(self) -> RatFun:
        return sum((self.matrix[k][k] for k in range(self.rank)), RatFun.const(0))

    def validate(self) -> ValidationReport:
        if self._report is None:
            self._report = validate(self)
        return self._report

    def ensure_valid(self):
        report = self.validate()
        if not report.ok:
            raise InvalidConnection(report)

    def __repr__(self):
        return (f"Connection(rank={self.rank}, splitting={self.splitting.twists}, "
                f"divisor={self.divisor})")


def _entry_pole_violations(conn: Connection):
    """Check every matrix entry has finite poles only in C, order <= m_c."""
    out = []
    for i, row in enumerate(conn.matrix):
        for j, entry in enumerate(row):
            if entry.is_zero():
                continue
            den = entry.den
            for c, m in conn.divisor.finite_entries():
                k = den.root_multiplicity(c)
                if k > m:
                    out.append(
                        f"entry ({i},{j}) has pole order {k} > {m} at t={c}"
                    )
                if k:
                    den = den // (Poly([-c, GaussRat(1)]) ** k)
            if den.deg > 0:
                out.append(
                    f"entry ({i},{j}) has poles outside the divisor (factor {den})"
                )
    return out


def _infinity_frame_matrix(conn: Connection):
    """Connection matrix in the frame f_i = t^(a_i) e_i: N_ki =
    M_ki t^(a_i - a_k) + (a_i / t) delta_ki."""
    t = RatFun.t()
    a = conn.splitting.twists
    n = conn.rank
    N = []
    for k in range(n):
        row = []
        for i in range(n):
            e = conn.matrix[k][i] * t ** (a[i] - a[k])
            if i == k and a[i] != 0:
                e = e + RatFun.const(a[i]) / t
            row.append(e)
        N.append(row)
    return N


def validate(conn: Connection) -> ValidationReport:
    """Pole constraint at the divisor plus holomorphy of the form at
    infinity; also asserts the residue-theorem identity
    sum_c res(tr M, c) = -c(V) for accepted connections."""
    violations = list(_entry_pole_violations(conn))
    for k, row in enumerate(_infinity_frame_matrix(conn)):
        for i, entry in enumerate(row):
            if entry.is_zero():
                continue
            d = infinity_degree(entry)
            if d > -2:
                violations.append(
                    f"infinity condition fails for entry ({k},{i}): "
                    f"twisted degree {d} > -2"
                )
    warnings = []
    if not conn.divisor.entries:
        warnings.append("empty pole divisor: monodromy is necessarily trivial")
    report = ValidationReport(ok=not violations, violations=violations,
                              warnings=warnings)
    if report.ok:
        # residue theorem: implied by the two degree checks, asserted anyway
        total = sum((residue(conn.trace(), c) for c in conn.singular_points),
                    GaussRat(0))
        if total != GaussRat(-chern(conn.splitting)):
            report.ok = False
            report.violations.append(
                f"residue sum {total} != -c(V) = {-chern(conn.splitting)}"
            )
    return report


def covariant_derivative(conn: Connection, section: Section) -> Section:
    """Apply the connection along d/dt: componentwise omega' + M omega."""
    conn.ensure_valid()
    if section.splitting != conn.splitting:
        raise ValueError("section splitting does not match the connection")
    comps = []
    for i in range(conn.rank):
        acc = section.comps[i].derivative()
        for j in range(conn.rank):
            m = conn.matrix[i][j]
            if not m.is_zero() and not section.comps[j].is_zero():
                acc = acc + m * section.comps[j]
        comps.append(acc)
    return Section(comps, conn.splitting)


def dual_connection(conn: Connection) -> Connection:
    """Dual connection: splitting negated, matrix -M^T; flat dual vectors
    solve delta' = M^T delta."""
    conn.ensure_valid()
    n = conn.rank
    mat = [[-conn.matrix[j][i] for j in range(n)] for i in range(n)]
    dual = Connection(SplittingType([-a for a in conn.splitting.twists]),
                      conn.divisor, mat)
    dual.ensure_valid()
    return dual


def det_connection(conn: Connection) -> Connection:
    """Induced connection on the top exterior power: rank one, twist c(V),
    matrix tr M."""
    conn.ensure_valid()
    if conn.rank == 1:
        return conn
    det = Connection(SplittingType([chern(conn.splitting)]), conn.divisor,
                     [[conn.trace()]])
    det.ensure_valid()
    return det


@dataclass
class LocalData:
    """Laurent principal part of the connection matrix at a singular point."""

    point: GaussRat
    laurent: list          # laurent[j-1] = exact matrix coefficient of (t-c)^(-j)
    exponents: list        # numeric eigenvalues of the residue matrix C_1
    top_vanishes: bool     # True when C_{m_c} = 0 (order drop warning)


def _charpoly_exact(mat):
    """Faddeev-LeVerrier characteristic polynomial of a GaussRat matrix,
    returned as GaussRat coefficients, highest power first (monic)."""
    n = len(mat)

    def matmul(A, B):
        return [[sum((A[i][k] * B[k][j] for k in range(n)), GaussRat(0))
                 for j in range(n)] for i in range(n)]

    coeffs = [GaussRat(1)]
    M = [[GaussRat(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M <- A (M + c_{k-1} I)
        for i in range(n):
            M[i][i] = M[i][i] + coeffs[-1]
        M = matmul(mat, M)
        c = -sum((M[i][i] for i in range(n)), GaussRat(0)) / GaussRat(k)
        coeffs.append(c)
    return coeffs


def local_data(conn: Connection, c) -> LocalData:
    """Exact Laurent matrices C_1..C_m at a singular point c, with the
    eigenvalues of the residue C_1 computed numerically."""
    c = _coerce(c)
    m = conn.divisor.order_at(c)
    if m == 0:
        raise NotASingularPoint(f"t = {c} is not in the pole divisor")
    n = conn.rank
    laurent = []
    per_entry = [[laurent_coefficients(conn.matrix[i][j], c, m)
                  for j in range(n)] for i in range(n)]
    for j in range(1, m + 1):
        laurent.append([[per_entry[i][k][j - 1] for k in range(n)]
                        for i in range(n)])
    c1 = laurent[0]
    char = _charpoly_exact(c1)
    roots = np.roots([z.to_complex() for z in char])
    top_vanishes = all(e.is_zero() for row in laurent[-1] for e in row)
    return LocalData(point=c, laurent=laurent,
                     exponents=sorted(roots, key=lambda z: (z.real, z.imag)),
                     top_vanishes=top_vanishes)
