"""Exact arithmetic over the Gaussian rationals Q(i) and the rational
function field Q(i)(t).

Everything here is immutable and pure; polynomials are dense coefficient
lists (lowest degree first) and rational functions are kept reduced with a
monic denominator so that structural equality is canonical equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    MixedFactor,
    ParseError,
    SingularMatrix,
    ZeroFunction,
    ZeroPolynomial,
)

__all__ = [
    "GaussRat",
    "Poly",
    "RatFun",
    "squarefree_decompose",
    "valuation",
    "infinity_degree",
    "residue",
    "solve_linear",
    "max_zero_multiplicity",
    "rational_roots",
    "parse_ratfun",
    "parse_gaussrat",
]


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {x!r}")


@dataclass(frozen=True)
class GaussRat:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    # canonical-form accessors per the stated field contract
    @property
    def re_num(self) -> int:
        return self.re.numerator

    @property
    def re_den(self) -> int:
        return self.re.denominator

    @property
    def im_num(self) -> int:
        return self.im.numerator

    @property
    def im_den(self) -> int:
        return self.im.denominator

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: "GaussRat") -> "GaussRat":
        other = _coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other: "GaussRat") -> "GaussRat":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "GaussRat":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "GaussRat":
        other = _coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "GaussRat":
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other) -> "GaussRat":
        return _coerce(other) * self.inverse()

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self) -> str:
        def part(f: Fraction) -> str:
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

        if self.im == 0:
            return part(self.re)
        im = part(abs(self.im)) + "i"
        if abs(self.im) == 1:
            im = "i"
        sign = "-" if self.im < 0 else "+"
        if self.re == 0:
            return ("-" if self.im < 0 else "") + im
        return f"{part(self.re)}{sign}{im}"

    def __repr__(self) -> str:
        return f"GaussRat({self})"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


def _coerce(x) -> GaussRat:
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRat(x)
    raise TypeError(f"cannot coerce {x!r} to GaussRat")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial over Q(i), lowest degree first.

    The zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([_coerce(c)])

    @classmethod
    def x(cls) -> "Poly":
        return cls([ZERO, ONE])

    @classmethod
    def from_roots(cls, roots) -> "Poly":
        p = cls.const(1)
        for r in roots:
            p = p * cls([-_coerce(r), ONE])
        return p

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def deg(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> GaussRat:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def lead(self) -> GaussRat:
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)])

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (GaussRat, int, Fraction)):
            c = _coerce(other)
            return Poly([a * c for a in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [ZERO] * max(0, self.deg - other.deg + 1)
        r = list(self.coeffs)
        inv = other.lead().inverse()
        while len(r) >= len(other.coeffs) and r:
            k = len(r) - len(other.coeffs)
            c = r[-1] * inv
            q[k] = c
            for j, b in enumerate(other.coeffs):
                r[k + j] = r[k + j] - c * b
            while r and r[-1].is_zero():
                r.pop()
        return Poly(q), Poly(r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * self.lead().inverse()

    def derivative(self) -> "Poly":
        return Poly([self.coeffs[k] * k for k in range(1, len(self.coeffs))])

    def eval(self, c) -> GaussRat:
        c = _coerce(c)
        acc = ZERO
        for a in reversed(self.coeffs):
            acc = acc * c + a
        return acc

    def ceval(self, z: complex) -> complex:
        acc = 0j
        for a in reversed(self.coeffs):
            acc = acc * z + a.to_complex()
        return acc

    def shifted(self, c) -> "Poly":
        """Coefficients of self in powers of (t - c) (Taylor shift)."""
        c = _coerce(c)
        out = []
        r = list(self.coeffs)
        while r:
            # synthetic division by (t - c): Horner from the top coefficient
            q = []
            acc = ZERO
            for a in reversed(r):
                acc = acc * c + a
                q.append(acc)
            out.append(q[-1])  # remainder = value at c
            r = list(reversed(q[:-1]))
        return Poly(out)

    def root_multiplicity(self, c) -> int:
        """Multiplicity of c as a root (0 when p(c) != 0)."""
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial")
        c = _coerce(c)
        m = 0
        p = self
        while not p.is_zero() and p.eval(c).is_zero():
            p = p.deflate(c)
            m += 1
        return m

    def deflate(self, c) -> "Poly":
        """Exact quotient by (t - c); requires p(c) = 0."""
        c = _coerce(c)
        q = []
        acc = ZERO
        for a in reversed(self.coeffs):
            acc = acc * c + a
            q.append(acc)
        if not q or not q[-1].is_zero():
            raise ValueError("deflation point is not a root")
        return Poly(list(reversed(q[:-1])))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            if k == 0:
                parts.append(str(a))
            else:
                tk = "t" if k == 1 else f"t^{k}"
                coeff = "" if a == ONE else f"({a})*"
                parts.append(f"{coeff}{tk}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"


def gcd_poly(a: Poly, b: Poly) -> Poly:
    """Monic gcd via the Euclidean algorithm over the field Q(i)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFun:
    """Reduced fraction of polynomials over Q(i) with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.const(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = Poly()
            self.den = Poly.const(1)
            return
        g = gcd_poly(num, den)
        if g.deg > 0:
            num = num // g
            den = den // g
        lead_inv = den.lead().inverse()
        self.num = num * lead_inv
        self.den = den * lead_inv

    @classmethod
    def const(cls, c) -> "RatFun":
        return cls(Poly.const(c))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFun":
        return cls(p)

    @classmethod
    def t(cls) -> "RatFun":
        return cls(Poly.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.deg <= 0 and self.den.deg == 0

    def constant_value(self) -> GaussRat:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, RatFun) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other) -> "RatFun":
        other = _coerce_rf(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den)

    def __sub__(self, other) -> "RatFun":
        return self + (-_coerce_rf(other))

    def __rsub__(self, other) -> "RatFun":
        return _coerce_rf(other) + (-self)

    def __mul__(self, other) -> "RatFun":
        other = _coerce_rf(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        other = _coerce_rf(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFun":
        return _coerce_rf(other) / self

    def __pow__(self, k: int) -> "RatFun":
        if k < 0:
            return (RatFun.const(1) / self) ** (-k)
        return RatFun(self.num ** k, self.den ** k)

    def inverse(self) -> "RatFun":
        return RatFun.const(1) / self

    def derivative(self) -> "RatFun":
        return RatFun(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def eval(self, c) -> GaussRat:
        c = _coerce(c)
        d = self.den.eval(c)
        if d.is_zero():
            raise ZeroDivisionError(f"pole at t = {c}")
        return self.num.eval(c) / d

    def ceval(self, z: complex) -> complex:
        return self.num.ceval(z) / self.den.ceval(z)

    def __str__(self) -> str:
        if self.den.deg == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RatFun({self})"


def _coerce_rf(x) -> RatFun:
    if isinstance(x, RatFun):
        return x
    if isinstance(x, Poly):
        return RatFun(x)
    if isinstance(x, (GaussRat, int, Fraction)):
        return RatFun.const(x)
    raise TypeError(f"cannot coerce {x!r} to RatFun")


# ---------------------------------------------------------------------------
# named operations
# ---------------------------------------------------------------------------

def squarefree_decompose(p: Poly):
    """Yun's squarefree decomposition; factors monic, pairwise coprime.

    The product of factor^mult equals p up to the leading scalar.
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot decompose the zero polynomial")
    p = p.monic()
    if p.deg == 0:
        return []
    out = []
    dp = p.derivative()
    g = gcd_poly(p, dp)
    w = p // g
    y = dp // g
    z = y - w.derivative()
    i = 1
    while w.deg > 0:
        gi = gcd_poly(w, z)
        if gi.deg > 0:
            out.append((gi, i))
        w = w // gi
        y = z // gi
        z = y - w.derivative()
        i += 1
    return out


def valuation(r: RatFun, c) -> int:
    """Order of vanishing of r at c; negative for a pole."""
    if r.is_zero():
        raise ZeroFunction("valuation of the zero function")
    c = _coerce(c)
    return r.num.root_multiplicity(c) - r.den.root_multiplicity(c)


def infinity_degree(r: RatFun) -> int:
    """deg(num) - deg(den): pole order at infinity (negative = zero)."""
    if r.is_zero():
        raise ZeroFunction("infinity_degree of the zero function")
    return r.num.deg - r.den.deg


def _series_quotient(num: list, den: list, order: int) -> list:
    """Taylor coefficients of num/den up to (excluding) `order`; den[0] != 0."""
    inv0 = den[0].inverse()
    q = []
    for m in range(order):
        acc = num[m] if m < len(num) else ZERO
        for j in range(min(m, len(den) - 1)):
            acc = acc - q[m - 1 - j] * den[j + 1]
        q.append(acc * inv0)
    return q


def laurent_coefficients(r: RatFun, c, jmax: int) -> list:
    """Coefficients of (t-c)^(-j) for j = 1..jmax in the expansion of r at c."""
    if r.is_zero():
        return [ZERO] * jmax
    c = _coerce(c)
    k = r.den.root_multiplicity(c)
    if k == 0:
        return [ZERO] * jmax
    num_s = list(r.num.shifted(c).coeffs)
    den_s = list(r.den.shifted(c).coeffs)[k:]  # strip the s^k factor
    # r = (num_s / den_s) * s^(-k); need Taylor coeffs of num_s/den_s up to s^(k-1)
    taylor = _series_quotient(num_s or [ZERO], den_s, k)
    out = []
    for j in range(1, jmax + 1):
        idx = k - j
        out.append(taylor[idx] if 0 <= idx < len(taylor) else ZERO)
    return out


def residue(r: RatFun, c) -> GaussRat:
    """Exact coefficient of (t-c)^(-1) in the Laurent expansion at c."""
    return laurent_coefficients(r, c, 1)[0]


def solve_linear(A, b):
    """Exact solution of A x = b over Q(i)(t) by Gaussian elimination."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    if len(b) != n:
        raise ValueError("dimension mismatch")
    M = [[_coerce_rf(e) for e in row] for row in A]
    rhs = [_coerce_rf(e) for e in b]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular over the function field")
        M[col], M[pivot] = M[pivot], M[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        inv = M[col][col].inverse()
        M[col] = [e * inv for e in M[col]]
        rhs[col] = rhs[col] * inv
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[col])]
                rhs[r] = rhs[r] - f * rhs[col]
    return rhs


def det_ratfun(A) -> RatFun:
    """Exact determinant of a square RatFun matrix (elimination based)."""
    n = len(A)
    M = [[_coerce_rf(e) for e in row] for row in A]
    det = RatFun.const(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if pivot is None:
            return RatFun(Poly())
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            det = -det
        det = det * M[col][col]
        inv = M[col][col].inverse()
        for r in range(col + 1, n):
            if not M[r][col].is_zero():
                f = M[r][col] * inv
                M[r] = [a - f * bb for a, bb in zip(M[r], M[col])]
    return det


def linear_root(p: Poly) -> GaussRat:
    """Root of a degree-1 polynomial."""
    if p.deg != 1:
        raise ValueError("not a linear polynomial")
    return -p[0] / p[1]


def rational_roots(p: Poly):
    """Gaussian-rational roots of p with multiplicities.

    Candidates come from numeric root finding rationalized through
    limit_denominator, then each is certified by exact evaluation, so every
    returned root is genuine.  Rational roots whose coordinates have
    denominators beyond the rationalization window are not representable at
    desk scale and are treated as irrational.
    """
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial has every point as a root")
    out = []
    if p.deg < 1:
        return out
    coeffs = [p[k].to_complex() for k in range(p.deg, -1, -1)]
    seen = set()
    # repeated roots are perturbed by roughly eps^(1/multiplicity), so try
    # coarse rationalization windows before fine ones
    windows = (10, 10 ** 2, 10 ** 4, 10 ** 6, 10 ** 9)
    for z in np.roots(coeffs):
        for window in windows:
            cand = GaussRat(Fraction(z.real).limit_denominator(window),
                            Fraction(z.imag).limit_denominator(window))
            if cand in seen:
                continue
            seen.add(cand)
            k = p.root_multiplicity(cand)
            if k:
                out.append((cand, k))
                break
    return out


def max_zero_multiplicity(r: RatFun, excluded=()):
    """Maximal zero multiplicity of r away from `excluded`, plus the
    squarefree profile of the numerator with excluded linear factors removed.

    A nonlinear irreducible-over-the-profile factor vanishing at an excluded
    point also has other roots, which cannot be separated exactly; that case
    raises MixedFactor.
    """
    if r.is_zero():
        raise ZeroFunction("zero function has no zero multiplicities")
    excluded = {_coerce(e) for e in excluded}
    profile = []
    best = 0
    for factor, mult in squarefree_decompose(r.num):
        if factor.deg == 1:
            if linear_root(factor) in excluded:
                continue
        else:
            if any(factor.eval(e).is_zero() for e in excluded):
                raise MixedFactor(
                    f"factor {factor} vanishes at an excluded point but has other roots"
                )
        profile.append((factor, mult))
        best = max(best, mult)
    return best, profile


# ---------------------------------------------------------------------------
# expression parser
# ---------------------------------------------------------------------------
#
# Grammar: integers, fractions p/q, the imaginary unit i, the variable t,
# operators + - * / ^ (integer exponents), parentheses; whitespace is
# insignificant.  Juxtaposition multiplies (so 1/2i parses as (1/2)*i).

_TOK_INT = "int"
_TOK_SYM = "sym"
_TOK_OP = "op"


def _tokenize(text: str):
    toks = []
    k = 0
    n = len(text)
    while k < n:
        ch = text[k]
        if ch.isspace():
            k += 1
            continue
        if ch.isdigit():
            j = k
            while j < n and text[j].isdigit():
                j += 1
            toks.append((_TOK_INT, int(text[k:j]), k))
            k = j
        elif ch in "it":
            toks.append((_TOK_SYM, ch, k))
            k += 1
        elif ch in "+-*/^()":
            toks.append((_TOK_OP, ch, k))
            k += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", column=k)
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of expression", column=len(self.text))
        self.pos += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != _TOK_OP or t[1] != op:
            raise ParseError(f"expected {op!r}", column=t[2])

    def parse(self) -> RatFun:
        v = self.expr()
        t = self.peek()
        if t is not None:
            raise ParseError(f"trailing input {t[1]!r}", column=t[2])
        return v

    def expr(self) -> RatFun:
        v = self.term()
        while True:
            t = self.peek()
            if t and t[0] == _TOK_OP and t[1] in "+-":
                self.take()
                rhs = self.term()
                v = v + rhs if t[1] == "+" else v - rhs
            else:
                return v

    def _starts_factor(self, t) -> bool:
        return t is not None and (
            t[0] == _TOK_INT
            or t[0] == _TOK_SYM
            or (t[0] == _TOK_OP and t[1] == "(")
        )

    def term(self) -> RatFun:
        v = self.unary()
        while True:
            t = self.peek()
            if t and t[0] == _TOK_OP and t[1] in "*/":
                self.take()
                rhs = self.unary()
                if t[1] == "/":
                    if rhs.is_zero():
                        raise ParseError("division by zero", column=t[2])
                    v = v / rhs
                else:
                    v = v * rhs
            elif self._starts_factor(t):
                v = v * self.unary()  # juxtaposition
            else:
                return v

    def unary(self) -> RatFun:
        t = self.peek()
        if t and t[0] == _TOK_OP and t[1] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> RatFun:
        base = self.atom()
        t = self.peek()
        if t and t[0] == _TOK_OP and t[1] == "^":
            self.take()
            sign = 1
            t2 = self.peek()
            if t2 and t2[0] == _TOK_OP and t2[1] == "-":
                self.take()
                sign = -1
            t3 = self.take()
            if t3[0] != _TOK_INT:
                raise ParseError("exponent must be an integer", column=t3[2])
            exp = sign * t3[1]
            if exp < 0 and base.is_zero():
                raise ParseError("zero to a negative power", column=t3[2])
            return base ** exp
        return base

    def atom(self) -> RatFun:
        t = self.take()
        if t[0] == _TOK_INT:
            return RatFun.const(t[1])
        if t[0] == _TOK_SYM:
            return RatFun.const(I) if t[1] == "i" else RatFun.t()
        if t[0] == _TOK_OP and t[1] == "(":
            v = self.expr()
            self.expect_op(")")
            return v
        raise ParseError(f"unexpected token {t[1]!r}", column=t[2])


def parse_ratfun(text: str) -> RatFun:
    """Parse an expression in t over Q(i) into an exact rational function."""
    return _Parser(text).parse()


def parse_gaussrat(text: str) -> GaussRat:
    """Parse a constant expression into a Gaussian rational."""
    v = parse_ratfun(text)
    if not v.is_constant():
        raise ParseError(f"expected a constant, got {v}")
    return v.constant_value()
