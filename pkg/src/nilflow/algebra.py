"""Exact rational arithmetic over a declared irrational basis.

Values are finite Q-linear combinations of opaque basis symbols (the
reserved symbol ``ONE`` is the rational unit).  The basis declares a
high-precision decimal value per symbol, used only for float rendering,
and an optional product table so that products of two symbolic values
stay inside the declared span.  Independence decisions never touch
floats: they reduce to an exact kernel computation over Fraction.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

ONE = "ONE"

#: significant digits used when rendering basis symbols to floats
RENDER_DIGITS = 50


class UnsupportedBasisError(ValueError):
    """A required symbol product is not declared in the basis."""


def _as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q)
    raise TypeError(f"expected exact rational, got {type(q).__name__}")


@dataclass(frozen=True)
class SymbolicReal:
    """Exact element of the Q-span of the declared basis symbols.

    ``coeffs`` is a sorted tuple of (symbol, coefficient) pairs with no
    zero coefficients, so equality of values is equality of tuples.
    """

    coeffs: tuple[tuple[str, Fraction], ...]

    @staticmethod
    def from_coeffs(mapping: Mapping[str, object]) -> "SymbolicReal":
        acc: dict[str, Fraction] = {}
        for sym, q in mapping.items():
            qq = _as_fraction(q)
            if qq:
                acc[sym] = acc.get(sym, Fraction(0)) + qq
        items = tuple(sorted((s, q) for s, q in acc.items() if q))
        return SymbolicReal(items)

    @staticmethod
    def rational(q) -> "SymbolicReal":
        return SymbolicReal.from_coeffs({ONE: _as_fraction(q)})

    @staticmethod
    def symbol(sym: str, coeff=1) -> "SymbolicReal":
        return SymbolicReal.from_coeffs({sym: _as_fraction(coeff)})

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_rational(self) -> bool:
        return all(sym == ONE for sym, _ in self.coeffs)

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not a rational value")
        return self.coeffs[0][1] if self.coeffs else Fraction(0)

    def __add__(self, other: "SymbolicReal") -> "SymbolicReal":
        acc = dict(self.coeffs)
        for sym, q in other.coeffs:
            acc[sym] = acc.get(sym, Fraction(0)) + q
        return SymbolicReal.from_coeffs(acc)

    def __neg__(self) -> "SymbolicReal":
        return SymbolicReal(tuple((s, -q) for s, q in self.coeffs))

    def __sub__(self, other: "SymbolicReal") -> "SymbolicReal":
        return self + (-other)

    def scale(self, q) -> "SymbolicReal":
        qq = _as_fraction(q)
        if not qq:
            return SymbolicReal(())
        return SymbolicReal(tuple((s, c * qq) for s, c in self.coeffs))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "SymbolicReal<0>"
        parts = [f"{q}*{s}" if s != ONE else f"{q}" for s, q in self.coeffs]
        return "SymbolicReal<" + " + ".join(parts) + ">"


def _dec_sqrt(n: int) -> Fraction:
    """Rational approximation of sqrt(n) to RENDER_DIGITS significant digits."""
    with decimal.localcontext() as ctx:
        ctx.prec = RENDER_DIGITS + 5
        return Fraction(decimal.Decimal(n).sqrt())


class Basis:
    """Declared irrational basis: symbol values plus a symbol product table.

    The library assumes, and does not prove, that the declared symbols
    are Q-linearly independent; exactness of independence decisions only
    depends on the coefficient arithmetic.
    """

    def __init__(self, values: Mapping[str, object] | None = None,
                 products: Mapping[tuple[str, str], Mapping[str, object]] | None = None):
        self.values: dict[str, Fraction] = {ONE: Fraction(1)}
        for sym, v in (values or {}).items():
            self.values[sym] = _as_fraction(v) if not isinstance(v, float) \
                else Fraction(decimal.Decimal(repr(v)))
        self.products: dict[tuple[str, str], dict[str, Fraction]] = {}
        for (a, b), expansion in (products or {}).items():
            key = tuple(sorted((a, b)))
            self.products[key] = {s: _as_fraction(q) for s, q in expansion.items()}

    @staticmethod
    def default() -> "Basis":
        """Basis {ONE, SQRT2, SQRT3, SQRT5, SQRT6} with its internal products."""
        values = {
            "SQRT2": _dec_sqrt(2),
            "SQRT3": _dec_sqrt(3),
            "SQRT5": _dec_sqrt(5),
            "SQRT6": _dec_sqrt(6),
        }
        products = {
            ("SQRT2", "SQRT2"): {ONE: 2},
            ("SQRT3", "SQRT3"): {ONE: 3},
            ("SQRT5", "SQRT5"): {ONE: 5},
            ("SQRT6", "SQRT6"): {ONE: 6},
            ("SQRT2", "SQRT3"): {"SQRT6": 1},
            ("SQRT2", "SQRT6"): {"SQRT3": 2},
            ("SQRT3", "SQRT6"): {"SQRT2": 3},
        }
        return Basis(values, products)

    def declare(self, sym: str, value) -> None:
        self.values[sym] = _as_fraction(value)

    def declare_product(self, a: str, b: str, expansion: Mapping[str, object]) -> None:
        self.products[tuple(sorted((a, b)))] = {s: _as_fraction(q) for s, q in expansion.items()}

    def symbol_product(self, a: str, b: str) -> dict[str, Fraction]:
        if a == ONE:
            return {b: Fraction(1)}
        if b == ONE:
            return {a: Fraction(1)}
        key = tuple(sorted((a, b)))
        if key not in self.products:
            raise UnsupportedBasisError(
                f"product {key[0]}*{key[1]} is not expressible in the declared basis")
        return self.products[key]

    def multiply(self, a: SymbolicReal, b: SymbolicReal) -> SymbolicReal:
        acc: dict[str, Fraction] = {}
        for sa, qa in a.coeffs:
            for sb, qb in b.coeffs:
                for sym, q in self.symbol_product(sa, sb).items():
                    acc[sym] = acc.get(sym, Fraction(0)) + qa * qb * q
        return SymbolicReal.from_coeffs(acc)

    def to_float(self, a: SymbolicReal) -> float:
        """Render through exact rationals, rounding to a float exactly once."""
        total = Fraction(0)
        for sym, q in a.coeffs:
            if sym not in self.values:
                raise UnsupportedBasisError(f"symbol {sym} has no declared value")
            total += q * self.values[sym]
        return float(total)


@dataclass(frozen=True)
class RationalMatrix:
    """Dense matrix of exact rationals."""

    entries: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[object]]) -> "RationalMatrix":
        if not rows:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        out = []
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            out.append(tuple(_as_fraction(v) for v in row))
        return RationalMatrix(tuple(out))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def apply(self, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum((r[j] * vec[j] for j in range(self.cols)), Fraction(0))
                     for r in self.entries)


def rational_kernel(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Exact basis of {v : M v = 0}; empty list iff the kernel is trivial.

    Gauss-Jordan over Fraction; each returned vector has one free column
    set to 1, so the basis is in reduced (column-echelon) form.
    """
    rows = [list(r) for r in m.entries]
    nrows, ncols = m.rows, m.cols
    pivot_of_col: dict[int, int] = {}
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_of_col[c] = r
        r += 1
        if r == nrows:
            break
    free_cols = [c for c in range(ncols) if c not in pivot_of_col]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for c, pr in pivot_of_col.items():
            v[c] = -rows[pr][fc]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    certificate: tuple[Fraction, ...] | None = None

    def __bool__(self) -> bool:
        return self.independent


def _normalize_relation(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Clear denominators and divide by the content, fixing the leading sign."""
    from math import gcd, lcm
    dens = [q.denominator for q in vec]
    scale = lcm(*dens) if dens else 1
    ints = [int(q * scale) for q in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v), 1)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(Fraction(v) for v in ints)


def rationally_independent(vals: Sequence[SymbolicReal]) -> IndependenceResult:
    """Exact rational-independence decision with a re-verifiable certificate.

    Returns INDEPENDENT, or DEPENDENT together with a nonzero rational q
    such that sum(q_i * vals_i) vanishes identically over the shared basis.
    """
    if not vals:
        raise ValueError("vals must be nonempty")
    symbols = sorted({sym for v in vals for sym, _ in v.coeffs})
    if not symbols:
        # all values are zero, any unit vector is a relation
        cert = tuple(Fraction(1 if i == 0 else 0) for i in range(len(vals)))
        return IndependenceResult(False, cert)
    rows = [[v.as_dict().get(sym, Fraction(0)) for v in vals] for sym in symbols]
    kernel = rational_kernel(RationalMatrix.from_rows(rows))
    if not kernel:
        return IndependenceResult(True, None)
    cert = _normalize_relation(kernel[0])
    combo = SymbolicReal(())
    for q, v in zip(cert, vals):
        combo = combo + v.scale(q)
    assert combo.is_zero, "certificate failed exact re-verification"
    return IndependenceResult(False, cert)


def binom_real(a, n: int):
    """Generalized binomial coefficient a*(a-1)*...*(a-n+1)/n!.

    Exact (Fraction) for int/Fraction/rational SymbolicReal inputs, float
    otherwise; the n = 0 case is 1 for every a.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(a, SymbolicReal):
        if a.is_rational:
            a = a.rational_value()
        else:
            raise ValueError("irrational SymbolicReal: render to float first")
    exact = isinstance(a, (int, Fraction))
    num = Fraction(1) if exact else 1.0
    for k in range(n):
        num *= (a - k)
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    return num / fact


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial with exact rational coefficients, low degree first."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(coeffs: Sequence[object]) -> "RealPolynomial":
        cs = [_as_fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        return RealPolynomial(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __call__(self, t: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + float(c)
        return acc

    def eval_array(self, t):
        import numpy as np
        acc = np.zeros_like(np.asarray(t, dtype=float))
        for c in reversed(self.coeffs):
            acc = acc * t + float(c)
        return acc


def polys_r_independent(polys: Sequence[RealPolynomial]) -> IndependenceResult:
    """True iff no nontrivial rational combination of the polys is constant.

    Exact: the kernel of the nonconstant-coefficient matrix decides, and a
    dependence certificate is returned when one exists.
    """
    if not polys:
        raise ValueError("polys must be nonempty")
    top = max(p.degree for p in polys)
    if top < 1:
        cert = tuple(Fraction(1 if i == 0 else 0) for i in range(len(polys)))
        return IndependenceResult(False, cert)
    rows = [[p.coeffs[k] if k <= p.degree else Fraction(0) for p in polys]
            for k in range(1, top + 1)]
    kernel = rational_kernel(RationalMatrix.from_rows(rows))
    if not kernel:
        return IndependenceResult(True, None)
    return IndependenceResult(False, _normalize_relation(kernel[0]))
