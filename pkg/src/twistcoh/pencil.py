"""Affine and polynomial matrix pencils in one parameter, with exact rank-drop sets.

A pencil A + t*B is eliminated fraction-free over the polynomial ring, so the
generic rank is computed symbolically; the exceptional parameter values are the
common roots of the maximal minors.  Root extraction and splitting into
irreducible residual factors is delegated to sympy's Gaussian-rational
polynomial factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import sympy

from .linalg import DimensionError, Matrix
from .scalars import ONE, ZERO, Scalar

# polynomials in the pencil parameter: tuples of Scalar coefficients,
# ascending degree, no trailing zeros; () is the zero polynomial
Poly = Tuple[Scalar, ...]

POLY_ZERO: Poly = ()
POLY_ONE: Poly = (ONE,)


def poly(coeffs: Sequence) -> Poly:
    out = [c if isinstance(c, Scalar) else Scalar(c) for c in coeffs]
    while out and out[-1].is_zero():
        out.pop()
    return tuple(out)


def poly_const(c: Scalar) -> Poly:
    return poly([c])


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return poly([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
                 for i in range(n)])


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pscale(b, Scalar(-1)))


def pscale(a: Poly, c: Scalar) -> Poly:
    return poly([c * x for x in a])


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return POLY_ZERO
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return poly(out)


def pdivmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q: List[Scalar] = [ZERO] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and any(x for x in r):
        while r and r[-1].is_zero():
            r.pop()
        if len(r) < len(b):
            break
        f = r[-1] / lead
        shift = len(r) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            r[shift + i] = r[shift + i] - f * c
        r.pop()
    return poly(q), poly(r)


def pdiv_exact(a: Poly, b: Poly) -> Poly:
    q, r = pdivmod(a, b)
    if r:
        raise ArithmeticError("expected exact polynomial division")
    return q


def pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def pmonic(a: Poly) -> Poly:
    if not a:
        return a
    return pscale(a, ONE / a[-1])


def peval(a: Poly, x: Scalar) -> Scalar:
    out = ZERO
    for c in reversed(a):
        out = out * x + c
    return out


def poly_str(a: Poly, var: str = "t") -> str:
    if not a:
        return "0"
    parts = []
    for d in range(len(a) - 1, -1, -1):
        c = a[d]
        if not c:
            continue
        if d == 0:
            parts.append(f"{c}")
        elif d == 1:
            parts.append(f"({c})*{var}")
        else:
            parts.append(f"({c})*{var}^{d}")
    return " + ".join(parts)


class PolyMatrix:
    """Matrix with polynomial entries in the pencil parameter."""

    __slots__ = ("entries", "nrows", "ncols")

    def __init__(self, entries: Sequence[Sequence[Poly]], ncols: Optional[int] = None):
        es = tuple(tuple(e) for e in entries)
        if es:
            width = len(es[0])
            if any(len(r) != width for r in es):
                raise DimensionError("ragged rows")
            ncols = width
        elif ncols is None:
            ncols = 0
        object.__setattr__(self, "entries", es)
        object.__setattr__(self, "nrows", len(es))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def from_scalar(cls, m: Matrix) -> "PolyMatrix":
        return cls([[poly_const(x) for x in row] for row in m.rows], m.ncols)

    @classmethod
    def from_affine(cls, a: Matrix, b: Matrix) -> "PolyMatrix":
        if (a.nrows, a.ncols) != (b.nrows, b.ncols):
            raise DimensionError("affine pencil parts must share a shape")
        return cls([[poly([x, y]) for x, y in zip(ra, rb)]
                    for ra, rb in zip(a.rows, b.rows)], a.ncols)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise DimensionError("polynomial matrix product shape mismatch")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = POLY_ZERO
                for k in range(self.ncols):
                    acc = padd(acc, pmul(self.entries[i][k], other.entries[k][j]))
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, other.ncols)

    def stack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.ncols:
            raise DimensionError("vertical stack needs equal column counts")
        return PolyMatrix(list(self.entries) + list(other.entries), self.ncols)

    def evaluate(self, x: Scalar) -> Matrix:
        return Matrix([[peval(e, x) for e in row] for row in self.entries], self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows], len(cols))


@dataclass(frozen=True)
class Pencil:
    """The affine family A + t*B of equal-shaped matrices."""

    a: Matrix
    b: Matrix

    def __post_init__(self):
        if (self.a.nrows, self.a.ncols) != (self.b.nrows, self.b.ncols):
            raise DimensionError("pencil matrices must share a shape")

    def as_poly(self) -> PolyMatrix:
        return PolyMatrix.from_affine(self.a, self.b)

    def evaluate(self, x: Scalar) -> Matrix:
        return self.a + self.b.scale(x)


def poly_rank(pm: PolyMatrix) -> int:
    """Rank over the rational-function field, by fraction-free Bareiss elimination."""
    work = [list(r) for r in pm.entries]
    prev = POLY_ONE
    r = 0
    for c in range(pm.ncols):
        pr = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        piv = work[r][c]
        for i in range(r + 1, len(work)):
            if not any(work[i]):
                continue
            fi = work[i][c]
            work[i] = [pdiv_exact(psub(pmul(piv, x), pmul(fi, y)), prev)
                       for x, y in zip(work[i], work[r])]
        prev = piv
        r += 1
        if r == len(work):
            break
    return r


def poly_det(pm: PolyMatrix) -> Poly:
    """Determinant of a square polynomial matrix (Bareiss, exact)."""
    if pm.nrows != pm.ncols:
        raise DimensionError("determinant of a non-square matrix")
    n = pm.nrows
    if n == 0:
        return POLY_ONE
    work = [list(r) for r in pm.entries]
    prev = POLY_ONE
    sign = ONE
    for c in range(n - 1):
        pr = next((i for i in range(c, n) if work[i][c]), None)
        if pr is None:
            return POLY_ZERO
        if pr != c:
            work[c], work[pr] = work[pr], work[c]
            sign = -sign
        piv = work[c][c]
        for i in range(c + 1, n):
            fi = work[i][c]
            work[i] = [pdiv_exact(psub(pmul(piv, x), pmul(fi, y)), prev)
                       for x, y in zip(work[i], work[c])]
        prev = piv
    return pscale(work[n - 1][n - 1], sign)


_SYM = sympy.Symbol("t")


def _to_sympy(p: Poly):
    expr = sympy.Integer(0)
    for d, c in enumerate(p):
        expr += (sympy.Rational(c.re.numerator, c.re.denominator)
                 + sympy.Rational(c.im.numerator, c.im.denominator) * sympy.I) * _SYM ** d
    return expr


def _from_sympy(p: "sympy.Poly") -> Poly:
    coeffs = p.all_coeffs()  # descending
    out = []
    for c in reversed(coeffs):
        re, im = c.as_real_imag()
        re = sympy.Rational(re)
        im = sympy.Rational(im)
        out.append(Scalar(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))))
    return poly(out)


def _poly_sort_key(p: Poly):
    return tuple(c.sort_key() for c in p)


def factor_poly(p: Poly) -> Tuple[Tuple[Tuple[Scalar, int], ...], Tuple[Poly, ...]]:
    """Split p over the Gaussian rationals: ((root, multiplicity)...), residual
    irreducible non-linear factors (monic)."""
    if not p or len(p) == 1:
        return (), ()
    sp = sympy.Poly(_to_sympy(p), _SYM, domain="QQ_I")
    _, factors = sp.factor_list()
    roots: List[Tuple[Scalar, int]] = []
    residual: List[Poly] = []
    for fac, mult in factors:
        fc = _from_sympy(fac)
        if len(fc) == 2:
            roots.append(((-fc[0]) / fc[1], mult))
        else:
            residual.append(pmonic(fc))
    roots.sort(key=lambda rm: rm[0].sort_key())
    residual.sort(key=_poly_sort_key)
    return tuple(roots), tuple(residual)


def minor_gcd(pm: PolyMatrix, r: int, limit: int = 200000) -> Poly:
    """gcd of all r x r minors; early exit once the gcd becomes constant."""
    if r == 0:
        return POLY_ONE
    n_minors = math.comb(pm.nrows, r) * math.comb(pm.ncols, r)
    if n_minors > limit:
        raise ValueError(f"minor enumeration too large ({n_minors} minors)")
    g = POLY_ZERO
    for rows in combinations(range(pm.nrows), r):
        for cols in combinations(range(pm.ncols), r):
            d = poly_det(pm.submatrix(rows, cols))
            if not d:
                continue
            g = pgcd(g, d) if g else pmonic(d)
            if len(g) == 1:
                return g
    return g


@dataclass(frozen=True)
class ExceptionalSet:
    """Parameter values where a polynomial matrix loses rank."""

    generic_rank: int
    rational_roots: Tuple[Scalar, ...]
    residual_factors: Tuple[Poly, ...]

    def contains(self, x: Scalar) -> bool:
        if any(x == r for r in self.rational_roots):
            return True
        return any(peval(f, x).is_zero() for f in self.residual_factors)

    def merge(self, other: "ExceptionalSet") -> "ExceptionalSet":
        # merged sets only report the locus, not a single generic rank
        roots = sorted(set(self.rational_roots) | set(other.rational_roots),
                       key=lambda s: s.sort_key())
        residual = sorted(set(self.residual_factors) | set(other.residual_factors),
                          key=_poly_sort_key)
        return ExceptionalSet(-1, tuple(roots), tuple(residual))


def poly_exceptional_set(pm: PolyMatrix) -> ExceptionalSet:
    """Generic rank plus the exact set where evaluation drops below it."""
    r = poly_rank(pm)
    if r == 0:
        return ExceptionalSet(0, (), ())
    g = minor_gcd(pm, r)
    roots, residual = factor_poly(g)
    return ExceptionalSet(r, tuple(root for root, _ in roots), residual)


def pencil_exceptional_set(p: Pencil) -> ExceptionalSet:
    """Exceptional values of the affine family A + t*B."""
    return poly_exceptional_set(p.as_poly())


def char_poly(m: Matrix) -> Poly:
    """Characteristic polynomial det(x*I - m), monic, exact."""
    if m.nrows != m.ncols:
        raise DimensionError("characteristic polynomial of a non-square matrix")
    pm = PolyMatrix([[poly([-m[i, j], ONE]) if i == j else poly([-m[i, j]])
                      for j in range(m.ncols)] for i in range(m.nrows)], m.ncols)
    return poly_det(pm)
