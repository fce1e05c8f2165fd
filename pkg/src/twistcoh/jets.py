"""Truncated multivariate power series, substitution automorphisms, the
multiplicative eigenvalue monoid, and the exact degree-by-degree resolvent
solve of (substitution - lambda) x = y."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .linalg import Matrix, rank, solve
from .pencil import char_poly, factor_poly
from .scalars import ONE, ZERO, Scalar, rat

MultiIndex = Tuple[int, ...]


class SingularWeightError(ArithmeticError):
    """The resolvent parameter hits an eigenvalue of some homogeneous degree."""

    def __init__(self, degree: int, witness: Optional[MultiIndex] = None):
        self.degree = degree
        self.witness = witness
        msg = f"resolvent parameter is an eigenvalue on homogeneous degree {degree}"
        if witness is not None:
            msg += f"; witness multi-index {witness}"
        super().__init__(msg)


class IrrationalEigenvalueError(ValueError):
    """The linear part has eigenvalues outside the exact scalar field."""


def multi_indices(n: int, degree: int) -> Tuple[MultiIndex, ...]:
    """All exponent vectors of the given total degree, lexicographic."""
    if n == 0:
        return ((),) if degree == 0 else ()
    out: List[MultiIndex] = []

    def rec(prefix: Tuple[int, ...], remaining: int, slots: int):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), degree, n)
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class TruncatedSeries:
    """Polynomial jet: coefficients on multi-indices of total degree <= cutoff."""

    n: int
    cutoff: int
    coeffs: Dict[MultiIndex, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, c in self.coeffs.items():
            if len(idx) != self.n:
                raise ValueError(f"multi-index {idx} has wrong arity")
            if sum(idx) <= self.cutoff and c:
                clean[idx] = rat(c)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, n: int, cutoff: int) -> "TruncatedSeries":
        return cls(n, cutoff, {})

    @classmethod
    def constant(cls, n: int, cutoff: int, c) -> "TruncatedSeries":
        return cls(n, cutoff, {(0,) * n: rat(c)})

    @classmethod
    def variable(cls, n: int, cutoff: int, i: int, c=1) -> "TruncatedSeries":
        idx = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, cutoff, {idx: rat(c)})

    def coefficient(self, idx: MultiIndex) -> Scalar:
        return self.coeffs.get(tuple(idx), ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    def homogeneous(self, degree: int) -> Dict[MultiIndex, Scalar]:
        return {i: c for i, c in self.coeffs.items() if sum(i) == degree}

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._match(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            acc = out.get(i, ZERO) + c
            if acc:
                out[i] = acc
            elif i in out:
                del out[i]
        return TruncatedSeries(self.n, self.cutoff, out)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scale(Scalar(-1))

    def scale(self, c) -> "TruncatedSeries":
        c = rat(c)
        return TruncatedSeries(self.n, self.cutoff, {i: c * v for i, v in self.coeffs.items()})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._match(other)
        out: Dict[MultiIndex, Scalar] = {}
        for i1, c1 in self.coeffs.items():
            d1 = sum(i1)
            for i2, c2 in other.coeffs.items():
                if d1 + sum(i2) > self.cutoff:
                    continue
                idx = tuple(a + b for a, b in zip(i1, i2))
                acc = out.get(idx, ZERO) + c1 * c2
                if acc:
                    out[idx] = acc
                elif idx in out:
                    del out[idx]
        return TruncatedSeries(self.n, self.cutoff, out)

    def _match(self, other: "TruncatedSeries"):
        if self.n != other.n or self.cutoff != other.cutoff:
            raise ValueError("series arity or cutoff mismatch")

    def truncate(self, cutoff: int) -> "TruncatedSeries":
        return TruncatedSeries(self.n, cutoff,
                               {i: c for i, c in self.coeffs.items() if sum(i) <= cutoff})

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for idx in sorted(self.coeffs, key=lambda i: (sum(i), i)):
            mono = "*".join(f"X{j+1}^{e}" if e > 1 else f"X{j+1}"
                            for j, e in enumerate(idx) if e)
            c = self.coeffs[idx]
            parts.append(f"({c})" if not mono else f"({c})*{mono}")
        return " + ".join(parts)


@dataclass(frozen=True)
class JetAutomorphism:
    """Substitution X_i -> S_i with S_i(0) = 0 and invertible linear part."""

    components: Tuple[TruncatedSeries, ...]

    def __post_init__(self):
        n = len(self.components)
        for s in self.components:
            if s.n != n:
                raise ValueError("each component must be a series in all variables")
            if s.coefficient((0,) * n):
                raise ValueError("substitution components must vanish at the origin")
        if rank(self.linear_part()) != n:
            raise ValueError("linear part of the substitution is singular")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def cutoff(self) -> int:
        return self.components[0].cutoff

    def linear_part(self) -> Matrix:
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                idx = tuple(1 if jj == j else 0 for jj in range(n))
                row.append(self.components[i].coefficient(idx))
            rows.append(row)
        return Matrix(rows)

    def has_diagonal_linear_part(self) -> bool:
        lp = self.linear_part()
        return all(lp[i, j].is_zero()
                   for i in range(self.n) for j in range(self.n) if i != j)

    @classmethod
    def diagonal(cls, ratios: Sequence, cutoff: int) -> "JetAutomorphism":
        vals = [rat(r) for r in ratios]
        n = len(vals)
        return cls(tuple(TruncatedSeries.variable(n, cutoff, i, vals[i]) for i in range(n)))


def substitute(x: TruncatedSeries, t: JetAutomorphism) -> TruncatedSeries:
    """x composed with the substitution, truncated at the series cutoff."""
    if x.n != t.n:
        raise ValueError("variable count mismatch between series and substitution")
    cutoff = x.cutoff
    comps = [c.truncate(cutoff) for c in t.components]
    # powers of each component, computed once up to the cutoff
    powers: List[List[TruncatedSeries]] = []
    for c in comps:
        ps = [TruncatedSeries.constant(x.n, cutoff, 1)]
        for _ in range(cutoff):
            ps.append(ps[-1] * c)
        powers.append(ps)
    out = TruncatedSeries.zero(x.n, cutoff)
    for idx, coeff in x.coeffs.items():
        term = TruncatedSeries.constant(x.n, cutoff, coeff)
        for j, e in enumerate(idx):
            if e:
                term = term * powers[j][e]
        out = out + term
    return out


def linear_eigenvalues(t: JetAutomorphism):
    """Exact eigenvalues of the linear part with multiplicities, plus monic
    irreducible factors for any part of the spectrum outside the scalar field."""
    cp = char_poly(t.linear_part())
    return factor_poly(cp)


@dataclass(frozen=True)
class SpectrumMonoid:
    """Products of the generator eigenvalues with exponent sum <= bound."""

    generators: Tuple[Scalar, ...]
    bound: int
    elements: Dict[Scalar, MultiIndex]  # value -> lex-smallest witness exponents

    def values(self) -> Tuple[Scalar, ...]:
        return tuple(sorted(self.elements, key=lambda s: s.sort_key()))


def spectrum(t: JetAutomorphism, bound: int) -> SpectrumMonoid:
    """Enumerate the monoid generated by the eigenvalues of the linear part."""
    roots, residual = linear_eigenvalues(t)
    if residual:
        raise IrrationalEigenvalueError(
            "linear part has eigenvalues outside the exact scalar field: "
            + ", ".join(str(f) for f in residual))
    gens = tuple(root for root, _ in roots)
    return enumerate_monoid(gens, bound)


def enumerate_monoid(generators: Sequence, bound: int) -> SpectrumMonoid:
    gens = tuple(rat(g) for g in generators)
    elements: Dict[Scalar, MultiIndex] = {}
    for degree in range(bound + 1):
        for idx in multi_indices(len(gens), degree):
            value = ONE
            for g, e in zip(gens, idx):
                value = value * g ** e
            if value not in elements:
                elements[value] = idx
    return SpectrumMonoid(gens, bound, elements)


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness: Optional[MultiIndex]
    complete: bool  # False when only a bounded search was possible
    bound_used: Optional[int]


def monoid_member(lam, s: SpectrumMonoid) -> MembershipResult:
    """Decide lam in the monoid; complete when every generator lies in (0,1)."""
    lam = rat(lam)
    gens = s.generators
    if lam == ONE:
        return MembershipResult(True, (0,) * len(gens), True, None)
    if lam in s.elements:
        return MembershipResult(True, s.elements[lam], True, None)
    contracting = all(g.is_real and ZERO < g < ONE for g in gens)
    if contracting:
        if not lam.is_real or lam <= ZERO or lam > ONE:
            return MembershipResult(False, None, True, None)
        witness = _contracting_search(gens, lam)
        return MembershipResult(witness is not None, witness, True, None)
    # mixed magnitudes: the bounded enumeration is all we can certify
    return MembershipResult(False, None, False, s.bound)


def _contracting_search(gens: Tuple[Scalar, ...], lam: Scalar) -> Optional[MultiIndex]:
    """Exhaustive search with per-generator exponent caps g^e >= lam."""
    caps = []
    for g in gens:
        e, power = 0, ONE
        while power >= lam:
            e += 1
            power = power * g
        caps.append(e - 1)

    n = len(gens)

    def rec(i: int, residual: Scalar, prefix: Tuple[int, ...]) -> Optional[MultiIndex]:
        if i == n:
            return prefix if residual == ONE else None
        power = ONE
        for e in range(caps[i] + 1):
            if power < residual:
                break  # remaining generators only shrink the product
            found = rec(i + 1, residual / power, prefix + (e,))
            if found is not None:
                return found
            power = power * gens[i]
        return None

    return rec(0, lam, ())


def resolvent_solve(t: JetAutomorphism, lam, y: TruncatedSeries,
                    cutoff: Optional[int] = None) -> TruncatedSeries:
    """Unique x with substitute(x, t) - lam*x = y modulo total degree > cutoff.

    Solved one homogeneous degree at a time: the degree-d unknowns satisfy a
    square exact linear system whose matrix is the symmetric-power action of
    the linear part minus lam; lower degrees feed the right-hand side.
    """
    lam = rat(lam)
    n = t.n
    cutoff = y.cutoff if cutoff is None else cutoff
    y = y.truncate(cutoff)
    x = TruncatedSeries.zero(n, cutoff)
    lp = t.linear_part()
    diagonal = t.has_diagonal_linear_part()
    for degree in range(cutoff + 1):
        basis = multi_indices(n, degree)
        action = _symmetric_power_action(lp, n, degree, basis)
        system = action - Matrix.identity(len(basis)).scale(lam)
        if rank(system) < len(basis):
            witness = None
            if diagonal:
                witness = next((idx for idx in basis
                                if _diag_eigenvalue(lp, idx) == lam), None)
            raise SingularWeightError(degree, witness)
        correction = substitute(x, t)
        rhs_series = y - correction
        rhs = [rhs_series.coefficient(idx) for idx in basis]
        sol = solve(system, rhs)
        if sol is None:  # full-rank square system always solves
            raise SingularWeightError(degree)
        x = x + TruncatedSeries(n, cutoff, dict(zip(basis, sol)))
    return x


def _diag_eigenvalue(lp: Matrix, idx: MultiIndex) -> Scalar:
    value = ONE
    for i, e in enumerate(idx):
        value = value * lp[i, i] ** e
    return value


def _symmetric_power_action(lp: Matrix, n: int, degree: int,
                            basis: Tuple[MultiIndex, ...]) -> Matrix:
    """Matrix of monomial -> monomial(L X) on the homogeneous degree."""
    index = {idx: i for i, idx in enumerate(basis)}
    linear = [TruncatedSeries(n, degree,
                              {tuple(1 if jj == j else 0 for jj in range(n)): lp[i, j]
                               for j in range(n) if lp[i, j]})
              for i in range(n)]
    cols = []
    for idx in basis:
        term = TruncatedSeries.constant(n, degree, 1)
        for i, e in enumerate(idx):
            for _ in range(e):
                term = term * linear[i]
        col = [ZERO] * len(basis)
        for mono, c in term.coeffs.items():
            col[index[mono]] = c
        cols.append(col)
    return Matrix(cols).transpose()


def residual(t: JetAutomorphism, lam, x: TruncatedSeries,
             y: TruncatedSeries) -> TruncatedSeries:
    """substitute(x, t) - lam*x - y; zero exactly when x solves the resolvent."""
    return substitute(x, t) - x.scale(rat(lam)) - y
