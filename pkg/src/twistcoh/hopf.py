"""Exact sheaf-cohomology dimensions on diagonal Hopf quotients.

The contraction acts diagonally on monomial forms, so the weight-alpha
eigenspaces are finite and enumerable with certified exponent bounds; the
cohomology dimensions follow by splicing the long exact sequence of the
cyclic quotient, where only the bottom and top cohomology of the punctured
cover are nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .jets import MembershipResult, enumerate_monoid, monoid_member
from .scalars import ONE, ZERO, Scalar, rat

MultiIndex = Tuple[int, ...]


@dataclass(frozen=True)
class HopfData:
    """Diagonal contraction data: eigenvalue ratios beta_i in (0,1) on the
    n-dimensional cover, and the positive rational weight alpha."""

    n: int
    beta: Tuple[Scalar, ...]
    alpha: Scalar

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need complex dimension at least 2")
        if len(self.beta) != self.n:
            raise ValueError("one contraction ratio per variable is required")
        for b in self.beta:
            if not (b.is_real and ZERO < b < ONE):
                raise ValueError(f"contraction ratios must lie in (0,1); got {b}")
        if not (self.alpha.is_real and self.alpha > ZERO):
            raise ValueError("the weight must be a positive rational")

    @classmethod
    def of(cls, beta: Sequence, alpha) -> "HopfData":
        bs = tuple(rat(b) for b in beta)
        return cls(len(bs), bs, rat(alpha))


@dataclass(frozen=True)
class MonomialForm:
    """z^I dz_J, either polynomial (I >= 0) or principal-part (I <= -1)."""

    exponents: MultiIndex
    dz_indices: Tuple[int, ...]
    slot: str  # "regular" | "laurent"

    def eigenvalue(self, beta: Tuple[Scalar, ...]) -> Scalar:
        value = ONE
        for b, e in zip(beta, self.exponents):
            value = value * b ** e
        for j in self.dz_indices:
            value = value * beta[j]
        return value


def eigenspace(h: HopfData, p: int, slot: str) -> Tuple[MonomialForm, ...]:
    """All monomial p-forms in the slot whose contraction eigenvalue equals alpha."""
    if slot not in ("regular", "laurent"):
        raise ValueError(f"unknown slot {slot!r}")
    if p < 0 or p > h.n:
        return ()
    out: List[MonomialForm] = []
    for dz in combinations(range(h.n), p):
        target = h.alpha
        for j in dz:
            target = target / h.beta[j]
        if slot == "regular":
            for idx in _products_equal(h.beta, target, minimum=0):
                out.append(MonomialForm(idx, dz, slot))
        else:
            # exponents <= -1: write I = -K with K >= 1 and match 1/beta powers
            for k_idx in _products_equal(tuple(ONE / b for b in h.beta), target, minimum=1):
                out.append(MonomialForm(tuple(-k for k in k_idx), dz, slot))
    out.sort(key=lambda f: (f.dz_indices, f.exponents))
    return tuple(out)


def _products_equal(ratios: Tuple[Scalar, ...], target: Scalar,
                    minimum: int) -> List[MultiIndex]:
    """Exponent vectors e (each e_i >= minimum) with prod ratios_i^{e_i} = target.

    The ratios are all on one side of 1, so the search is finite: for
    shrinking ratios the tail products are bounded above by the minimal-
    exponent tail, for growing ratios bounded below, and the residual moves
    monotonically with the exponent.
    """
    n = len(ratios)
    if not target.is_real or target <= ZERO:
        return []
    shrinking = ratios[0] < ONE
    # extreme possible product of coordinates i.. at the minimal exponent
    tail = [ONE] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail[i] = tail[i + 1] * ratios[i] ** minimum
    out: List[MultiIndex] = []

    def rec(i: int, residual: Scalar, prefix: Tuple[int, ...]):
        if i == n:
            if residual == ONE:
                out.append(prefix)
            return
        r = ratios[i]
        e = minimum
        power = r ** minimum
        while True:
            rest = residual / power
            if shrinking:
                if rest > tail[i + 1]:
                    break  # tails cannot exceed their minimal-exponent value
            else:
                if rest < tail[i + 1]:
                    break  # tails cannot fall below their minimal-exponent value
            rec(i + 1, rest, prefix + (e,))
            e += 1
            power = power * r

    rec(0, target, ())
    out.sort()
    return out


def dolbeault_dims(h: HopfData, p: int) -> Tuple[int, ...]:
    """Dimensions of the alpha-weighted p-form cohomology in degrees 0..n.

    The cover only has cohomology in degrees 0 (polynomial monomials) and n-1
    (principal parts); the diagonal action has equal kernel and cokernel on
    each, of sizes m0 and m1, and the quotient sequence splices to the tuple
    below.
    """
    m0 = len(eigenspace(h, p, "regular"))
    m1 = len(eigenspace(h, p, "laurent"))
    dims = [0] * (h.n + 1)
    dims[0] += m0      # kernel on the degree-0 slot
    dims[1] += m0      # cokernel on the degree-0 slot
    dims[h.n - 1] += m1  # kernel on the top slot of the cover
    dims[h.n] += m1      # cokernel on the top slot
    return tuple(dims)


@dataclass(frozen=True)
class ScanRecord:
    alpha: Scalar
    dims: Tuple[Tuple[int, ...], ...]  # indexed by p
    all_zero: bool
    membership: MembershipResult


@dataclass(frozen=True)
class ScanReport:
    beta: Tuple[Scalar, ...]
    records: Tuple[ScanRecord, ...]


def vanishing_scan(beta: Sequence, grid: Sequence, monoid_bound: int = 24) -> ScanReport:
    """Evaluate all weighted dimensions over the grid and certify that nonzero
    entries happen exactly at points of the eigenvalue monoid."""
    bs = tuple(rat(b) for b in beta)
    monoid = enumerate_monoid(bs, monoid_bound)
    records: List[ScanRecord] = []
    for a in grid:
        alpha = rat(a)
        h = HopfData.of(bs, alpha)
        dims = tuple(dolbeault_dims(h, p) for p in range(h.n + 1))
        all_zero = all(all(d == 0 for d in row) for row in dims)
        membership = monoid_member(alpha, monoid)
        if not membership.complete:
            raise ArithmeticError("contracting ratios must make membership decidable")
        if all_zero == membership.member:
            raise AssertionError(
                f"vanishing/monoid biconditional failed at alpha = {alpha}: "
                f"all_zero={all_zero}, member={membership.member}")
        records.append(ScanRecord(alpha, dims, all_zero, membership))
    return ScanReport(bs, tuple(records))
