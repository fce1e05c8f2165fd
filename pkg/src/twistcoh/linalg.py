"""Exact dense linear algebra over the (Gaussian-) rational scalars.

Matrices and subspaces are immutable; every basis is kept in reduced row
echelon form with leading ones, so identical inputs always produce identical
output bases.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Tuple

from .scalars import ONE, ZERO, Scalar, rat

Vector = Tuple[Scalar, ...]


class DimensionError(ValueError):
    """Shapes or ambient dimensions do not match."""


class ContainmentError(ValueError):
    """A quotient was requested for spaces without the required inclusion."""


def as_vector(entries: Iterable) -> Vector:
    return tuple(rat(x) for x in entries)


class Matrix:
    """Dense matrix with Scalar entries; rows are tuples."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: Optional[int] = None):
        rs = tuple(as_vector(r) for r in rows)
        if rs:
            width = len(rs[0])
            if any(len(r) != width for r in rs):
                raise DimensionError("ragged rows")
            if ncols is not None and ncols != width:
                raise DimensionError("ncols disagrees with row width")
            ncols = width
        elif ncols is None:
            ncols = 0
        object.__setattr__(self, "rows", rs)
        object.__setattr__(self, "nrows", len(rs))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls([[ZERO] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        return hash((self.rows, self.ncols))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: {body})"

    def transpose(self) -> "Matrix":
        return Matrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
                      self.nrows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionError("matrix addition shape mismatch")
        return Matrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
                      self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(Scalar(-1))

    def scale(self, c) -> "Matrix":
        c = rat(c)
        return Matrix([[c * x for x in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionError("matrix product shape mismatch")
        ot = other.transpose().rows
        return Matrix([[_dot(r, c) for c in ot] for r in self.rows], other.ncols)

    def apply(self, v: Sequence) -> Vector:
        vec = as_vector(v)
        if len(vec) != self.ncols:
            raise DimensionError("vector length mismatch")
        return tuple(_dot(r, vec) for r in self.rows)

    def conjugate(self) -> "Matrix":
        return Matrix([[x.conjugate() for x in r] for r in self.rows], self.ncols)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)


def _dot(a: Vector, b: Vector) -> Scalar:
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s = s + x * y
    return s


def stack_v(*mats: Matrix) -> Matrix:
    ncols = {m.ncols for m in mats}
    if len(ncols) != 1:
        raise DimensionError("vertical stack needs equal column counts")
    rows = []
    for m in mats:
        rows.extend(m.rows)
    return Matrix(rows, ncols.pop())


def stack_h(*mats: Matrix) -> Matrix:
    nrows = {m.nrows for m in mats}
    if len(nrows) != 1:
        raise DimensionError("horizontal stack needs equal row counts")
    n = nrows.pop()
    return Matrix([sum((list(m.rows[i]) for m in mats), []) for i in range(n)],
                  sum(m.ncols for m in mats))


def _rref(rows: Sequence[Vector], ncols: int) -> Tuple[Tuple[Vector, ...], Tuple[int, ...]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = ONE / work[r][c]
        work[r] = [inv * x for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return tuple(tuple(row) for row in work[:r]), tuple(pivots)


class Subspace:
    """Linear subspace of Scalar^n, stored as an echelonized row basis."""

    __slots__ = ("ambient", "basis", "pivots")

    def __init__(self, ambient: int, vectors: Sequence[Sequence] = ()):
        vecs = [as_vector(v) for v in vectors]
        if any(len(v) != ambient for v in vecs):
            raise DimensionError("vector length differs from ambient dimension")
        basis, pivots = _rref(vecs, ambient)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "pivots", pivots)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.identity(ambient).rows)

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient, ())

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of {self.ambient})"

    def contains_vector(self, v: Sequence) -> bool:
        vec = as_vector(v)
        if len(vec) != self.ambient:
            raise DimensionError("ambient mismatch")
        _, pivots = _rref(list(self.basis) + [vec], self.ambient)
        return len(pivots) == self.dim

    def contains(self, other: "Subspace") -> bool:
        if self.ambient != other.ambient:
            raise DimensionError("ambient mismatch")
        merged, _ = _rref(list(self.basis) + list(other.basis), self.ambient)
        return len(merged) == self.dim

    def matrix(self) -> Matrix:
        return Matrix(self.basis, self.ambient)

    def conjugate(self) -> "Subspace":
        return Subspace(self.ambient, [tuple(x.conjugate() for x in v) for v in self.basis])


def rank(m: Matrix) -> int:
    _, pivots = _rref(m.rows, m.ncols)
    return len(pivots)


def kernel_basis(m: Matrix) -> Subspace:
    """Basis of ker(m) as a subspace of the column space Scalar^ncols."""
    rref_rows, pivots = _rref(m.rows, m.ncols)
    pivot_set = set(pivots)
    free = [c for c in range(m.ncols) if c not in pivot_set]
    vecs = []
    for f in free:
        v = [ZERO] * m.ncols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -rref_rows[i][f]
        vecs.append(v)
    return Subspace(m.ncols, vecs)


def image_subspace(m: Matrix) -> Subspace:
    """Column space of m, echelonized."""
    return Subspace(m.nrows, m.transpose().rows)


def annihilator(s: Subspace) -> Matrix:
    """Matrix whose kernel is exactly s (rows span the dual annihilator)."""
    if s.dim == 0:
        return Matrix.identity(s.ambient)
    ann = kernel_basis(Matrix(s.basis, s.ambient))
    return Matrix(ann.basis, s.ambient)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient != b.ambient:
        raise DimensionError("cannot intersect subspaces of different ambient dimension")
    return kernel_basis(stack_v(annihilator(a), annihilator(b)))


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient != b.ambient:
        raise DimensionError("cannot sum subspaces of different ambient dimension")
    return Subspace(a.ambient, list(a.basis) + list(b.basis))


def quotient_dim(big: Subspace, small: Subspace) -> int:
    if not big.contains(small):
        raise ContainmentError("quotient denominator is not contained in the numerator")
    return big.dim - small.dim


def quotient_reps(big: Subspace, small: Subspace) -> Tuple[Vector, ...]:
    """Canonical representatives of big/small: the echelon rows of big whose
    pivot column is not a pivot of small."""
    if not big.contains(small):
        raise ContainmentError("quotient denominator is not contained in the numerator")
    small_pivots = set(small.pivots)
    return tuple(row for row, p in zip(big.basis, big.pivots) if p not in small_pivots)


def coset_reduce(v: Sequence, small: Subspace) -> Vector:
    """Canonical representative of v + small: eliminate the pivot entries of small."""
    vec = list(as_vector(v))
    if len(vec) != small.ambient:
        raise DimensionError("ambient mismatch")
    for row, p in zip(small.basis, small.pivots):
        if vec[p]:
            f = vec[p]
            vec = [x - f * y for x, y in zip(vec, row)]
    return tuple(vec)


def preimage(m: Matrix, target: Subspace) -> Subspace:
    """{x : m @ x lies in target}, a subspace of the domain."""
    if m.nrows != target.ambient:
        raise DimensionError("target ambient differs from matrix row count")
    return kernel_basis(annihilator(target) @ m)


def apply_to_subspace(m: Matrix, s: Subspace) -> Subspace:
    """Image m(s) of a subspace of the domain."""
    if m.ncols != s.ambient:
        raise DimensionError("subspace ambient differs from matrix column count")
    return Subspace(m.nrows, [m.apply(v) for v in s.basis])


def solve(m: Matrix, b: Sequence) -> Optional[Vector]:
    """One exact solution of m x = b, or None if inconsistent (free variables 0)."""
    rhs = as_vector(b)
    if len(rhs) != m.nrows:
        raise DimensionError("right-hand side length mismatch")
    aug = Matrix([list(r) + [v] for r, v in zip(m.rows, rhs)] if m.nrows else [],
                 m.ncols + 1)
    rref_rows, pivots = _rref(aug.rows, aug.ncols)
    if m.ncols in pivots:
        return None
    x = [ZERO] * m.ncols
    for row, p in zip(rref_rows, pivots):
        x[p] = row[m.ncols]
    return tuple(x)
