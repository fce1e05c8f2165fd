"""Twisted cohomology of a model for a chosen weight: the flat-twist complex,
weighted Dolbeault and Bott-Chern groups, the twisted-ddc check, and the
exceptional weight locus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import exterior
from .bigraded import BigradedModel
from .exterior import monomials
from .linalg import (Matrix, Subspace, Vector, apply_to_subspace, image_subspace,
                     intersect, kernel_basis, quotient_dim, quotient_reps,
                     coset_reduce, solve, stack_v, subspace_sum)
from .models import Model, ModelError
from .pencil import (ExceptionalSet, Pencil, PolyMatrix, pencil_exceptional_set,
                     poly_exceptional_set)
from .scalars import IMAG, ONE, ZERO, Scalar, rat


class ConventionError(AssertionError):
    """An internal sign/convention identity failed; indicates a bug, not bad data."""


@dataclass(frozen=True)
class Weight:
    """The twist multiple: the flat connection is d - alpha * (Lee form)."""

    alpha: Scalar

    @classmethod
    def of(cls, x) -> "Weight":
        return cls(rat(x))


@dataclass(frozen=True)
class CohomologyReport:
    kind: str  # "mn" | "dolbeault" | "bott_chern"
    alpha: Scalar
    dims: Dict
    reps: Dict

    def dim_vector(self) -> Tuple[int, ...]:
        if self.kind == "mn":
            return tuple(self.dims[k] for k in sorted(self.dims))
        raise ValueError("dim_vector is only defined for the degree-graded kind")


class TwistedComplex:
    """All twisted operators of (model, weight), with symbolic pencil access.

    Evaluated matrices are cached; the defining identities (square zero,
    bidegree split, anticommutation) are asserted once per construction.
    """

    def __init__(self, model: Model, weight: Union[Weight, Scalar, int, str],
                 need_bigraded: bool = True):
        if not isinstance(weight, Weight):
            weight = Weight.of(weight)
        self.model = model
        self.weight = weight
        self.alpha = weight.alpha
        dgen = model.d_generators()
        if exterior.apply_derivation(model.theta_form(), dgen):
            raise ModelError("the Lee form is not closed; twists are undefined")
        self.n = model.n
        self._dgen = dgen
        self.bigr: Optional[BigradedModel] = BigradedModel(model) if need_bigraded else None
        self._mn: Dict[int, Matrix] = {}
        self._total: Dict[int, Matrix] = {}
        self._blocks: Dict[Tuple[str, int, int], Matrix] = {}
        self._check_real_identities()
        if self.bigr is not None:
            self._check_bigraded_identities()

    # -- real (de Rham basis) operators ------------------------------------
    def mn_pencil(self, k: int) -> Pencil:
        a = exterior.derivation_matrix(self.n, k, self._dgen)
        b = exterior.wedge_matrix(self.n, k, self.model.theta_form()).scale(Scalar(-1))
        return Pencil(a, b)

    def mn_matrix(self, k: int) -> Matrix:
        if k not in self._mn:
            self._mn[k] = self.mn_pencil(k).evaluate(self.alpha)
        return self._mn[k]

    def _check_real_identities(self):
        for k in range(self.n):
            if not (self.mn_matrix(k + 1) @ self.mn_matrix(k)).is_zero():
                raise ConventionError(f"twisted differential does not square to zero at degree {k}")

    # -- complexified operators ---------------------------------------------
    def total_pencil(self, k: int) -> Pencil:
        bg = self._bigraded()
        a = bg.d_total(k)
        b = bg.wedge_total(bg.theta_complex, k).scale(Scalar(-1))
        return Pencil(a, b)

    def total_matrix(self, k: int) -> Matrix:
        if k not in self._total:
            self._total[k] = self.total_pencil(k).evaluate(self.alpha)
        return self._total[k]

    def dc_pencil(self, k: int) -> Pencil:
        """I d_twist I^{-1}, with I acting diagonally on the bigraded blocks."""
        bg = self._bigraded()
        p = self.total_pencil(k)
        left = bg.j_diagonal(k + 1)
        right = bg.j_diagonal(k)
        return Pencil(_diag_conjugate(p.a, left, right), _diag_conjugate(p.b, left, right))

    def dc_matrix(self, k: int) -> Matrix:
        return self.dc_pencil(k).evaluate(self.alpha)

    def block_pencil(self, which: str, p: int, q: int) -> Pencil:
        """Affine pencil of a bidegree operator: 'del' (p,q)->(p+1,q) or
        'dbar' (p,q)->(p,q+1)."""
        bg = self._bigraded()
        if which == "del":
            a = bg.d_component(p, q, 1, 0)
            b = bg.wedge_component(bg.theta10, p, q, 1, 0).scale(Scalar(-1))
        elif which == "dbar":
            a = bg.d_component(p, q, 0, 1)
            b = bg.wedge_component(bg.theta01, p, q, 0, 1).scale(Scalar(-1))
        else:
            raise ValueError(f"unknown block operator {which!r}")
        return Pencil(a, b)

    def block_matrix(self, which: str, p: int, q: int) -> Matrix:
        key = (which, p, q)
        if key not in self._blocks:
            self._blocks[key] = self.block_pencil(which, p, q).evaluate(self.alpha)
        return self._blocks[key]

    def ddc_matrix(self, p: int, q: int) -> Matrix:
        """The degree-(1,1) square: (p-1,q-1) -> (p,q), i.e. d d^c restricted."""
        c = self.ddc_constant()
        return (self.block_matrix("del", p - 1, q)
                @ self.block_matrix("dbar", p - 1, q - 1)).scale(c)

    def ddc_constant(self) -> Scalar:
        """Constant c with d_t d^c_t = c * del_t dbar_t, calibrated symbolically
        on functions; the complex-structure convention forces c in {2i, -2i}."""
        if not hasattr(self, "_ddc_c"):
            lhs = (PolyMatrix.from_affine(*_pencil_pair(self.total_pencil(1)))
                   @ PolyMatrix.from_affine(*_pencil_pair(self.dc_pencil(0))))
            del_p = self.block_pencil("del", 0, 1)
            dbar_p = self.block_pencil("dbar", 0, 0)
            rhs = (PolyMatrix.from_affine(*_pencil_pair(del_p))
                   @ PolyMatrix.from_affine(*_pencil_pair(dbar_p)))
            bg = self._bigraded()
            rows = bg.block_slice(2, 1)
            c = _matrix_ratio(lhs, rhs, rows)
            if c is None:
                c = Scalar(0, 2)  # both sides vanish identically; fix the standard value
            if c != Scalar(0, 2) and c != Scalar(0, -2):
                raise ConventionError(f"d d^c calibration gave unexpected constant {c}")
            self._ddc_c = c
        return self._ddc_c

    def _bigraded(self) -> BigradedModel:
        if self.bigr is None:
            self.bigr = BigradedModel(self.model)
        return self.bigr

    def _check_bigraded_identities(self):
        bg = self._bigraded()
        m = bg.m
        for p in range(m + 1):
            for q in range(m + 1):
                dd = self.block_matrix("del", p + 1, q) @ self.block_matrix("del", p, q)
                bb = self.block_matrix("dbar", p, q + 1) @ self.block_matrix("dbar", p, q)
                anti = (self.block_matrix("dbar", p + 1, q) @ self.block_matrix("del", p, q)
                        + self.block_matrix("del", p, q + 1) @ self.block_matrix("dbar", p, q))
                if not (dd.is_zero() and bb.is_zero() and anti.is_zero()):
                    raise ConventionError(f"bigraded square/anticommutation fails at ({p},{q})")
        # total twist differential equals the sum of its two bidegree components
        for k in range(self.n + 1):
            total = self.total_matrix(k)
            rebuilt = _assemble_blocks(bg, k, self)
            if total != rebuilt:
                raise ConventionError(f"d != del + dbar on complexified degree {k}")

    # -- embeddings -----------------------------------------------------------
    def embed_block(self, p: int, q: int, vec: Sequence[Scalar]) -> Vector:
        bg = self._bigraded()
        k = p + q
        total = len(bg.total_basis(k))
        sl = bg.block_slice(k, p)
        out = [ZERO] * total
        for i, c in enumerate(vec):
            out[sl.start + i] = c
        return tuple(out)

    def block_subspace(self, p: int, q: int) -> Subspace:
        bg = self._bigraded()
        k = p + q
        sl = bg.block_slice(k, p)
        total = len(bg.total_basis(k))
        vecs = []
        for i in range(sl.start, sl.stop):
            v = [ZERO] * total
            v[i] = ONE
            vecs.append(v)
        return Subspace(total, vecs)

    def restrict_to_block(self, p: int, q: int, vec: Sequence[Scalar]) -> Vector:
        bg = self._bigraded()
        sl = bg.block_slice(p + q, p)
        return tuple(vec[sl])


def _pencil_pair(p: Pencil) -> Tuple[Matrix, Matrix]:
    return p.a, p.b


def _diag_conjugate(m: Matrix, left: Sequence[Scalar], right: Sequence[Scalar]) -> Matrix:
    rows = []
    for i in range(m.nrows):
        rows.append([left[i] * m[i, j] / right[j] for j in range(m.ncols)])
    return Matrix(rows, m.ncols)


def _matrix_ratio(a: PolyMatrix, b: PolyMatrix, rows: slice) -> Optional[Scalar]:
    """c with a[rows,:] = c * b entrywise (polynomial entries), None if b = 0."""
    from .pencil import pscale, psub

    c: Optional[Scalar] = None
    sub = a.entries[rows]
    for ra, rb in zip(sub, b.entries):
        for ea, eb in zip(ra, rb):
            if eb:
                ratio = ea[-1] / eb[-1] if len(ea) == len(eb) else None
                if ratio is None or psub(ea, pscale(eb, ratio)):
                    raise ConventionError("d d^c is not proportional to del dbar")
                if c is None:
                    c = ratio
                elif c != ratio:
                    raise ConventionError("d d^c calibration is not a single constant")
            elif ea:
                raise ConventionError("d d^c has support where del dbar vanishes")
    return c


def _assemble_blocks(bg: BigradedModel, k: int, tc: TwistedComplex) -> Matrix:
    """Rebuild the total twisted differential from the del/dbar blocks."""
    total_src = bg.total_basis(k)
    total_dst = bg.total_basis(k + 1)
    out = [[ZERO] * len(total_src) for _ in range(len(total_dst))]
    for p in range(min(k, bg.m), -1, -1):
        q = k - p
        src = bg.block_slice(k, p)
        for which, dp, dq in (("del", 1, 0), ("dbar", 0, 1)):
            tp, tq = p + dp, q + dq
            if tp > bg.m or tq > bg.m:
                continue
            dst = bg.block_slice(k + 1, tp)
            m = tc.block_matrix(which, p, q)
            for i in range(m.nrows):
                for j in range(m.ncols):
                    out[dst.start + i][src.start + j] = m[i, j]
    return Matrix(out, len(total_src))


# -- public operations ------------------------------------------------------

def morse_novikov(model: Model, weight) -> CohomologyReport:
    """Cohomology of the flat-twist complex (d - alpha*theta) on real forms."""
    tc = TwistedComplex(model, weight, need_bigraded=False)
    dims: Dict[int, int] = {}
    reps: Dict[int, Tuple[Vector, ...]] = {}
    for k in range(model.n + 1):
        ker = kernel_basis(tc.mn_matrix(k))
        im = image_subspace(tc.mn_matrix(k - 1)) if k > 0 else Subspace.zero(ker.ambient)
        dims[k] = quotient_dim(ker, im)
        reps[k] = quotient_reps(ker, im)
    return CohomologyReport("mn", tc.alpha, dims, reps)


def dolbeault(model: Model, weight) -> CohomologyReport:
    """Twisted Dolbeault numbers h^{p,q} for the weight, with representatives."""
    tc = TwistedComplex(model, weight)
    bg = tc.bigr
    dims: Dict[Tuple[int, int], int] = {}
    reps: Dict[Tuple[int, int], Tuple[Vector, ...]] = {}
    for p in range(bg.m + 1):
        for q in range(bg.m + 1):
            ker = kernel_basis(tc.block_matrix("dbar", p, q))
            if q > 0:
                im = image_subspace(tc.block_matrix("dbar", p, q - 1))
            else:
                im = Subspace.zero(ker.ambient)
            dims[(p, q)] = quotient_dim(ker, im)
            reps[(p, q)] = quotient_reps(ker, im)
    return CohomologyReport("dolbeault", tc.alpha, dims, reps)


def bott_chern(model: Model, weight, p: int, q: int,
               tc: Optional[TwistedComplex] = None) -> CohomologyReport:
    """One Bott-Chern group: (ker del & ker dbar) / im(d d^c) at bidegree (p,q)."""
    tc = tc or TwistedComplex(model, weight)
    numerator = intersect(kernel_basis(tc.block_matrix("del", p, q)),
                          kernel_basis(tc.block_matrix("dbar", p, q)))
    if p >= 1 and q >= 1:
        denominator = image_subspace(tc.ddc_matrix(p, q))
    else:
        denominator = Subspace.zero(numerator.ambient)
    if not numerator.contains(denominator):
        raise ConventionError(
            f"im(d d^c) is not contained in ker(d) & ker(d^c) at ({p},{q})")
    dim = quotient_dim(numerator, denominator)
    return CohomologyReport("bott_chern", tc.alpha, {(p, q): dim},
                            {(p, q): quotient_reps(numerator, denominator)})


def bott_chern_table(model: Model, weight) -> CohomologyReport:
    tc = TwistedComplex(model, weight)
    dims: Dict[Tuple[int, int], int] = {}
    reps: Dict[Tuple[int, int], Tuple[Vector, ...]] = {}
    for p in range(tc.bigr.m + 1):
        for q in range(tc.bigr.m + 1):
            entry = bott_chern(model, weight, p, q, tc=tc)
            dims[(p, q)] = entry.dims[(p, q)]
            reps[(p, q)] = entry.reps[(p, q)]
    return CohomologyReport("bott_chern", tc.alpha, dims, reps)


@dataclass(frozen=True)
class DdcVerdict:
    p: int
    q: int
    holds: bool
    exact_twisted_dim: int   # dim of (im d) & (ker d^c) at the bidegree
    ddc_image_dim: int
    witness: Optional[Vector]  # class in the left side missing from the right


def ddc_lemma_check(model: Model, weight, p: int, q: int,
                    tc: Optional[TwistedComplex] = None) -> DdcVerdict:
    """Twisted ddc property at (p,q): im d & ker d^c & (p,q)-block == im d d^c."""
    tc = tc or TwistedComplex(model, weight)
    k = p + q
    im_d = image_subspace(tc.total_matrix(k - 1)) if k > 0 else \
        Subspace.zero(len(tc.bigr.total_basis(k)))
    ker_dc = kernel_basis(tc.dc_matrix(k))
    lhs = intersect(intersect(im_d, ker_dc), tc.block_subspace(p, q))
    if p >= 1 and q >= 1:
        rhs_block = image_subspace(tc.ddc_matrix(p, q))
        rhs = Subspace(lhs.ambient, [tc.embed_block(p, q, v) for v in rhs_block.basis])
    else:
        rhs = Subspace.zero(lhs.ambient)
    if not lhs.contains(rhs):
        raise ConventionError(f"im(d d^c) escapes im(d) & ker(d^c) at ({p},{q})")
    holds = lhs.dim == rhs.dim
    witness = None if holds else quotient_reps(lhs, rhs)[0]
    return DdcVerdict(p, q, holds, lhs.dim, rhs.dim, witness)


@dataclass(frozen=True)
class MnClassResult:
    closed: bool
    exact: bool
    primitive: Optional[Vector]
    class_coords: Optional[Vector]  # canonical coset representative, None if not closed


def mn_class(model: Model, weight, form: Sequence) -> MnClassResult:
    """Twisted-closedness and twisted-exactness of a real 2-form."""
    tc = TwistedComplex(model, weight, need_bigraded=False)
    vec = tuple(rat(x) for x in form)
    closed = all(not c for c in tc.mn_matrix(2).apply(vec))
    primitive = solve(tc.mn_matrix(1), vec)
    exact = primitive is not None
    coords = None
    if closed:
        coords = coset_reduce(vec, image_subspace(tc.mn_matrix(1)))
    return MnClassResult(closed, exact, primitive, coords)


def omega_vector(model: Model) -> Vector:
    """The model's 2-form omega as coordinates on the degree-2 monomial basis."""
    basis = monomials(model.n, 2)
    return exterior.form_to_vector(model.omega_form(), basis)


# -- exceptional weight locus -------------------------------------------------

Selector = Union[str, int, Tuple[int, int]]


@dataclass(frozen=True)
class WeightSpectrum:
    """Rational weights where some twisted rank jumps, plus residual factors."""

    selector: str
    rational: Tuple[Scalar, ...]
    residual_factors: Tuple[Tuple[Scalar, ...], ...]

    def contains(self, alpha) -> bool:
        a = rat(alpha)
        probe = ExceptionalSet(-1, self.rational, self.residual_factors)
        return probe.contains(a)


def _bc_pencils(tc: TwistedComplex, p: int, q: int) -> List[PolyMatrix]:
    """Every pencil whose rank controls the Bott-Chern/ddc dimensions at (p,q)."""
    bg = tc.bigr
    k = p + q
    out: List[PolyMatrix] = []
    del_pm = PolyMatrix.from_affine(*_pencil_pair(tc.block_pencil("del", p, q)))
    dbar_pm = PolyMatrix.from_affine(*_pencil_pair(tc.block_pencil("dbar", p, q)))
    out.append(del_pm.stack(dbar_pm))  # controls ker del & ker dbar
    if p >= 1 and q >= 1:
        out.append(PolyMatrix.from_affine(*_pencil_pair(tc.block_pencil("del", p - 1, q)))
                   @ PolyMatrix.from_affine(*_pencil_pair(tc.block_pencil("dbar", p - 1, q - 1))))
    if k > 0:
        d_prev = PolyMatrix.from_affine(*_pencil_pair(tc.total_pencil(k - 1)))
        out.append(d_prev)
        # im d & ker d^c & block has dim = rank(d_prev) - rank(C @ d_prev)
        dc_pm = PolyMatrix.from_affine(*_pencil_pair(tc.dc_pencil(k)))
        proj = _block_complement_rows(bg, k, p)
        out.append(dc_pm.stack(proj) @ d_prev)
    out.append(PolyMatrix.from_affine(*_pencil_pair(tc.total_pencil(k))))
    return out


def _block_complement_rows(bg: BigradedModel, k: int, p: int) -> PolyMatrix:
    """Constant rows selecting every coordinate outside the (p, k-p) block."""
    total = len(bg.total_basis(k))
    sl = bg.block_slice(k, p)
    rows = []
    for i in range(total):
        if sl.start <= i < sl.stop:
            continue
        row = [() for _ in range(total)]
        row[i] = (ONE,)
        rows.append(row)
    return PolyMatrix(rows, total)


def exceptional_spectrum(model: Model, selector: Selector = "all") -> WeightSpectrum:
    """Rational weights at which any selected twisted dimension jumps.

    Selectors: 'mn' (all degrees), a degree int, 'dolbeault' (all bidegrees),
    a (p,q) pair, 'bc' (Bott-Chern/ddc machinery), or 'all'.
    """
    tc = TwistedComplex(model, Weight.of(0))
    bg = tc.bigr
    pencils: List[PolyMatrix] = []

    def add_pencil(pencil: Pencil):
        pencils.append(PolyMatrix.from_affine(pencil.a, pencil.b))

    if selector == "mn" or selector == "all":
        for k in range(model.n + 1):
            add_pencil(tc.mn_pencil(k))
    elif isinstance(selector, int):
        for k in (selector - 1, selector):
            if 0 <= k <= model.n:
                add_pencil(tc.mn_pencil(k))
    if selector == "dolbeault" or selector == "all":
        for p in range(bg.m + 1):
            for q in range(bg.m + 1):
                add_pencil(tc.block_pencil("dbar", p, q))
    elif isinstance(selector, tuple):
        p, q = selector
        for qq in (q - 1, q):
            if 0 <= qq <= bg.m:
                add_pencil(tc.block_pencil("dbar", p, qq))
    if selector == "bc" or selector == "all":
        for p in range(bg.m + 1):
            for q in range(bg.m + 1):
                pencils.extend(_bc_pencils(tc, p, q))

    if not pencils:
        raise ValueError(f"selector {selector!r} produced no pencils")
    merged: Optional[ExceptionalSet] = None
    for pm in pencils:
        es = poly_exceptional_set(pm)
        merged = es if merged is None else merged.merge(es)
    sel_name = selector if isinstance(selector, str) else repr(selector)
    return WeightSpectrum(sel_name, merged.rational_roots, merged.residual_factors)
