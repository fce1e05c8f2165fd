"""Column-filtered spectral sequence of the twisted bigraded complex, its
degeneration page, the induced first-page row maps, and the exactness check
tying Dolbeault classes, Bott-Chern classes and the flat cohomology together."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .linalg import (Matrix, Subspace, Vector, apply_to_subspace, image_subspace,
                     intersect, kernel_basis, preimage, quotient_dim,
                     quotient_reps, coset_reduce, subspace_sum)
from .models import Model
from .scalars import ONE, ZERO, Scalar
from .twisted import (CohomologyReport, ConventionError, TwistedComplex, Weight,
                      bott_chern, dolbeault, morse_novikov)


@dataclass(frozen=True)
class SpectralPage:
    r: int
    dims: Dict[Tuple[int, int], int]
    numerators: Dict[Tuple[int, int], Subspace]
    denominators: Dict[Tuple[int, int], Subspace]

    def reps(self, p: int, q: int) -> Tuple[Vector, ...]:
        return quotient_reps(self.numerators[(p, q)], self.denominators[(p, q)])


class _Filtration:
    """Coordinate filtration of the complexified total complex by holomorphic degree."""

    def __init__(self, tc: TwistedComplex):
        self.tc = tc
        self.bg = tc.bigr
        self.n = tc.model.n
        self.m = self.bg.m

    def total_dim(self, k: int) -> int:
        return len(self.bg.total_basis(k))

    def filtered(self, k: int, p: int) -> Subspace:
        """F^p of the degree-k space: monomials with holomorphic degree >= p."""
        dim = self.total_dim(k)
        if k < 0 or k > self.n:
            return Subspace.zero(max(dim, 0))
        if p <= 0:
            return Subspace.full(dim)
        vecs = []
        for i, mono in enumerate(self.bg.total_basis(k)):
            if self.bg.bidegree(mono)[0] >= p:
                v = [ZERO] * dim
                v[i] = ONE
                vecs.append(v)
        return Subspace(dim, vecs)

    def z_space(self, k: int, p: int, r: int) -> Subspace:
        """F^p cocycle approximants: elements whose differential sits in F^{p+r}."""
        if k < 0 or k > self.n:
            return Subspace.zero(self.total_dim(k))
        d = self.tc.total_matrix(k)
        return intersect(self.filtered(k, p), preimage(d, self.filtered(k + 1, p + r)))

    def page_entry(self, r: int, p: int, q: int) -> Tuple[Subspace, Subspace]:
        """Numerator and denominator of E_r^{p,q} inside the degree p+q space."""
        k = p + q
        num = self.z_space(k, p, r)
        drop = self.z_space(k, p + 1, r - 1)
        d_prev = self.tc.total_matrix(k - 1)
        boundary = apply_to_subspace(d_prev, self.z_space(k - 1, p - r + 1, r - 1))
        den = subspace_sum(drop, boundary)
        if not num.contains(den):
            raise ConventionError(f"page denominator escapes numerator at r={r}, ({p},{q})")
        return num, den


def pages(model: Model, weight, r_max: Optional[int] = None) -> List[SpectralPage]:
    """Pages E_1..E_{r_max} of the twisted spectral sequence (dims and subquotients).

    Differentials vanish for bidegree reasons beyond page m+1, so r_max defaults
    to m+1 and the final returned page equals the limit page.
    """
    tc = TwistedComplex(model, weight)
    filt = _Filtration(tc)
    m = filt.m
    stop = m + 1 if r_max is None else max(1, min(r_max, m + 1))
    out: List[SpectralPage] = []
    for r in range(1, stop + 1):
        dims: Dict[Tuple[int, int], int] = {}
        nums: Dict[Tuple[int, int], Subspace] = {}
        dens: Dict[Tuple[int, int], Subspace] = {}
        for p in range(m + 1):
            for q in range(m + 1):
                num, den = filt.page_entry(r, p, q)
                dims[(p, q)] = quotient_dim(num, den)
                nums[(p, q)] = num
                dens[(p, q)] = den
        out.append(SpectralPage(r, dims, nums, dens))
    return out


def limit_page(model: Model, weight) -> SpectralPage:
    all_pages = pages(model, weight)
    return all_pages[-1]


def degeneration_page(model: Model, weight) -> int:
    """Smallest page index whose dimensions already equal the limit page,
    cross-checked against the flat-cohomology abutment."""
    all_pages = pages(model, weight)
    last = all_pages[-1]
    mn = morse_novikov(model, weight)
    n = model.n
    for k in range(n + 1):
        total = sum(d for (p, q), d in last.dims.items() if p + q == k)
        if total != mn.dims[k]:
            raise ConventionError(
                f"limit page does not abut the flat cohomology at degree {k}")
    for page in all_pages:
        if page.dims == last.dims:
            return page.r
    return last.r


@dataclass(frozen=True)
class RowMapCheck:
    p: int
    q: int
    holds: bool
    kernel_dim: int  # of the outgoing induced map on Dolbeault classes
    image_dim: int   # of the incoming induced map


def _induced_row_map(tc: TwistedComplex, p: int, q: int):
    """Matrix of the map H^{p,q} -> H^{p+1,q} induced by the twisted del,
    together with the class bases on both sides."""
    def classes(pp: int) -> Tuple[Tuple[Vector, ...], Subspace]:
        ker = kernel_basis(tc.block_matrix("dbar", pp, q))
        im = image_subspace(tc.block_matrix("dbar", pp, q - 1)) if q > 0 \
            else Subspace.zero(ker.ambient)
        return quotient_reps(ker, im), im

    src_reps, _ = classes(p)
    dst_reps, dst_im = classes(p + 1)
    cols = []
    dst_space = Subspace(dst_im.ambient, dst_reps)
    for rep in src_reps:
        w = tc.block_matrix("del", p, q).apply(rep)
        reduced = coset_reduce(w, dst_im)
        # coordinates on the canonical representatives: read off their pivots
        coords = []
        for drep, pivot in zip(dst_space.basis, dst_space.pivots):
            coords.append(reduced[pivot])
        residual = [x - sum((c * v[i] for c, v in zip(coords, dst_space.basis)),
                            start=ZERO) for i, x in enumerate(reduced)]
        if any(residual):
            raise ConventionError("induced row map leaves the class complement")
        cols.append(coords)
    nrows = len(dst_reps)
    if not cols:
        return Matrix.zeros(nrows, 0), src_reps, dst_reps
    return Matrix(cols).transpose(), src_reps, dst_reps


def e1_partial_exactness(model: Model, weight, p: int, q: int) -> RowMapCheck:
    """Exactness of the first-page row at (p,q): kernel of the outgoing induced
    del-map equals the image of the incoming one."""
    tc = TwistedComplex(model, weight)
    out_map, _, _ = _induced_row_map(tc, p, q)
    ker = kernel_basis(out_map)
    if p >= 1:
        in_map, _, _ = _induced_row_map(tc, p - 1, q)
        im = image_subspace(in_map)
    else:
        im = Subspace.zero(ker.ambient)
    if not ker.contains(im):
        raise ConventionError("induced del maps do not compose to zero")
    return RowMapCheck(p, q, ker.dim == im.dim, ker.dim, im.dim)


@dataclass(frozen=True)
class MiddleExactness:
    p: int
    q: int
    exact: bool
    source_dim: int  # Dolbeault classes feeding the Bott-Chern group
    middle_dim: int  # the Bott-Chern group
    target_dim: int  # flat cohomology in total degree p+q
    defect: int      # dim(ker of the tautological map) - dim(incoming image)


def exgen_check(model: Model, weight, p: int, q: int) -> MiddleExactness:
    """Exactness at the Bott-Chern term of the three-term sequence
    (Dolbeault classes) -> H_BC^{p,q} -> (flat cohomology of degree p+q)."""
    tc = TwistedComplex(model, weight)
    bg = tc.bigr
    k = p + q
    ambient = len(bg.total_basis(k))

    bc = bott_chern(model, weight, p, q, tc=tc)
    numerator = intersect(kernel_basis(tc.block_matrix("del", p, q)),
                          kernel_basis(tc.block_matrix("dbar", p, q)))
    if p >= 1 and q >= 1:
        dd = image_subspace(tc.ddc_matrix(p, q))
    else:
        dd = Subspace.zero(numerator.ambient)

    # incoming image: del of dbar-closed (p-1,q) forms plus dbar of del-closed
    # (p,q-1) forms (the latter realizes the conjugated Dolbeault summand)
    pieces = [dd]
    if p >= 1:
        closed = kernel_basis(tc.block_matrix("dbar", p - 1, q))
        pieces.append(apply_to_subspace(tc.block_matrix("del", p - 1, q), closed))
    if q >= 1:
        closed = kernel_basis(tc.block_matrix("del", p, q - 1))
        pieces.append(apply_to_subspace(tc.block_matrix("dbar", p, q - 1), closed))
    incoming = pieces[0]
    for s in pieces[1:]:
        incoming = subspace_sum(incoming, s)

    # kernel of the tautological map: twisted-exact forms inside the numerator
    if k > 0:
        im_d = image_subspace(tc.total_matrix(k - 1))
    else:
        im_d = Subspace.zero(ambient)
    num_embedded = Subspace(ambient, [tc.embed_block(p, q, v) for v in numerator.basis])
    taut_kernel_embedded = intersect(num_embedded, im_d)
    taut_kernel = Subspace(numerator.ambient,
                           [tc.restrict_to_block(p, q, v) for v in taut_kernel_embedded.basis])

    if not taut_kernel.contains(incoming):
        raise ConventionError("incoming classes escape the kernel of the tautological map")
    mn = morse_novikov(model, weight)
    dol = dolbeault(model, weight)
    source_dim = 0
    if p >= 1:
        source_dim += dol.dims[(p - 1, q)]
    if q >= 1:
        source_dim += dol.dims[(q - 1, p)]
    return MiddleExactness(
        p, q,
        exact=taut_kernel.dim == incoming.dim,
        source_dim=source_dim,
        middle_dim=bc.dims[(p, q)],
        target_dim=mn.dims[k],
        defect=taut_kernel.dim - incoming.dim,
    )
