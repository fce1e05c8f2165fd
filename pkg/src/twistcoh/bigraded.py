"""Complexified coframe of a model: (p,q)-graded bases and the split of the
derivation into holomorphic and antiholomorphic pieces."""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from . import exterior
from .exterior import Form, Mono
from .linalg import Matrix
from .models import Model, ModelError, _complex_images, holomorphic_coframe
from .scalars import IMAG, ONE, Scalar

Vector = Tuple[Scalar, ...]


class BigradedModel:
    """Model together with its complexified coframe.

    Generators 0..m-1 are the (1,0) coframe elements (eigenvectors of J with
    eigenvalue -i), generators m..n-1 their conjugates.  A monomial's bidegree
    is (number of holomorphic factors, number of antiholomorphic factors).
    """

    def __init__(self, model: Model):
        self.model = model
        self.n = model.n
        self.m = model.n // 2
        hol = holomorphic_coframe(model)
        if len(hol) != self.m:
            raise ModelError(
                f"(1,0) coframe has dimension {len(hol)}, expected {self.m}; J^2 = -1 fails")
        self.hol = hol
        self.anti = tuple(tuple(x.conjugate() for x in v) for v in hol)
        self._images = _complex_images(self.hol, self.anti, self.n)
        self._dgen = self._complex_structure_forms()
        self._basis_cache: Dict[Tuple[int, int], Tuple[Mono, ...]] = {}
        self._total_cache: Dict[int, Tuple[Mono, ...]] = {}

    # -- construction helpers ---------------------------------------------
    def _complex_structure_forms(self) -> Dict[int, Form]:
        dgen_real = self.model.d_generators()
        out: Dict[int, Form] = {}
        coframe = list(self.hol) + list(self.anti)
        for g, vec in enumerate(coframe):
            real_form = {(i,): c for i, c in enumerate(vec) if c}
            d_real = exterior.apply_derivation(real_form, dgen_real)
            d_cplx = exterior.substitute_generators(d_real, self._images)
            bad = self._leak(g, d_cplx)
            if bad is not None:
                raise ModelError(
                    f"integrability failure: d of complex coframe generator {g} "
                    f"has a {bad} component")
            out[g] = d_cplx
        return out

    def _leak(self, g: int, d_cplx: Form):
        # a (1,0) generator may only produce (2,0)+(1,1); a (0,1) one (1,1)+(0,2)
        for mono in d_cplx:
            p, q = self.bidegree(mono)
            if g < self.m and (p, q) == (0, 2):
                return (0, 2)
            if g >= self.m and (p, q) == (2, 0):
                return (2, 0)
        return None

    # -- bases ---------------------------------------------------------------
    def bidegree(self, mono: Mono) -> Tuple[int, int]:
        p = sum(1 for g in mono if g < self.m)
        return p, len(mono) - p

    def basis(self, p: int, q: int) -> Tuple[Mono, ...]:
        """Lexicographic monomial basis of the (p,q) component."""
        if not (0 <= p <= self.m and 0 <= q <= self.m):
            return ()
        key = (p, q)
        if key not in self._basis_cache:
            out = []
            for s in combinations(range(self.m), p):
                for t in combinations(range(self.m, self.n), q):
                    out.append(s + t)
            self._basis_cache[key] = tuple(out)
        return self._basis_cache[key]

    def total_basis(self, k: int) -> Tuple[Mono, ...]:
        """Basis of the complexified degree-k forms, blocks ordered by p descending."""
        if k < 0 or k > self.n:
            return ()
        if k not in self._total_cache:
            out: List[Mono] = []
            for p in range(min(k, self.m), -1, -1):
                q = k - p
                out.extend(self.basis(p, q))
            self._total_cache[k] = tuple(out)
        return self._total_cache[k]

    def block_slice(self, k: int, p: int) -> slice:
        """Position of the (p, k-p) block inside total_basis(k)."""
        offset = 0
        for pp in range(min(k, self.m), p, -1):
            offset += len(self.basis(pp, k - pp))
        return slice(offset, offset + len(self.basis(p, k - p)))

    def dim(self, p: int, q: int) -> int:
        return len(self.basis(p, q))

    # -- operators -------------------------------------------------------------
    def d_total(self, k: int) -> Matrix:
        """Complexified derivation on total degree k."""
        return exterior.operator_matrix(
            self.total_basis(k), self.total_basis(k + 1),
            lambda mono: exterior.apply_derivation({mono: ONE}, self._dgen))

    def d_component(self, p: int, q: int, dp: int, dq: int) -> Matrix:
        """Bidegree component of the derivation: (p,q) -> (p+dp, q+dq)."""
        target = self.basis(p + dp, q + dq)
        target_set = set(target)

        def op(mono: Mono) -> Form:
            full = exterior.apply_derivation({mono: ONE}, self._dgen)
            return {mm: c for mm, c in full.items() if mm in target_set}

        return exterior.operator_matrix(self.basis(p, q), target, op)

    def wedge_component(self, oneform: Form, p: int, q: int, dp: int, dq: int) -> Matrix:
        target = self.basis(p + dp, q + dq)
        target_set = set(target)

        def op(mono: Mono) -> Form:
            full = exterior.wedge(oneform, {mono: ONE})
            return {mm: c for mm, c in full.items() if mm in target_set}

        return exterior.operator_matrix(self.basis(p, q), target, op)

    def wedge_total(self, oneform: Form, k: int) -> Matrix:
        return exterior.operator_matrix(
            self.total_basis(k), self.total_basis(k + 1),
            lambda mono: exterior.wedge(oneform, {mono: ONE}))

    @cached_property
    def theta_complex(self) -> Form:
        return exterior.substitute_generators(self.model.theta_form(), self._images)

    @cached_property
    def theta10(self) -> Form:
        return {m: c for m, c in self.theta_complex.items() if m[0] < self.m}

    @cached_property
    def theta01(self) -> Form:
        return {m: c for m, c in self.theta_complex.items() if m[0] >= self.m}

    def j_factor(self, p: int, q: int) -> Scalar:
        """Action of the complex-structure automorphism on the (p,q) block."""
        return (-IMAG) ** p * IMAG ** q

    def j_diagonal(self, k: int) -> Tuple[Scalar, ...]:
        out = []
        for mono in self.total_basis(k):
            p, q = self.bidegree(mono)
            out.append(self.j_factor(p, q))
        return tuple(out)

    # -- real structure -----------------------------------------------------
    def conj_mono(self, mono: Mono) -> Tuple[Scalar, Mono]:
        """Conjugate monomial (bidegree swap) with the reordering sign."""
        swapped = tuple(g + self.m if g < self.m else g - self.m for g in mono)
        sign, sorted_mono = exterior.sort_sign(swapped)
        return sign, sorted_mono

    def conj_coords(self, p: int, q: int, vec: Sequence[Scalar]) -> Vector:
        """Coordinates of the conjugated form, as an element of the (q,p) block."""
        src = self.basis(p, q)
        dst = self.basis(q, p)
        index = {m: i for i, m in enumerate(dst)}
        out = [Scalar(0)] * len(dst)
        for mono, c in zip(src, vec):
            if not c:
                continue
            sign, target = self.conj_mono(mono)
            out[index[target]] = out[index[target]] + sign * c.conjugate()
        return tuple(out)

    # -- reconstruction check -------------------------------------------------
    def real_from_complex(self, form: Form) -> Form:
        """Rewrite a complex-coframe form back in the real coframe."""
        coframe = list(self.hol) + list(self.anti)
        images = {g: {(i,): c for i, c in enumerate(vec) if c}
                  for g, vec in enumerate(coframe)}
        return exterior.substitute_generators(form, images)
