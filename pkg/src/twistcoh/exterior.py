"""Exterior algebra on a finite coframe: monomial bases, wedge signs, derivations.

Forms are dicts mapping strictly increasing index tuples to Scalar
coefficients; the empty tuple indexes the degree-0 component.  All routines
are generic in the generator count, so the same code drives the real coframe
and its complexified splitting.
"""

from __future__ import annotations

from itertools import combinations
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .linalg import Matrix
from .scalars import ONE, ZERO, Scalar

Mono = Tuple[int, ...]
Form = Dict[Mono, Scalar]


def monomials(n: int, k: int) -> Tuple[Mono, ...]:
    """Lexicographically ordered basis of degree-k monomials on n generators."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(n), k))


def sort_sign(indices: Sequence[int]) -> Tuple[Optional[Scalar], Mono]:
    """Sign of sorting a wedge of generators; None if an index repeats."""
    idx = list(indices)
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, ()
    return (ONE if sign > 0 else -ONE), tuple(idx)


def form_add(f: Form, g: Form) -> Form:
    out = dict(f)
    for m, c in g.items():
        acc = out.get(m, ZERO) + c
        if acc:
            out[m] = acc
        elif m in out:
            del out[m]
    return out


def form_scale(f: Form, c: Scalar) -> Form:
    if not c:
        return {}
    return {m: c * v for m, v in f.items()}


def wedge(f: Form, g: Form) -> Form:
    out: Form = {}
    for mf, cf in f.items():
        for mg, cg in g.items():
            sign, mono = sort_sign(mf + mg)
            if sign is None:
                continue
            acc = out.get(mono, ZERO) + sign * cf * cg
            if acc:
                out[mono] = acc
            elif mono in out:
                del out[mono]
    return out


def apply_derivation(f: Form, dgen: Mapping[int, Form]) -> Form:
    """Extend generator images d(e_i) to f by the graded Leibniz rule."""
    out: Form = {}
    for mono, coeff in f.items():
        for pos, gen in enumerate(mono):
            sign = ONE if pos % 2 == 0 else -ONE
            rest = mono[:pos] + mono[pos + 1:]
            for dm, dc in dgen.get(gen, {}).items():
                s2, merged = sort_sign(dm + rest)
                if s2 is None:
                    continue
                acc = out.get(merged, ZERO) + sign * s2 * coeff * dc
                if acc:
                    out[merged] = acc
                elif merged in out:
                    del out[merged]
    return out


def substitute_generators(f: Form, images: Mapping[int, Form]) -> Form:
    """Rewrite f through generator images (1-forms in a target coframe)."""
    out: Form = {}
    for mono, coeff in f.items():
        term: Form = {(): coeff}
        for gen in mono:
            term = wedge(term, images[gen])
            if not term:
                break
        out = form_add(out, term)
    return out


def form_to_vector(f: Form, basis: Sequence[Mono]) -> Tuple[Scalar, ...]:
    index = {m: i for i, m in enumerate(basis)}
    vec = [ZERO] * len(basis)
    for m, c in f.items():
        if m not in index:
            raise KeyError(f"monomial {m} outside the target basis")
        vec[index[m]] = c
    return tuple(vec)


def vector_to_form(vec: Sequence[Scalar], basis: Sequence[Mono]) -> Form:
    return {m: c for m, c in zip(basis, vec) if c}


def operator_matrix(source: Sequence[Mono], target: Sequence[Mono], op) -> Matrix:
    """Matrix of a linear map given by its action op(mono) -> Form."""
    cols = []
    for mono in source:
        cols.append(form_to_vector(op(mono), target))
    if not cols:
        return Matrix.zeros(len(target), 0)
    return Matrix(cols).transpose()


def derivation_matrix(n: int, k: int, dgen: Mapping[int, Form]) -> Matrix:
    """Matrix of the derivation from degree k to k+1 on n generators."""
    return operator_matrix(monomials(n, k), monomials(n, k + 1),
                           lambda m: apply_derivation({m: ONE}, dgen))


def wedge_matrix(n: int, k: int, oneform: Form) -> Matrix:
    """Matrix of left wedge by a 1-form, from degree k to k+1."""
    return operator_matrix(monomials(n, k), monomials(n, k + 1),
                           lambda m: wedge(oneform, {m: ONE}))
