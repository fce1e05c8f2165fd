"""Exact twisted cohomology of invariant-form manifold models.

Everything is computed over the rationals (optionally Gaussian rationals):
flat-twist (Morse-Novikov) cohomology, weighted Dolbeault and Bott-Chern
groups, the ddc check, the twisted spectral sequence, exceptional weight
loci of matrix pencils, substitution-jet resolvents, and exact Dolbeault
dimensions on diagonal Hopf quotients.
"""

from .hopf import HopfData, MonomialForm, dolbeault_dims, eigenspace, vanishing_scan
from .jets import (JetAutomorphism, SpectrumMonoid, TruncatedSeries, enumerate_monoid,
                   linear_eigenvalues, monoid_member, resolvent_solve, spectrum,
                   substitute)
from .linalg import (Matrix, Subspace, image_subspace, intersect, kernel_basis,
                     quotient_dim, rank)
from .models import Model, builtin, parse, serialize, validate
from .pencil import Pencil, pencil_exceptional_set
from .scalars import Scalar, rat
from .twisted import (CohomologyReport, Weight, bott_chern, bott_chern_table,
                      ddc_lemma_check, dolbeault, exceptional_spectrum, mn_class,
                      morse_novikov)
from .frolicher import degeneration_page, e1_partial_exactness, exgen_check, pages

__version__ = "0.1.0"

__all__ = [
    "CohomologyReport", "HopfData", "JetAutomorphism", "Matrix", "Model",
    "MonomialForm", "Pencil", "Scalar", "SpectrumMonoid", "Subspace",
    "TruncatedSeries", "Weight", "bott_chern", "bott_chern_table", "builtin",
    "ddc_lemma_check", "degeneration_page", "dolbeault", "dolbeault_dims",
    "e1_partial_exactness", "eigenspace", "enumerate_monoid",
    "exceptional_spectrum", "exgen_check", "image_subspace", "intersect",
    "kernel_basis", "linear_eigenvalues", "mn_class", "monoid_member",
    "morse_novikov", "pages", "parse", "pencil_exceptional_set", "quotient_dim",
    "rank", "rat", "resolvent_solve", "serialize", "spectrum", "substitute",
    "validate", "vanishing_scan",
]
