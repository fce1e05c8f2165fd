"""Finite-dimensional invariant-form models: structure constants, complex
structure, Lee form and Hermitian 2-form, with exact validation, built-in
fixtures, and a plain-text file format."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from . import exterior
from .exterior import Form, Mono
from .linalg import Matrix, kernel_basis
from .scalars import IMAG, ONE, ZERO, Scalar, ScalarParseError, rat


class ModelError(ValueError):
    """Malformed model data (bad indices, duplicate triples, wrong shapes)."""


class ModelParseError(ModelError):
    """Model file could not be parsed; message names the offending line."""


@dataclass(frozen=True)
class Model:
    """Invariant-form model of a manifold on an n-dimensional coframe e_0..e_{n-1}.

    structure lists triples ((i, j), k, c) with i < j, meaning d(e_k) contains
    c * e_i ^ e_j.  J is the almost-complex action on the coframe (columns are
    images), theta the Lee form, omega the Hermitian 2-form.
    """

    n: int
    structure: Tuple[Tuple[Tuple[int, int], int, Scalar], ...]
    J: Matrix
    theta: Tuple[Scalar, ...]
    omega: Tuple[Tuple[Tuple[int, int], Scalar], ...]
    lck: bool = False
    name: str = "model"

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ModelError("model dimension must be a positive even integer")
        seen = set()
        for (i, j), k, _ in self.structure:
            if not (0 <= i < j < self.n) or not (0 <= k < self.n):
                raise ModelError(f"structure indices out of range: de_{k+1} <- e{i+1}^e{j+1}")
            if ((i, j), k) in seen:
                raise ModelError(f"duplicate structure triple for de_{k+1}: e{i+1}^e{j+1}")
            seen.add(((i, j), k))
        if (self.J.nrows, self.J.ncols) != (self.n, self.n):
            raise ModelError("J must be an n x n matrix")
        if len(self.theta) != self.n:
            raise ModelError("theta must have n coefficients")
        for (i, j), _ in self.omega:
            if not (0 <= i < j < self.n):
                raise ModelError(f"omega indices out of range: e{i+1}^e{j+1}")

    # -- derived forms ----------------------------------------------------
    def d_generators(self) -> Dict[int, Form]:
        dgen: Dict[int, Form] = {k: {} for k in range(self.n)}
        for (i, j), k, c in self.structure:
            dgen[k] = exterior.form_add(dgen[k], {(i, j): c})
        return dgen

    def theta_form(self) -> Form:
        return {(i,): c for i, c in enumerate(self.theta) if c}

    def omega_form(self) -> Form:
        return {pair: c for pair, c in self.omega if c}

    def with_theta(self, theta: Sequence) -> "Model":
        """Same model with the Lee form replaced (used for twist scans)."""
        return replace(self, theta=tuple(rat(t) for t in theta), lck=False)

    def digest(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    witness: str = ""


@dataclass(frozen=True)
class ValidationReport:
    model: str
    checks: Tuple[ConstraintCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> Tuple[ConstraintCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def _form_str(f: Form) -> str:
    if not f:
        return "0"
    parts = []
    for mono in sorted(f):
        label = "^".join(f"e{i+1}" for i in mono) if mono else "1"
        parts.append(f"({f[mono]})*{label}")
    return " + ".join(parts)


def validate(m: Model) -> ValidationReport:
    """Check every model invariant exactly; failures are reported, not raised."""
    checks: List[ConstraintCheck] = []
    dgen = m.d_generators()

    j_sq = m.J @ m.J + Matrix.identity(m.n)
    checks.append(ConstraintCheck("J^2 = -1", j_sq.is_zero(),
                                  "" if j_sq.is_zero() else "J^2 + 1 != 0"))

    d2_ok, d2_witness = True, ""
    for k in range(m.n):
        dd = exterior.apply_derivation(dgen.get(k, {}), dgen)
        if dd:
            d2_ok, d2_witness = False, f"d(d e{k+1}) = {_form_str(dd)}"
            break
    checks.append(ConstraintCheck("d^2 = 0", d2_ok, d2_witness))

    dtheta = exterior.apply_derivation(m.theta_form(), dgen)
    checks.append(ConstraintCheck("d theta = 0", not dtheta,
                                  "" if not dtheta else f"d theta = {_form_str(dtheta)}"))

    if m.lck:
        domega = exterior.apply_derivation(m.omega_form(), dgen)
        lhs = exterior.form_add(domega, exterior.form_scale(
            exterior.wedge(m.theta_form(), m.omega_form()), -ONE))
        checks.append(ConstraintCheck("d omega = theta ^ omega", not lhs,
                                      "" if not lhs else f"d omega - theta^omega = {_form_str(lhs)}"))

    if j_sq.is_zero():
        ok, witness = _integrability(m, dgen)
        checks.append(ConstraintCheck("integrability (no (0,2) part)", ok, witness))
    else:
        checks.append(ConstraintCheck("integrability (no (0,2) part)", False,
                                      "skipped: J^2 = -1 fails"))
    return ValidationReport(m.name, tuple(checks))


def holomorphic_coframe(m: Model) -> Tuple[Tuple[Scalar, ...], ...]:
    """Echelonized basis of the (1,0) coframe: solutions of J v = -i v."""
    pencil = m.J + Matrix.identity(m.n).scale(IMAG)
    return kernel_basis(pencil).basis


def _integrability(m: Model, dgen: Dict[int, Form]) -> Tuple[bool, str]:
    hol = holomorphic_coframe(m)
    if len(hol) != m.n // 2:
        return False, f"(1,0) coframe has dimension {len(hol)}, expected {m.n // 2}"
    anti = [tuple(x.conjugate() for x in v) for v in hol]
    # d phi expanded over the complex coframe; flag any phi-bar ^ phi-bar term
    images = _complex_images(hol, anti, m.n)
    for a, v in enumerate(hol):
        dphi = exterior.apply_derivation({(i,): c for i, c in enumerate(v) if c}, dgen)
        cplx = exterior.substitute_generators(dphi, images)
        half = m.n // 2
        for mono in cplx:
            if all(g >= half for g in mono):
                return False, f"d(phi_{a+1}) has (0,2) component on {mono}"
    return True, ""


def _complex_images(hol, anti, n: int) -> Dict[int, Form]:
    """Each real generator e_i written in the complex coframe (phi, phi-bar)."""
    cols = [list(v) for v in hol] + [list(v) for v in anti]
    change = Matrix(cols).transpose()  # columns are the complex coframe in e-coords
    inv = _invert(change)
    return {i: {(g,): inv[g, i] for g in range(n) if inv[g, i]} for i in range(n)}


def _invert(m: Matrix) -> Matrix:
    from .linalg import solve
    cols = []
    for j in range(m.ncols):
        unit = [ONE if i == j else ZERO for i in range(m.nrows)]
        x = solve(m, unit)
        if x is None:
            raise ModelError("coframe change of basis is singular")
        cols.append(x)
    return Matrix(cols).transpose()


# -- built-in fixtures ----------------------------------------------------

def _j_standard(n: int) -> Matrix:
    """J e_{2k+1} = e_{2k+2} on consecutive pairs (columns are images)."""
    rows = [[ZERO] * n for _ in range(n)]
    for k in range(0, n, 2):
        rows[k + 1][k] = ONE
        rows[k][k + 1] = -ONE
    return Matrix(rows)


def _j_outer(n: int) -> Matrix:
    """J e1 = e4, J e2 = e3 pairing used by the solvmanifold fixture."""
    rows = [[ZERO] * n for _ in range(n)]
    rows[3][0] = ONE
    rows[0][3] = -ONE
    rows[2][1] = ONE
    rows[1][2] = -ONE
    return Matrix(rows)


def builtin(name: str) -> Model:
    """Fixture models; raises ModelError for unknown names."""
    half = Scalar(1) / 2
    if name == "torus2":
        return Model(4, (), _j_standard(4), (ZERO,) * 4,
                     (((0, 1), ONE), ((2, 3), ONE)), lck=True, name="torus2")
    if name == "hopf_surface":
        structure = (
            ((2, 3), 1, ONE),    # de2 = e3^e4
            ((1, 3), 2, -ONE),   # de3 = e4^e2 = -e2^e4
            ((1, 2), 3, ONE),    # de4 = e2^e3
        )
        return Model(4, structure, _j_standard(4), (-ONE, ZERO, ZERO, ZERO),
                     (((0, 1), ONE), ((2, 3), ONE)), lck=True, name="hopf_surface")
    if name == "kodaira_thurston":
        structure = (((0, 1), 3, ONE),)  # de4 = e1^e2
        return Model(4, structure, _j_standard(4), (ZERO,) * 4,
                     (((0, 1), ONE), ((2, 3), ONE)), lck=False, name="kodaira_thurston")
    if name == "inoue_sm":
        # expanding direction of weight 1, contracting complex direction of
        # weight -1/2 with unit rotation; unimodular, validates as LCK
        structure = (
            ((0, 3), 0, ONE),    # de1 = e1^e4
            ((1, 3), 1, -half),  # de2 = -1/2 e2^e4 + e3^e4
            ((2, 3), 1, ONE),
            ((1, 3), 2, -ONE),   # de3 = -e2^e4 - 1/2 e3^e4
            ((2, 3), 2, -half),
        )
        return Model(4, structure, _j_outer(4), (ZERO, ZERO, ZERO, ONE),
                     (((0, 3), ONE), ((1, 2), ONE)), lck=True, name="inoue_sm")
    raise ModelError(f"unknown builtin model: {name!r}")


BUILTIN_NAMES = ("torus2", "hopf_surface", "kodaira_thurston", "inoue_sm")


# -- file format -----------------------------------------------------------

def serialize(m: Model) -> str:
    """Canonical text form; parse(serialize(m)) == m."""
    lines = [f"name: {m.name}", f"dim: {m.n}"]
    for (i, j), k, c in sorted(m.structure, key=lambda t: (t[1], t[0])):
        lines.append(f"d: {k+1} <- {c} * {i+1} ^ {j+1}")
    lines.append("J:")
    for row in m.J.rows:
        lines.append("  " + " ".join(str(x) for x in row))
    lines.append("theta: " + " ".join(str(x) for x in m.theta))
    for (i, j), c in sorted(m.omega, key=lambda t: t[0]):
        lines.append(f"omega: {i+1} ^ {j+1} : {c}")
    lines.append(f"lck: {'true' if m.lck else 'false'}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Model:
    """Parse the block format written by serialize(); errors name the line."""
    n: Optional[int] = None
    name = "model"
    structure: List[Tuple[Tuple[int, int], int, Scalar]] = []
    j_rows: List[List[Scalar]] = []
    theta: Optional[List[Scalar]] = None
    omega: List[Tuple[Tuple[int, int], Scalar]] = []
    lck = False
    in_j = False

    def fail(lineno: int, msg: str):
        raise ModelParseError(f"line {lineno}: {msg}")

    def parse_rat(tok: str, lineno: int) -> Scalar:
        try:
            return rat(tok)
        except (ScalarParseError, ZeroDivisionError):
            fail(lineno, f"malformed rational {tok!r}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if in_j and line.startswith("  "):
            j_rows.append([parse_rat(tok, lineno) for tok in line.split()])
            continue
        in_j = False
        if ":" not in line:
            fail(lineno, f"expected 'key: value', got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "name":
            name = value
        elif key == "dim":
            try:
                n = int(value)
            except ValueError:
                fail(lineno, f"dim must be an integer, got {value!r}")
        elif key == "d":
            parts = value.split("<-")
            if len(parts) != 2:
                fail(lineno, "structure line must read 'd: k <- c * i ^ j'")
            try:
                k = int(parts[0])
                coeff_tok, wedge_tok = parts[1].split("*")
                i_tok, j_tok = wedge_tok.split("^")
                i, j = int(i_tok), int(j_tok)
            except ValueError:
                fail(lineno, "structure line must read 'd: k <- c * i ^ j'")
            c = parse_rat(coeff_tok, lineno)
            if ((i - 1, j - 1), k - 1) in [(t[0], t[1]) for t in structure]:
                fail(lineno, f"duplicate structure triple for de_{k}")
            structure.append(((i - 1, j - 1), k - 1, c))
        elif key == "J":
            in_j = True
        elif key == "theta":
            theta = [parse_rat(tok, lineno) for tok in value.split()]
        elif key == "omega":
            try:
                wedge_tok, coeff_tok = value.rsplit(":", 1)
                i_tok, j_tok = wedge_tok.split("^")
                i, j = int(i_tok), int(j_tok)
            except ValueError:
                fail(lineno, "omega line must read 'omega: i ^ j : c'")
            omega.append(((i - 1, j - 1), parse_rat(coeff_tok, lineno)))
        elif key == "lck":
            if value not in ("true", "false"):
                fail(lineno, f"lck must be true or false, got {value!r}")
            lck = value == "true"
        else:
            fail(lineno, f"unknown field {key!r}")

    if n is None:
        raise ModelParseError("missing field dim")
    if not j_rows:
        raise ModelParseError("missing field J")
    if theta is None:
        raise ModelParseError("missing field theta")
    if len(j_rows) != n or any(len(r) != n for r in j_rows):
        raise ModelParseError("J block must hold n rows of n rationals")
    try:
        return Model(n, tuple(structure), Matrix(j_rows), tuple(theta),
                     tuple(omega), lck=lck, name=name)
    except ModelError as exc:
        raise ModelParseError(str(exc)) from exc


def load(path: str) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def transform(m: Model, p: Matrix) -> Model:
    """Conjugate the model by an invertible coframe change e'_i = sum p[i,j] e_j.

    Used to test basis invariance of the cohomology reports; p must commute
    with J for the bigraded structure to be preserved.
    """
    pinv = _invert(p)
    # old generators in terms of the new coframe
    old_in_new: Dict[int, Form] = {
        j: {(i,): pinv[j, i] for i in range(m.n) if pinv[j, i]} for j in range(m.n)
    }
    dgen = m.d_generators()
    new_structure: List[Tuple[Tuple[int, int], int, Scalar]] = []
    for k in range(m.n):
        # d(e'_k) = sum_j p[k,j] d(e_j), rewritten in the primed coframe
        total: Form = {}
        for j in range(m.n):
            if p[k, j]:
                total = exterior.form_add(total, exterior.form_scale(dgen.get(j, {}), p[k, j]))
        prim = exterior.substitute_generators(total, old_in_new)
        for (i, j2), c in sorted(prim.items()):
            new_structure.append(((i, j2), k, c))
    theta_prim = exterior.substitute_generators(m.theta_form(), old_in_new)
    omega_prim = exterior.substitute_generators(m.omega_form(), old_in_new)
    new_theta = [theta_prim.get((i,), ZERO) for i in range(m.n)]
    new_omega = tuple(sorted(((mono, c) for mono, c in omega_prim.items()), key=lambda t: t[0]))
    # column k of the new J: rewrite J(e'_k) in the primed coframe
    j_cols = []
    for k in range(m.n):
        w = m.J.apply(p.rows[k])
        w_prim = exterior.substitute_generators({(i,): c for i, c in enumerate(w) if c},
                                                old_in_new)
        j_cols.append([w_prim.get((i,), ZERO) for i in range(m.n)])
    new_j = Matrix(j_cols).transpose()
    return Model(m.n, tuple(new_structure), new_j, tuple(new_theta), new_omega,
                 lck=m.lck, name=m.name + "+basis")
