"""Hamiltonian structure for fields on odd-dimensional spheres.

Coordinates pair as ``(x_{2i-1}, x_{2i})``: a Hamiltonian ``H`` gives
``P_{2i-1} = -dH/dx_{2i}`` and ``P_{2i} = dH/dx_{2i-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from . import linalg
from .errors import BadDegree, NotDegreeOneHomogeneous, OddDimension
from .poly import Polynomial, partial_derivative
from .sphere_geometry import linear_matrix
from .vector_field import CanonicalForm, VectorField, assemble


def _require_even(d):
    if d % 2:
        raise OddDimension(f"ambient dimension {d} is odd")


def hamiltonian_field(H: Polynomial) -> VectorField:
    """The field generated by ``H`` under the coordinate pairing."""
    d = H.nvars
    _require_even(d)
    comps = []
    for i in range(0, d, 2):
        comps.append(-partial_derivative(H, i + 1))
        comps.append(partial_derivative(H, i))
    return VectorField(tuple(comps))


def verify_hamiltonian(field: VectorField, H: Polynomial) -> bool:
    _require_even(field.dim)
    if H.nvars != field.dim:
        raise ValueError("H and the field live in different rings")
    return hamiltonian_field(H).components == field.components


@dataclass(frozen=True)
class HamiltonianReport:
    B: tuple
    symmetric: bool
    H: Polynomial | None = None

    def to_dict(self):
        return {"B": [[str(v) for v in r] for r in self.B], "symmetric": self.symmetric,
                "hamiltonian": self.symmetric, "H": None if self.H is None else str(self.H)}


def rewire(A):
    """Row rewiring: row ``2i`` of B is row ``2i+1`` of A, row ``2i+1`` is minus row ``2i``."""
    d = len(A)
    _require_even(d)
    B = [None] * d
    for i in range(0, d, 2):
        B[i] = [mpq(v) for v in A[i + 1]]
        B[i + 1] = [-mpq(v) for v in A[i]]
    return B


def unwire(B):
    """Inverse of :func:`rewire`."""
    d = len(B)
    _require_even(d)
    A = [None] * d
    for i in range(0, d, 2):
        A[i + 1] = [mpq(v) for v in B[i]]
        A[i] = [-mpq(v) for v in B[i + 1]]
    return A


def quadratic_form(B) -> Polynomial:
    """``1/2 X^t B X``."""
    d = len(B)
    xs = [Polynomial.var(i, d) for i in range(d)]
    acc = Polynomial.zero(d)
    for r in range(d):
        for c in range(d):
            if B[r][c]:
                acc = acc + (xs[r] * xs[c]).scale(mpq(B[r][c]) / 2)
    return acc


def deg1_hamiltonian_test(field: VectorField) -> HamiltonianReport:
    """Degree-one fields ``P = A x``: Hamiltonian iff the rewired matrix is symmetric."""
    d = field.dim
    _require_even(d)
    A = linear_matrix(field)
    for i in range(d):
        for j in range(i, d):
            if A[i][j] != -A[j][i]:
                raise NotDegreeOneHomogeneous("linear part is not skew (field not tangent)")
    B = rewire(A)
    symmetric = all(B[i][j] == B[j][i] for i in range(d) for j in range(i + 1, d))
    H = None
    if symmetric:
        H = quadratic_form(B)
        assert verify_hamiltonian(field, H), "rewired quadratic form is not a Hamiltonian"
    return HamiltonianReport(tuple(tuple(r) for r in B), symmetric, H)


@dataclass(frozen=True)
class ObstructionReport:
    verdict: str
    m: int
    witness: tuple = ()
    reason: str = ""

    def to_dict(self):
        return {"verdict": self.verdict, "m": self.m,
                "witness": [{"i": i + 1, "k": k + 1, "a": str(a)} for i, k, a in self.witness],
                "reason": self.reason}


def obstruction_check(cf: CanonicalForm, m: int) -> ObstructionReport:
    """Degree obstruction for Hamiltonian fields of degree ``m + 2 > 3``.

    With ``f_i = sum_k a_ik x_k^m + g_i``, a field whose ``g_i`` all have
    degree ``<= m - 1`` and whose ``A_ij`` all have degree ``<= m`` cannot be
    Hamiltonian.
    """
    d = len(cf.f)
    _require_even(d)
    field = assemble(CanonicalForm(cf.f, cf.A))
    deg = field.degree
    if m + 2 <= 3 or deg != m + 2:
        raise BadDegree(f"field degree {deg} must equal m + 2 = {m + 2} and exceed 3")
    witness = []
    g_ok = True
    for i, f in enumerate(cf.f):
        rest = dict(f.terms)
        for k in range(d):
            mono = tuple(m if j == k else 0 for j in range(d))
            a = rest.pop(mono, None)
            if a:
                witness.append((i, k, a))
        if Polynomial(d, rest).degree() > m - 1:
            g_ok = False
    A_ok = cf.A.degree() <= m
    if g_ok and A_ok:
        return ObstructionReport("NotHamiltonian", m, tuple(witness),
                                 "deg g_i <= m-1 and deg A_ij <= m at degree m+2")
    why = []
    if not g_ok:
        why.append("some g_i has degree >= m")
    if not A_ok:
        why.append("some A_ij has degree > m")
    return ObstructionReport("Inconclusive", m, tuple(witness), "; ".join(why))


# ---------------------------------------------------------------------------
# rotation-invariant forms on R^4

CUBIC_BASIS_S3 = (
    (3, 0, 0, 0), (1, 0, 2, 0), (1, 0, 0, 2), (2, 0, 1, 0), (2, 0, 0, 1), (1, 1, 1, 0),
    (1, 1, 0, 1), (1, 0, 1, 1), (0, 3, 0, 0), (0, 1, 2, 0), (0, 1, 0, 2), (0, 2, 1, 0),
    (0, 2, 0, 1), (0, 1, 1, 1), (0, 0, 3, 0), (0, 0, 0, 3),
)


def tangency_operator(H: Polynomial) -> Polynomial:
    """``sum P_i x_i`` for the field generated by ``H`` on R^4 (or any even d)."""
    field = hamiltonian_field(H)
    acc = Polynomial.zero(H.nvars)
    for i, P in enumerate(field.components):
        if P:
            acc = acc + P * Polynomial.var(i, H.nvars)
    return acc


def constraint_matrix(basis, nvars=4):
    """Rows: output monomials; columns: basis monomials of H."""
    images = [tangency_operator(Polynomial.monomial(mono)) for mono in basis]
    outs = sorted({mono for img in images for mono in img.terms})
    return [[img.coeff(o) for img in images] for o in outs], outs


@dataclass(frozen=True)
class KernelResult:
    dimension: int
    basis: tuple
    rows: int
    columns: int

    def polynomials(self, monomials):
        out = []
        for v in self.basis:
            out.append(Polynomial(4, {m: c for m, c in zip(monomials, v) if c}))
        return out

    def to_dict(self):
        return {"kernelDimension": self.dimension,
                "kernel": [[str(c) for c in v] for v in self.basis],
                "constraints": self.rows, "unknowns": self.columns}


def invariant_kernel(basis) -> KernelResult:
    rows, _ = constraint_matrix(basis)
    ker = linalg.nullspace(rows, len(basis))
    return KernelResult(len(ker), tuple(tuple(v) for v in ker), len(rows), len(basis))


def cubic_kernel_s3() -> KernelResult:
    """Homogeneous cubic Hamiltonians on R^4 over the 16-monomial ansatz whose field is tangent."""
    return invariant_kernel(CUBIC_BASIS_S3)


def monomials_of_degree(deg, nvars=4):
    if nvars == 1:
        return [(deg,)]
    out = []
    for e in range(deg, -1, -1):
        for rest in monomials_of_degree(deg - e, nvars - 1):
            out.append((e,) + rest)
    return out
