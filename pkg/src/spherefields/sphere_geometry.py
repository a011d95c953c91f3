"""Hyperplane sections of the sphere, their cones, and invariance tests.

A hyperplane is stored as ``a . x + b = 0``.  Its sphere section is the
set ``{a . x = d0} ∩ S^n`` with ``d0 = -b``, whose cone is the quadric
``(a . x)^2 - d0^2 |x|^2`` (or the hyperplane itself when ``b = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from . import linalg
from .errors import (
    DivisionFailed,
    EmptySection,
    HypothesisViolated,
    NotDegreeOneHomogeneous,
    NotDivisible,
    NotHomogeneous,
    NotInvariant,
    NotInvariantEquator,
    StructureViolation,
)
from .poly import Polynomial, Q, exact_divide, sum_of_squares
from .vector_field import (
    RING,
    InvarianceCertificate,
    VectorField,
    invariance_check,
    modulo_sphere_linear,
    radial_sum,
    tangency_cofactor,
)


@dataclass(frozen=True)
class Hyperplane:
    a: tuple
    b: object = mpq(0)

    def __post_init__(self):
        a = tuple(Q(v) for v in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", Q(self.b))
        if not any(a):
            raise ValueError("hyperplane normal must be nonzero")

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["a"]), data.get("b", 0))

    @classmethod
    def coordinate(cls, j: int, d: int, b=0):
        """``x_j + b = 0`` (0-based ``j``)."""
        return cls(tuple(1 if i == j else 0 for i in range(d)), b)

    @property
    def dim(self):
        return len(self.a)

    @property
    def d0(self):
        return -self.b

    @property
    def norm2(self):
        return sum((v * v for v in self.a), mpq(0))

    @property
    def is_great(self):
        return self.b == 0

    @property
    def is_meridian(self):
        return self.b == 0 and self.a[-1] == 0

    @property
    def is_parallel(self):
        return not any(self.a[:-1])

    @property
    def meets_sphere(self):
        """Nonempty (n-1)-sphere section: ``b^2 < |a|^2``."""
        return self.b * self.b < self.norm2

    def polynomial(self) -> Polynomial:
        return Polynomial.linear(self.a, self.b)

    def normalized(self):
        """Integer-primitive representative with positive leading entry."""
        vec = linalg.primitive_vector(list(self.a) + [self.b])
        return Hyperplane(tuple(vec[:-1]), vec[-1])

    def to_dict(self):
        return {"a": [str(v) for v in self.a], "b": str(self.b),
                "great": self.is_great, "meridian": self.is_meridian,
                "parallel": self.is_parallel}

    def __str__(self):
        return f"{self.polynomial()} = 0"


@dataclass(frozen=True)
class ConeQuadric:
    source: Hyperplane
    polynomial: Polynomial

    def to_dict(self):
        return {"hyperplane": self.source.to_dict(), "polynomial": str(self.polynomial)}


def cone_polynomial(h: Hyperplane) -> ConeQuadric:
    if not h.meets_sphere:
        raise EmptySection(f"b^2 / |a|^2 = {h.b * h.b / h.norm2} is not below 1")
    lin = Polynomial.linear(h.a)
    if h.is_great:
        return ConeQuadric(h, lin)
    return ConeQuadric(h, lin * lin - sum_of_squares(h.dim).scale(h.d0 * h.d0))


def _is_homogeneous_tangent(field: VectorField) -> bool:
    return field.is_homogeneous() and radial_sum(field).is_zero()


def sphere_invariance_check(field: VectorField, h: Hyperplane) -> InvarianceCertificate:
    """Certificate that the section ``{a . x + b = 0} ∩ S^n`` is invariant.

    Homogeneous fields use the ring identity on the cone polynomial; other
    fields use linear elimination modulo the sphere.
    """
    if h.dim != field.dim:
        raise ValueError("hyperplane and field dimensions differ")
    tangency_cofactor(field)
    cone = cone_polynomial(h)
    if _is_homogeneous_tangent(field):
        return invariance_check(field, cone.polynomial, RING)
    return modulo_sphere_linear(field, h.polynomial())


def is_sphere_invariant(field, h) -> bool:
    try:
        sphere_invariance_check(field, h)
    except NotInvariant:
        return False
    return True


def linear_matrix(field: VectorField):
    """Constant matrix A with ``P = A x``; raises NotDegreeOneHomogeneous."""
    d = field.dim
    A = [[mpq(0)] * d for _ in range(d)]
    for i, P in enumerate(field.components):
        for mono, c in P.terms.items():
            if sum(mono) != 1:
                raise NotDegreeOneHomogeneous(f"component {i + 1} is not linear homogeneous")
            A[i][mono.index(1)] = c
    return A


@dataclass(frozen=True)
class KernelFinding:
    matrix: tuple
    basis: tuple
    all_invariant: bool = False

    @property
    def dimension(self):
        return len(self.basis)

    def hyperplanes(self):
        return [Hyperplane(tuple(v)) for v in self.basis]

    def to_dict(self):
        return {"matrix": [[str(v) for v in r] for r in self.matrix],
                "kernel": [[str(v) for v in b] for b in self.basis],
                "dimension": self.dimension,
                "allGreatSpheresInvariant": self.all_invariant}


def deg1_great_sphere_kernel(field: VectorField) -> KernelFinding:
    """Kernel of the constant skew matrix of a degree-one tangent field.

    Each kernel vector ``a`` gives the invariant great sphere ``{a . x = 0}``.
    """
    A = linear_matrix(field)
    d = field.dim
    for i in range(d):
        for j in range(i, d):
            if A[i][j] != -A[j][i]:
                raise NotDegreeOneHomogeneous("linear part is not skew (field not tangent)")
    basis = linalg.nullspace(A, d)
    return KernelFinding(tuple(tuple(r) for r in A), tuple(tuple(v) for v in basis),
                         all_invariant=len(basis) == d)


# ---------------------------------------------------------------------------
# homogeneous quadratic fields


@dataclass(frozen=True)
class QuadraticSphereData:
    """``P_i = X^t B_i X`` with symmetric ``B_i`` and ``A_i = [B_1 e_i ... B_d e_i]``."""

    B: tuple

    @classmethod
    def from_field(cls, field: VectorField):
        d = field.dim
        Bs = []
        for i, P in enumerate(field.components):
            B = [[mpq(0)] * d for _ in range(d)]
            for mono, c in P.terms.items():
                if sum(mono) != 2:
                    raise NotHomogeneous(f"component {i + 1} is not a quadratic form")
                idx = [k for k, e in enumerate(mono) for _ in range(e)]
                r, s = idx
                if r == s:
                    B[r][r] = c
                else:
                    B[r][s] = c / 2
                    B[s][r] = c / 2
            Bs.append(tuple(tuple(row) for row in B))
        return cls(tuple(Bs))

    @property
    def dim(self):
        return len(self.B)

    def A(self, i):
        d = self.dim
        return [[self.B[j][r][i] for j in range(d)] for r in range(d)]

    def form(self, i) -> Polynomial:
        d = self.dim
        xs = [Polynomial.var(k, d) for k in range(d)]
        acc = Polynomial.zero(d)
        for r in range(d):
            for s in range(d):
                c = self.B[i][r][s]
                if c:
                    acc = acc + (xs[r] * xs[s]).scale(c)
        return acc


def quadratic_great_sphere_test(data: QuadraticSphereData, a):
    """Solve ``2 sum a_i B_i = a b^t + b a^t`` for ``b``; None when unsolvable."""
    a = [Q(v) for v in a]
    d = data.dim
    if len(a) != d or not any(a):
        raise ValueError("a must be a nonzero vector of the field's dimension")
    M = [[2 * sum((a[i] * data.B[i][r][c] for i in range(d)), mpq(0)) for c in range(d)]
         for r in range(d)]
    rows, rhs = [], []
    for r in range(d):
        for c in range(r, d):
            row = [mpq(0)] * d
            row[c] += a[r]
            row[r] += a[c]
            rows.append(row)
            rhs.append(M[r][c])
    return linalg.solve(rows, rhs)


@dataclass(frozen=True)
class EigenCofactor:
    lambdas: tuple
    cofactor: Polynomial
    sufficient_only: bool = True

    def to_dict(self):
        return {"lambda": [str(v) for v in self.lambdas], "cofactor": str(self.cofactor),
                "sufficientOnly": self.sufficient_only}


def quadratic_eigen_cofactor(data: QuadraticSphereData, a):
    """Eigen test ``A_i a = lambda_i a``; a sufficient certificate only."""
    a = [Q(v) for v in a]
    d = data.dim
    if len(a) != d or not any(a):
        raise ValueError("a must be a nonzero vector of the field's dimension")
    pivot = next(k for k, v in enumerate(a) if v)
    lambdas = []
    for i in range(d):
        v = linalg.mat_vec(data.A(i), a)
        lam = v[pivot] / a[pivot]
        if any(v[k] != lam * a[k] for k in range(d)):
            return None
        lambdas.append(lam)
    return EigenCofactor(tuple(lambdas), Polynomial.linear(lambdas))


# ---------------------------------------------------------------------------
# equator and off-centre structure


@dataclass(frozen=True)
class EquatorStructure:
    degree: int
    last_component: Polynomial
    alpha: object = None
    coupling: tuple | None = None

    def to_dict(self):
        out = {"degree": self.degree, "lastComponent": str(self.last_component)}
        if self.alpha is not None:
            out["alpha"] = str(self.alpha)
            out["coupling"] = [str(c) for c in self.coupling]
            out["skewBlockQuadraticForm"] = "0"
        return out


def equator_structure_check(field: VectorField) -> EquatorStructure:
    """Shape of the last component when ``{x_d = 0}`` is an invariant great sphere.

    Degree one forces ``P_d = 0``.  Degree two forces
    ``P_d = (1 - |x|^2) alpha + sum_{j<d} (c_j x_d + C_j . x') x_j`` with the
    block ``C`` skew, so the ``x_i x_j`` (``i, j < d``) terms cancel.  The skew
    block is invisible in ``P_d``; only ``alpha`` and the couplings ``c_j``
    (coefficients of ``x_d x_j``) are reported.
    """
    d = field.dim
    tangency_cofactor(field)
    m = field.degree
    if m > 2:
        raise HypothesisViolated("equator structure is only stated for degree <= 2")
    try:
        sphere_invariance_check(field, Hyperplane.coordinate(d - 1, d))
    except NotInvariant:
        raise NotInvariantEquator("{x_d = 0} is not invariant") from None
    P = field.components[-1]
    if m <= 1:
        if P:
            raise StructureViolation(f"degree-one field with invariant equator has P_d = {P}")
        return EquatorStructure(m, P)
    alpha = P.constant_term()
    s = sum_of_squares(d)
    L = P - (1 - s).scale(alpha)
    coupling = []
    for mono, c in L.terms.items():
        deg = sum(mono)
        if deg != 2:
            raise StructureViolation(f"unexpected degree-{deg} term in P_d - alpha(1 - s)")
        if mono[d - 1] == 2:
            raise StructureViolation("x_d^2 coefficient differs from -alpha")
        if mono[d - 1] == 0:
            raise StructureViolation("symmetric x_i x_j part of the skew block is nonzero")
    for j in range(d - 1):
        mono = [0] * d
        mono[j] += 1
        mono[d - 1] += 1
        coupling.append(L.coeff(tuple(mono)))
    return EquatorStructure(m, P, alpha, tuple(coupling))


@dataclass(frozen=True)
class NonGreatSphereStructure:
    index: int
    d0: object
    K: Polynomial
    B: tuple

    def to_dict(self):
        return {"index": self.index + 1, "d0": str(self.d0), "K": str(self.K),
                "B": [str(b) for b in self.B]}


def homogeneous_noneq_sphere_structure(field: VectorField, j: int, d0) -> NonGreatSphereStructure:
    """Factor ``P_j = K' (x_j^2 - d0^2 |x|^2)`` for an invariant ``{x_j + d0 = 0}``.

    ``j`` is 0-based.  ``K'`` is split as ``sum_{i != j} B_i x_i`` by the
    lowest-index rule.
    """
    d0 = Q(d0)
    d = field.dim
    if not 0 < abs(d0) < 1:
        raise HypothesisViolated("need 0 < |d0| < 1")
    if not 0 <= j < d:
        raise IndexError("j out of range")
    if not field.is_homogeneous():
        raise NotHomogeneous("field is not homogeneous")
    h = Hyperplane.coordinate(j, d, d0)
    sphere_invariance_check(field, h)
    m = field.degree
    if m < 3:
        raise HypothesisViolated(f"non-great invariant sphere at degree {m} < 3 "
                                 "(the field has a linear first integral along x_j)")
    cone = cone_polynomial(h).polynomial
    try:
        K = exact_divide(field.components[j], cone)
    except NotDivisible:
        raise DivisionFailed("P_j is not a multiple of the cone polynomial") from None
    parts = [dict() for _ in range(d)]
    for mono, c in K.terms.items():
        i = next((k for k in range(d) if k != j and mono[k] > 0), None)
        if i is None:
            raise StructureViolation("K' has a pure x_j monomial")
        e = list(mono)
        e[i] -= 1
        parts[i][tuple(e)] = c
    B = tuple(Polynomial(d, p) for p in parts)
    if any(b.degree() > m - 3 for b in B):
        raise StructureViolation("some B_i exceeds degree m - 3")
    return NonGreatSphereStructure(j, d0, K, B)
