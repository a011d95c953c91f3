"""Polynomial vector fields in R^d and their relation to the unit sphere S^(d-1).

Covers tangency certificates, the canonical (f, A) decomposition and its
layered refinement, the skew decomposition of vectors with ``sum Q_i x_i^k = 0``,
Lie derivatives, and invariance / first-integral certificates.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

from gmpy2 import mpq

from . import linalg
from .errors import (
    DimensionMismatch,
    EmptySection,
    HypothesisViolated,
    IndependenceNotCertified,
    InternalInconsistency,
    NotDivisible,
    NotFirstIntegral,
    NotHomogeneous,
    NotInvariant,
    NotSkew,
    NotTangent,
    NotTangentEverywhere,
    ParseError,
)
from .poly import (
    Polynomial,
    compose,
    divide_with_remainder,
    exact_divide,
    format_polynomial,
    grading,
    parse_polynomial,
    partial_derivative,
    sum_of_squares,
)

RING = "ring-identity"
MODULO_SPHERE = "modulo-sphere"
MODES = (RING, MODULO_SPHERE)


def sphere_polynomial(d: int) -> Polynomial:
    """``x1^2 + ... + xd^2 - 1``."""
    return sum_of_squares(d) - 1


@dataclass(frozen=True)
class VectorField:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        d = len(comps)
        if d == 0:
            raise ValueError("a vector field needs at least one component")
        for p in comps:
            if not isinstance(p, Polynomial):
                raise TypeError("components must be Polynomial instances")
            if p.nvars != d:
                raise DimensionMismatch(
                    f"component in {p.nvars} variables for a field on R^{d}")

    @classmethod
    def from_strings(cls, comps, prefix="x"):
        d = len(comps)
        return cls(tuple(parse_polynomial(c, d, prefix) for c in comps))

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(p.degree() for p in self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __call__(self, f: Polynomial) -> Polynomial:
        return lie_derivative(self, f)

    def is_zero(self):
        return all(p.is_zero() for p in self.components)

    def is_homogeneous(self):
        """All nonzero components homogeneous of one common degree."""
        degs = set()
        for p in self.components:
            if p.is_zero():
                continue
            if not p.is_homogeneous():
                return False
            degs.add(p.degree())
        return len(degs) <= 1

    def to_dict(self, prefix="x"):
        return {"dim": self.dim,
                "components": [format_polynomial(p, prefix) for p in self.components]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.components) + ")"


def parse_field(text: str, prefix: str = "x") -> VectorField:
    """Parse a field from JSON or from ``dim d; P1 = ...; P2 = ...`` text.

    Statements may be separated by ``;`` or newlines and components may come
    in any order.  ``dim`` is mandatory in the text form.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos) from None
        if "dim" not in data or "components" not in data:
            raise ParseError("JSON field needs 'dim' and 'components'", text, 0)
        d = int(data["dim"])
        comps = data["components"]
        if len(comps) != d:
            raise ParseError(f"dim is {d} but {len(comps)} components given", text, 0)
        return VectorField(tuple(parse_polynomial(str(c), d, prefix) for c in comps))

    dim = None
    comps = {}
    for start, stmt in _split_statements(text):
        body = stmt.strip()
        if not body or body.startswith("#"):
            continue
        lead = start + (len(stmt) - len(stmt.lstrip()))
        if body.lower().startswith("dim"):
            rest = body[3:].strip().lstrip("=").strip()
            if not rest.isdigit() or int(rest) < 1:
                raise ParseError("dim must be a positive integer", text, lead)
            dim = int(rest)
            continue
        if "=" not in body:
            raise ParseError("expected 'P<i> = <polynomial>'", text, lead)
        name, _, expr = body.partition("=")
        name = name.strip()
        if not (name[:1] in "PpRr" and name[1:].isdigit()):
            raise ParseError(f"bad component name {name!r}", text, lead)
        idx = int(name[1:])
        if idx in comps:
            raise ParseError(f"component {name} given twice", text, lead)
        comps[idx] = (expr, lead + body.index("=") + 1)
    if dim is None:
        raise ParseError("missing 'dim <d>' statement", text, 0)
    if sorted(comps) != list(range(1, dim + 1)):
        raise ParseError(f"need components P1..P{dim}, got {sorted(comps)}", text, 0)
    polys = []
    for i in range(1, dim + 1):
        expr, pos = comps[i]
        try:
            polys.append(parse_polynomial(expr, dim, prefix))
        except ParseError as exc:
            raise ParseError(str(exc).rsplit(" (line", 1)[0], text, pos + exc.position) from None
    return VectorField(tuple(polys))


def _split_statements(text):
    start = 0
    for i, ch in enumerate(text):
        if ch in ";\n":
            yield start, text[start:i]
            start = i + 1
    yield start, text[start:]


def format_field(field: VectorField, prefix="x") -> str:
    lines = [f"dim {field.dim}"]
    for i, p in enumerate(field.components, 1):
        lines.append(f"P{i} = {format_polynomial(p, prefix)}")
    return "; ".join(lines)


def lie_derivative(field: VectorField, f: Polynomial) -> Polynomial:
    """``sum_i P_i * df/dx_i``."""
    if f.nvars != field.dim:
        raise DimensionMismatch(f"polynomial in {f.nvars} variables, field on R^{field.dim}")
    acc = Polynomial.zero(field.dim)
    for i in f.variables():
        P = field.components[i]
        if P:
            acc = acc + P * partial_derivative(f, i)
    return acc


def radial_sum(field: VectorField, k: int = 1) -> Polynomial:
    """``sum_i P_i * x_i^k``."""
    d = field.dim
    acc = Polynomial.zero(d)
    for i, P in enumerate(field.components):
        if P:
            acc = acc + P * Polynomial.var(i, d) ** k
    return acc


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class TangencyCertificate:
    cofactor: Polynomial

    def to_dict(self):
        return {"cofactor": str(self.cofactor)}


def tangency_cofactor(field: VectorField) -> TangencyCertificate:
    """Cofactor K with ``sum P_i x_i = K (|x|^2 - 1)``; raises NotTangent."""
    q, r = divide_with_remainder(radial_sum(field), sphere_polynomial(field.dim))
    if r:
        raise NotTangent(f"sum P_i x_i leaves remainder {r} modulo |x|^2 - 1")
    return TangencyCertificate(q)


def is_tangent(field: VectorField) -> bool:
    try:
        tangency_cofactor(field)
    except NotTangent:
        return False
    return True


@dataclass(frozen=True)
class SkewPolyMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        d = len(rows)
        for i in range(d):
            if len(rows[i]) != d:
                raise NotSkew("matrix is not square")
            for j in range(i, d):
                if rows[i][j] != -rows[j][i]:
                    raise NotSkew(f"entry ({i + 1},{j + 1}) is not minus entry ({j + 1},{i + 1})")

    @classmethod
    def zeros(cls, d, nvars=None):
        z = Polynomial.zero(d if nvars is None else nvars)
        return cls(tuple((z,) * d for _ in range(d)))

    @classmethod
    def from_upper(cls, d, upper, nvars=None):
        """Build from ``{(i, j): entry}`` with ``i < j`` (0-based)."""
        nv = d if nvars is None else nvars
        rows = [[Polynomial.zero(nv)] * d for _ in range(d)]
        for (i, j), a in upper.items():
            if i == j:
                raise NotSkew("diagonal entries must vanish")
            rows[i][j] = a
            rows[j][i] = -a
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dim(self):
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def degree(self):
        return max((a.degree() for r in self.entries for a in r), default=-1)

    def apply(self, k: int = 1):
        """``(sum_j A_ij x_j^k)_i``."""
        d = self.dim
        nv = self.entries[0][0].nvars if d else 0
        xs = [Polynomial.var(j, nv) ** k for j in range(d)]
        out = []
        for row in self.entries:
            acc = Polynomial.zero(nv)
            for a, x in zip(row, xs):
                if a:
                    acc = acc + a * x
            out.append(acc)
        return tuple(out)

    def is_constant(self):
        return all(a.degree() <= 0 for r in self.entries for a in r)

    def to_rows(self):
        return [[str(a) for a in r] for r in self.entries]


def skew_decompose(Q_: list, k: int = 1) -> SkewPolyMatrix:
    """Skew A with ``Q_i = sum_j A_ij x_j^k`` given ``sum_i Q_i x_i^k = 0``.

    Eliminates the last variable first: ``Q_i = a_i + x_d^k b_i`` with
    ``deg_{x_d} a_i < k``, sets ``A_id = b_i`` and recurses on the ``a_i``
    (later variables then act as coefficients).
    """
    Q_ = list(Q_)
    d = len(Q_)
    if d == 0:
        return SkewPolyMatrix(())
    if k < 1:
        raise ValueError("k must be positive")
    nv = Q_[0].nvars
    if any(q.nvars != nv for q in Q_) or nv < d:
        raise DimensionMismatch("components must share a ring with at least d variables")
    total = Polynomial.zero(nv)
    for i, q in enumerate(Q_):
        if q:
            total = total + q * Polynomial.var(i, nv) ** k
    if total:
        raise HypothesisViolated("sum Q_i x_i^k is not zero")

    upper = {}
    current = Q_
    for top in range(d - 1, 0, -1):
        low, high = [], []
        for q in current[:top]:
            lo, hi = {}, {}
            for mono, c in q._terms.items():
                if mono[top] >= k:
                    m = list(mono)
                    m[top] -= k
                    hi[tuple(m)] = c
                else:
                    lo[mono] = c
            low.append(Polynomial._raw(nv, lo))
            high.append(Polynomial._raw(nv, hi))
        # consistency: Q_top = -sum_{i<top} b_i x_i^k
        expect = Polynomial.zero(nv)
        for i, b in enumerate(high):
            if b:
                upper[(i, top)] = b
                expect = expect - b * Polynomial.var(i, nv) ** k
        if expect != current[top]:
            raise InternalInconsistency("elimination step does not reproduce the pivot component")
        current = low
    if current[0]:
        raise InternalInconsistency("nonzero residue in the last remaining component")
    return SkewPolyMatrix.from_upper(d, upper, nv)


@dataclass(frozen=True)
class CanonicalForm:
    """``P_i = (1 - |x|^2) f_i + sum_j A_ij x_j``, optionally with layers.

    ``layers[i][j-1]`` is ``f_ij`` of the layered form
    ``P_i = sum_j (1 - |x|^{2j}) f_ij + sum_j A_ij x_j``; when layers are
    present ``f`` is ignored by :func:`assemble`.
    """

    f: tuple
    A: SkewPolyMatrix
    layers: tuple | None = None

    @property
    def dim(self):
        return len(self.f)

    @property
    def layer_count(self):
        return 0 if self.layers is None else (len(self.layers[0]) if self.layers else 0)

    def to_dict(self):
        out = {"f": [str(p) for p in self.f], "A": self.A.to_rows()}
        if self.layers is not None:
            out["layers"] = [[str(p) for p in row] for row in self.layers]
            out["layerCount"] = self.layer_count
        return out


def layer_count(m: int) -> int:
    """d(m): (m-1)/2 for odd m, m/2 for even m (0 for m < 1)."""
    if m < 1:
        return 0
    return (m - 1) // 2 if m % 2 else m // 2


def _monomial_assignment(poly: Polynomial, d: int):
    """Split ``poly`` (no constant term) as ``sum_i g_i x_i``, lowest index first."""
    parts = [dict() for _ in range(d)]
    for mono, c in poly._terms.items():
        i = next((j for j in range(d) if mono[j] > 0), None)
        if i is None:
            raise InternalInconsistency("constant term cannot be assigned to a variable")
        m = list(mono)
        m[i] -= 1
        parts[i][tuple(m)] = c
    return tuple(Polynomial._raw(poly.nvars, p) for p in parts)


def canonical_decompose(field: VectorField) -> CanonicalForm:
    d = field.dim
    K = tangency_cofactor(field).cofactor
    f = _monomial_assignment(-K, d)
    one_minus_s = 1 - sum_of_squares(d)
    R = [P - one_minus_s * fi for P, fi in zip(field.components, f)]
    return CanonicalForm(f, skew_decompose(R, 1))


def layered_decompose(field: VectorField) -> CanonicalForm:
    d = field.dim
    tangency_cofactor(field)
    m = field.degree
    L = layer_count(m)
    s = sum_of_squares(d)
    s_pows = [Polynomial.one(d)]
    for _ in range(L):
        s_pows.append(s_pows[-1] * s)
    layers = []
    R = []
    f_sum = []
    for P in field.components:
        parts = dict(grading(P))
        row = []
        for j in range(1, L + 1):
            fij = parts.get(m - 2 * j, Polynomial.zero(d)) + parts.get(m - 2 * j - 1, Polynomial.zero(d))
            row.append(fij)
        layers.append(tuple(row))
        acc = P
        for j, fij in enumerate(row, 1):
            if fij:
                acc = acc - (1 - s_pows[j]) * fij
        R.append(acc)
        f_sum.append(row)
    total = Polynomial.zero(d)
    for i, r in enumerate(R):
        if r:
            total = total + r * Polynomial.var(i, d)
    if total:
        raise InternalInconsistency("layered residual does not satisfy sum R_i x_i = 0")
    A = skew_decompose(R, 1)
    if A.degree() > m - 1:
        raise InternalInconsistency("skew part exceeds degree m - 1")
    # the plain (f, A) view: (1 - s^j) = (1 - s)(1 + s + ... + s^(j-1))
    f = []
    for row in layers:
        acc = Polynomial.zero(d)
        for j, fij in enumerate(row, 1):
            if fij:
                geo = Polynomial.zero(d)
                for t in range(j):
                    geo = geo + s_pows[t]
                acc = acc + geo * fij
        f.append(acc)
    return CanonicalForm(tuple(f), A, tuple(layers))


def assemble(cf: CanonicalForm) -> VectorField:
    A = cf.A
    if not isinstance(A, SkewPolyMatrix):
        A = SkewPolyMatrix(A)
    d = len(cf.f)
    if A.dim != d:
        raise DimensionMismatch("f and A have different dimensions")
    s = sum_of_squares(d)
    lin = A.apply(1)
    comps = []
    if cf.layers is not None:
        for i in range(d):
            acc = lin[i]
            s_pow = Polynomial.one(d)
            for fij in cf.layers[i]:
                s_pow = s_pow * s
                if fij:
                    acc = acc + (1 - s_pow) * fij
            comps.append(acc)
    else:
        for i in range(d):
            comps.append((1 - s) * cf.f[i] + lin[i])
    return VectorField(tuple(comps))


def homogeneous_decompose(field: VectorField) -> SkewPolyMatrix:
    if not field.is_homogeneous():
        raise NotHomogeneous("components are not homogeneous of a common degree")
    if radial_sum(field):
        raise NotTangentEverywhere("sum P_i x_i is not identically zero")
    return skew_decompose(list(field.components), 1)


# ---------------------------------------------------------------------------
# invariance


@dataclass(frozen=True)
class InvarianceCertificate:
    """``chi f = K f`` (ring identity) or ``chi f = K f + M (|x|^2 - 1)``."""

    f: Polynomial
    cofactor: Polynomial
    mode: str = RING
    multiplicity: int | None = None
    sphere_multiplier: Polynomial | None = None

    def verify(self, field: VectorField) -> bool:
        lhs = lie_derivative(field, self.f)
        rhs = self.cofactor * self.f
        if self.mode == MODULO_SPHERE and self.sphere_multiplier is not None:
            rhs = rhs + self.sphere_multiplier * sphere_polynomial(field.dim)
        return lhs == rhs

    def to_dict(self):
        out = {"f": str(self.f), "cofactor": str(self.cofactor), "mode": self.mode,
               "multiplicity": self.multiplicity}
        if self.sphere_multiplier is not None:
            out["sphereMultiplier"] = str(self.sphere_multiplier)
        return out


def _linear_data(f: Polynomial):
    a = [mpq(0)] * f.nvars
    b = mpq(0)
    for mono, c in f._terms.items():
        s = sum(mono)
        if s == 0:
            b = c
        elif s == 1:
            a[mono.index(1)] = c
        else:
            return None
    return a, b


def elimination_pivot(a) -> int:
    """Index of largest |a_j|, ties to the lowest index."""
    best = None
    for j, v in enumerate(a):
        if v and (best is None or abs(v) > abs(a[best])):
            best = j
    if best is None:
        raise ValueError("zero normal vector")
    return best


def modulo_sphere_linear(field: VectorField, ell: Polynomial) -> InvarianceCertificate:
    """Decide invariance of ``{ell = 0} ∩ S^(d-1)`` for linear ``ell``.

    Eliminates one variable with the hyperplane equation and tests whether
    the restricted sphere polynomial divides the restricted ``chi ell``.
    """
    data = _linear_data(ell)
    if data is None or not any(data[0]):
        raise ValueError("ell must be a nonconstant linear polynomial")
    a, b = data
    d = field.dim
    norm2 = sum((v * v for v in a), mpq(0))
    if b * b >= norm2:
        raise EmptySection("hyperplane misses the sphere (b^2 >= |a|^2)")
    j = elimination_pivot(a)
    xs = [Polynomial.var(i, d) for i in range(d)]
    sub = Polynomial.constant(-b / a[j], d)
    for i in range(d):
        if i != j and a[i]:
            sub = sub - xs[i].scale(a[i] / a[j])
    images = list(xs)
    images[j] = sub
    chi_ell = lie_derivative(field, ell)
    sphere = sphere_polynomial(d)
    restricted = compose(chi_ell, images)
    restricted_sphere = compose(sphere, images)
    try:
        M = exact_divide(restricted, restricted_sphere)
    except NotDivisible:
        raise NotInvariant("chi(ell) does not vanish on the sphere section") from None
    try:
        K = exact_divide(chi_ell - M * sphere, ell)
    except NotDivisible:
        raise InternalInconsistency("restricted identity did not lift to a cofactor") from None
    return InvarianceCertificate(ell, K, MODULO_SPHERE, None, M)


def invariance_check(field: VectorField, f: Polynomial, mode: str = RING) -> InvarianceCertificate:
    """Certificate that ``{f = 0}`` is invariant.

    ``ring-identity`` looks for K with ``chi f = K f`` by exact division.
    ``modulo-sphere`` works on the sphere: linear ``f`` use variable
    elimination; for nonlinear ``f`` only the ring identity is attempted.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if f.is_zero():
        raise ValueError("f must be nonzero")
    if f.nvars != field.dim:
        raise DimensionMismatch("f and field live in different rings")
    if mode == MODULO_SPHERE and f.degree() == 1:
        return modulo_sphere_linear(field, f)
    chi_f = lie_derivative(field, f)
    try:
        K = exact_divide(chi_f, f)
    except NotDivisible:
        msg = "chi f is not a polynomial multiple of f"
        if mode == MODULO_SPHERE:
            msg += " (nonlinear f: ideal membership beyond the ring identity is not decided)"
        raise NotInvariant(msg) from None
    return InvarianceCertificate(f, K, RING)


def is_invariant(field, f, mode=RING) -> bool:
    try:
        invariance_check(field, f, mode)
    except NotInvariant:
        return False
    return True


def first_integral_check(field: VectorField, G: Polynomial, mode: str = RING) -> bool:
    chi_G = lie_derivative(field, G)
    if mode == RING:
        return chi_G.is_zero()
    if mode == MODULO_SPHERE:
        return divide_with_remainder(chi_G, sphere_polynomial(field.dim))[1].is_zero()
    raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class IntegrabilityCertificate:
    integrals: tuple
    modes: tuple
    point: tuple
    jacobian_rank: int
    attempts: int = 1

    def to_dict(self):
        return {"integrals": [str(g) for g in self.integrals], "modes": list(self.modes),
                "independencePoint": [str(v) for v in self.point],
                "jacobianRank": self.jacobian_rank, "attempts": self.attempts}


def _candidate_points(d, grid_values, grid_limit, random_attempts, seed):
    for n, pt in enumerate(itertools.product(grid_values, repeat=d)):
        if n >= grid_limit:
            break
        yield tuple(mpq(v) for v in pt)
    rng = random.Random(seed)
    for _ in range(random_attempts):
        yield tuple(mpq(rng.randint(-50, 50), rng.randint(1, 17)) for _ in range(d))


def integrability_certificate(field: VectorField, integrals, *, seed: int = 0,
                              grid_values=(1, 2, 3, 0, -1), grid_limit: int = 512,
                              random_attempts: int = 256) -> IntegrabilityCertificate:
    """Certify first integrals and their functional independence.

    Independence is shown by an exact Jacobian rank equal to the number of
    integrals at a rational point; a failed search is inconclusive.
    """
    integrals = tuple(integrals)
    modes = []
    for idx, G in enumerate(integrals):
        if first_integral_check(field, G, RING):
            modes.append(RING)
        elif first_integral_check(field, G, MODULO_SPHERE):
            modes.append(MODULO_SPHERE)
        else:
            raise NotFirstIntegral(idx)
    k = len(integrals)
    d = field.dim
    grads = [[partial_derivative(G, j) for j in range(d)] for G in integrals]
    for n, pt in enumerate(_candidate_points(d, grid_values, grid_limit, random_attempts, seed), 1):
        J = [[g(pt) for g in row] for row in grads]
        r = linalg.rank(J, d) if k else 0
        if r == k:
            return IntegrabilityCertificate(integrals, tuple(modes), pt, r, n)
    raise IndependenceNotCertified(
        f"Jacobian rank stayed below {k} at every sampled point (dependence not proven)")
