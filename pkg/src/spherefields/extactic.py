"""Extactic polynomials, multiplicities, and invariant meridian/parallel search."""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from . import _univariate as uni
from . import linalg
from .errors import (
    DependentBasis,
    InternalInconsistency,
    NotDegreeOneHomogeneous,
    NotDivisible,
    NotInvariant,
    ZeroExtactic,
)
from .poly import Polynomial, Q, compose, divides, exact_divide, primitive
from .sphere_geometry import Hyperplane, linear_matrix
from .vector_field import RING, VectorField, invariance_check, lie_derivative, tangency_cofactor

MINOR_EXPANSION_LIMIT = 6


def lie_powers(field: VectorField, v: Polynomial, k: int):
    """``[v, chi v, ..., chi^(k-1) v]``."""
    out = [v]
    for _ in range(k - 1):
        out.append(lie_derivative(field, out[-1]))
    return out


def extactic_matrix(field: VectorField, basis):
    k = len(basis)
    cols = [lie_powers(field, v, k) for v in basis]
    return [[cols[c][r] for c in range(k)] for r in range(k)]


def _det_minors(M):
    """Laplace expansion down the rows, memoized on the set of used columns."""
    k = len(M)
    nv = M[0][0].nvars
    memo = {}

    def rec(mask):
        # mask holds the columns still available; row index follows from its size
        if mask == 0:
            return Polynomial.one(nv)
        if mask in memo:
            return memo[mask]
        r = k - bin(mask).count("1")
        acc = Polynomial.zero(nv)
        pos = 0
        for c in range(k):
            if not mask >> c & 1:
                continue
            entry = M[r][c]
            if entry:
                sub = rec(mask & ~(1 << c))
                if sub:
                    term = entry * sub
                    acc = acc - term if pos % 2 else acc + term
            pos += 1
        memo[mask] = acc
        return acc

    return rec((1 << k) - 1)


def _det_bareiss(M):
    A = [list(r) for r in M]
    k = len(A)
    nv = A[0][0].nvars
    sign = 1
    prev = Polynomial.one(nv)
    for c in range(k - 1):
        p = next((i for i in range(c, k) if A[i][c]), None)
        if p is None:
            return Polynomial.zero(nv)
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        piv = A[c][c]
        for i in range(c + 1, k):
            for j in range(c + 1, k):
                A[i][j] = exact_divide(piv * A[i][j] - A[i][c] * A[c][j], prev)
            A[i][c] = Polynomial.zero(nv)
        prev = piv
    det = A[k - 1][k - 1]
    return det if sign > 0 else -det


def determinant(M) -> Polynomial:
    """Exact determinant of a square matrix of polynomials."""
    if not M:
        raise ValueError("empty matrix")
    if len(M) <= MINOR_EXPANSION_LIMIT:
        return _det_minors(M)
    return _det_bareiss(M)


def check_basis(basis):
    basis = list(basis)
    if len(basis) < 2:
        raise ValueError("the subspace needs dimension at least 2")
    nv = basis[0].nvars
    if any(v.nvars != nv for v in basis):
        raise ValueError("basis polynomials live in different rings")
    monos = sorted({m for v in basis for m in v.terms})
    rows = [[v.coeff(m) for m in monos] for v in basis]
    if linalg.rank(rows, len(monos)) < len(basis):
        raise DependentBasis("basis polynomials are linearly dependent")
    return basis


def extactic_polynomial(field: VectorField, basis) -> Polynomial:
    basis = check_basis(basis)
    if basis[0].nvars != field.dim:
        raise ValueError("basis and field live in different rings")
    return determinant(extactic_matrix(field, basis))


def multiplicity(E: Polynomial, f: Polynomial) -> int:
    """Largest ``m`` with ``f^m | E``."""
    if E.is_zero():
        raise ZeroExtactic("multiplicity is undefined when the extactic polynomial vanishes")
    if f.degree() < 1:
        raise ValueError("f must be nonconstant")
    m = 0
    while True:
        try:
            E = exact_divide(E, f)
        except NotDivisible:
            return m
        m += 1


@dataclass(frozen=True)
class ExtacticReport:
    basis: tuple
    E: Polynomial
    candidates: tuple = ()

    def to_dict(self):
        return {"basis": [str(v) for v in self.basis], "E": str(self.E),
                "zero": self.E.is_zero(),
                "candidates": [{"f": str(f), "multiplicity": m} for f, m in self.candidates]}


def extactic_report(field: VectorField, basis, candidates=()) -> ExtacticReport:
    basis = tuple(check_basis(basis))
    E = extactic_polynomial(field, basis)
    found = []
    if not E.is_zero():
        for f in candidates:
            found.append((f, multiplicity(E, f)))
    return ExtacticReport(basis, E, tuple(found))


def meridian_basis(d):
    return [Polynomial.var(i, d) for i in range(d - 1)]


def parallel_basis(d):
    return [Polynomial.one(d), Polynomial.var(d - 1, d)]


# ---------------------------------------------------------------------------
# hyperplane findings


@dataclass(frozen=True)
class HyperplaneEntry:
    hyperplane: Hyperplane
    multiplicity: int | None
    cofactor: Polynomial

    def to_dict(self):
        out = self.hyperplane.to_dict()
        out.update({"equation": str(self.hyperplane), "multiplicity": self.multiplicity,
                    "cofactor": str(self.cofactor), "mode": RING})
        return out


@dataclass(frozen=True)
class HyperplaneFinding:
    kind: str
    hyperplanes: tuple
    complete: bool
    flags: dict = field(default_factory=dict)
    unresolved: tuple = ()
    E: Polynomial | None = None

    @property
    def count(self):
        return len(self.hyperplanes)

    @property
    def total_multiplicity(self):
        return sum(h.multiplicity or 1 for h in self.hyperplanes)

    def to_dict(self):
        out = {"kind": self.kind, "count": self.count,
               "totalWithMultiplicity": self.total_multiplicity,
               "complete": self.complete,
               "hyperplanes": [h.to_dict() for h in self.hyperplanes],
               "flags": dict(self.flags),
               "unresolved": list(self.unresolved)}
        if self.E is not None:
            out["extactic"] = str(self.E)
        return out


def _sample_points(dim, count, start=1):
    for k in range(start, start + count):
        yield tuple(mpq(k + i) for i in range(dim))


def _specialized_gcd(groups, var_count, min_samples=3, max_tries=40):
    """gcd over specializations ``sum_g coeff_g(t) * mono_g(point)``.

    ``groups`` maps exponent tuples (over ``var_count`` other variables) to
    univariate coefficient lists.  Zero specializations are skipped.
    """
    acc = None
    used = 0
    for pt in _sample_points(var_count, max_tries):
        spec = []
        for mono, coeffs in groups.items():
            w = mpq(1)
            for e, v in zip(mono, pt):
                if e:
                    w *= v ** e
            if len(spec) < len(coeffs):
                spec.extend([mpq(0)] * (len(coeffs) - len(spec)))
            for i, c in enumerate(coeffs):
                spec[i] += w * c
        spec = uni.trim(spec)
        if not spec:
            continue
        acc = spec if acc is None else uni.gcd(acc, spec)
        used += 1
        if used >= min_samples:
            break
    return acc, used


def _exact_gcd(groups):
    g = []
    for coeffs in groups.values():
        g = uni.gcd(g, coeffs)
    return g


def _strip_var(groups, var):
    """Drop the position of ``var`` from the group keys."""
    return {k[:var] + k[var + 1:]: v for k, v in groups.items()}


def find_parallels(field: VectorField) -> HyperplaneFinding:
    """Rational invariant parallels ``x_d = k`` with ``|k| < 1``.

    Candidates come from rational roots of the gcd of several
    specializations of ``P_d`` in the other variables; each one is verified
    by exact division.  The exact gcd of the coefficients of ``P_d`` (as a
    polynomial in ``x_d``) then tells whether irrational parallels remain.
    """
    tangency_cofactor(field)
    d = field.dim
    last = d - 1
    P = field.components[last]
    if P.is_zero():
        return HyperplaneFinding("parallel", (), True, {"allParallelsInvariant": True})
    E = extactic_polynomial(field, parallel_basis(d))
    groups = _strip_var(uni.coefficients_in(P, last), last)
    spec, _ = _specialized_gcd(groups, d - 1)
    candidates = []
    if spec is not None and len(spec) > 1:
        candidates = [r for r, _ in uni.rational_roots(spec) if -1 < r < 1]
    xd = Polynomial.var(last, d)
    entries = []
    verified = []
    for k in candidates:
        ell = xd - k
        try:
            cert = invariance_check(field, ell, RING)
        except NotInvariant:
            continue
        mult = multiplicity(E, ell)
        if mult < 1:
            raise InternalInconsistency("invariant parallel does not divide the extactic polynomial")
        h = Hyperplane.coordinate(last, d, -k)
        entries.append(HyperplaneEntry(h, mult, cert.cofactor))
        verified.append((k, mult))
    g = _exact_gcd(groups)
    residual = uni.strip_roots(g, [(k, m) for k, m in uni.rational_roots(g)])
    unresolved = ()
    flags = {}
    if len(residual) > 1 and uni.count_real_roots(residual, -1, 1) > 0:
        unresolved = (uni.to_string(residual, f"x{d}"),)
        flags["irrationalParallels"] = True
    complete = not unresolved
    return HyperplaneFinding("parallel", tuple(entries), complete, flags, unresolved, E)


def _dedupe(hyperplanes):
    seen = {}
    for h in hyperplanes:
        key = h.normalized()
        seen.setdefault((key.a, key.b), key)
    return list(seen.values())


def _meridian_candidates_s2(E: Polynomial):
    """Rational slopes t with ``x1 - t x2 | E`` plus the line ``x2 = 0``."""
    ring = 3
    t, y, z = (Polynomial.var(i, ring) for i in range(ring))
    F = compose(E, [t * y, y, z])
    groups = _strip_var(uni.coefficients_in(F, 0), 0)
    spec, _ = _specialized_gcd(groups, 2)
    slopes = []
    if spec is not None and len(spec) > 1:
        slopes = [r for r, _ in uni.rational_roots(spec)]
    cands = [Hyperplane((1, -s, 0)) for s in slopes]
    if divides(Polynomial.var(1, 3), E):
        cands.append(Hyperplane((0, 1, 0)))
    g = _exact_gcd(groups)
    residual = uni.strip_roots(g, uni.rational_roots(g)) if g else g
    irrational = len(residual) > 1 and uni.count_real_roots(
        residual, -uni.root_bound(residual), uni.root_bound(residual)) > 0
    return cands, (uni.to_string(residual, "t") if irrational else None)


def _kernel_meridians(field: VectorField):
    """Meridian directions in the kernel of a degree-one field's matrix."""
    try:
        A = linear_matrix(field)
    except NotDegreeOneHomogeneous:
        return [], False
    d = field.dim
    rows = [list(r) for r in A] + [[mpq(0)] * (d - 1) + [mpq(1)]]
    basis = linalg.nullspace(rows, d)
    return [Hyperplane(tuple(v)) for v in basis], len(basis) >= 2


def find_meridians(field: VectorField, candidates=None) -> HyperplaneFinding:
    """Invariant meridian hyperplanes ``a . x = 0`` with ``a_d = 0``.

    On S^2 the search is exhaustive over rational slopes (factors of the
    extactic polynomial for ``<x1, x2>``).  In higher dimension only the
    supplied candidates and, for degree-one fields, kernel directions are
    verified, and the finding is never marked complete.
    """
    tangency_cofactor(field)
    d = field.dim
    flags = {}
    unresolved = ()
    pool = []
    for a in candidates or ():
        a = tuple(Q(v) for v in a)
        if len(a) != d:
            raise ValueError(f"candidate {a} has the wrong length")
        if a[-1] != 0:
            raise ValueError(f"candidate {a} is not a meridian (last entry nonzero)")
        pool.append(Hyperplane(a))
    E = None
    complete = False
    if d >= 3:
        E = extactic_polynomial(field, meridian_basis(d))
        if E.is_zero():
            flags["zeroExtactic"] = True
            flags["note"] = "extactic polynomial vanishes: infinitely many or degenerate"
    if d == 2:
        pool.append(Hyperplane((1, 0)))
        complete = True
    elif d == 3 and not E.is_zero():
        found, irr = _meridian_candidates_s2(E)
        pool.extend(found)
        if irr is not None:
            unresolved = (irr,)
            flags["irrationalMeridians"] = True
        complete = irr is None
    kern, infinite = _kernel_meridians(field)
    pool.extend(kern)
    if infinite:
        flags["infinitelyMany"] = True
        complete = False
    entries = []
    for h in _dedupe(pool):
        ell = h.polynomial()
        try:
            cert = invariance_check(field, ell, RING)
        except NotInvariant:
            continue
        mult = None
        if E is not None and not E.is_zero():
            mult = multiplicity(E, primitive(ell))
            if mult < 1:
                raise InternalInconsistency("invariant meridian does not divide the extactic polynomial")
        entries.append(HyperplaneEntry(h, mult, cert.cofactor))
    return HyperplaneFinding("meridian", tuple(entries), complete, flags, unresolved, E)
