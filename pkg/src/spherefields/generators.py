"""Constructors for explicit tangent-field families, with the invariant objects each guarantees.

Each family returns a :class:`Generated` bundle: the field plus metadata
(hyperplanes with multiplicities, first integrals, expected counts).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from math import comb

from gmpy2 import mpq

from .errors import BadParameters, ParseError
from .poly import Polynomial, Q, parse_polynomial, primitive, sum_of_squares
from .vector_field import CanonicalForm, SkewPolyMatrix, VectorField, assemble, tangency_cofactor

FAMILIES = (
    "thm14_1", "thm14_2", "thm14_3", "thm14_4",
    "thm34_integrable", "thm33_first_integral", "thm45_no_meridian", "thm15_parallels",
    "random",
)


@dataclass(frozen=True)
class Generated:
    family: str
    params: dict
    field: VectorField
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {"family": self.family, "params": _jsonable(self.params),
                "field": self.field.to_dict(), "metadata": _jsonable(self.metadata)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Polynomial) or type(obj).__name__ == "mpq":
        return str(obj)
    return obj


def _poly_param(value, d, name):
    if isinstance(value, Polynomial):
        if value.nvars != d:
            raise BadParameters(f"{name} lives in {value.nvars} variables, need {d}")
        return value
    try:
        return parse_polynomial(str(value), d)
    except ParseError as exc:
        raise BadParameters(f"cannot parse {name}: {exc}") from None


def _linear_form(coeffs, d):
    coeffs = [Q(c) for c in coeffs]
    if not any(coeffs):
        raise BadParameters("linear form must be nonzero")
    return Polynomial.linear(list(coeffs) + [0] * (d - len(coeffs)))


def _product(forms, d):
    acc = Polynomial.one(d)
    for f in forms:
        acc = acc * f
    return acc


def _hyperplane_meta(ell: Polynomial, mult):
    ell = primitive(ell)
    coeffs = [ell.coeff(tuple(1 if j == i else 0 for j in range(ell.nvars))) for i in range(ell.nvars)]
    return {"a": [str(c) for c in coeffs], "b": str(ell.constant_term()),
            "equation": f"{ell} = 0", "multiplicity": mult}


def _group_forms(forms):
    """Merge proportional forms, keeping a count for each."""
    out = []
    for f in forms:
        p = primitive(f)
        for entry in out:
            if entry[0] == p:
                entry[1] += 1
                break
        else:
            out.append([p, 1])
    return out


def _skew_from_upper(d, upper):
    return SkewPolyMatrix.from_upper(d, upper)


def _linear_field(A: SkewPolyMatrix) -> VectorField:
    return VectorField(A.apply(1))


# ---------------------------------------------------------------------------
# families


def family_thm14_1(n=2, m=3, a=None):
    """All ``A_ij = f^(m-1)`` (i < j) with ``f = sum_{k<=n} a_k x_k``."""
    n, m = int(n), int(m)
    if n < 2 or m < 2:
        raise BadParameters("need n >= 2 and m >= 2")
    d = n + 1
    a = [1] * n if a is None else list(a)
    if len(a) != n:
        raise BadParameters(f"a needs {n} entries")
    f = _linear_form(a, d)
    power = f ** (m - 1)
    A = _skew_from_upper(d, {(i, j): power for i in range(d) for j in range(i + 1, d)})
    s = comb(n - 1, 2) * (m - 2) + (n - 1) * (m - 1)
    meta = {"meridians": [_hyperplane_meta(f, f">= {s}")],
            "divisor": str(f), "divisibilityExponent": s,
            "extacticBasis": [f"x{i + 1}" for i in range(n)]}
    return _linear_field(A), meta


def family_thm14_2(n=2, m=3, forms=None):
    """All ``A_ij = A`` (i < j) with ``A`` a product of ``m-1`` linear forms in ``x_1..x_n``."""
    n, m = int(n), int(m)
    if n < 2 or m < 2:
        raise BadParameters("need n >= 2 and m >= 2")
    d = n + 1
    if forms is None:
        forms = [[1] + [k] + [0] * (n - 2) for k in range(1, m)]
    if len(forms) != m - 1:
        raise BadParameters(f"need m-1 = {m - 1} linear forms")
    lin = []
    for c in forms:
        if len(c) > n:
            raise BadParameters("forms may only involve x_1..x_n")
        lin.append(_linear_form(c, d))
    A = _product(lin, d)
    skew = _skew_from_upper(d, {(i, j): A for i in range(d) for j in range(i + 1, d)})
    meta = {"meridians": [_hyperplane_meta(f, f">= {(n - 1) * k}") for f, k in _group_forms(lin)],
            "minMultiplicityPerFactor": n - 1, "A": str(A)}
    return _linear_field(skew), meta


def family_thm14_3(m=None, forms=None, A23=None):
    """``P = (0, A23 x3, -A23 x2)`` on S^2 with ``A23`` a product of forms in ``x1, x2``."""
    d = 3
    if A23 is not None:
        A = _poly_param(A23, d, "A23")
        if A.degree_in(2) > 0:
            raise BadParameters("A23 must not involve x3")
        m_eff = A.degree() + 1
        if m is not None and int(m) != m_eff:
            raise BadParameters(f"m = {m} but deg A23 + 1 = {m_eff}")
        lin = None
    else:
        m_eff = 3 if m is None else int(m)
        if m_eff < 2:
            raise BadParameters("need m >= 2")
        if forms is None:
            forms = [[1, -k] for k in range(2, m_eff + 1)]
        if len(forms) != m_eff - 1:
            raise BadParameters(f"need m-1 = {m_eff - 1} linear forms")
        lin = []
        for c in forms:
            if len(c) != 2:
                raise BadParameters("forms are pairs (d1, d2) for d1*x1 + d2*x2")
            lin.append(_linear_form(c, d))
        A = _product(lin, d)
    x1, x2, x3 = (Polynomial.var(i, d) for i in range(d))
    skew = _skew_from_upper(d, {(1, 2): A})
    meta = {"A23": str(A), "extactic": str(A * x1 * x3), "expectedMeridianCount": m_eff}
    if lin is not None:
        meta["meridians"] = [_hyperplane_meta(f, k) for f, k in _group_forms([x1] + lin)]
    return _linear_field(skew), meta


def family_thm14_4(m=None, forms=None, A=None):
    """``P = (A x2, -A x1, 0, 0)`` on S^3 with ``A`` a product of forms in ``x1, x2, x3``."""
    d = 4
    x1, x2, x3 = (Polynomial.var(i, d) for i in range(3))
    if A is not None:
        Ap = _poly_param(A, d, "A")
        if Ap.degree_in(3) > 0:
            raise BadParameters("A must not involve x4")
        m_eff = Ap.degree() + 1
        if m is not None and int(m) != m_eff:
            raise BadParameters(f"m = {m} but deg A + 1 = {m_eff}")
        lin = None
    else:
        m_eff = 2 if m is None else int(m)
        if m_eff < 2:
            raise BadParameters("need m >= 2")
        if forms is None:
            defaults = [[1, 0, 0], [1, -2, 0], [1, 1, 1], [2, 1, -1], [1, 0, 3]]
            if m_eff - 1 > len(defaults):
                defaults += [[1, k, 0] for k in range(3, m_eff + 3)]
            forms = defaults[:m_eff - 1]
        if len(forms) != m_eff - 1:
            raise BadParameters(f"need m-1 = {m_eff - 1} linear forms")
        lin = []
        for c in forms:
            if len(c) != 3:
                raise BadParameters("forms are triples for a*x1 + b*x2 + c*x3")
            lin.append(_linear_form(c, d))
        Ap = _product(lin, d)
    zero = Polynomial.zero(d)
    fld = VectorField((Ap * x2, -Ap * x1, zero, zero))
    meta = {"A": str(Ap), "extactic": str(-(Ap ** 3) * x3 * (x1 * x1 + x2 * x2)),
            "expectedMeridianTotal": 3 * m_eff - 2}
    if lin is not None:
        grouped = _group_forms(lin)
        if any(f == primitive(x3) for f, _ in grouped):
            raise BadParameters("x3 itself may not be a factor of A")
        meta["meridians"] = [_hyperplane_meta(f, 3 * k) for f, k in grouped] + [_hyperplane_meta(x3, 1)]
    return fld, meta


def family_thm34_integrable(n=2, m=2, A=None):
    """``P_1 = A x2, P_2 = -A x1``, rest zero, with ``deg A = m - 1``."""
    n, m = int(n), int(m)
    if n < 1 or m < 1:
        raise BadParameters("need n >= 1 and m >= 1")
    d = n + 1
    Ap = Polynomial.var(0, d) ** (m - 1) if A is None else _poly_param(A, d, "A")
    if Ap.is_zero() or Ap.degree() != m - 1:
        raise BadParameters(f"A must be nonzero of degree m - 1 = {m - 1}")
    x1, x2 = Polynomial.var(0, d), Polynomial.var(1, d)
    zero = Polynomial.zero(d)
    fld = VectorField((Ap * x2, -Ap * x1) + (zero,) * (d - 2))
    integrals = [sum_of_squares(d) - 1] + [Polynomial.var(j, d) for j in range(2, d)]
    return fld, {"A": str(Ap), "firstIntegrals": [str(g) for g in integrals]}


def family_thm33_first_integral(a=(0, 0, 1), B=None, c=0):
    """A skew ``A`` with ``a^t A = 0`` built from a skew seed ``B``; ``P = A x``.

    The pivot ``k`` is the first nonzero ``a_k``;
    ``A_kj = -(1/a_k) sum_{i != k} a_i B_ij`` and ``A_pq = B_pq`` off row/column k.
    """
    a = [Q(v) for v in a]
    d = len(a)
    if d < 2 or not any(a):
        raise BadParameters("a must be a nonzero vector of length >= 2")
    if B is None:
        B = [[0] * d for _ in range(d)]
        B[0][1], B[1][0] = 1, -1
    if len(B) != d or any(len(r) != d for r in B):
        raise BadParameters(f"B must be {d}x{d}")
    Bp = [[_poly_param(v, d, "B entry") for v in row] for row in B]
    for i in range(d):
        for j in range(i, d):
            if Bp[i][j] != -Bp[j][i]:
                raise BadParameters("seed B must be skew-symmetric")
    k = next(i for i, v in enumerate(a) if v)
    upper = {}
    for p in range(d):
        for q in range(p + 1, d):
            if p != k and q != k:
                upper[(p, q)] = Bp[p][q]
    for j in range(d):
        if j == k:
            continue
        acc = Polynomial.zero(d)
        for i in range(d):
            if i != k and a[i]:
                acc = acc + Bp[i][j].scale(a[i])
        entry = acc.scale(-1 / a[k])
        if k < j:
            upper[(k, j)] = entry
        else:
            upper[(j, k)] = -entry
    A = SkewPolyMatrix.from_upper(d, upper)
    fld = VectorField(A.apply(1))
    if fld.is_zero():
        raise BadParameters("A x vanishes identically; choose another seed B")
    G = Polynomial.linear(a, Q(c))
    return fld, {"firstIntegral": str(G), "pivot": k + 1, "A": A.to_rows()}


def family_thm45_no_meridian(n=2, coefficients=None, even_sphere=False):
    """Rotation blocks ``P_{2i-1} = A_i x_{2i}, P_{2i} = -A_i x_{2i-1}``.

    On S^(2n-1) by default; ``even_sphere`` appends a zero component (S^(2n)).
    """
    n = int(n)
    if n < 1:
        raise BadParameters("need n >= 1")
    coeffs = list(range(1, n + 1)) if coefficients is None else [Q(c) for c in coefficients]
    if len(coeffs) != n or any(c == 0 for c in coeffs):
        raise BadParameters(f"need {n} nonzero block coefficients")
    d = 2 * n + (1 if even_sphere else 0)
    comps = []
    for i, c in enumerate(coeffs):
        comps.append(Polynomial.var(2 * i + 1, d).scale(c))
        comps.append(Polynomial.var(2 * i, d).scale(-c))
    if even_sphere:
        comps.append(Polynomial.zero(d))
    kernel = [[str(int(j == d - 1)) for j in range(d)]] if even_sphere else []
    return VectorField(tuple(comps)), {"sphereDimension": d - 1, "meridians": [],
                                       "greatSphereKernel": kernel}


def _default_parallels(count):
    pool = [mpq(0), mpq(1, 2), mpq(-1, 2), mpq(1, 3), mpq(-1, 3), mpq(2, 3), mpq(-2, 3),
            mpq(1, 4), mpq(-1, 4), mpq(3, 4), mpq(-3, 4)]
    if count > len(pool):
        pool += [mpq(1, k) for k in range(5, count + 5)]
    return pool[:count]


def family_thm15_parallels(n=2, m=3, ks=None):
    """``A_{d j} = prod (x_d - k_i)`` for ``j < d``, so ``P_d = (x_1 + ... + x_n) prod (x_d - k_i)``."""
    n = int(n)
    if n < 1:
        raise BadParameters("need n >= 1")
    if ks is None:
        m = int(m)
        if m < 2:
            raise BadParameters("need m >= 2")
        ks = _default_parallels(m - 1)
    else:
        ks = [Q(k) for k in ks]
        m = len(ks) + 1
    if len(set(ks)) != len(ks) or any(not -1 < k < 1 for k in ks):
        raise BadParameters("parallels must be distinct with |k| < 1")
    d = n + 1
    xd = Polynomial.var(d - 1, d)
    prod = _product([xd - k for k in ks], d)
    skew = _skew_from_upper(d, {(j, d - 1): -prod for j in range(n)})
    meta = {"parallels": [{"k": str(k), "equation": f"{xd - k} = 0", "multiplicity": 1} for k in ks],
            "expectedParallelCount": m - 1, "degree": m}
    return _linear_field(skew), meta


# ---------------------------------------------------------------------------
# random fields


def _random_coeff(rng, bound):
    num = rng.choice([v for v in range(-bound, bound + 1) if v])
    den = rng.choice([1, 1, 1, 2, 3])
    return mpq(num, den)


def _random_poly(rng, d, max_deg, bound, density=0.5, homogeneous=False, max_terms=3):
    if max_deg < 0 or rng.random() > density:
        return Polynomial.zero(d)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        deg = max_deg if homogeneous else rng.randint(0, max_deg)
        mono = [0] * d
        for _ in range(deg):
            mono[rng.randrange(d)] += 1
        terms[tuple(mono)] = _random_coeff(rng, bound)
    return Polynomial(d, terms)


def random_canonical_form(n, m, bound=3, seed=0, homogeneous=False, rng=None):
    rng = rng or random.Random(seed)
    d = n + 1
    upper = {}
    for i in range(d):
        for j in range(i + 1, d):
            upper[(i, j)] = _random_poly(rng, d, m - 1, bound, homogeneous=homogeneous)
    if homogeneous:
        f = tuple(Polynomial.zero(d) for _ in range(d))
    else:
        f = tuple(_random_poly(rng, d, m - 2, bound) for _ in range(d))
    return CanonicalForm(f, SkewPolyMatrix.from_upper(d, upper))


def random_tangent_field(n: int, m: int, bound: int = 3, seed: int = 0,
                         homogeneous: bool = False, max_tries: int = 1000) -> VectorField:
    """A tangent field of degree exactly ``m`` on S^n, reproducible from ``seed``."""
    if n < 1 or m < 1:
        raise BadParameters("need n >= 1 and m >= 1")
    rng = random.Random(seed)
    for _ in range(max_tries):
        cf = random_canonical_form(n, m, bound, homogeneous=homogeneous, rng=rng)
        fld = assemble(cf)
        if fld.degree == m:
            return fld
    raise BadParameters("could not hit the requested degree; raise the bound or density")


def family_random(n=2, m=2, bound=3, homogeneous=False, seed=0):
    return random_tangent_field(int(n), int(m), int(bound), int(seed), bool(homogeneous)), {}


_BUILDERS = {
    "thm14_1": family_thm14_1,
    "thm14_2": family_thm14_2,
    "thm14_3": family_thm14_3,
    "thm14_4": family_thm14_4,
    "thm34_integrable": family_thm34_integrable,
    "thm33_first_integral": family_thm33_first_integral,
    "thm45_no_meridian": family_thm45_no_meridian,
    "thm15_parallels": family_thm15_parallels,
    "random": family_random,
}


def generate(family: str, params: dict | None = None, seed: int | None = None) -> Generated:
    if family not in _BUILDERS:
        raise BadParameters(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    params = dict(params or {})
    if family == "random" and seed is not None:
        params.setdefault("seed", seed)
    try:
        fld, meta = _BUILDERS[family](**params)
    except TypeError as exc:
        raise BadParameters(f"bad parameters for {family}: {exc}") from None
    tangency_cofactor(fld)
    meta = dict(meta)
    meta.setdefault("degree", fld.degree)
    return Generated(family, params, fld, meta)


def generate_json(family, params=None, seed=None) -> str:
    return json.dumps(generate(family, params, seed).to_dict(), sort_keys=True)
