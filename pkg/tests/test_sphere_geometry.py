import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from spherefields.errors import (
    BadParameters,
    EmptySection,
    HypothesisViolated,
    NotDegreeOneHomogeneous,
    NotInvariant,
    NotInvariantEquator,
)
from spherefields.generators import generate, random_tangent_field
from spherefields.poly import Polynomial, parse_polynomial
from spherefields.sphere_geometry import (
    Hyperplane,
    QuadraticSphereData,
    cone_polynomial,
    deg1_great_sphere_kernel,
    equator_structure_check,
    homogeneous_noneq_sphere_structure,
    is_sphere_invariant,
    quadratic_eigen_cofactor,
    quadratic_great_sphere_test,
    sphere_invariance_check,
)
from spherefields.stereographic import equator_transfer_check
from spherefields.vector_field import (
    MODULO_SPHERE,
    RING,
    CanonicalForm,
    SkewPolyMatrix,
    VectorField,
    assemble,
    elimination_pivot,
    is_invariant,
    lie_derivative,
)


def F(*comps):
    d = len(comps)
    return VectorField(tuple(parse_polynomial(c, d) for c in comps))


def P(text, d=3):
    return parse_polynomial(text, d)


def H(a, b=0):
    return Hyperplane(tuple(mpq(v) for v in a), mpq(b))


# hyperplanes and cones ------------------------------------------------------

def test_classification_flags():
    assert H([1, -2, 0]).is_meridian and H([1, -2, 0]).is_great
    assert H([0, 0, 1], "-1/2").is_parallel and not H([0, 0, 1], "-1/2").is_great
    assert H([0, 0, 1], "1/2").d0 == mpq(-1, 2)
    assert not H([1, 1, 0], 2).meets_sphere
    with pytest.raises(ValueError):
        H([0, 0, 0])


def test_hyperplane_json():
    assert H([0, 0, 1], "1/2").to_dict()["b"] == "1/2"
    assert Hyperplane.from_dict({"a": ["1", "0", "-2"], "b": "1/3"}) == H([1, 0, -2], "1/3")


def test_cone_examples():
    assert cone_polynomial(H([0, 0, 1], "1/2")).polynomial == P("x3^2 - 1/4*(x1^2 + x2^2 + x3^2)")
    assert cone_polynomial(H([0, 0, 1])).polynomial == P("x3")
    with pytest.raises(EmptySection):
        cone_polynomial(H([1, 1, 0], -2))


def _householder(v):
    """Rational orthogonal reflection I - 2 v v^t / |v|^2."""
    d = len(v)
    n2 = sum(x * x for x in v)
    return [[mpq(int(i == j)) - 2 * v[i] * v[j] / n2 for j in range(d)] for i in range(d)]


def _rational_sphere_point(rng, n):
    """A rational point on S^(n-1) via inverse stereographic projection."""
    u = [mpq(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n - 1)]
    D = sum(x * x for x in u) + 1
    return [2 * x / D for x in u] + [(D - 2) / D]


@pytest.mark.parametrize("d", [3, 4])
def test_cone_vanishes_on_scaled_section(d):
    rng = random.Random(d)
    for _ in range(50):
        v = [mpq(rng.randint(-4, 4)) for _ in range(d)]
        if not any(v):
            v[0] = mpq(1)
        R = _householder(v)
        # the section {x_d = 3/5} meets S^(d-1) in the sphere of radius 4/5
        q = [mpq(4, 5) * c for c in _rational_sphere_point(rng, d - 1)] + [mpq(3, 5)]
        p = [sum(R[i][k] * q[k] for k in range(d)) for i in range(d)]
        a = [R[i][d - 1] for i in range(d)]  # image of e_d
        h = Hyperplane(tuple(a), mpq(-3, 5))
        assert sum(x * x for x in p) == 1 and h.polynomial()(*p) == 0
        cone = cone_polynomial(h).polynomial
        scale = mpq(rng.randint(-7, 7), rng.randint(1, 5))
        assert cone(*[scale * x for x in p]) == 0


# invariance of sections -----------------------------------------------------

def test_great_equator_invariant():
    cert = sphere_invariance_check(F("x2*x3", "-x1*x3", "0"), H([0, 0, 1]))
    assert cert.cofactor.is_zero()


def test_parallel_of_third_component_free_field():
    # P3 = 0 makes x3 a first integral, so every parallel is invariant
    cert = sphere_invariance_check(F("x2*x3", "-x1*x3", "0"), H([0, 0, 1], "-1/2"))
    assert cert.mode == RING and cert.verify(F("x2*x3", "-x1*x3", "0"))
    assert is_sphere_invariant(F("-x2", "x1", "0"), H([0, 0, 1], "1/2"))


def test_non_great_not_invariant():
    with pytest.raises(NotInvariant):
        sphere_invariance_check(F("-x3", "0", "x1"), H([0, 0, 1], "1/2"))


def test_non_homogeneous_uses_elimination():
    fld = generate("thm15_parallels", {"ks": ["1/2", "-1/3"]}).field
    cert = sphere_invariance_check(fld, H([0, 0, 1], "-1/2"))
    assert cert.mode == MODULO_SPHERE and cert.verify(fld)
    with pytest.raises(NotInvariant):
        sphere_invariance_check(fld, H([0, 0, 1], "-1/4"))


def test_empty_section_rejected():
    with pytest.raises(EmptySection):
        sphere_invariance_check(F("-x2", "x1", "0"), H([0, 0, 1], 1))


def test_elimination_pivot_ties():
    assert elimination_pivot([1, -2, 2]) == 1
    assert elimination_pivot([0, 0, mpq(1, 2)]) == 2


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10_000), st.booleans())
def test_equator_cone_agrees_with_transfer(n, m, seed, homogeneous):
    fld = random_tangent_field(n, m, seed=seed, homogeneous=homogeneous)
    d = fld.dim
    assert is_sphere_invariant(fld, Hyperplane.coordinate(d - 1, d)) == equator_transfer_check(fld)


# non-great sections of homogeneous fields of degree <= 2 --------------------

def test_linear_first_integral_gives_invariant_parallel():
    # a rotation about the x3 axis keeps every circle x3 = c
    fld = F("-x2", "x1", "0")
    for b in ("1/2", "-2/3", "1/7"):
        assert is_sphere_invariant(fld, H([0, 0, 1], b))


def _linear_integral_field(rng, a):
    d = len(a)
    B = [[Polynomial.linear([rng.randint(-2, 2) for _ in range(d)]) if i < j else None
          for j in range(d)] for i in range(d)]
    rows = [[str(B[i][j]) if i < j else ("0" if i == j else f"-({B[j][i]})") for j in range(d)]
            for i in range(d)]
    try:
        return generate("thm33_first_integral", {"a": a, "B": rows}).field
    except BadParameters:
        return None


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 2), st.integers(2, 3), st.booleans())
def test_low_degree_non_great_invariant_iff_linear_first_integral(seed, m, n, planted):
    rng = random.Random(seed)
    d = n + 1
    a = [mpq(rng.randint(-3, 3)) for _ in range(d)]
    if not any(a):
        a[0] = mpq(1)
    fld = None
    if planted:
        if m == 2:
            fld = _linear_integral_field(rng, a)
        else:
            try:
                fld = generate("thm33_first_integral", {"a": a}).field
            except BadParameters:
                fld = None
    if fld is None or fld.is_zero():
        fld = random_tangent_field(n, m, seed=seed, homogeneous=True)
    norm2 = sum(v * v for v in a)
    b = mpq(rng.randint(1, 9), rng.randint(2, 9)) * rng.choice([-1, 1])
    if b * b >= norm2:
        b = b / (4 * abs(b)) if norm2 > 0 else b
    h = Hyperplane(tuple(a), b)
    if not h.meets_sphere or h.is_great:
        return
    integral = lie_derivative(fld, Polynomial.linear(a)).is_zero()
    assert is_sphere_invariant(fld, h) == integral


# degree-one kernels ---------------------------------------------------------

def test_kernel_rotation_s2():
    kern = deg1_great_sphere_kernel(F("x2", "-x1", "0"))
    assert [list(v) for v in kern.basis] == [[0, 0, 1]]
    assert [str(h) for h in kern.hyperplanes()] == ["x3 = 0"]


def test_kernel_trivial_s3():
    kern = deg1_great_sphere_kernel(F("x2", "-x1", "2*x4", "-2*x3"))
    assert kern.dimension == 0 and not kern.all_invariant


def test_kernel_zero_field():
    kern = deg1_great_sphere_kernel(F("0", "0", "0"))
    assert kern.dimension == 3 and kern.all_invariant
    assert kern.to_dict()["allGreatSpheresInvariant"]


def test_kernel_requires_linear_homogeneous():
    with pytest.raises(NotDegreeOneHomogeneous):
        deg1_great_sphere_kernel(F("x2*x3", "-x1*x3", "0"))


def test_kernel_dimension_counts_great_spheres():
    # S^3: trivial kernel -> none; kernel of dimension 1 on S^4 -> exactly one
    gen = generate("thm45_no_meridian", {"n": 2})
    assert deg1_great_sphere_kernel(gen.field).dimension == 0
    gen = generate("thm45_no_meridian", {"n": 2, "even_sphere": True})
    kern = deg1_great_sphere_kernel(gen.field)
    assert kern.dimension == 1
    assert is_invariant(gen.field, kern.hyperplanes()[0].polynomial())


# homogeneous quadratic fields -----------------------------------------------

def test_quadratic_data_reproduces_components():
    fld = random_tangent_field(3, 2, seed=5, homogeneous=True)
    data = QuadraticSphereData.from_field(fld)
    for i, p in enumerate(fld.components):
        assert data.form(i) == p
        B = data.B[i]
        assert all(B[r][c] == B[c][r] for r in range(4) for c in range(4))


def test_quadratic_test_examples():
    data = QuadraticSphereData.from_field(F("x2*x3", "-x1*x3", "0"))
    assert quadratic_great_sphere_test(data, [0, 0, 1]) == [0, 0, 0]
    assert quadratic_great_sphere_test(data, [1, 0, 0]) is None
    b1 = quadratic_great_sphere_test(data, [0, 0, 1])
    b2 = quadratic_great_sphere_test(data, [0, 0, 2])
    assert (b1 is None) == (b2 is None)


def test_quadratic_test_nonzero_b():
    # P = (-x3^2, 0, x1 x3): chi(x3) = x1 x3, the equator is invariant with cofactor x1
    fld = VectorField(SkewPolyMatrix.from_upper(3, {(0, 2): P("-x3")}).apply(1))
    data = QuadraticSphereData.from_field(fld)
    b = quadratic_great_sphere_test(data, [0, 0, 1])
    assert b is not None
    cof = Polynomial.linear(b)
    assert lie_derivative(fld, P("x3")) == cof * P("x3")


def test_eigen_cofactor():
    fld = F("x2*x3", "-x1*x3", "0")
    data = QuadraticSphereData.from_field(fld)
    eig = quadratic_eigen_cofactor(data, [0, 0, 1])
    assert eig.lambdas == (0, 0, 0) and eig.cofactor.is_zero() and eig.sufficient_only
    assert quadratic_eigen_cofactor(data, [1, 0, 0]) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_eigen_cofactor_identity(seed, a):
    if not any(a):
        return
    fld = random_tangent_field(2, 2, seed=seed, homogeneous=True)
    data = QuadraticSphereData.from_field(fld)
    eig = quadratic_eigen_cofactor(data, a)
    if eig is not None:
        ell = Polynomial.linear(a)
        assert lie_derivative(fld, ell) == eig.cofactor * ell
        assert quadratic_great_sphere_test(data, a) is not None


# structure of invariant equators --------------------------------------------

def test_equator_degree_one():
    rep = equator_structure_check(F("-x2", "x1", "0"))
    assert rep.degree == 1 and rep.last_component.is_zero()


def _equator_field(alpha, c, C):
    """f_d = alpha and A_dj = c_j x_d + (C x')_j on S^2."""
    d = 3
    xs = [Polynomial.var(i, d) for i in range(d)]
    upper = {}
    for j in range(d - 1):
        Adj = xs[2].scale(c[j])
        for k in range(d - 1):
            if C[j][k]:
                Adj = Adj + xs[k].scale(C[j][k])
        upper[(j, d - 1)] = -Adj
    f = (Polynomial.zero(d), Polynomial.zero(d), Polynomial.constant(alpha, d))
    return assemble(CanonicalForm(f, SkewPolyMatrix.from_upper(d, upper)))


def test_equator_degree_two_recovers_alpha_and_couplings():
    fld = _equator_field(1, [2, -3], [[0, 5], [-5, 0]])
    rep = equator_structure_check(fld)
    assert rep.alpha == 1 and rep.coupling == (2, -3)


def test_equator_non_skew_block_fails_upstream():
    fld = _equator_field(1, [2, -3], [[1, 5], [5, 0]])
    with pytest.raises(NotInvariantEquator):
        equator_structure_check(fld)


def test_equator_degree_bound():
    with pytest.raises(HypothesisViolated):
        equator_structure_check(random_tangent_field(2, 3, seed=1))


# non-great invariant spheres of homogeneous fields of degree >= 3 -----------

def test_noneq_structure_constructed():
    c = P("x3^2 - 1/4*(x1^2 + x2^2 + x3^2)")
    fld = VectorField((-P("x3") * c, P("0"), P("x1") * c))
    rep = homogeneous_noneq_sphere_structure(fld, 2, "1/2")
    assert rep.K == P("x1")
    assert rep.B == (P("1"), P("0"), P("0"))


def test_noneq_structure_quadratic_not_invariant():
    with pytest.raises(NotInvariant):
        homogeneous_noneq_sphere_structure(F("-x1*x3", "0", "x1^2"), 2, "1/2")


def test_noneq_structure_rejects_zero_d0():
    with pytest.raises(HypothesisViolated):
        homogeneous_noneq_sphere_structure(F("-x1*x3", "0", "x1^2"), 2, 0)
