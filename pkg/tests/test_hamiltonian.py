import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from spherefields.errors import BadDegree, NotDegreeOneHomogeneous, OddDimension
from spherefields.hamiltonian import (
    constraint_matrix,
    cubic_kernel_s3,
    deg1_hamiltonian_test,
    hamiltonian_field,
    invariant_kernel,
    monomials_of_degree,
    obstruction_check,
    quadratic_form,
    rewire,
    unwire,
    verify_hamiltonian,
    CUBIC_BASIS_S3,
)
from spherefields import linalg
from spherefields.poly import Polynomial, parse_polynomial, sum_of_squares
from spherefields.vector_field import (
    CanonicalForm,
    SkewPolyMatrix,
    VectorField,
    assemble,
    canonical_decompose,
    is_tangent,
    lie_derivative,
)


def F(*comps):
    d = len(comps)
    return VectorField(tuple(parse_polynomial(c, d) for c in comps))


def P(text, d=4):
    return parse_polynomial(text, d)


def linear_field(A):
    d = len(A)
    xs = [Polynomial.var(j, d) for j in range(d)]
    comps = []
    for row in A:
        acc = Polynomial.zero(d)
        for a, x in zip(row, xs):
            if a:
                acc = acc + x.scale(mpq(a))
        comps.append(acc)
    return VectorField(tuple(comps))


# verify_hamiltonian ---------------------------------------------------------

def test_verify_blocks():
    fld = F("x2", "-x1", "x4", "-x3")
    assert verify_hamiltonian(fld, P("-1/2*(x1^2 + x2^2 + x3^2 + x4^2)"))
    assert not verify_hamiltonian(fld, P("x1*x2"))


def test_verify_zero_field_constant():
    assert verify_hamiltonian(F("0", "0", "0", "0"), P("7"))


def test_verify_odd_dimension():
    with pytest.raises(OddDimension):
        verify_hamiltonian(F("-x2", "x1", "0"), parse_polynomial("x1", 3))


def test_hamiltonian_field_of_constant_shift():
    H = P("x1^3*x4 - x2*x3")
    assert hamiltonian_field(H) == hamiltonian_field(H + 5)


# degree one -----------------------------------------------------------------

def test_deg1_blocks():
    rep = deg1_hamiltonian_test(F("x2", "-x1", "x4", "-x3"))
    assert rep.symmetric
    assert [list(r) for r in rep.B] == [[-1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert rep.H == P("-1/2*x1^2 - 1/2*x2^2 - 1/2*x3^2 - 1/2*x4^2")


def test_deg1_not_hamiltonian():
    rep = deg1_hamiltonian_test(F("x3", "0", "-x1", "0"))
    assert not rep.symmetric and rep.H is None
    assert rep.B[1][2] == -1 and rep.B[2][1] == 0


def test_deg1_zero():
    rep = deg1_hamiltonian_test(F("0", "0", "0", "0"))
    assert rep.symmetric and rep.H.is_zero()


def test_deg1_rejects():
    with pytest.raises(OddDimension):
        deg1_hamiltonian_test(F("-x2", "x1", "0"))
    with pytest.raises(NotDegreeOneHomogeneous):
        deg1_hamiltonian_test(F("x1", "0", "0", "0"))


def test_report_json():
    d = deg1_hamiltonian_test(F("x2", "-x1", "x4", "-x3")).to_dict()
    assert d["hamiltonian"] and d["B"][0][0] == "-1"


def test_rewire_inverse():
    rng = random.Random(3)
    A = [[mpq(rng.randint(-3, 3)) for _ in range(6)] for _ in range(6)]
    assert unwire(rewire(A)) == A
    assert rewire(unwire(A)) == A


def _symmetric(rng, d):
    B = [[mpq(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            B[i][j] = B[j][i] = mpq(rng.randint(-4, 4), rng.choice([1, 2, 3]))
    return B


def _hamiltonian_skew(B):
    # unwire a symmetric B, then keep only the skew part (which is again Hamiltonian)
    d = len(B)
    A = unwire(B)
    return [[(A[i][j] - A[j][i]) / 2 for j in range(d)] for i in range(d)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 4, 6]), st.integers(0, 10_000))
def test_round_trip_symmetric(d, seed):
    rng = random.Random(seed)
    B = _symmetric(rng, d)
    A = _hamiltonian_skew(B)
    fld = linear_field(A)
    rep = deg1_hamiltonian_test(fld)
    assert rep.symmetric
    # the skew projection keeps the commuting part of B; H is its quadratic form
    Bc = [list(r) for r in rewire(A)]
    assert rep.H == quadratic_form(Bc)
    assert verify_hamiltonian(fld, rep.H)
    if A == unwire(B):
        assert rep.H == quadratic_form(B)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([4, 6]), st.integers(0, 10_000))
def test_hamiltonian_is_first_integral(d, seed):
    rng = random.Random(seed)
    A = [[mpq(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            v = mpq(rng.randint(-2, 2))
            A[i][j], A[j][i] = v, -v
    if seed % 2:
        A = _hamiltonian_skew(_symmetric(rng, d))
    fld = linear_field(A)
    rep = deg1_hamiltonian_test(fld)
    if rep.symmetric:
        assert lie_derivative(fld, rep.H).is_zero()
        assert rep.H.is_homogeneous() and rep.H.coeff((0,) * d) == 0


# obstruction ----------------------------------------------------------------

def _cf(fs, upper=None, d=4):
    f = tuple(P(t, d) for t in fs)
    return CanonicalForm(f, SkewPolyMatrix.from_upper(d, upper or {}))


def test_obstruction_pure_power():
    rep = obstruction_check(_cf(["x1^2", "0", "0", "0"]), 2)
    assert rep.verdict == "NotHamiltonian"
    assert rep.witness == ((0, 0, 1),)


def test_obstruction_mixed_monomial():
    rep = obstruction_check(_cf(["x1*x2", "0", "0", "0"]), 2)
    assert rep.verdict == "Inconclusive"


def test_obstruction_high_degree_A():
    rep = obstruction_check(_cf(["0", "0", "0", "0"], {(0, 1): P("x3^3")}), 2)
    assert rep.verdict == "Inconclusive"


def test_obstruction_bad_degree():
    with pytest.raises(BadDegree):
        obstruction_check(_cf(["x1", "0", "0", "0"]), 1)
    with pytest.raises(BadDegree):
        obstruction_check(_cf(["x1^2", "0", "0", "0"]), 3)
    with pytest.raises(OddDimension):
        obstruction_check(_cf(["x1^2", "0", "0"], d=3), 2)


def test_obstruction_json():
    d = obstruction_check(_cf(["x1^2", "0", "x4^2", "0"]), 2).to_dict()
    assert d["verdict"] == "NotHamiltonian"
    assert d["witness"] == [{"i": 1, "k": 1, "a": "1"}, {"i": 3, "k": 4, "a": "1"}]


def _tangent_hamiltonians():
    # functions of the block radii generate tangent fields
    s = sum_of_squares(4)
    out = []
    for H in [s ** 2, s ** 2 + s, P("(x1^2 + x2^2)^2"), P("(x1^2 + x2^2)*(x3^2 + x4^2)"),
              P("(x1^2 + x2^2)^2 + (x3^2 + x4^2)^3")]:
        fld = hamiltonian_field(H)
        if is_tangent(fld):
            out.append((H, fld))
    return out


def test_obstruction_consistent_on_hamiltonians():
    cases = _tangent_hamiltonians()
    assert len(cases) >= 3
    for H, fld in cases:
        assert verify_hamiltonian(fld, H)
        m = fld.degree - 2
        if m + 2 <= 3:
            continue
        cf = canonical_decompose(fld)
        assert assemble(cf) == fld
        assert obstruction_check(cf, m).verdict != "NotHamiltonian"


# rotation-invariant kernels -------------------------------------------------

def test_cubic_kernel_trivial():
    res = cubic_kernel_s3()
    assert res.dimension == 0 and res.columns == 16
    assert res.to_dict()["kernelDimension"] == 0


def test_cubic_kernel_row_drop():
    rows, _ = constraint_matrix(CUBIC_BASIS_S3)
    r = linalg.rank(rows)
    dims = []
    for k in range(len(rows)):
        sub = rows[:k] + rows[k + 1:]
        dims.append(16 - linalg.rank(sub))
    assert r == 16
    assert max(dims) >= 1


def test_quadratic_kernel_nonzero():
    basis = monomials_of_degree(2)
    res = invariant_kernel(basis)
    assert res.dimension >= 1
    for H in res.polynomials(basis):
        assert is_tangent(hamiltonian_field(H))
    # |x|^2 lies in the kernel
    s = sum_of_squares(4)
    rows, _ = constraint_matrix(basis)
    vec = [s.coeff(mono) for mono in basis]
    assert all(sum(r * v for r, v in zip(row, vec)) == 0 for row in rows)


def test_monomials_of_degree():
    assert len(monomials_of_degree(3)) == 20
    assert monomials_of_degree(1, 2) == [(1, 0), (0, 1)]
