import random
from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from ncgkit.forms import (
    Connection,
    MatrixForm,
    ShapeMismatch,
    curvature_and_lift,
    dd_representative,
    exp_beta_intertwiner,
    exp_form,
    exterior_d,
    matrixform_from_text,
    matrixform_to_text,
    twisted_d,
    wedge,
)
from ncgkit.randgen import (
    random_algebra_element,
    random_connection,
    random_matrix_form,
)
from ncgkit.scalars import Chart, PolyScalar, QQi

AFF3 = Chart.affine(3)


def dx(chart, j, coeff=None):
    c = coeff if coeff is not None else PolyScalar.const(chart, 1)
    return MatrixForm.from_scalar(c, 1, (j,))


def test_wedge_antisymmetry_of_coordinates():
    a = dx(AFF3, 0)
    assert (a * a).is_zero()


def test_wedge_sign_rule_constant_matrices():
    rng = random.Random(0)
    a_mat = MatrixForm.const_matrix(AFF3, [[QQi(1), QQi(2)], [QQi(0), QQi(1)]])
    b_mat = MatrixForm.const_matrix(AFF3, [[QQi(0), QQi(1)], [QQi(3), QQi(-1)]])
    a_form = a_mat * MatrixForm.from_scalar(PolyScalar.const(AFF3, 1), 2, (0,))
    b_form = b_mat * MatrixForm.from_scalar(PolyScalar.const(AFF3, 1), 2, (1,))
    lhs = a_form * b_form + b_form * a_form
    want = (a_mat * b_mat - b_mat * a_mat) * MatrixForm.from_scalar(
        PolyScalar.const(AFF3, 1), 2, (0,)
    ) * MatrixForm.from_scalar(PolyScalar.const(AFF3, 1), 2, (1,))
    assert lhs == want


def test_degree_zero_product_is_matrix_product():
    rng = random.Random(1)
    a = random_algebra_element(AFF3, 2, rng)
    b = random_algebra_element(AFF3, 2, rng)
    prod = a * b
    assert prod.degrees() == [0]


def test_wedge_shape_mismatch():
    a = MatrixForm.identity(AFF3, 2)
    b = MatrixForm.identity(AFF3, 3)
    with pytest.raises(ShapeMismatch):
        wedge(a, b)


def test_trace_graded_symmetry():
    rng = random.Random(2)
    for da, db in ((1, 1), (1, 2), (2, 2)):
        a = random_matrix_form(AFF3, 2, rng, da)
        b = random_matrix_form(AFF3, 2, rng, db)
        sign = (-1) ** (da * db)
        assert ((a * b).trace() - (b * a).trace().scale(sign)).is_zero()


def test_exterior_d_coordinate_example():
    x0 = PolyScalar.coordinate(AFF3, 0)
    f = MatrixForm.from_scalar(x0, 1, (1,))  # x_0 dx_1
    df = exterior_d(f)
    assert list(df.comps) == [(0, 1)]
    assert df.comps[(0, 1)][0][0] == PolyScalar.const(AFF3, 1)


def test_exterior_d_product_rule_function():
    x0 = PolyScalar.coordinate(AFF3, 0)
    x1 = PolyScalar.coordinate(AFF3, 1)
    f = MatrixForm.from_scalar(x0 * x1, 1)
    df = exterior_d(f)
    assert df.comps[(0,)][0][0] == x1
    assert df.comps[(1,)][0][0] == x0


def test_d_squared_zero_random():
    rng = random.Random(3)
    for deg in (0, 1, 2):
        a = random_matrix_form(AFF3, 2, rng, deg, poly_deg=2)
        assert exterior_d(exterior_d(a)).is_zero()


def test_d_graded_leibniz():
    rng = random.Random(4)
    for da, db in ((0, 0), (0, 1), (1, 1), (1, 2)):
        a = random_matrix_form(AFF3, 2, rng, da)
        b = random_matrix_form(AFF3, 2, rng, db)
        lhs = exterior_d(a * b)
        rhs = exterior_d(a) * b + (a * exterior_d(b)).scale((-1) ** da)
        assert (lhs - rhs).is_zero()


class TestConnection:
    def test_flat_reduces_to_d(self):
        rng = random.Random(5)
        conn = Connection.flat(AFF3, 2)
        a = random_matrix_form(AFF3, 2, rng, 1)
        assert (conn.nabla(a) - exterior_d(a)).is_zero()

    def test_degree_zero_commutator_formula(self):
        rng = random.Random(6)
        conn = random_connection(AFF3, 2, rng)
        a = random_algebra_element(AFF3, 2, rng)
        want = exterior_d(a) + conn.theta * a - a * conn.theta
        assert (conn.nabla(a) - want).is_zero()

    def test_square_is_lift_action_100(self):
        rng = random.Random(7)
        for _ in range(100):
            m = rng.randint(1, 3)
            conn = random_connection(AFF3, m, rng)
            a = random_algebra_element(AFF3, m, rng)
            lhs = conn.nabla(conn.nabla(a))
            rhs = conn.sigma * a - a * conn.sigma
            assert (lhs - rhs).is_zero()

    def test_curvature_zero_gauge(self):
        conn = curvature_and_lift(MatrixForm.zero(AFF3, 2))
        assert conn.omega.is_zero() and conn.sigma.is_zero()

    def test_rank_one_is_fully_scalar(self):
        x0 = PolyScalar.coordinate(AFF3, 0)
        theta = MatrixForm.from_scalar(x0, 1, (1,))  # x_0 dx_1
        conn = curvature_and_lift(theta)
        # omega = dx_0 ^ dx_1, traceless lift vanishes at rank one
        assert conn.omega.comps[(0, 1)][0][0] == PolyScalar.const(AFF3, 1)
        assert conn.sigma.is_zero()

    def test_constant_matrices_curvature_is_commutator(self):
        a = [[QQi(0), QQi(1)], [QQi(0), QQi(0)]]
        b = [[QQi(0), QQi(0)], [QQi(1), QQi(0)]]
        fa = MatrixForm.const_matrix(AFF3, a) * dx(AFF3, 0)
        fb = MatrixForm.const_matrix(AFF3, b) * dx(AFF3, 1)
        conn = curvature_and_lift(fa + fb)
        comm = MatrixForm.const_matrix(AFF3, a) * MatrixForm.const_matrix(AFF3, b) \
            - MatrixForm.const_matrix(AFF3, b) * MatrixForm.const_matrix(AFF3, a)
        want = comm * dx(AFF3, 0) * dx(AFF3, 1)
        assert (conn.omega - want).is_zero()

    def test_traceless_and_bianchi(self):
        rng = random.Random(8)
        for _ in range(25):
            conn = random_connection(AFF3, 3, rng)
            assert conn.sigma.trace().is_zero()
            assert conn.nabla(conn.sigma).is_zero()
            assert conn.nabla(conn.omega).is_zero()


class TestLiftRepresentative:
    def test_single_chart_vanishes(self):
        rng = random.Random(9)
        conn = random_connection(AFF3, 2, rng)
        assert dd_representative(conn).is_zero()

    def test_declared_discrepancy_two_chart_toy(self):
        rng = random.Random(10)
        # two charts with their own gauges and declared 2-form discrepancies
        for _ in range(5):
            conn = random_connection(AFF3, 2, rng)
            beta = random_matrix_form(AFF3, 1, rng, 2)
            rep = dd_representative(conn, beta)
            assert (rep - exterior_d(beta)).is_zero()
            assert exterior_d(rep).is_zero()


class TestTwistedComplex:
    def test_zero_twist_is_d(self):
        rng = random.Random(11)
        w = random_matrix_form(AFF3, 2, rng, 1)
        c = MatrixForm.zero(AFF3, 1)
        assert (twisted_d(c, w) - exterior_d(w)).is_zero()

    def test_twist_of_unit(self):
        rng = random.Random(12)
        alpha = random_matrix_form(AFF3, 1, rng, 2)
        c = exterior_d(alpha)
        one = MatrixForm.identity(AFF3, 1)
        assert (twisted_d(c, one) - c).is_zero()

    def test_square_zero(self):
        rng = random.Random(13)
        chart = Chart.affine(4)
        for _ in range(20):
            alpha = random_matrix_form(chart, 1, rng, 2)
            c = exterior_d(alpha)
            w = random_matrix_form(chart, 1, rng, rng.randint(0, 1))
            assert twisted_d(c, twisted_d(c, w)).is_zero()

    def test_rejects_nonclosed_twist(self):
        x0 = PolyScalar.coordinate(AFF3, 0)
        c = MatrixForm.from_scalar(x0 * x0, 1, (0, 1, 2))
        # d of this 3-form is zero on a 3-chart; force a genuine violation
        chart4 = Chart.affine(4)
        bad = MatrixForm.from_scalar(
            PolyScalar.coordinate(chart4, 3), 1, (0, 1, 2)
        )
        with pytest.raises(ValueError):
            twisted_d(bad, MatrixForm.identity(chart4, 1))

    def test_rejects_wrong_degree(self):
        w = MatrixForm.identity(AFF3, 1)
        c2 = MatrixForm.from_scalar(PolyScalar.const(AFF3, 1), 1, (0, 1))
        with pytest.raises(ValueError):
            twisted_d(c2, w)


class TestExpShift:
    def test_zero_shift_identity(self):
        rng = random.Random(14)
        w = random_matrix_form(AFF3, 2, rng, 1)
        beta = MatrixForm.zero(AFF3, 1)
        assert (exp_beta_intertwiner(beta, w) - w).is_zero()

    def test_truncation_by_degree(self):
        rng = random.Random(15)
        beta = random_matrix_form(AFF3, 1, rng, 2)
        # on a 3-chart beta^beta has degree 4 and dies
        e = exp_form(beta)
        assert (e - MatrixForm.identity(AFF3, 1) - beta).is_zero()

    def test_intertwining_identity(self):
        rng = random.Random(16)
        chart = Chart.affine(4)
        for _ in range(20):
            alpha = random_matrix_form(chart, 1, rng, 2)
            c1 = exterior_d(alpha)
            beta = random_matrix_form(chart, 1, rng, 2)
            c2 = c1 - exterior_d(beta)
            w = random_matrix_form(chart, 1, rng, rng.randint(0, 1))
            lhs = twisted_d(c2, exp_beta_intertwiner(beta, w))
            rhs = exp_beta_intertwiner(beta, twisted_d(c1, w))
            assert (lhs - rhs).is_zero()


def test_serialization_roundtrip():
    rng = random.Random(17)
    chart = Chart((Chart.affine(1).kinds[0], Chart.torus(1).kinds[0]))
    a = random_matrix_form(chart, 2, rng, 1, poly_deg=2) + random_matrix_form(
        chart, 2, rng, 0
    )
    text = matrixform_to_text(a)
    back = matrixform_from_text(text)
    assert back == a
    assert matrixform_to_text(back) == text


def test_serialization_golden():
    chart = Chart.affine(2)
    x = PolyScalar.coordinate(chart, 0)
    a = MatrixForm.from_scalar(x * QQi(Fraction(1, 2), Fraction(3, 4)), 1, (1,))
    want = (
        "matrixform v1\n"
        "chart a,a\n"
        "m 1\n"
        "comp 1\n"
        "e 0 0 : (1,0)=1/2+3/4i\n"
    )
    assert matrixform_to_text(a) == want


def test_serialization_golden_file():
    import pathlib

    golden = pathlib.Path(__file__).parent / "golden" / "matrixform_example.txt"
    text = golden.read_text()
    form = matrixform_from_text(text)
    assert matrixform_to_text(form) == text
    # spot values frozen in the golden file
    chart = form.chart
    assert form.m == 2
    assert form.comps[()][0][0] == PolyScalar.const(chart, 1)
    assert form.comps[(0,)][1][1].coeffs[(0, 0)] == QQi(Fraction(-2, 3))


@given(st.integers(0, 10 ** 6), st.integers(0, 2), st.integers(0, 1))
def test_wedge_associative(seed, da, db):
    rng = random.Random(seed)
    a = random_matrix_form(AFF3, 2, rng, da, terms=1)
    b = random_matrix_form(AFF3, 2, rng, db, terms=1)
    c = random_matrix_form(AFF3, 2, rng, 1, terms=1)
    assert ((a * b) * c - a * (b * c)).is_zero()


@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(0, 2))
def test_d_squared_under_random_data(seed, m, deg):
    rng = random.Random(seed)
    a = random_matrix_form(AFF3, m, rng, deg, poly_deg=2)
    assert exterior_d(exterior_d(a)).is_zero()


def test_amplify_and_blocks():
    rng = random.Random(18)
    a = random_matrix_form(AFF3, 2, rng, 1)
    big = a.amplify(3)
    assert big.m == 6
    for i in range(3):
        assert big.block(i, i, 2) == a
    for i in range(3):
        for j in range(3):
            if i != j:
                assert big.block(i, j, 2).is_zero()
