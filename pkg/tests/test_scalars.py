from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from ncgkit.scalars import AFFINE, PERIODIC, Chart, JetScalar, PolyScalar, QQi

rationals = st.fractions(
    min_value=Fraction(-20), max_value=Fraction(20), max_denominator=12
)
qqis = st.builds(QQi, rationals, rationals)


@given(qqis, qqis, qqis)
def test_qqi_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + QQi(0) == a
    assert a * QQi(1) == a


@given(qqis)
def test_qqi_inverse_and_conj(a):
    if not a.is_zero():
        assert a * a.inverse() == QQi(1)
    assert a.conj().conj() == a
    assert (a * a.conj()).is_real()
    assert a.abs2() == (a * a.conj()).re


@given(qqis)
def test_qqi_parse_roundtrip(a):
    assert QQi.parse(str(a)) == a


def test_qqi_parse_forms():
    assert QQi.parse("i") == QQi(0, 1)
    assert QQi.parse("-i") == QQi(0, -1)
    assert QQi.parse("3/2") == QQi(Fraction(3, 2))
    assert QQi.parse("1/2+3/4i") == QQi(Fraction(1, 2), Fraction(3, 4))
    assert QQi.parse("-1/2-3i") == QQi(Fraction(-1, 2), Fraction(-3))


def test_qqi_pow_and_complex():
    i = QQi(0, 1)
    assert i ** 2 == QQi(-1)
    assert i ** -1 == QQi(0, -1)
    assert complex(QQi(Fraction(1, 2), Fraction(-1, 4))) == 0.5 - 0.25j


class TestPolyScalar:
    chart = Chart((AFFINE, PERIODIC))

    def test_mixed_arithmetic(self):
        x = PolyScalar.coordinate(self.chart, 0)
        z = PolyScalar.coordinate(self.chart, 1)
        p = (x + z) * (x - z)
        assert p == x * x - z * z

    def test_affine_diff(self):
        x = PolyScalar.coordinate(self.chart, 0)
        p = x * x * x
        assert p.diff(0) == x * x * 3
        assert p.diff(1).is_zero()

    def test_periodic_diff_brings_ik(self):
        z = PolyScalar.coordinate(self.chart, 1, 2)
        assert z.diff(1) == z * QQi(0, 2)

    def test_conj_flips_periodic(self):
        z = PolyScalar.coordinate(self.chart, 1, 3)
        zbar = PolyScalar.coordinate(self.chart, 1, -3)
        assert z.conj() == zbar
        x = PolyScalar.coordinate(self.chart, 0)
        assert (x * QQi(0, 1)).conj() == x * QQi(0, -1)

    def test_sin_cos_identity(self):
        t = Chart.torus(1)
        c = PolyScalar.cos(t, 0)
        s = PolyScalar.sin(t, 0)
        assert c * c + s * s == PolyScalar.const(t, 1)

    def test_mean_value(self):
        t = Chart.torus(2)
        f = PolyScalar.cos(t, 0) * PolyScalar.cos(t, 0)
        assert f.mean_value() == QQi(Fraction(1, 2))

    def test_negative_affine_power_rejected(self):
        with pytest.raises(ValueError):
            PolyScalar(self.chart, {(-1, 0): QQi(1)})

    def test_eval_matches_numeric(self):
        t = Chart.torus(1)
        f = PolyScalar.cos(t, 0, 2) + PolyScalar.sin(t, 0) * QQi(0, 1)
        for theta in (0.3, 1.7):
            want = np.cos(2 * theta) + 1j * np.sin(theta)
            assert abs(f.eval_numeric([theta]) - want) < 1e-12


class TestJetScalar:
    def test_leibniz_product(self):
        chart = Chart.torus(1)
        x = np.linspace(0, 2 * np.pi, 17, endpoint=False)
        f = JetScalar(chart, np.sin(x), np.cos(x)[None, :])
        g = JetScalar(chart, np.cos(x), -np.sin(x)[None, :])
        prod = f * g
        # (sin cos)' = cos^2 - sin^2
        want = np.cos(x) ** 2 - np.sin(x) ** 2
        assert np.max(np.abs(prod.diff(0).values - want)) < 1e-12

    def test_second_derivative_unavailable(self):
        chart = Chart.torus(1)
        x = np.zeros(4)
        f = JetScalar(chart, x, x[None, :])
        with pytest.raises(ValueError):
            f.diff(0).diff(0)

    def test_const_and_conj(self):
        chart = Chart.torus(2)
        c = JetScalar.const(chart, 1 + 2j, 5)
        assert np.all(c.conj().values == 1 - 2j)
        assert c.diff(0).is_zero()
