import random
from fractions import Fraction
from math import pi

import numpy as np
import pytest

from ncgkit.cyclic import Chain
from ncgkit.forms import MatrixForm
from ncgkit.geom import (
    Geometry,
    QuadratureError,
    a_hat_from_curvature,
    bott_projection,
    chern_number,
    character_pairing,
    cocycle_cyclicity_residual,
    constant_projection,
    index_refinement,
    kron_identity_right,
    local_index,
    pairing_index,
    relative_chern,
    twisting_curvature,
)
from ncgkit.randgen import random_poly
from ncgkit.scalars import Chart, JetScalar, PolyScalar, QQi


class TestQuadrature:
    def test_sphere_volume(self):
        g = Geometry.sphere2(12, 24)
        assert abs(g.volume() - 4 * pi) < 1e-10

    def test_torus_volume(self):
        g = Geometry.torus2(16)
        assert abs(g.volume() - (2 * pi) ** 2) < 1e-10

    def test_sphere_low_moments(self):
        # integral of cos^2(theta) over the sphere = 4 pi / 3
        g = Geometry.sphere2(12, 24)
        f = JetScalar(g.chart, np.cos(g.theta) ** 2, None)
        form = MatrixForm(g.chart, 1, {(): ((f,),)}, "jet", g.n_nodes)
        assert abs(g.integrate_form(form, 0) - 4 * pi / 3) < 1e-10

    def test_nodes_avoid_poles(self):
        g = Geometry.sphere2(8, 16)
        assert np.min(np.sin(g.theta)) > 1e-3

    def test_exact_torus_integral(self):
        g = Geometry.torus2(8)
        chart = Chart.torus(2)
        f = PolyScalar.cos(chart, 0) * PolyScalar.cos(chart, 0)
        form = MatrixForm.from_scalar(f, 1, (0, 1))
        mean = g.integrate_exact_torus(form, 2)
        assert mean == QQi(Fraction(1, 2))


class TestAHat:
    def test_zero_curvature(self):
        from ncgkit.geom import formal_chart

        chart = formal_chart(4)
        r = MatrixForm.zero(chart, 2)
        out = a_hat_from_curvature(r)
        assert (out - MatrixForm.identity(chart, 1)).is_zero()

    def test_surface_is_one(self):
        # no nonzero degree-4 component exists on a 2-chart
        chart = Chart.affine(2)
        x = PolyScalar.const(chart, 1)
        entry = MatrixForm.from_scalar(x, 1, (0, 1))
        r = MatrixForm.from_blocks([
            [MatrixForm.zero(chart, 1), entry],
            [-entry, MatrixForm.zero(chart, 1)],
        ])
        out = a_hat_from_curvature(r)
        assert (out - MatrixForm.identity(chart, 1)).is_zero()

    def _block(self, chart, two_form):
        zero = MatrixForm.zero(chart, 1)
        return MatrixForm.from_blocks([[zero, two_form], [-two_form, zero]])

    def test_degree_four_coefficient_is_first_pontryagin_over_24(self):
        # oracle: A-hat(x) = 1 - x^2/24 + 7 x^4/5760 on formal roots
        chart = Chart.affine(4)
        x = (MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (0, 1))
             + MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (2, 3)))
        out = a_hat_from_curvature(self._block(chart, x))
        # p1 = x^2 (one Chern root), degree-4 coefficient must be -x^2/24
        want = MatrixForm.identity(chart, 1) - (x * x).scale(Fraction(1, 24))
        assert (out - want).is_zero()

    def test_eigenvalue_series_oracle_degree_eight(self):
        chart = Chart.affine(8)
        x = (MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (0, 1))
             + MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (2, 3)))
        out = a_hat_from_curvature(self._block(chart, x))
        want = (MatrixForm.identity(chart, 1)
                - (x * x).scale(Fraction(1, 24))
                + (x * x * x * x).scale(Fraction(7, 5760)))
        assert (out - want).is_zero()

    def test_multiplicative_under_block_sum(self):
        chart = Chart.affine(8)
        x = (MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (0, 1))
             + MatrixForm.from_scalar(PolyScalar.const(chart, 2), 1, (2, 3)))
        y = (MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (4, 5))
             + MatrixForm.from_scalar(PolyScalar.const(chart, -1), 1, (6, 7)))
        bx, by = self._block(chart, x), self._block(chart, y)
        zero2 = MatrixForm.zero(chart, 2)
        direct_sum = MatrixForm.from_blocks([
            [bx.block(0, 0, 1), bx.block(0, 1, 1), MatrixForm.zero(chart, 1), MatrixForm.zero(chart, 1)],
            [bx.block(1, 0, 1), bx.block(1, 1, 1), MatrixForm.zero(chart, 1), MatrixForm.zero(chart, 1)],
            [MatrixForm.zero(chart, 1), MatrixForm.zero(chart, 1), by.block(0, 0, 1), by.block(0, 1, 1)],
            [MatrixForm.zero(chart, 1), MatrixForm.zero(chart, 1), by.block(1, 0, 1), by.block(1, 1, 1)],
        ])
        lhs = a_hat_from_curvature(direct_sum)
        rhs = a_hat_from_curvature(bx) * a_hat_from_curvature(by)
        assert (lhs - rhs).is_zero()

    def test_rejects_non_antisymmetric(self):
        chart = Chart.affine(4)
        x = MatrixForm.from_scalar(PolyScalar.const(chart, 1), 1, (0, 1))
        bad = MatrixForm.from_blocks([
            [MatrixForm.zero(chart, 1), x],
            [x, MatrixForm.zero(chart, 1)],
        ])
        with pytest.raises(ValueError, match="antisymmetric"):
            a_hat_from_curvature(bad)


class TestProjections:
    def test_bott_is_projection_at_nodes(self):
        g = Geometry.sphere2(10, 20)
        p = bott_projection(g)
        assert (p * p - p).max_abs() < 1e-13
        assert (p - p.conj_transpose()).max_abs() < 1e-13

    def test_dilated_bott_is_projection(self):
        g = Geometry.sphere2(10, 20)
        p = bott_projection(g, dilation=0.5)
        assert (p * p - p).max_abs() < 1e-13

    def test_constant_projection_chern_zero(self):
        g = Geometry.sphere2(10, 20)
        p = constant_projection(g, 1, 2)
        assert chern_number(g, p)["integer"] == 0


class TestChernNumber:
    def test_bott_is_minus_one(self):
        g = Geometry.sphere2(12, 24)
        out = chern_number(g, bott_projection(g))
        assert out["integer"] == -1
        assert out["residual"] < 1e-8

    def test_conjugate_flips_sign(self):
        g = Geometry.sphere2(12, 24)
        p = bott_projection(g)
        out = chern_number(g, p.conj_transpose().map_entries_conj()
                           if hasattr(p, "map_entries_conj") else _conj_form(p))
        assert out["integer"] == 1

    def test_residual_guard(self):
        g = Geometry.sphere2(12, 24)
        # a non-projection input leaves a large non-integer residue
        with pytest.raises(QuadratureError, match="grid too coarse"):
            bad = bott_projection(g).scale(0.7)
            chern_number(g, bad, residual_tol=1e-9)

    def test_dilation_preserves_class(self):
        g = Geometry.sphere2(12, 24)
        for dil in (0.3, 0.6):
            out = chern_number(g, bott_projection(g, dil))
            assert out["integer"] == -1


def _conj_form(p: MatrixForm) -> MatrixForm:
    out = {}
    for idx, mat in p.comps.items():
        out[idx] = tuple(tuple(x.conj() for x in row) for row in mat)
    return MatrixForm(p.chart, p.m, out, p.backend, p.nodes)


class TestTwistingCurvature:
    def test_trivial_on_flat_torus(self):
        g = Geometry.torus2(8)
        p = constant_projection(g, 1, 1)
        t_form, _ = twisting_curvature(g, p)
        assert t_form.max_abs() < 1e-14

    def test_trivial_projection_on_sphere_gives_curvature_term(self):
        g = Geometry.sphere2(8, 16)
        p = constant_projection(g, 1, 1)
        t_form, p4 = twisting_curvature(g, p)
        want = -g.clifford_curvature_form(1)
        assert (t_form - want).max_abs() < 1e-13
        # fiber trace of the pure curvature term has no 2-form part
        traced = t_form.trace()
        assert traced.max_abs() < 1e-13

    def test_relative_chern_degree_zero_is_rank(self):
        g = Geometry.torus2(8)
        p = constant_projection(g, 1, 1)
        t_form, p4 = twisting_curvature(g, p)
        ch = relative_chern(g, t_form, p4)
        mat = ch.comps[()]
        assert np.max(np.abs(mat[0][0].values - 1.0)) < 1e-13

    def test_relative_chern_additive_in_blocks(self):
        g = Geometry.sphere2(8, 16)
        p1 = bott_projection(g)
        p2 = constant_projection(g, 1, 2)
        both = MatrixForm.from_blocks([
            [p1, MatrixForm.zero(g.chart, 2, "jet", g.n_nodes)],
            [MatrixForm.zero(g.chart, 2, "jet", g.n_nodes), p2],
        ])
        t1, q1 = twisting_curvature(g, p1)
        t2, q2 = twisting_curvature(g, p2)
        tb, qb = twisting_curvature(g, both)
        lhs = relative_chern(g, tb, qb)
        rhs = relative_chern(g, t1, q1) + relative_chern(g, t2, q2)
        assert (lhs - rhs).max_abs() < 1e-12


class TestLocalIndex:
    def test_zero_projection(self):
        g = Geometry.sphere2(8, 16)
        out = local_index(g, MatrixForm.zero(g.chart, 2, "jet", g.n_nodes))
        assert out["integer"] == 0 and out["residual"] == 0.0

    def test_trivial_class_on_sphere(self):
        g = Geometry.sphere2(12, 24)
        out = local_index(g, constant_projection(g, 1, 1))
        assert out["integer"] == 0
        assert out["residual"] < 1e-10

    def test_bott_gives_twice_chern(self):
        g = Geometry.sphere2(12, 24)
        cn = chern_number(g, bott_projection(g))["integer"]
        li = local_index(g, bott_projection(g))
        assert li["integer"] == 2 * cn == -2
        assert li["integer"] % 2 == 0

    def test_torus_trivial(self):
        g = Geometry.torus2(8)
        out = local_index(g, constant_projection(g, 1, 2))
        assert out["integer"] == 0

    def test_refinement_trend_dilated(self):
        trend = index_refinement(
            lambda g: bott_projection(g, 0.5), [(4, 8), (6, 12), (9, 18)]
        )
        residuals = [t["residual"] for t in trend]
        assert residuals[0] > residuals[1] > residuals[2]
        assert all(t["integer"] == -2 for t in trend)


class TestCocyclePairing:
    def test_pairing_matches_local_index(self):
        g = Geometry.sphere2(16, 32)
        p = bott_projection(g)
        li = local_index(g, p)["raw"]
        paired = pairing_index(g, p)
        assert abs(paired - li) < 1e-8

    def test_padding_degrees_is_stable(self):
        g = Geometry.sphere2(12, 24)
        p = bott_projection(g)
        assert pairing_index(g, p) == pairing_index(g, p, max_degree=10)

    def test_constant_entries_pair_to_zero(self):
        g = Geometry.torus2(12)
        conn = g.clifford_connection(1)
        const = kron_identity_right(constant_projection(g, 1, 1), 4)
        a = MatrixForm.const_matrix(g.chart, [[QQi(2)]], "jet", g.n_nodes)
        a4 = kron_identity_right(a, 4)
        chain = Chain(2, [(QQi(1), (a4, const * 2, a4))])
        assert abs(character_pairing(g, chain, conn)) < 1e-12

    def test_cyclic_invariance_on_random_chains(self):
        rng = random.Random(5)
        g = Geometry.torus2(16)
        conn = g.clifford_connection(1)
        chart = Chart.torus(2)
        worst = 0.0
        for _ in range(5):
            entries = []
            for _ in range(3):
                f = random_poly(chart, rng, deg=1, terms=2)
                vals = np.zeros(g.n_nodes, dtype=complex)
                grads = np.zeros((2, g.n_nodes), dtype=complex)
                for mono, c in f.coeffs.items():
                    wave = complex(c) * np.exp(
                        1j * (mono[0] * g.theta + mono[1] * g.phi)
                    )
                    vals += wave
                    grads[0] += 1j * mono[0] * wave
                    grads[1] += 1j * mono[1] * wave
                jet = JetScalar(g.chart, vals, grads)
                entries.append(kron_identity_right(
                    MatrixForm(g.chart, 1, {(): ((jet,),)}, "jet", g.n_nodes), 4
                ))
            chain = Chain(2, [(QQi(1), tuple(entries))])
            worst = max(worst, cocycle_cyclicity_residual(g, chain, conn))
        assert worst < 1e-10

    def test_odd_degree_rejected(self):
        g = Geometry.torus2(8)
        a = kron_identity_right(constant_projection(g, 1, 1), 4)
        with pytest.raises(ValueError):
            character_pairing(g, Chain(1, [(QQi(1), (a, a * 2))]))
