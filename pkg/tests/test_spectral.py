import random
from fractions import Fraction

import numpy as np
import pytest

from ncgkit import linalg
from ncgkit.scalars import QQi
from ncgkit.spectral import (
    FourierTorusTriple,
    SobolevVector,
    SpectralTriple,
    amplified_projection_exact,
    circle_dirac,
    finite_triple_exact,
    index_pairing,
    inner_fluctuation,
    kernel_index_exact,
    mckean_singer,
    morita_lift,
    smoothness_criterion_probe,
    sobolev_chain_slack,
    sobolev_norm,
    spectra_equal,
    spectral_dimension_probe,
    triple_from_json,
    triple_to_json,
)


def test_rejects_non_selfadjoint():
    with pytest.raises(ValueError):
        finite_triple_exact([[0, 1], [2, 0]])


def test_grading_contract_enforced():
    with pytest.raises(ValueError):
        finite_triple_exact([[1, 0], [0, -1]], grading_diag=[1, -1])


class TestSobolev:
    def test_single_eigenspace_formula(self):
        lam = 3.0
        mu = np.array([1.0 / (lam ** 2 + 1.0)])
        v = SobolevVector([2.0])
        for s in (0.0, 1.0, 2.0):
            want = (lam ** 2 + 1.0) ** (s / 2.0) * 2.0
            assert abs(sobolev_norm(mu, v, s, 2.0) - want) < 1e-12

    def test_plain_norm_at_s0_p2(self):
        mu = np.array([1.0, 0.5, 0.2])
        v = SobolevVector([1.0, 2.0, 2.0])
        assert abs(sobolev_norm(mu, v, 0.0, 2.0) - 3.0) < 1e-12

    def test_monotone_in_s(self):
        triple = circle_dirac(50)
        mu, _ = triple.resolvent_weights()
        rng = np.random.default_rng(0)
        v = SobolevVector(np.abs(rng.standard_normal(len(mu))) * mu)
        norms = [sobolev_norm(mu, v, s, 2.0) for s in (0.0, 0.5, 1.0)]
        assert norms[0] <= norms[1] <= norms[2]

    def test_embedding_chain(self):
        triple = circle_dirac(200)
        mu, _ = triple.resolvent_weights()
        rng = np.random.default_rng(1)
        for _ in range(200):
            v = SobolevVector(np.abs(rng.standard_normal(len(mu))) * mu ** 1.5)
            s = rng.uniform(0, 2)
            p = float(rng.choice([1.0, 2.0, 4.0]))
            s1, s2 = sobolev_chain_slack(mu, v, s, p, 1.0)
            assert s1 >= -1e-12 and s2 >= -1e-12

    def test_invalid_parameters(self):
        mu = np.array([1.0])
        v = SobolevVector([1.0])
        with pytest.raises(ValueError):
            sobolev_norm(mu, v, -1.0, 2.0)
        with pytest.raises(ValueError):
            sobolev_norm(mu, v, 1.0, 0.0)


class TestSummability:
    def test_finite_always_summable(self):
        t = finite_triple_exact([[0, 5], [5, 0]])
        assert spectral_dimension_probe(t, 0.01)["verdict"] == "summable"

    def test_circle_verdicts(self):
        c = circle_dirac(200)
        assert spectral_dimension_probe(c, 1.0)["verdict"] == "summable"
        assert spectral_dimension_probe(c, 0.4)["verdict"] == "divergent-trend"

    def test_partial_sums_reported(self):
        c = circle_dirac(100)
        out = spectral_dimension_probe(c, 1.0)
        sums = list(out["partial_sums"].values())
        assert sums == sorted(sums)


class TestMoritaLift:
    def test_identity_returns_same_triple(self):
        t = finite_triple_exact([[0, 1], [1, 0]], grading_diag=[1, -1])
        eye = linalg.mat_eye(2, QQi(0), QQi(1))
        assert morita_lift(t, eye, 1) is t

    def test_corner_example_index_one(self):
        t = finite_triple_exact([[0, 1], [1, 0]], grading_diag=[1, -1])
        p = linalg.mat_from_rows([[QQi(1), QQi(0)], [QQi(0), QQi(0)]])
        lift = morita_lift(t, p, 1)
        assert kernel_index_exact(lift) == 1
        assert index_pairing(t, p, 1) == 1

    def test_zero_projection_zero_index(self):
        t = finite_triple_exact([[0, 1], [1, 0]], grading_diag=[1, -1])
        p = linalg.mat_zero(2, 2, QQi(0))
        assert index_pairing(t, p, 1) == 0

    def test_rejects_non_projection(self):
        t = finite_triple_exact([[0, 1], [1, 0]])
        bad = linalg.mat_from_rows([[QQi(1), QQi(1)], [QQi(0), QQi(0)]])
        with pytest.raises(ValueError):
            morita_lift(t, bad, 1)

    def test_lift_selfadjoint_and_graded(self):
        t = finite_triple_exact([[0, 1], [1, 0]], grading_diag=[1, -1])
        p = linalg.mat_from_rows([
            [QQi(1), QQi(0), QQi(0), QQi(0)],
            [QQi(0), QQi(0), QQi(0), QQi(0)],
            [QQi(0), QQi(0), QQi(1), QQi(0)],
            [QQi(0), QQi(0), QQi(0), QQi(1)],
        ])
        lift = morita_lift(t, p, 2)
        assert linalg.mat_eq(lift.d, linalg.mat_conj_transpose(lift.d))
        anti = linalg.mat_add(
            linalg.mat_mul(lift.grading, lift.d),
            linalg.mat_mul(lift.d, lift.grading),
        )
        assert linalg.mat_is_zero(anti)

    def test_mckean_singer_matches_kernel_count(self):
        # numeric supertrace against the exact kernel index on the same data
        rng = random.Random(2)
        for _ in range(10):
            c = rng.randint(1, 3)
            t = finite_triple_exact([[0, c], [c, 0]], grading_diag=[1, -1])
            p = linalg.mat_from_rows([[QQi(1), QQi(0)], [QQi(0), QQi(0)]])
            lift = morita_lift(t, p, 1)
            exact = kernel_index_exact(lift)
            tn = SpectralTriple(
                np.array([[0, c], [c, 0]], dtype=complex),
                grading=np.diag([1.0, -1.0]).astype(complex),
            )
            pn = np.diag([1.0, 0.0]).astype(complex)
            liftn = morita_lift(tn, pn, 1)
            for t_heat in (0.5, 1.0, 2.0):
                assert abs(mckean_singer(liftn, t_heat) - exact) < 1e-10


class TestPairingFunctoriality:
    def test_report_shape_and_agreement(self):
        from ncgkit.spectral import pairing_functoriality_check

        t = finite_triple_exact([[0, 2], [2, 0]], grading_diag=[1, -1])
        p = linalg.mat_from_rows([
            [QQi(1), QQi(0), QQi(0), QQi(0)],
            [QQi(0), QQi(0), QQi(0), QQi(0)],
            [QQi(0), QQi(0), QQi(1), QQi(0)],
            [QQi(0), QQi(0), QQi(0), QQi(1)],
        ])
        q_small = linalg.mat_from_rows([[QQi(1), QQi(0)], [QQi(0), QQi(0)]])
        out = pairing_functoriality_check(t, p, 2, q_small, 2)
        assert out["commutes"]
        assert out["pushforward_pairing"] == out["lifted_pairing"]

    def test_full_module_projection_gives_lift_index(self):
        # q = 1 over the corner: both pairings reduce to the lift's index
        t = finite_triple_exact([[0, 1], [1, 0]], grading_diag=[1, -1])
        p = linalg.mat_from_rows([
            [QQi(1), QQi(0), QQi(0), QQi(0)],
            [QQi(0), QQi(0), QQi(0), QQi(0)],
            [QQi(0), QQi(0), QQi(1), QQi(0)],
            [QQi(0), QQi(0), QQi(0), QQi(1)],
        ])
        lifted = morita_lift(t, p, 2)
        want = kernel_index_exact(lifted)
        r = 2
        blocks = [[p if i == j else linalg.mat_zero(4, 4, QQi(0))
                   for j in range(r)] for i in range(r)]
        q_big = amplified_projection_exact(blocks)
        lhs = kernel_index_exact(morita_lift(t, q_big, 2 * r))
        rhs = kernel_index_exact(morita_lift(lifted, q_big, r))
        assert lhs == rhs == r * want

    def test_trivial_module_reduces_to_direct_pairing(self):
        t = finite_triple_exact([[0, 1], [1, 0]], grading_diag=[1, -1])
        eye = linalg.mat_eye(2, QQi(0), QQi(1))
        q = linalg.mat_from_rows([[QQi(1), QQi(0)], [QQi(0), QQi(0)]])
        direct = kernel_index_exact(morita_lift(t, q, 1))
        via_trivial = kernel_index_exact(morita_lift(morita_lift(t, eye, 1), q, 1))
        assert direct == via_trivial == 1


class TestInnerFluctuation:
    def test_witness_to_zero_but_not_back(self):
        t = finite_triple_exact(
            [[1, 0], [0, -1]],
            algebra={"e12": [[0, 1], [0, 0]], "e21": [[0, 0], [1, 0]]},
        )
        half = QQi(Fraction(1, 2))
        pairs = [
            (linalg.mat_scale(half, t.algebra["e12"]), t.algebra["e21"]),
            (linalg.mat_scale(half, t.algebra["e21"]), t.algebra["e12"]),
        ]
        fluct = inner_fluctuation(t, pairs)
        assert linalg.mat_is_zero(fluct.d)
        zero = finite_triple_exact([[0, 0], [0, 0]])
        assert linalg.mat_is_zero(inner_fluctuation(zero, pairs).d)
        assert not spectra_equal(t, zero)


class TestFourierTorus:
    def test_grading_contract(self):
        ft = FourierTorusTriple(6)
        rep = ft.grading_report()
        assert rep["ok"]

    def test_index_zero(self):
        ft = FourierTorusTriple(8)
        assert ft.index() == 0

    def test_supertrace_t_independent(self):
        ft = FourierTorusTriple(8)
        vals = [ft.mckean_singer(t) for t in (0.5, 1.0, 2.0)]
        assert max(abs(v - vals[0]) for v in vals) < 1e-10

    def test_commutator_norm_stable_across_truncations(self):
        norms = [FourierTorusTriple(n).commutator_norm_shift(0) for n in (4, 8, 12)]
        assert max(norms) - min(norms) < 1e-12

    def test_spectrum_symmetric(self):
        ft = FourierTorusTriple(4)
        vals = ft.dirac_eigenvalues()
        assert np.max(np.abs(vals + vals[::-1])) < 1e-10

    def test_commutator_is_right_clifford_action(self):
        # locks the fiber-action sign convention: [D, z_j] acts blockwise
        # as the right action of d(z_j) = i z_j e_j
        from ncgkit import clifford

        ft = FourierTorusTriple(4)
        n = ft.n_max
        cr = [clifford.to_numpy(clifford.right_matrix(2, i)) for i in (1, 2)]

        def blk(k1, k2):
            return ft.blocks[(k1 + n) * (2 * n + 1) + (k2 + n)]

        for k1 in range(-2, 3):
            for k2 in range(-2, 3):
                assert np.allclose(blk(k1 + 1, k2) - blk(k1, k2), 1j * cr[0])
                assert np.allclose(blk(k1, k2 + 1) - blk(k1, k2), 1j * cr[1])


class TestSmoothnessCriterion:
    def test_band_operator_passes(self):
        # the generating unitary is mode-local and preserves smooth vectors
        triple = circle_dirac(60)
        out = smoothness_criterion_probe(triple, triple.algebra["u"], s=1.0)
        assert out["holds"]

    def test_mode_exploding_operator_fails(self):
        # sending mode j to mode ~e^j is bounded on the truncation but
        # destroys smoothness; every polynomial excess exponent fails
        triple = circle_dirac(60)
        dim = 121
        t = np.zeros((dim, dim), dtype=complex)
        # basis here is modes -60..60; map low modes to the highest ones
        for j in range(8):
            src = 60 + j       # modes 0..7
            tgt = dim - 1 - j  # modes 60, 59, ...
            t[tgt, src] = 1.0
        out = smoothness_criterion_probe(triple, t, s=6.0, r_grid=(0.5, 1.0, 2.0))
        assert not out["holds"]


def test_triple_json_roundtrip():
    t = finite_triple_exact(
        [[0, 1], [1, 0]],
        algebra={"a": [[1, 0], [0, 0]]},
        grading_diag=[1, -1],
    )
    text = triple_to_json(t)
    back = triple_from_json(text)
    assert linalg.mat_eq(back.d, t.d)
    assert linalg.mat_eq(back.grading, t.grading)
    assert linalg.mat_eq(back.algebra["a"], t.algebra["a"])
    assert triple_to_json(back) == text


def test_amplified_projection_layout():
    blk = linalg.mat_from_rows([[QQi(1), QQi(0)], [QQi(0), QQi(0)]])
    zero = linalg.mat_zero(2, 2, QQi(0))
    big = amplified_projection_exact([[blk, zero], [zero, blk]])
    assert big[0][0] == QQi(1) and big[2][2] == QQi(1)
    assert big[1][1] == QQi(0) and big[3][3] == QQi(0)
