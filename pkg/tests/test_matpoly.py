"""Polynomial type, Newton scalar basis and basis conversion."""

import numpy as np
import pytest

from newton2pep import (
    BasisMismatchError,
    COEFF_KEYS,
    MatrixPoly2,
    NewtonNodes,
    annulus_points,
    monomial_six,
    monomial_triple,
    newton_scalars,
    newton_six,
    newton_triple,
)

from helpers import random_monomial, random_newton, random_nodes, scalar_newton


class TestNewtonScalars:
    def test_vanish_at_their_nodes(self):
        nodes = NewtonNodes(1, 2, 0, 0)
        n0, n1, n2, m0, m1, m2 = newton_scalars(nodes, 1.0, 5.0)
        assert (n1, n2) == (0, 0)
        assert m1 == 5 and m2 == 25
        assert n0 == 1 and m0 == 1

    def test_monomial_reduction(self):
        n0, n1, n2, m0, m1, m2 = newton_scalars(NewtonNodes(), 3.0, 4.0)
        assert (n0, n1, n2, m0, m1, m2) == (1, 3, 9, 1, 4, 16)

    def test_product_values(self):
        nodes = NewtonNodes(1, 2, 0, 0)
        _, _, n2, _, _, m2 = newton_scalars(nodes, 3.0, 0.0)
        assert n2 == (3 - 1) * (3 - 2)
        assert m2 == 0

    def test_recurrence_exact_as_evaluated(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            nodes = random_nodes(rng)
            lam, mu = annulus_points(rng, 2)
            _, n1, n2, _, m1, m2 = newton_scalars(nodes, lam, mu)
            assert n2 == n1 * (lam - nodes.alpha2)
            assert m2 == m1 * (mu - nodes.beta2)

    def test_coincident_nodes_accepted(self):
        nodes = NewtonNodes(1.5, 1.5, -2j, -2j)
        _, n1, n2, _, _, _ = newton_scalars(nodes, 1.5, 0.0)
        assert n1 == 0 and n2 == 0

    def test_nonfinite_node_rejected(self):
        with pytest.raises(ValueError):
            NewtonNodes(np.nan, 0, 0, 0)


class TestBasisVectors:
    def test_zero_nodes_triple_matches_monomial(self):
        rng = np.random.default_rng(1)
        lam, mu = annulus_points(rng, 2)
        np.testing.assert_array_equal(newton_triple(NewtonNodes(), lam, mu),
                                      monomial_triple(lam, mu))

    def test_zero_nodes_six_matches_monomial(self):
        rng = np.random.default_rng(2)
        lam, mu = annulus_points(rng, 2)
        np.testing.assert_array_equal(newton_six(NewtonNodes(), lam, mu),
                                      monomial_six(lam, mu))


class TestEval:
    def test_all_ones_monomial(self):
        q = MatrixPoly2.monomial({k: [[1.0]] for k in COEFF_KEYS})
        assert q.eval(1.0, 1.0)[0, 0] == pytest.approx(6.0)

    def test_newton_zero_nodes_equals_monomial(self):
        rng = np.random.default_rng(3)
        q = random_monomial(rng, 2)
        qn = q.newton_partner(NewtonNodes())
        for lam, mu in zip(annulus_points(rng, 5), annulus_points(rng, 5)):
            np.testing.assert_array_equal(q.eval(lam, mu), qn.eval(lam, mu))

    def test_scalar_newton_value(self):
        qn = scalar_newton(1, 1, 1, 1, 1, 1, NewtonNodes(1, 2, 0, 0))
        # n1=1, n2=0, m1=1, m2=1 at (2, 1): 0 + 1 + 1 + 1 + 1 + 1
        assert qn.eval(2.0, 1.0)[0, 0] == pytest.approx(5.0)

    def test_requires_all_blocks(self):
        with pytest.raises(ValueError, match="missing"):
            MatrixPoly2.monomial({(2, 0): [[1.0]]})

    def test_rejects_ragged_blocks(self):
        coeffs = {k: [[1.0]] for k in COEFF_KEYS}
        coeffs[(0, 0)] = [[1.0, 2.0], [3.0, 4.0]]
        with pytest.raises(ValueError):
            MatrixPoly2.monomial(coeffs)


class TestToMonomial:
    def test_pure_n2_expansion(self):
        qn = scalar_newton(1, 0, 0, 0, 0, 0, NewtonNodes(1, 2, 7, -3))
        qm = qn.to_monomial()
        assert qm.coeff(2, 0)[0, 0] == pytest.approx(1.0)
        assert qm.coeff(1, 0)[0, 0] == pytest.approx(-3.0)
        assert qm.coeff(0, 0)[0, 0] == pytest.approx(2.0)
        assert qm.coeff(1, 1)[0, 0] == pytest.approx(0.0)

    def test_pure_cross_term_expansion(self):
        qn = scalar_newton(0, 1, 0, 0, 0, 0, NewtonNodes(1, 9, 2, 9))
        qm = qn.to_monomial()
        assert qm.coeff(1, 1)[0, 0] == pytest.approx(1.0)
        assert qm.coeff(1, 0)[0, 0] == pytest.approx(-2.0)
        assert qm.coeff(0, 1)[0, 0] == pytest.approx(-1.0)
        assert qm.coeff(0, 0)[0, 0] == pytest.approx(2.0)

    def test_zero_nodes_leaves_coefficients(self):
        rng = np.random.default_rng(4)
        qn = random_newton(rng, 2, NewtonNodes())
        qm = qn.to_monomial()
        for key in COEFF_KEYS:
            np.testing.assert_array_equal(qm.coeff(*key), qn.coeff(*key))

    def test_evaluation_preserved_at_random_points(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            qn = random_newton(rng, int(rng.integers(1, 4)))
            qm = qn.to_monomial()
            pts = annulus_points(rng, 200)
            for lam, mu in zip(pts[:100], pts[100:]):
                a = qn.eval(lam, mu)
                b = qm.eval(lam, mu)
                assert np.abs(a - b).max() <= 1e-12 * max(np.abs(a).max(), 1.0)

    def test_wrong_tag_rejected(self):
        rng = np.random.default_rng(6)
        with pytest.raises(BasisMismatchError):
            random_monomial(rng, 1).to_monomial()
