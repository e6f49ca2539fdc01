"""Kernel operations checked against independent oracles."""

import numpy as np
import pytest

from newton2pep import (
    NonSquareError,
    SingularPencilError,
    commutation_matrix,
    complex_normal,
    det,
    kron,
    small_dense_eigen,
    smallest_singular_value,
)
from newton2pep.linalg import as_matrix

from helpers import cofactor_det, kron_oracle


class TestAsMatrix:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="non-finite"):
            as_matrix([[1.0, np.nan], [0.0, 1.0]])
        with pytest.raises(ValueError, match="non-finite"):
            as_matrix([[np.inf + 0j, 0], [0, 1]])

    def test_shape_check(self):
        with pytest.raises(ValueError, match="shape"):
            as_matrix(np.eye(2), 3, 3)


class TestKron:
    def test_identity_factor_is_block_diagonal(self):
        b = complex_normal(np.random.default_rng(0), 2, 2)
        got = kron(np.eye(2), b)
        want = np.block([[b, np.zeros((2, 2))], [np.zeros((2, 2)), b]])
        np.testing.assert_allclose(got, want)

    def test_e1_factor_stacks(self):
        b = complex_normal(np.random.default_rng(1), 2, 3)
        e1 = np.array([[1.0], [0.0], [0.0]])
        got = kron(e1, b)
        np.testing.assert_allclose(got[:2], b)
        np.testing.assert_allclose(got[2:], 0)

    def test_mixed_product_property(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a, b, c, d = (complex_normal(rng, 2, 2) for _ in range(4))
            left = kron(a, b) @ kron(c, d)
            right = kron(a @ c, b @ d)
            np.testing.assert_allclose(left, right, atol=1e-12)

    def test_matches_index_oracle(self):
        rng = np.random.default_rng(3)
        a = complex_normal(rng, 3, 2)
        b = complex_normal(rng, 2, 4)
        np.testing.assert_allclose(kron(a, b), kron_oracle(a, b))


class TestDet:
    def test_identity(self):
        assert det(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert det(np.diag([2.0, 3.0])) == pytest.approx(6.0)

    def test_against_cofactor_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a = complex_normal(rng, 4, 4)
            want = cofactor_det(a)
            assert abs(det(a) - want) < 1e-12 * abs(want)

    def test_multiplicativity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = complex_normal(rng, 3, 3)
            b = complex_normal(rng, 3, 3)
            lhs = det(a @ b)
            rhs = det(a) * det(b)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-30)

    def test_rejects_nonsquare(self):
        with pytest.raises(NonSquareError):
            det(np.ones((2, 3)))


class TestSmallestSingularValue:
    def test_identity(self):
        assert smallest_singular_value(np.eye(3)) == pytest.approx(1.0)

    def test_zero_row(self):
        a = np.array([[1.0, 2.0], [0.0, 0.0]])
        assert smallest_singular_value(a) == pytest.approx(0.0, abs=1e-15)

    def test_against_gram_matrix_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = complex_normal(rng, 3, 3)
            gram_eigs = np.linalg.eigvalsh(a.conj().T @ a)
            want = np.sqrt(max(gram_eigs.min(), 0.0))
            assert abs(smallest_singular_value(a) - want) < 1e-10

    def test_rejects_nonsquare(self):
        with pytest.raises(NonSquareError):
            smallest_singular_value(np.ones((2, 3)))


class TestSmallDenseEigen:
    def test_diagonal_pair(self):
        pairs = small_dense_eigen(np.diag([1.0, 2.0]), np.eye(2))
        values = sorted(p.value.real for p in pairs)
        assert values == pytest.approx([1.0, 2.0])

    def test_infinite_eigenvalue(self):
        pairs = small_dense_eigen(np.eye(2), np.diag([1.0, 0.0]))
        finite = [p for p in pairs if not p.infinite]
        infinite = [p for p in pairs if p.infinite]
        assert len(finite) == 1 and len(infinite) == 1
        assert finite[0].value == pytest.approx(1.0)

    def test_residuals_random_pair(self):
        rng = np.random.default_rng(7)
        a = complex_normal(rng, 6, 6)
        b = complex_normal(rng, 6, 6)
        pairs = small_dense_eigen(a, b)
        assert len(pairs) == 6
        norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
        for p in pairs:
            if p.infinite:
                continue
            r = np.linalg.norm(a @ p.vector - p.value * (b @ p.vector))
            assert r < 1e-8 * (norm_a + abs(p.value) * norm_b) * np.linalg.norm(p.vector)

    def test_singular_pencil_reported(self):
        # Common nullspace: last row/column zero in both matrices.
        a = np.zeros((2, 2), dtype=complex)
        b = np.zeros((2, 2), dtype=complex)
        a[0, 0] = 1.0
        b[0, 0] = 2.0
        with pytest.raises(SingularPencilError):
            small_dense_eigen(a, b)


def test_commutation_matrix_swaps_kron_factors():
    rng = np.random.default_rng(8)
    for m, n in [(2, 3), (3, 3), (1, 4)]:
        x = complex_normal(rng, m, m)
        y = complex_normal(rng, n, n)
        p = commutation_matrix(m, n)
        np.testing.assert_array_equal(p @ p.T, np.eye(m * n))
        np.testing.assert_allclose(p @ kron(x, y) @ p.T, kron(y, x), atol=1e-14)
