"""Deterministic eigendecomposition, subspace distance, gap reporting."""

import numpy as np
import pytest

from ridgerec.core import Subspace
from ridgerec.spectral import (
    decompose,
    gap_profile,
    orthonormal_basis,
    subspace_distance,
)


class TestDecompose:
    def test_identity(self):
        spec = decompose(np.eye(3))
        np.testing.assert_array_equal(spec.eigenvalues, [1.0, 1.0, 1.0])

    def test_diagonal_reorders_descending(self):
        spec = decompose(np.array([[2.0, 0.0], [0.0, 4.5]]))
        np.testing.assert_allclose(spec.eigenvalues, [4.5, 2.0])
        np.testing.assert_allclose(spec.eigenvectors[:, 0], [0.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(spec.eigenvectors[:, 1], [1.0, 0.0], atol=1e-14)

    def test_reconstruction(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            A = rng.standard_normal((5, 5))
            M = A + A.T
            spec = decompose(M)
            R = spec.eigenvectors @ np.diag(spec.eigenvalues) @ spec.eigenvectors.T
            assert np.max(np.abs(M - R)) <= 1e-8 * max(1.0, np.max(np.abs(M)))

    def test_sign_convention(self):
        """Largest-magnitude component of every eigenvector is positive."""
        rng = np.random.default_rng(18)
        for _ in range(10):
            A = rng.standard_normal((6, 6))
            spec = decompose(A + A.T)
            for k in range(6):
                v = spec.eigenvectors[:, k]
                assert v[np.argmax(np.abs(v))] > 0

    def test_near_symmetric_input_symmetrized(self):
        M = np.array([[1.0, 0.5 + 1e-13], [0.5, 2.0]])
        spec = decompose(M)
        assert spec.eigenvalues[0] > spec.eigenvalues[1]

    def test_asymmetric_input_rejected(self):
        with pytest.raises(ValueError):
            decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            decompose(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestOrthonormalBasis:
    def test_spans_preserved(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            m = int(rng.integers(2, 8))
            n = int(rng.integers(1, m + 1))
            cols = rng.standard_normal((m, n))
            q = orthonormal_basis(cols)
            np.testing.assert_allclose(q.T @ q, np.eye(n), atol=1e-12)
            # original columns lie in span(q)
            proj = q @ (q.T @ cols)
            np.testing.assert_allclose(proj, cols, atol=1e-10)

    def test_rank_deficient_rejected(self):
        cols = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            orthonormal_basis(cols)


class TestSubspaceDistance:
    def test_identical_spans(self):
        q = orthonormal_basis(np.random.default_rng(1).standard_normal((5, 2)))
        assert subspace_distance(q, q) == 0.0

    def test_orthogonal_lines(self):
        e1 = np.array([[1.0], [0.0]])
        e2 = np.array([[0.0], [1.0]])
        assert subspace_distance(e1, e2) == pytest.approx(1.0)

    def test_forty_five_degrees(self):
        e1 = np.array([[1.0], [0.0]])
        diag = np.array([[1.0], [1.0]]) / np.sqrt(2.0)
        assert subspace_distance(e1, diag) == pytest.approx(np.sqrt(2.0) / 2.0)

    def test_accepts_subspace_objects(self):
        a = Subspace(basis=np.array([[1.0], [0.0]]))
        b = Subspace(basis=np.array([[0.0], [1.0]]))
        assert subspace_distance(a, b) == pytest.approx(1.0)

    def test_basis_rotation_invariance(self):
        """Distance depends only on the span, not the chosen basis."""
        rng = np.random.default_rng(27)
        for _ in range(10):
            a = orthonormal_basis(rng.standard_normal((6, 3)))
            b = orthonormal_basis(rng.standard_normal((6, 3)))
            qq = orthonormal_basis(rng.standard_normal((3, 3)))
            d0 = subspace_distance(a, b)
            d1 = subspace_distance(a @ qq, b)
            assert abs(d0 - d1) < 1e-12

    def test_metric_axioms_spot_check(self):
        rng = np.random.default_rng(28)
        for _ in range(15):
            m = int(rng.integers(3, 7))
            n = int(rng.integers(1, m))
            a = orthonormal_basis(rng.standard_normal((m, n)))
            b = orthonormal_basis(rng.standard_normal((m, n)))
            c = orthonormal_basis(rng.standard_normal((m, n)))
            dab = subspace_distance(a, b)
            dba = subspace_distance(b, a)
            assert dab == pytest.approx(dba, abs=1e-13)
            assert 0.0 <= dab <= 1.0 + 1e-12
            # triangle inequality
            assert dab <= subspace_distance(a, c) + subspace_distance(c, b) + 1e-12
            # identity of indiscernibles, via a rotated copy of a
            q = orthonormal_basis(rng.standard_normal((n, n)))
            assert subspace_distance(a, a @ q) < 1e-10

    def test_dimension_mismatch_rejected(self):
        a = orthonormal_basis(np.random.default_rng(2).standard_normal((4, 1)))
        b = orthonormal_basis(np.random.default_rng(3).standard_normal((4, 2)))
        with pytest.raises(ValueError):
            subspace_distance(a, b)

    def test_ambient_mismatch_rejected(self):
        a = np.array([[1.0], [0.0]])
        b = np.array([[1.0], [0.0], [0.0]])
        with pytest.raises(ValueError):
            subspace_distance(a, b)


class TestGapProfile:
    def test_subtraction(self):
        spec = decompose(np.diag([2.0, 4.5]))
        profile = gap_profile(spec)
        np.testing.assert_allclose(profile.gaps, [2.5])
        np.testing.assert_allclose(profile.relative, [2.5 / 4.5])

    def test_three_eigenvalues(self):
        spec = decompose(np.diag([3.0, 1.0, 0.0]))
        np.testing.assert_allclose(gap_profile(spec).gaps, [2.0, 1.0])

    def test_equal_eigenvalues_zero_gaps(self):
        spec = decompose(2.0 * np.eye(4))
        np.testing.assert_array_equal(gap_profile(spec).gaps, np.zeros(3))

    def test_round_off_gaps_snapped_to_zero(self):
        """Gaps far below the leading eigenvalue scale read as exactly 0."""
        M = np.diag([1.0, 1.0 - 1e-15, 0.5])
        profile = gap_profile(decompose(M))
        assert profile.gaps[0] == 0.0
        assert profile.gaps[1] == pytest.approx(0.5, rel=1e-12)
