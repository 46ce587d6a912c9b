"""Tests for oracle.py"""
# pylint: disable=no-self-use

import itertools

import numpy as np
import pytest  # type: ignore

import matcore
import oracle
from errors import DomainError
import test.fixtures as fixtures  # pylint: disable=wrong-import-order


class TestExactMoments:
    """tests for function exact_moments"""

    def test_single_outcome(self):
        one = matcore.dense([[1.0]])
        report = oracle.exact_moments(one, one)
        np.testing.assert_array_equal(report.m_matrix, [[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(report.ex2, np.eye(2))
        assert report.max_outcome_dev == 0.0
        assert report.mu == 1.0

    def test_spread_row(self):
        row = matcore.dense([[np.sqrt(0.5), -np.sqrt(0.5)]])
        report = oracle.exact_moments(row, row)
        assert report.mu == pytest.approx(1.0)
        assert report.ex2_norm <= 1.0 + 1e-12

    def test_outcome_mean_is_m(self):
        """E[X - M] = 0 over the 8 outcomes"""
        matrix_q, matrix_r = fixtures.normalized_pair(3, 2, 8, seed=5)
        report = oracle.exact_moments(matrix_q, matrix_r)
        np.testing.assert_allclose(report.outcome_mean, report.m_matrix, atol=1e-12)

    def test_block_structure(self):
        matrix_q, matrix_r = fixtures.normalized_pair(3, 4, 6, seed=6)
        report = oracle.exact_moments(matrix_q, matrix_r)
        np.testing.assert_array_equal(report.m_matrix, report.m_matrix.T)
        np.testing.assert_array_equal(report.m_matrix[:3, :3], 0.0)
        np.testing.assert_array_equal(report.m_matrix[3:, 3:], 0.0)
        np.testing.assert_array_equal(report.ex2[:3, 3:], 0.0)
        np.testing.assert_allclose(report.ex2, report.ex2.T, atol=1e-15)

        top_left = np.zeros((3, 3))
        for i in range(6):
            r_sq = sum(matrix_r[row, i] ** 2 for row in range(4))
            top_left += 6 * r_sq * np.outer(matrix_q[:, i], matrix_q[:, i])
        np.testing.assert_allclose(report.ex2[:3, :3], top_left, atol=1e-12)

    def test_norm_guard(self):
        with pytest.raises(DomainError):
            oracle.exact_moments(matcore.dense([[2.0, 0.0]]), matcore.dense([[1.0, 0.0]]))

    def test_column_guard(self):
        wide = matcore.dense(np.eye(1, 65))
        with pytest.raises(DomainError):
            oracle.exact_moments(wide, wide)


class TestVerifyLemma1Inequalities:
    """tests for function verify_lemma1_inequalities"""

    def test_single_outcome(self):
        one = matcore.dense([[1.0]])
        checks = oracle.verify_lemma1_inequalities(oracle.exact_moments(one, one))
        assert len(checks) == 4
        assert all(check.holds for check in checks)

    def test_random_instances(self):
        """every inequality holds on 500 random normalized pairs"""
        rng = np.random.default_rng(500)
        for seed in range(500):
            d_a, d_b, m = (int(value) for value in rng.integers(1, [5, 5, 17]))
            matrix_q, matrix_r = fixtures.normalized_pair(d_a, d_b, m, seed)
            checks = oracle.verify_lemma1_inequalities(oracle.exact_moments(matrix_q, matrix_r))
            failed = [check for check in checks if not check.holds]
            assert not failed, (seed, failed)

    def test_spiky_near_tight(self):
        """one column with all the mass: ||E[X^2]|| is essentially mu"""
        spike = np.zeros((2, 16))
        spike[:, 3] = [0.6, 0.8]
        matrix_q = matcore.dense(spike)
        report = oracle.exact_moments(matrix_q, matrix_q)
        assert all(check.holds for check in oracle.verify_lemma1_inequalities(report))
        assert report.ex2_norm == pytest.approx(report.mu, rel=0.01)

    def test_detects_violation(self):
        report = oracle.exact_moments(matcore.dense([[1.0]]), matcore.dense([[1.0]]))
        checks = oracle.verify_lemma1_inequalities(report._replace(ex2_norm=report.mu + 1e-6))
        assert [check.holds for check in checks] == [True, False, True, True]


class TestEnumerateEstimatorMean:
    """tests for function enumerate_estimator_mean"""

    def test_single_column(self):
        column_q = matcore.dense([[0.5], [0.25]])
        column_r = matcore.dense([[2.0]])
        np.testing.assert_allclose(
            oracle.enumerate_estimator_mean(column_q, column_r, 3), column_q @ column_r.T
        )

    @pytest.mark.parametrize(["m", "n"], itertools.product(range(1, 5), range(1, 4)))
    def test_unbiased(self, m, n):
        for seed in range(50):
            matrix_q = fixtures.random_matrix(3, m, seed)
            matrix_r = fixtures.random_matrix(2, m, seed + 1000)
            np.testing.assert_allclose(
                oracle.enumerate_estimator_mean(matrix_q, matrix_r, n),
                matrix_q @ matrix_r.T,
                atol=1e-12,
            )

    def test_guard(self):
        wide = matcore.dense(np.ones((1, 11)))
        with pytest.raises(DomainError):
            oracle.enumerate_estimator_mean(wide, wide, 6)
