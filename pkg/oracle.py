# -*- coding: utf-8 -*-
"""Brute-force moments of the one-sample estimator on small instances.

For normalized Q, R with m columns, the symmetric random matrix X takes the
value m [[0, q_i r_i^T], [r_i q_i^T, 0]] with probability 1/m each, and
M = E[X] = [[0, QR^T], [RQ^T, 0]]. Everything here is computed by direct
summation over the m outcomes, so it can check the moment inequalities behind
the error bound numerically.
"""

import itertools
import typing

import numpy as np

import matcore
from errors import DomainError
from matcore import DenseMatrix

MAX_COLUMNS = 64
MAX_TUPLES = 10**6
NORM_SLACK = 1e-9
INEQUALITY_SLACK = 1e-9
NORM_TOL = 1e-12
NORM_MAX_ITER = 100_000


class MomentReport(typing.NamedTuple):
    """Exact distributional objects of X for one (Q, R) pair."""

    m_matrix: DenseMatrix
    ex2: DenseMatrix
    outcome_mean: DenseMatrix
    mu: float
    k_a: float
    k_b: float
    max_outcome_dev: float
    ex2_norm: float
    ex2_trace: float
    central_norm: float
    m_norm: float


class InequalityCheck(typing.NamedTuple):
    name: str
    lhs: float
    rhs: float
    holds: bool


def _norm(matrix: np.ndarray) -> float:
    return matcore.spectral_norm(matcore.dense(matrix), tol=NORM_TOL, max_iter=NORM_MAX_ITER)


def block_form(upper: np.ndarray) -> np.ndarray:
    """[[0, U], [U^T, 0]] for a d_A x d_B block U."""
    d_a, d_b = upper.shape
    full = np.zeros((d_a + d_b, d_a + d_b))
    full[:d_a, d_a:] = upper
    full[d_a:, :d_a] = upper.T
    return full


def exact_moments(matrix_q: DenseMatrix, matrix_r: DenseMatrix) -> MomentReport:
    """Computes M, E[X^2] and the norms the error bound relies on.

    Args:
        matrix_q: d_A x m, spectral norm at most 1.
        matrix_r: d_B x m, spectral norm at most 1.

    Raises:
        DomainError: when m exceeds MAX_COLUMNS, the column counts differ, or
            an input norm exceeds 1 + 1e-9.
    """
    if matrix_q.shape[1] != matrix_r.shape[1]:
        raise DomainError(
            f"Q has {matrix_q.shape[1]} columns but R has {matrix_r.shape[1]}"
        )
    m = matrix_q.shape[1]
    if m > MAX_COLUMNS:
        raise DomainError(f"exact moments enumerate at most {MAX_COLUMNS} columns, got {m}")
    for name, matrix in (("Q", matrix_q), ("R", matrix_r)):
        if _norm(matrix) > 1.0 + NORM_SLACK:
            raise DomainError(f"{name} must have spectral norm at most 1")

    report = matcore.coherence(matrix_q, matrix_r)
    d_a = matrix_q.shape[0]
    m_matrix = block_form(matrix_q @ matrix_r.T)

    outcome_sum = np.zeros_like(m_matrix)
    ex2 = np.zeros_like(m_matrix)
    max_dev = 0.0
    for i in range(m):
        q_i = matrix_q[:, i]
        r_i = matrix_r[:, i]
        outcome = m * block_form(np.outer(q_i, r_i))
        outcome_sum += outcome
        ex2[:d_a, :d_a] += m * report.r_col_sqnorms[i] * np.outer(q_i, q_i)
        ex2[d_a:, d_a:] += m * report.q_col_sqnorms[i] * np.outer(r_i, r_i)
        max_dev = max(max_dev, _norm(outcome - m_matrix))

    return MomentReport(
        m_matrix=matcore.dense(m_matrix),
        ex2=matcore.dense(ex2),
        outcome_mean=matcore.dense(outcome_sum / m),
        mu=report.mu,
        k_a=report.k_a,
        k_b=report.k_b,
        max_outcome_dev=max_dev,
        ex2_norm=_norm(ex2),
        ex2_trace=float(np.trace(ex2)),
        central_norm=_norm(ex2 - m_matrix @ m_matrix),
        m_norm=_norm(m_matrix),
    )


def verify_lemma1_inequalities(report: MomentReport) -> typing.List[InequalityCheck]:
    """Evaluates the four moment inequalities with INEQUALITY_SLACK absolute slack."""
    sides = [
        ("tr(E[X^2]) <= 2 mu sqrt(k_A k_B)",
         report.ex2_trace, 2.0 * report.mu * np.sqrt(report.k_a * report.k_b)),
        ("||E[X^2]|| <= mu", report.ex2_norm, report.mu),
        ("||E[(X-M)^2]|| <= mu + 1", report.central_norm, report.mu + 1.0),
        ("||X - M|| <= mu + 1", report.max_outcome_dev, report.mu + 1.0),
    ]
    return [
        InequalityCheck(name, float(lhs), float(rhs), bool(lhs <= rhs + INEQUALITY_SLACK))
        for name, lhs, rhs in sides
    ]


def enumerate_estimator_mean(matrix_q: DenseMatrix, matrix_r: DenseMatrix, n: int) -> DenseMatrix:
    """Exact mean of (m/n) sum_j q_{i_j} r_{i_j}^T over all m^n index tuples."""
    if matrix_q.shape[1] != matrix_r.shape[1]:
        raise DomainError(
            f"Q has {matrix_q.shape[1]} columns but R has {matrix_r.shape[1]}"
        )
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    m = matrix_q.shape[1]
    if m**n > MAX_TUPLES:
        raise DomainError(f"{m}^{n} index tuples exceed the enumeration limit {MAX_TUPLES}")
    outer = [np.outer(matrix_q[:, i], matrix_r[:, i]) for i in range(m)]
    total = np.zeros((matrix_q.shape[0], matrix_r.shape[0]))
    for indices in itertools.product(range(m), repeat=n):
        estimate = np.zeros_like(total)
        for i in indices:
            estimate += outer[i]
        total += (m / n) * estimate
    return matcore.dense(total / m**n)
