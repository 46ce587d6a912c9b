# -*- coding: utf-8 -*-
"""Dense matrices, their norms, the stable rank k and the coherence mu."""

import logging
import typing

import numpy as np

from errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

# Custom Types

# 2-D, C-contiguous, float64, read-only. Build one with dense().
DenseMatrix = np.ndarray

DEFAULT_TOL = 1e-10


class CoherenceReport(typing.NamedTuple):
    """Column mass of the normalized rotated pair (Q, R)."""

    mu: float
    k_a: float
    k_b: float
    q_col_sqnorms: np.ndarray
    r_col_sqnorms: np.ndarray


def dense(values: typing.Any) -> DenseMatrix:
    """Builds an immutable DenseMatrix.

    Args:
        values: Anything numpy can turn into a 2-D array of reals.

    Returns:
        A read-only, row-major float64 copy of `values`.

    Raises:
        DomainError: if `values` is not 2-D, is empty, or holds NaN/Inf.
    """
    matrix = np.array(values, dtype=np.float64, order="C", copy=True)
    if matrix.ndim != 2:
        raise DomainError(f"a matrix needs 2 dimensions, got {matrix.ndim}")
    if matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise DomainError(f"a matrix needs at least one row and column, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("matrix entries must be finite")
    matrix.flags.writeable = False
    return matrix


def default_max_iter(matrix: DenseMatrix) -> int:
    """Iteration budget used by spectral_norm when none is given."""
    return 10 * max(matrix.shape) + 100


def spectral_norm(
    matrix: DenseMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: typing.Optional[int] = None,
) -> float:
    """Largest singular value, by power iteration on the smaller Gram matrix.

    The start vector is drawn from a generator seeded with 0, so the result is
    a deterministic function of `matrix`. Iteration stops once the Rayleigh
    quotient of the Gram operator changes by at most `tol` (relative).

    Args:
        matrix: A nonempty DenseMatrix.
        tol: Relative stopping tolerance.
        max_iter: Iteration budget; defaults to 10 * max(rows, cols) + 100.

    Returns:
        sigma_max(matrix), or 0.0 for the all-zero matrix.

    Raises:
        ConvergenceError: if the budget runs out first.
    """
    if max_iter is None:
        max_iter = default_max_iter(matrix)
    scale = float(np.abs(matrix).max())
    if scale == 0.0:
        return 0.0
    # unit max entry keeps the Gram matrix clear of overflow and underflow
    scaled = matrix / scale
    rows, cols = matrix.shape
    gram = scaled.T @ scaled if cols <= rows else scaled @ scaled.T

    vector = np.random.default_rng(0).standard_normal(gram.shape[0])
    vector /= np.linalg.norm(vector)
    rayleigh = float(vector @ gram @ vector)
    gap = np.inf
    for iteration in range(1, max_iter + 1):
        image = gram @ vector
        image_norm = np.linalg.norm(image)
        if image_norm == 0.0:
            # start vector in the null space; restart along a coordinate axis
            vector = np.zeros_like(vector)
            vector[iteration % vector.size] = 1.0
            continue
        vector = image / image_norm
        updated = float(vector @ gram @ vector)
        gap = abs(updated - rayleigh) / updated
        rayleigh = updated
        if gap <= tol:
            logger.debug("power iteration converged in %d iterations", iteration)
            return scale * float(np.sqrt(rayleigh))
    raise ConvergenceError(max_iter, float(gap))


def frobenius_norm(matrix: DenseMatrix) -> float:
    """Square root of the sum of squared entries."""
    scale = float(np.abs(matrix).max())
    if scale == 0.0:
        return 0.0
    return scale * float(np.sqrt(np.sum(np.square(matrix / scale))))


def normalize(matrix: DenseMatrix) -> typing.Tuple[DenseMatrix, float]:
    """Scales a matrix to unit spectral norm.

    Returns:
        (matrix / ||matrix||, ||matrix||)

    Raises:
        DomainError: for the zero matrix.
    """
    norm = spectral_norm(matrix)
    if norm == 0.0:
        raise DomainError("cannot normalize the zero matrix")
    return dense(matrix / norm), norm


def stable_rank_k(matrix_a: DenseMatrix, matrix_b: DenseMatrix) -> float:
    """k = max(||A||_F^2 / ||A||^2, ||B||_F^2 / ||B||^2).

    tr(AA^T) and tr(A^T A) both equal ||A||_F^2, so either spelling of k
    gives the same number.

    Raises:
        DomainError: on a column mismatch or a zero input.
    """
    if matrix_a.shape[1] != matrix_b.shape[1]:
        raise DomainError(
            f"A has {matrix_a.shape[1]} columns but B has {matrix_b.shape[1]}"
        )
    ratios = []
    for name, matrix in (("A", matrix_a), ("B", matrix_b)):
        norm = spectral_norm(matrix)
        if norm == 0.0:
            raise DomainError(f"k is undefined: {name} is the zero matrix")
        ratios.append((frobenius_norm(matrix) / norm) ** 2)
    # ||A|| <= ||A||_F, so anything below 1 is rounding in the power iteration
    return max(1.0, *ratios)


def coherence(matrix_q: DenseMatrix, matrix_r: DenseMatrix) -> CoherenceReport:
    """Per-column squared norms of Q and R and the coherence mu built on them.

    mu = m * max(||q_i||^2, ||r_i||^2 over all columns i), k_a and k_b are the
    column sums (tr(QQ^T) and tr(RR^T)).
    """
    if matrix_q.shape[1] != matrix_r.shape[1]:
        raise DomainError(
            f"Q has {matrix_q.shape[1]} columns but R has {matrix_r.shape[1]}"
        )
    m = matrix_q.shape[1]
    q_sq = np.sum(np.square(matrix_q), axis=0)
    r_sq = np.sum(np.square(matrix_r), axis=0)
    mu = m * float(max(q_sq.max(), r_sq.max()))
    return CoherenceReport(
        mu=mu,
        k_a=float(q_sq.sum()),
        k_b=float(r_sq.sum()),
        q_col_sqnorms=q_sq,
        r_col_sqnorms=r_sq,
    )


def matmul_exact(matrix_a: DenseMatrix, matrix_b: DenseMatrix) -> DenseMatrix:
    """The straightforward product AB^T (d_A x d_B)."""
    if matrix_a.shape[1] != matrix_b.shape[1]:
        raise DomainError(
            f"A has {matrix_a.shape[1]} columns but B has {matrix_b.shape[1]}"
        )
    return dense(matrix_a @ matrix_b.T)
