# -*- coding: utf-8 -*-
"""Uniform column sampling of rotated matrices and the outer-product estimator.

approx_matmul derives two streams from one user seed: the rotation uses the
seed itself and the column sample uses seed XOR SAMPLE_SEED_MASK.
"""

import logging
import time
import typing

import numpy as np

import matcore
import rotate
from errors import DomainError
from matcore import DenseMatrix
from rotate import RotationSpec

logger = logging.getLogger(__name__)

SAMPLE_SEED_MASK = 0x9E3779B97F4A7C15
# residuals are small and square, so their top singular values often sit close
ERROR_NORM_MAX_ITER = 100_000


class SketchPlan(typing.NamedTuple):
    """One realized randomization: the rotation plus n sampled column indices."""

    rotation: RotationSpec
    n: int
    indices: np.ndarray
    sample_seed: int


def split_seed(seed: int) -> typing.Tuple[int, int]:
    """(rotation_seed, sample_seed) for a user-facing seed."""
    seed = rotate.check_seed(seed)
    return seed, seed ^ SAMPLE_SEED_MASK


def draw_plan(rotation: RotationSpec, n: int, sample_seed: int) -> SketchPlan:
    """Draws n column indices i.i.d. uniform on [0, m_padded), with replacement."""
    if n < 1:
        raise DomainError(f"sample count n must be at least 1, got {n}")
    sample_seed = rotate.check_seed(sample_seed)
    indices = np.random.default_rng(sample_seed).integers(0, rotation.m_padded, size=n)
    indices.flags.writeable = False
    return SketchPlan(rotation=rotation, n=n, indices=indices, sample_seed=sample_seed)


def sample_product(a_rot: DenseMatrix, b_rot: DenseMatrix, plan: SketchPlan) -> DenseMatrix:
    """(m/n) * sum_j a_rot[:, i_j] b_rot[:, i_j]^T over the plan's indices.

    The n rank-one updates are accumulated as one product of the sampled
    column blocks, which is O(d_A d_B n).
    """
    m_padded = plan.rotation.m_padded
    for name, matrix in (("A", a_rot), ("B", b_rot)):
        if matrix.shape[1] != m_padded:
            raise DomainError(
                f"rotated {name} has {matrix.shape[1]} columns, plan expects {m_padded}"
            )
    if plan.indices.size != plan.n:
        raise DomainError(f"plan holds {plan.indices.size} indices, expected n = {plan.n}")
    if plan.indices.size and (plan.indices.min() < 0 or plan.indices.max() >= m_padded):
        raise DomainError(f"plan indices must lie in [0, {m_padded})")
    sampled_a = a_rot[:, plan.indices]
    sampled_b = b_rot[:, plan.indices]
    return matcore.dense((m_padded / plan.n) * (sampled_a @ sampled_b.T))


class SketchTimings(typing.NamedTuple):
    """Wall-clock split of one approx_matmul call."""

    rotation_seconds: float
    accumulation_seconds: float


def timed_approx_matmul(
    matrix_a: DenseMatrix,
    matrix_b: DenseMatrix,
    n: int,
    seed: int,
    threads: int = 1,
) -> typing.Tuple[DenseMatrix, SketchPlan, SketchTimings]:
    """approx_matmul that also reports how long each phase took."""
    if matrix_a.shape[1] != matrix_b.shape[1]:
        raise DomainError(
            f"A has {matrix_a.shape[1]} columns but B has {matrix_b.shape[1]}"
        )
    rotation_seed, sample_seed = split_seed(seed)
    started = time.perf_counter()
    rotation = rotate.make_rotation(matrix_a.shape[1], rotation_seed)
    a_rot = rotate.apply_rotation(matrix_a, rotation, threads=threads)
    b_rot = rotate.apply_rotation(matrix_b, rotation, threads=threads)
    rotated = time.perf_counter()
    plan = draw_plan(rotation, n, sample_seed)
    estimate = sample_product(a_rot, b_rot, plan)
    timings = SketchTimings(rotated - started, time.perf_counter() - rotated)
    logger.debug(
        "approx_matmul: rotation %.6fs, accumulation %.6fs",
        timings.rotation_seconds,
        timings.accumulation_seconds,
    )
    return estimate, plan, timings


def approx_matmul(
    matrix_a: DenseMatrix,
    matrix_b: DenseMatrix,
    n: int,
    seed: int,
    threads: int = 1,
) -> typing.Tuple[DenseMatrix, SketchPlan]:
    """Randomized estimate of AB^T from n rotated column pairs.

    Args:
        matrix_a: d_A x m DenseMatrix.
        matrix_b: d_B x m DenseMatrix.
        n: Number of sampled column pairs.
        seed: Unsigned 64-bit seed; see split_seed.
        threads: Row-parallel workers for the rotation.

    Returns:
        (estimate of AB^T, the plan that produced it)
    """
    estimate, plan, _ = timed_approx_matmul(matrix_a, matrix_b, n, seed, threads=threads)
    return estimate, plan


def error_scales(matrix_a: DenseMatrix, matrix_b: DenseMatrix) -> typing.Tuple[float, float]:
    """(||A|| ||B||, ||A||_F ||B||_F), the denominators of relative_errors."""
    return (
        matcore.spectral_norm(matrix_a) * matcore.spectral_norm(matrix_b),
        matcore.frobenius_norm(matrix_a) * matcore.frobenius_norm(matrix_b),
    )


def relative_errors(
    estimate: DenseMatrix,
    exact: DenseMatrix,
    scales: typing.Tuple[float, float],
) -> typing.Tuple[float, float]:
    """Spectral and Frobenius errors of an estimate of AB^T.

    Args:
        estimate: The sketched product.
        exact: AB^T.
        scales: error_scales(A, B).

    Returns:
        (||E - AB^T|| / (||A|| ||B||), ||E - AB^T||_F / (||A||_F ||B||_F))
    """
    residual = matcore.dense(estimate - exact)
    spectral_scale, frobenius_scale = scales
    spectral = matcore.spectral_norm(residual, max_iter=ERROR_NORM_MAX_ITER) / spectral_scale
    return spectral, matcore.frobenius_norm(residual) / frobenius_scale
