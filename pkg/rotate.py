# -*- coding: utf-8 -*-
"""The random rotation Theta = (1/sqrt(m)) D H.

D is a diagonal of Rademacher signs and H the Sylvester Hadamard matrix of
order m, applied with the fast Walsh-Hadamard transform. Inputs whose column
count is not a power of two are zero-padded to the next one; padding leaves
AB^T, k and the spectral norms untouched, so everything downstream simply runs
at the padded width.
"""

import concurrent.futures
import logging
import typing

import numpy as np

from errors import DomainError
from matcore import DenseMatrix, dense

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64
MATERIALIZE_LIMIT = 4096


class RotationSpec(typing.NamedTuple):
    """One realized rotation.

    The signs are a pure function of `seed`: they come from numpy's PCG64
    generator, which produces the same stream on every platform.
    """

    m_original: int
    m_padded: int
    signs: np.ndarray
    seed: int
    identity: bool = False


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def next_power_of_two(value: int) -> int:
    """Smallest power of two >= value (value >= 1)."""
    return 1 << (value - 1).bit_length()


def check_seed(seed: int) -> int:
    if not 0 <= seed < SEED_LIMIT:
        raise DomainError(f"seeds are unsigned 64-bit integers, got {seed}")
    return int(seed)


def fwht_in_place(vector: np.ndarray) -> np.ndarray:
    """Unnormalized Sylvester-ordered Walsh-Hadamard transform along the last axis.

    Runs log2(m) butterfly passes. A C-contiguous ndarray is overwritten and
    returned; anything else is transformed in a contiguous copy. Integer input
    stays integer, so the transform is exact for it.

    Args:
        vector: Array whose last axis has power-of-two length.

    Returns:
        H v (row-wise for 2-D input).

    Raises:
        DomainError: if the last axis is not a power of two.
    """
    values = vector if isinstance(vector, np.ndarray) else np.asarray(vector)
    if not values.flags.c_contiguous or not values.flags.writeable:
        values = np.array(values, order="C")
    length = values.shape[-1]
    if not is_power_of_two(length):
        raise DomainError(f"transform length must be a power of two, got {length}")
    lead = values.shape[:-1]
    half = 1
    while half < length:
        butterflies = values.reshape(lead + (length // (2 * half), 2, half))
        upper = butterflies[..., 0, :].copy()
        butterflies[..., 0, :] += butterflies[..., 1, :]
        butterflies[..., 1, :] = upper - butterflies[..., 1, :]
        half *= 2
    return values


def make_rotation(m: int, seed: int) -> RotationSpec:
    """Draws the Rademacher signs of a rotation for m logical columns."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    seed = check_seed(seed)
    m_padded = next_power_of_two(m)
    bits = np.random.default_rng(seed).integers(0, 2, size=m_padded)
    signs = np.where(bits == 1, 1, -1).astype(np.int8)
    signs.flags.writeable = False
    return RotationSpec(m_original=m, m_padded=m_padded, signs=signs, seed=seed)


def identity_rotation(m: int) -> RotationSpec:
    """The Theta = I baseline: apply_rotation only pads."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    m_padded = next_power_of_two(m)
    signs = np.ones(m_padded, dtype=np.int8)
    signs.flags.writeable = False
    return RotationSpec(m_original=m, m_padded=m_padded, signs=signs, seed=0, identity=True)


def pad_columns(matrix: DenseMatrix, width: int) -> np.ndarray:
    """Writable copy of `matrix` with zero columns appended up to `width`."""
    padded = np.zeros((matrix.shape[0], width), dtype=np.float64)
    padded[:, : matrix.shape[1]] = matrix
    return padded


def _rotate_rows(block: np.ndarray, spec: RotationSpec) -> None:
    block *= spec.signs
    fwht_in_place(block)
    block *= 1.0 / np.sqrt(spec.m_padded)


def apply_rotation(matrix: DenseMatrix, spec: RotationSpec, threads: int = 1) -> DenseMatrix:
    """Computes A_pad Theta.

    Each row is multiplied by the signs, transformed, then scaled by
    1/sqrt(m_padded). Rows are independent, so with threads > 1 they are split
    into contiguous blocks handled by a thread pool; the result is identical to
    the sequential one.

    Args:
        matrix: A DenseMatrix with spec.m_original columns.
        spec: The rotation.
        threads: Worker threads for the row blocks.

    Returns:
        The rotated matrix, spec.m_padded columns wide.
    """
    if matrix.shape[1] != spec.m_original:
        raise DomainError(
            f"matrix has {matrix.shape[1]} columns, rotation expects {spec.m_original}"
        )
    rotated = pad_columns(matrix, spec.m_padded)
    if spec.identity:
        return dense(rotated)
    if threads <= 1 or rotated.shape[0] < 2:
        _rotate_rows(rotated, spec)
    else:
        blocks = np.array_split(np.arange(rotated.shape[0]), min(threads, rotated.shape[0]))
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            # basic slices are contiguous views, so the butterflies write through
            futures = [
                pool.submit(_rotate_rows, rotated[rows[0] : rows[-1] + 1], spec)
                for rows in blocks
                if rows.size
            ]
            for future in futures:
                future.result()
    return dense(rotated)


def materialize_theta(spec: RotationSpec) -> DenseMatrix:
    """The explicit m_padded x m_padded matrix Theta."""
    if spec.m_padded > MATERIALIZE_LIMIT:
        raise DomainError(
            f"refusing to materialize a {spec.m_padded}-wide rotation "
            f"(limit {MATERIALIZE_LIMIT})"
        )
    if spec.identity:
        return dense(np.eye(spec.m_padded))
    hadamard = fwht_in_place(np.eye(spec.m_padded))
    return dense(spec.signs[:, np.newaxis] * hadamard / np.sqrt(spec.m_padded))
