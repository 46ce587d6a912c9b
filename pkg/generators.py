# -*- coding: utf-8 -*-
"""Synthetic test matrices spanning the coherence extremes.

- gaussian: i.i.d. standard normal entries.
- low-rank: product of two thin gaussians of inner dimension `rank`.
- spiky: `rank` randomly placed columns carry standard normal entries, the
  rest carry noise 1e-3 times smaller; rotation exists to fix this case.
- coordinate: rows of the identity, [I_d | 0]; every unit of mass sits in one
  column.
"""

import typing

import numpy as np

import matcore
from errors import DomainError
from matcore import DenseMatrix

SPIKY_NOISE = 1e-3


def gaussian(rows: int, cols: int, rank: int, rng: np.random.Generator) -> DenseMatrix:
    del rank
    return matcore.dense(rng.standard_normal((rows, cols)))


def low_rank(rows: int, cols: int, rank: int, rng: np.random.Generator) -> DenseMatrix:
    left = rng.standard_normal((rows, rank))
    right = rng.standard_normal((rank, cols))
    return matcore.dense(left @ right)


def spiky(rows: int, cols: int, rank: int, rng: np.random.Generator) -> DenseMatrix:
    values = SPIKY_NOISE * rng.standard_normal((rows, cols))
    spikes = rng.choice(cols, size=min(rank, cols), replace=False)
    values[:, spikes] = rng.standard_normal((rows, spikes.size))
    return matcore.dense(values)


def coordinate(rows: int, cols: int, rank: int, rng: np.random.Generator) -> DenseMatrix:
    del rank, rng
    if rows > cols:
        raise DomainError(f"coordinate matrices need rows <= cols, got {rows} x {cols}")
    return matcore.dense(np.eye(rows, cols))


GENERATORS: typing.Dict[str, typing.Callable[..., DenseMatrix]] = {
    "gaussian": gaussian,
    "low-rank": low_rank,
    "spiky": spiky,
    "coordinate": coordinate,
}


def generate(
    name: str, rows: int, cols: int, rank: int, rng: np.random.Generator
) -> DenseMatrix:
    """Builds a rows x cols matrix with the named generator.

    Args:
        name: One of GENERATORS.
        rows: Row count.
        cols: Column count (the shared dimension m).
        rank: Inner dimension for low-rank, spike count for spiky.
        rng: Source of randomness.

    Raises:
        DomainError: on an unknown name or a nonpositive size.
    """
    if name not in GENERATORS:
        raise DomainError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    if rows < 1 or cols < 1 or rank < 1:
        raise DomainError(f"rows, cols and rank must be positive, got {rows}, {cols}, {rank}")
    return GENERATORS[name](rows, cols, rank, rng)
