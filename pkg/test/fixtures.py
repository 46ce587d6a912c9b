# pylint: disable=all
"""Reference implementations and matrices shared by the tests."""

import numpy as np

import matcore


def sylvester(order):
    """Hadamard matrix of the given power-of-two order by the block recursion."""
    hadamard = np.array([[1]], dtype=np.int64)
    while hadamard.shape[0] < order:
        hadamard = np.block([[hadamard, hadamard], [hadamard, -hadamard]])
    return hadamard


def svd_norm(matrix):
    return float(np.linalg.svd(np.asarray(matrix), compute_uv=False)[0])


def svd_stable_rank(matrix):
    singular = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    return float(np.sum(singular**2) / singular[0] ** 2)


def triple_loop_product(matrix_a, matrix_b):
    rows, inner = matrix_a.shape
    product = np.zeros((rows, matrix_b.shape[0]))
    for i in range(rows):
        for j in range(matrix_b.shape[0]):
            for k in range(inner):
                product[i, j] += matrix_a[i, k] * matrix_b[j, k]
    return product


def random_matrix(rows, cols, seed):
    return matcore.dense(np.random.default_rng(seed).standard_normal((rows, cols)))


def normalized_pair(d_a, d_b, m, seed):
    """Random Q, R with spectral norm exactly representable as at most 1."""
    rng = np.random.default_rng(seed)
    pair = []
    for rows in (d_a, d_b):
        values = rng.standard_normal((rows, m))
        values /= svd_norm(values) * (1.0 + 1e-12)
        pair.append(matcore.dense(values))
    return tuple(pair)
