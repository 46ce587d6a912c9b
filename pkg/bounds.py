# -*- coding: utf-8 -*-
"""Closed-form tail bounds for the rotate-then-sample estimator.

All bounds are relative: they bound ||est - AB^T|| / (||A|| ||B||). Logarithms
are natural throughout.
"""

import logging
import math
import typing

from errors import DomainError, SampleSizeOverflow

logger = logging.getLogger(__name__)

SERIES_CUTOFF = 1e-4
# t/(e^t - t - 1) <= e^(-t/2) is only claimed from here on
MIN_BERNSTEIN_T = 2.6
MAX_SAMPLES = 2**62


class BoundResult(typing.NamedTuple):
    """A relative error bound and the probability that it fails."""

    relative_error_bound: float
    failure_probability: float


class BoundInputs(typing.NamedTuple):
    """Parameters shared by the bound evaluators.

    mu and t feed the coherence-conditional path (lemma1_bound); k, m, n and
    delta feed theorem1_bound.
    """

    k: float
    m: int
    n: int
    delta: float
    mu: float = 0.0
    t: float = 0.0

    def theorem1(self) -> BoundResult:
        return theorem1_bound(self.k, self.m, self.n, self.delta)

    def lemma1(self, k_a: float, k_b: float) -> BoundResult:
        return lemma1_bound(self.mu, self.t, self.n, k_a, k_b)


def bernstein_tail(t: float) -> float:
    """t / (e^t - t - 1), the matrix Bernstein probability factor.

    Below SERIES_CUTOFF the denominator comes from its Taylor series; above ~700
    e^t overflows a double and t e^-t is used instead.
    """
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    if t < SERIES_CUTOFF:
        denominator = t * t / 2.0 * (1.0 + t / 3.0 * (1.0 + t / 4.0))
    elif t > 700.0:
        return t * math.exp(-t)
    else:
        denominator = math.expm1(t) - t
    return t / denominator


def lemma1_bound(mu: float, t: float, n: int, k_a: float, k_b: float) -> BoundResult:
    """Error bound given the coherence mu of the rotated pair.

    sqrt(2(mu+1)t/n) + (mu+1)t/(3n) fails with probability at most
    2 sqrt(k_a k_b) t/(e^t - t - 1), clamped to 1.
    """
    if mu < 0 or t <= 0 or n < 1 or k_a <= 0 or k_b <= 0:
        raise DomainError("lemma1_bound needs mu >= 0, t > 0, n >= 1 and positive k_a, k_b")
    scale = (mu + 1.0) * t
    bound = math.sqrt(2.0 * scale / n) + scale / (3.0 * n)
    failure = min(1.0, 2.0 * math.sqrt(k_a * k_b) * bernstein_tail(t))
    return BoundResult(relative_error_bound=bound, failure_probability=failure)


def quadratic_form_bound(trace: float, trace_sq: float, op_norm: float, tau: float) -> float:
    """Subgaussian quadratic-form threshold trace + 2 sqrt(trace_sq tau) + 2 op_norm tau.

    For a Rademacher vector eps and PSD S = ZZ^T, ||Z^T eps||^2 exceeds this
    value with probability at most e^-tau, where trace = tr(S),
    trace_sq = tr(S^2) and op_norm = ||S||.
    """
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    return trace + 2.0 * math.sqrt(trace_sq * tau) + 2.0 * op_norm * tau


def lemma2_bound(k_z: float, m: int, t: float) -> float:
    """Threshold on max_i ||Z^T Theta e_i||^2 exceeded with probability <= e^-t.

    (k_z + 2 sqrt(k_z (ln m + t)) + 2 (ln m + t)) / m, for ||Z|| <= 1.
    """
    if k_z <= 0 or m < 1:
        raise DomainError("lemma2_bound needs k_z > 0 and m >= 1")
    return quadratic_form_bound(k_z, k_z, 1.0, math.log(m) + t) / m


def _check_theorem1(k: float, m: int, delta: float) -> float:
    if k < 1:
        raise DomainError(f"k is at least 1, got {k}")
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if not 0 < delta < 1.0 / 3.0:
        raise DomainError(f"delta must lie in (0, 1/3), got {delta}")
    log_term = math.log(6.0 * k / delta)
    if 2.0 * log_term < MIN_BERNSTEIN_T:
        raise DomainError(
            f"t = 2 ln(6k/delta) = {2.0 * log_term:.4f} is below {MIN_BERNSTEIN_T}"
        )
    return log_term


def coherence_threshold(k: float, m: int, delta: float) -> float:
    """k + 2 sqrt(k ln(3m/delta)) + 2 ln(3m/delta).

    The rotated mu stays below this with probability at least 1 - 2 delta/3
    (lemma2_bound applied to both inputs, union over their 2m columns).
    """
    _check_theorem1(k, m, delta)
    log_term = math.log(3.0 * m / delta)
    return k + 2.0 * math.sqrt(k * log_term) + 2.0 * log_term


def conditional_bound(mu: float, k: float, n: int, delta: float) -> BoundResult:
    """Bound that holds given an observed mu, failing with probability <= delta/3.

    sqrt(4(mu+1)T/n) + 2(mu+1)T/(3n) with T = ln(6k/delta).
    """
    log_term = _check_theorem1(k, 1, delta)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    scale = (mu + 1.0) * log_term
    bound = math.sqrt(4.0 * scale / n) + 2.0 * scale / (3.0 * n)
    return BoundResult(relative_error_bound=bound, failure_probability=delta / 3.0)


def theorem1_bound(k: float, m: int, n: int, delta: float) -> BoundResult:
    """Relative spectral error bound holding with probability at least 1 - delta.

    With L = ln(3m/delta), C = k + 2 sqrt(k L) + 2 L + 1 and T = ln(6k/delta)
    the bound is sqrt(4 C T / n) + 2 C T / (3n).

    Raises:
        DomainError: on k < 1, delta outside (0, 1/3), n < 1, or
            2 ln(6k/delta) < 2.6.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    log_term = _check_theorem1(k, m, delta)
    scale = (coherence_threshold(k, m, delta) + 1.0) * log_term
    bound = math.sqrt(4.0 * scale / n) + 2.0 * scale / (3.0 * n)
    return BoundResult(relative_error_bound=bound, failure_probability=delta)


def required_n(k: float, m: int, delta: float, eps: float) -> int:
    """Smallest n whose theorem1_bound is at most eps.

    Doubles n until the bound drops to eps, then bisects; the bound is strictly
    decreasing in n.

    Raises:
        SampleSizeOverflow: if no n up to 2**62 suffices.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")

    def meets(n: int) -> bool:
        return theorem1_bound(k, m, n, delta).relative_error_bound <= eps

    upper = 1
    while not meets(upper):
        upper *= 2
        if upper > MAX_SAMPLES:
            raise SampleSizeOverflow(
                f"eps = {eps} needs more than {MAX_SAMPLES} samples"
            )
    lower = upper // 2  # fails, or 0 when n = 1 already suffices
    while upper - lower > 1:
        middle = (lower + upper) // 2
        if meets(middle):
            upper = middle
        else:
            lower = middle
    logger.debug("required_n(k=%g, m=%d, delta=%g, eps=%g) = %d", k, m, delta, eps, upper)
    return upper
