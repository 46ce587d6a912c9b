"""Tests for bounds.py"""
# pylint: disable=no-self-use

import math

import numpy as np
import pytest  # type: ignore

import bounds
from errors import DomainError, SampleSizeOverflow


class TestBernsteinTail:
    """tests for function bernstein_tail"""

    def test_small_t(self):
        """behaves like 2/t near zero"""
        assert bounds.bernstein_tail(1e-6) == pytest.approx(2e6, rel=0.01)

    def test_reference_values(self):
        assert bounds.bernstein_tail(2.6) == pytest.approx(0.263592, abs=1e-4)
        assert bounds.bernstein_tail(2.6) <= math.exp(-1.3)
        assert bounds.bernstein_tail(20.0) == pytest.approx(4.1223e-8, rel=1e-3)

    def test_series_boundary_continuous(self):
        below = bounds.bernstein_tail(bounds.SERIES_CUTOFF * (1 - 1e-9))
        above = bounds.bernstein_tail(bounds.SERIES_CUTOFF * (1 + 1e-9))
        assert below == pytest.approx(above, rel=1e-6)

    def test_large_t(self):
        assert bounds.bernstein_tail(705.0) == pytest.approx(705.0 * math.exp(-705.0))

    def test_below_exponential(self):
        """t/(e^t - t - 1) <= e^(-t/2) on t in [2.6, 50]"""
        for t in np.linspace(2.6, 50.0, 1000):
            assert bounds.bernstein_tail(t) <= math.exp(-t / 2)

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_domain(self, t):
        with pytest.raises(DomainError):
            bounds.bernstein_tail(t)


class TestLemma1Bound:
    """tests for function lemma1_bound"""

    def test_hand_value(self):
        result = bounds.lemma1_bound(mu=1.0, t=2.0, n=8, k_a=1.0, k_b=1.0)
        assert result.relative_error_bound == pytest.approx(1.0 + 1.0 / 6.0)

    def test_failure_probability(self):
        result = bounds.lemma1_bound(mu=1.0, t=2.6, n=8, k_a=1.0, k_b=1.0)
        assert result.failure_probability == pytest.approx(0.5272, abs=1e-4)

    def test_clamped(self):
        result = bounds.lemma1_bound(mu=1.0, t=0.01, n=8, k_a=10.0, k_b=10.0)
        assert result.failure_probability == 1.0

    @pytest.mark.parametrize("t", [-1.0, 0.0])
    def test_rejects_non_positive_t(self, t):
        with pytest.raises(DomainError):
            bounds.lemma1_bound(mu=1.0, t=t, n=8, k_a=1.0, k_b=1.0)

    def test_vanishes_with_n(self):
        values = [
            bounds.lemma1_bound(mu=3.0, t=5.0, n=n, k_a=2.0, k_b=2.0).relative_error_bound
            for n in (10, 10**3, 10**6, 10**9)
        ]
        assert values == sorted(values, reverse=True)
        assert values[-1] < 1e-3


class TestLemma2Bound:
    """tests for function lemma2_bound"""

    def test_single_column(self):
        assert bounds.lemma2_bound(1.0, 1, 1e-12) == pytest.approx(1.0, abs=1e-5)

    def test_reference_value(self):
        assert bounds.lemma2_bound(4.0, 16, math.log(16)) == pytest.approx(1.5318, abs=1e-3)

    def test_monotone_in_t(self):
        values = [bounds.lemma2_bound(3.0, 64, t) for t in (0.1, 1.0, 2.0, 5.0)]
        assert values == sorted(values)
        assert len(set(values)) == len(values)

    def test_is_quadratic_form_bound(self):
        tau = math.log(128) + 1.5
        assert bounds.lemma2_bound(5.0, 128, 1.5) == pytest.approx(
            bounds.quadratic_form_bound(5.0, 5.0, 1.0, tau) / 128, rel=1e-15
        )


class TestTheorem1Bound:
    """tests for function theorem1_bound"""

    def test_reference_value(self):
        result = bounds.theorem1_bound(k=1.0, m=1024, n=10**4, delta=0.1)
        assert result.relative_error_bound == pytest.approx(0.2262, abs=5e-4)
        assert result.failure_probability == 0.1

    @pytest.mark.parametrize(
        ["k", "m", "n", "delta"], [(1.0, 1024, 10**4, 0.1), (7.3, 300, 55, 0.01)]
    )
    def test_equals_lemma1_at_threshold(self, k, m, n, delta):
        """with mu at the coherence threshold and t = 2 ln(6k/delta)"""
        t = 2.0 * math.log(6.0 * k / delta)
        mu = bounds.coherence_threshold(k, m, delta)
        assert bounds.theorem1_bound(k, m, n, delta).relative_error_bound == pytest.approx(
            bounds.lemma1_bound(mu, t, n, 1.0, 1.0).relative_error_bound, rel=1e-14
        )

    @pytest.mark.parametrize(["k", "m", "delta"], [(1.0, 2, 0.3), (12.5, 4096, 1e-6)])
    def test_threshold_from_lemma2(self, k, m, delta):
        """the coherence threshold is m * lemma2_bound(k, m, ln(3/delta))"""
        assert bounds.coherence_threshold(k, m, delta) == pytest.approx(
            m * bounds.lemma2_bound(k, m, math.log(3.0 / delta)), rel=1e-12
        )

    def test_monotone(self):
        base = bounds.theorem1_bound(4.0, 512, 1000, 0.05).relative_error_bound
        assert bounds.theorem1_bound(4.0, 512, 1001, 0.05).relative_error_bound < base
        assert bounds.theorem1_bound(4.5, 512, 1000, 0.05).relative_error_bound > base
        assert bounds.theorem1_bound(4.0, 512, 1000, 0.04).relative_error_bound > base

    def test_vanishes_with_n(self):
        assert bounds.theorem1_bound(2.0, 64, 10**12, 0.1).relative_error_bound < 1e-4

    @pytest.mark.parametrize(
        ["k", "m", "n", "delta"],
        [(0.5, 8, 10, 0.1), (1.0, 8, 10, 0.0), (1.0, 8, 10, 1 / 3), (1.0, 8, 0, 0.1)],
    )
    def test_domain(self, k, m, n, delta):
        with pytest.raises(DomainError):
            bounds.theorem1_bound(k, m, n, delta)


def test_conditional_bound():
    """function conditional_bound is lemma1_bound at t = 2 ln(6k/delta)"""
    result = bounds.conditional_bound(mu=5.0, k=3.0, n=400, delta=0.1)
    t = 2.0 * math.log(180.0)
    assert result.relative_error_bound == pytest.approx(
        bounds.lemma1_bound(5.0, t, 400, 1.0, 1.0).relative_error_bound
    )
    assert result.failure_probability == pytest.approx(0.1 / 3)


def test_bound_inputs():
    """class BoundInputs dispatches to the evaluators"""
    inputs = bounds.BoundInputs(k=2.0, m=64, n=100, delta=0.1, mu=3.0, t=4.0)
    assert inputs.theorem1() == bounds.theorem1_bound(2.0, 64, 100, 0.1)
    assert inputs.lemma1(1.5, 2.0) == bounds.lemma1_bound(3.0, 4.0, 100, 1.5, 2.0)


class TestRequiredN:
    """tests for function required_n"""

    def test_minimal_random_tuples(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            k = float(rng.uniform(1.0, 50.0))
            m = int(rng.integers(1, 10**5))
            delta = float(rng.uniform(1e-4, 0.33))
            eps = float(rng.uniform(0.05, 2.0))
            n = bounds.required_n(k, m, delta, eps)
            assert bounds.theorem1_bound(k, m, n, delta).relative_error_bound <= eps
            if n > 1:
                assert bounds.theorem1_bound(k, m, n - 1, delta).relative_error_bound > eps

    def test_inverts_reference_value(self):
        eps = bounds.theorem1_bound(1.0, 1024, 10**4, 0.1).relative_error_bound
        assert bounds.required_n(1.0, 1024, 0.1, eps) == 10**4

    def test_quadratic_in_inverse_eps(self):
        """halving a small eps roughly quadruples n"""
        coarse = bounds.required_n(2.0, 1024, 0.1, 0.02)
        fine = bounds.required_n(2.0, 1024, 0.1, 0.01)
        assert 3.5 <= fine / coarse <= 4.5

    def test_overflow(self):
        with pytest.raises(SampleSizeOverflow):
            bounds.required_n(1.0, 1024, 0.1, 1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            bounds.required_n(1.0, 1024, 0.1, 0.0)
