"""Tests for the RDP accountant."""

import math

import numpy as np
import pytest

from schemas import ConversionForm, PrivacyParams, RdpCurve
from accounting import (
    budget_table,
    combine,
    compose,
    crude_epsilon,
    describe_budget,
    dp_to_delta,
    laplace_rdp,
    order_grid,
    pate_budget,
    privgnn_budget,
    privgnn_rdp_curve,
    pure_dp_epsilon,
    rdp_curve,
    rdp_to_dp,
    subsampled_laplace_rdp,
)


def params(gamma, lam, queries, delta):
    return PrivacyParams(gamma=gamma, lambda_=lam, num_queries=queries, delta=delta)


def crude_oracle(gamma, lam, queries, delta):
    inner = (2.0 / 3.0) * math.exp(lam) + (1.0 / 3.0) * math.exp(-2.0 * lam) - 1.0
    return math.log(1.0 / math.sqrt(delta)) + queries * math.log(1.0 + gamma ** 2 * inner)


class TestLaplaceRdp:
    def test_reference_value(self):
        assert laplace_rdp(2, 10.0) == pytest.approx(0.00965, abs=1e-4)
        assert laplace_rdp(2, 10.0) == pytest.approx(math.log((2 / 3) * math.exp(0.1) + (1 / 3) * math.exp(-0.2)), rel=1e-12)

    def test_huge_noise_tends_to_zero(self):
        assert 0.0 <= laplace_rdp(2, 1e9) <= 1e-8

    def test_large_order_recovers_pure_dp(self):
        assert laplace_rdp(1e6, 1.0) == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 5.0, 10.0])
    def test_non_decreasing_in_order(self, beta):
        values = np.array([laplace_rdp(a, beta) for a in range(2, 65)])
        assert (values >= 0).all()
        assert (np.diff(values) >= 0).all()

    def test_sensitivity_rescales_noise(self):
        assert laplace_rdp(3, 10.0, sensitivity=2.0) == pytest.approx(laplace_rdp(3, 5.0), rel=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (0.5, 1.0), (2, 0.0), (2, -1.0)])
    def test_domain_errors(self, alpha, beta):
        with pytest.raises(ValueError):
            laplace_rdp(alpha, beta)


class TestSubsampledRdp:
    def test_zero_sampling_is_exactly_zero(self):
        for alpha in range(2, 33):
            assert subsampled_laplace_rdp(alpha, 0.0, 10.0) == 0.0

    @pytest.mark.parametrize("beta", [0.5, 1.0, 10.0])
    def test_full_sampling_order_two_equals_unsubsampled(self, beta):
        assert subsampled_laplace_rdp(2, 1.0, beta) == laplace_rdp(2, beta)

    @pytest.mark.parametrize("gamma", [0.05, 0.3, 0.7])
    @pytest.mark.parametrize("beta", [0.5, 10.0])
    def test_order_two_matches_closed_form(self, gamma, beta):
        closed = math.log(1 - gamma ** 2 + gamma ** 2 * math.exp(laplace_rdp(2, beta)))
        assert subsampled_laplace_rdp(2, gamma, beta) == pytest.approx(closed, rel=1e-12)

    def test_reference_value(self):
        assert subsampled_laplace_rdp(2, 0.3, 10.0) == pytest.approx(8.7e-4, rel=0.01)

    @pytest.mark.parametrize("alpha", [2, 3, 8, 32])
    @pytest.mark.parametrize("beta", [0.5, 1.0, 5.0, 10.0])
    def test_non_decreasing_in_gamma_and_amplified(self, alpha, beta):
        gammas = np.linspace(0.0, 1.0, 21)
        values = np.array([subsampled_laplace_rdp(alpha, g, beta) for g in gammas])
        assert (np.diff(values) >= 0).all()
        assert (values <= laplace_rdp(alpha, beta)).all()

    def test_small_gamma_is_strictly_amplified(self):
        assert subsampled_laplace_rdp(5, 0.1, 1.0) < laplace_rdp(5, 1.0)

    def test_small_noise_does_not_overflow(self):
        value = subsampled_laplace_rdp(32, 0.3, 1e-3)
        assert math.isfinite(value)

    @pytest.mark.parametrize("alpha", [1, 2.5, 0])
    def test_rejects_non_integer_orders(self, alpha):
        with pytest.raises(ValueError):
            subsampled_laplace_rdp(alpha, 0.3, 1.0)

    @pytest.mark.parametrize("gamma", [-0.1, 1.5])
    def test_rejects_bad_gamma(self, gamma):
        with pytest.raises(ValueError):
            subsampled_laplace_rdp(2, gamma, 1.0)


class TestComposition:
    def curve(self):
        return rdp_curve(lambda a: subsampled_laplace_rdp(a, 0.3, 10.0), order_grid())

    def test_identity_and_doubling(self):
        curve = self.curve()
        assert compose(curve, 1) == curve
        doubled = compose(curve, 2)
        assert all(d == 2 * e for d, e in zip(doubled.epsilons, curve.epsilons))

    def test_linearity(self):
        curve = self.curve()
        lhs = compose(curve, 7 + 11)
        rhs = combine(compose(curve, 7), compose(curve, 11))
        assert lhs.epsilons == pytest.approx(rhs.epsilons, rel=1e-14)

    def test_reference_value(self):
        assert compose(self.curve(), 500).at(2) == pytest.approx(0.436, abs=2e-3)

    def test_combine_uses_shared_orders(self):
        a = RdpCurve.from_arrays([2, 3, 4], [0.1, 0.2, 0.3])
        b = RdpCurve.from_arrays([3, 4, 5], [1.0, 1.0, 1.0])
        combined = combine(a, b)
        assert combined.orders == (3, 4)
        assert combined.epsilons == pytest.approx((1.2, 1.3))

    def test_combine_without_overlap_fails(self):
        with pytest.raises(ValueError):
            combine(RdpCurve.from_arrays([2], [0.1]), RdpCurve.from_arrays([3], [0.1]))

    def test_curve_validation(self):
        with pytest.raises(ValueError):
            RdpCurve.from_arrays([3, 2], [0.1, 0.2])
        with pytest.raises(ValueError):
            RdpCurve.from_arrays([2], [-1.0])
        with pytest.raises(ValueError):
            RdpCurve.from_arrays([2], [float('inf')])


class TestConversion:
    def test_single_point(self):
        curve = RdpCurve.from_arrays([2], [0.0])
        result = rdp_to_dp(curve, math.exp(-1))
        assert result.epsilon == pytest.approx(1.0)
        assert result.optimal_order == 2

    @pytest.mark.parametrize("form", [ConversionForm.STANDARD, ConversionForm.SHIFTED])
    def test_zero_curve(self, form):
        delta = 1e-4
        curve = RdpCurve.from_arrays(order_grid(), [0.0] * 31)
        result = rdp_to_dp(curve, delta, form)
        assert result.epsilon == math.log(1.0 / delta) / 31
        assert result.optimal_order == 32
        assert result.epsilon == pytest.approx(0.297, abs=1e-3)

    @pytest.mark.parametrize("form", [ConversionForm.STANDARD, ConversionForm.SHIFTED])
    def test_minimum_over_grid(self, form):
        curve = privgnn_rdp_curve(params(0.3, 0.1, 500, 1e-4))
        result = rdp_to_dp(curve, 1e-4, form)
        table = budget_table(curve, 1e-4, form)
        assert result.epsilon == table['converted_eps'].min()
        assert (result.epsilon <= table['converted_eps'].dropna()).all()
        assert result.optimal_order in curve.orders
        assert list(table.columns) == ['alpha', 'rdp_eps', 'converted_eps']

    def test_shifted_needs_consecutive_orders(self):
        with pytest.raises(ValueError):
            rdp_to_dp(RdpCurve.from_arrays([2, 4], [0.1, 0.2]), 1e-5, ConversionForm.SHIFTED)

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.5])
    def test_rejects_bad_delta(self, delta):
        with pytest.raises(ValueError):
            rdp_to_dp(RdpCurve.from_arrays([2], [0.1]), delta)

    def test_delta_roundtrip_is_consistent(self):
        curve = privgnn_rdp_curve(params(0.3, 0.2, 500, 1e-5))
        guarantee = rdp_to_dp(curve, 1e-5)
        assert dp_to_delta(curve, guarantee.epsilon) == pytest.approx(1e-5, rel=1e-9)
        assert dp_to_delta(curve, 0.0) == 1.0


class TestPrivGnnBudget:
    def test_crude_reference_value(self):
        p = params(0.3, 0.1, 500, 1e-4)
        assert crude_epsilon(p) == pytest.approx(crude_oracle(0.3, 0.1, 500, 1e-4), rel=1e-9)
        assert crude_epsilon(p) == pytest.approx(5.04, abs=0.01)

    def test_crude_matches_oracle_on_random_tuples(self):
        rng = np.random.default_rng(2024)
        for _ in range(20):
            gamma = float(rng.uniform(0.0, 1.0))
            lam = float(rng.uniform(0.05, 5.0))
            queries = int(rng.integers(1, 2000))
            delta = float(10 ** rng.uniform(-8, -2))
            _, crude = privgnn_budget(params(gamma, lam, queries, delta))
            assert crude == pytest.approx(crude_oracle(gamma, lam, queries, delta), rel=1e-9)

    def test_zero_queries(self):
        tight, crude = privgnn_budget(params(0.3, 0.7, 0, 1e-4))
        assert crude == pytest.approx(math.log(1 / math.sqrt(1e-4)))
        assert tight.epsilon == pytest.approx(math.log(1e4) / 31)
        assert tight.optimal_order == 32

    def test_ordering_and_monotonicity_grid(self):
        lambdas = [0.1, 0.2, 0.4, 0.8, 1.0]
        for delta in (1e-4, 1e-5):
            eps = {}
            for gamma in (0.1, 0.3):
                for queries in (500, 1000):
                    for lam in lambdas:
                        tight, crude = privgnn_budget(params(gamma, lam, queries, delta))
                        assert tight.epsilon <= crude + 1e-12
                        eps[(gamma, queries, lam)] = tight.epsilon
            for gamma in (0.1, 0.3):
                for queries in (500, 1000):
                    row = [eps[(gamma, queries, lam)] for lam in lambdas]
                    assert all(a < b for a, b in zip(row, row[1:]))
            for lam in lambdas:
                for gamma in (0.1, 0.3):
                    assert eps[(gamma, 500, lam)] < eps[(gamma, 1000, lam)]
                for queries in (500, 1000):
                    assert eps[(0.1, queries, lam)] < eps[(0.3, queries, lam)]

    def test_standard_form_is_reported_as_alternative(self):
        figures = describe_budget(params(0.3, 1.0, 500, 1e-5))
        standard, _ = privgnn_budget(params(0.3, 1.0, 500, 1e-5), form=ConversionForm.STANDARD)
        assert figures['alternative_epsilon'] == standard.epsilon
        assert figures['pure_dp_epsilon'] == pytest.approx(500.0)

    def test_delta_warning(self, caplog):
        p = params(0.3, 1.0, 10, 0.01)
        assert p.check_delta(1000) is True
        assert p.check_delta(50) is False
        assert "not below" in caplog.text


class TestPateBudget:
    def test_reference_value(self):
        result = pate_budget(0.1, 500, 1e-4)
        assert result.epsilon == pytest.approx(27.7, abs=0.05)
        assert result.optimal_order == 2

    def test_vanishing_lambda(self):
        result = pate_budget(1e-9, 500, 1e-4)
        assert result.epsilon == pytest.approx(math.log(1e4) / 31, rel=1e-6)

    def test_single_query_with_delta_near_one(self):
        result = pate_budget(0.1, 1, 1 - 1e-12)
        assert result.epsilon == pytest.approx(laplace_rdp(2, 10.0, sensitivity=2.0), rel=1e-6)

    def test_pate_exceeds_privgnn_at_equal_noise(self):
        pate = pate_budget(0.2, 1000, 1e-4)
        tight, _ = privgnn_budget(params(0.3, 0.2, 1000, 1e-4))
        assert pate.epsilon > tight.epsilon


def test_pure_dp_epsilon():
    assert pure_dp_epsilon(500, 10.0) == 50.0
    with pytest.raises(ValueError):
        pure_dp_epsilon(10, 0.0)
