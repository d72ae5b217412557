"""
Tests des métriques d'erreur et de la condition de variation
"""

import math

import numpy as np
import pytest

from btl_spectral.bench.metrics import (
    check_variation_condition,
    fit_loglog_slope,
    kendall_tau,
    rel_l2_error,
    rel_linf_error,
    theoretical_rate,
    variation_angle,
)
from btl_spectral.core.errors import LengthMismatch
from btl_spectral.core.graphs import SamplingPlan, SbmSpec
from btl_spectral.core.model import generate_scores


class TestRelativeErrors:

    def test_zero_for_exact_estimate(self):
        pi = np.array([0.1, 0.3, 0.6])
        assert rel_linf_error(pi, pi) == 0.0
        assert rel_l2_error(pi, pi) == 0.0

    def test_two_items(self):
        assert rel_linf_error([0.6, 0.4], [0.5, 0.5]) == pytest.approx(0.2)
        assert rel_l2_error([0.6, 0.4], [0.5, 0.5]) == pytest.approx(0.2)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            rel_linf_error([0.5, 0.5], [0.2, 0.3, 0.5])
        with pytest.raises(LengthMismatch):
            rel_l2_error([0.5, 0.5], [0.2, 0.3, 0.5])

    def test_zero_reference(self):
        with pytest.raises(ValueError):
            rel_linf_error([0.5, 0.5], [0.0, 0.0])

    def test_norm_relation(self):
        rng = np.random.default_rng(6)
        for seed in range(100):
            n = int(rng.integers(2, 60))
            model = generate_scores(n, float(rng.uniform(1, 10)), seed)
            pi_hat = rng.random(n)
            pi_hat /= pi_hat.sum()
            assert rel_l2_error(pi_hat, model.pi) <= math.sqrt(n) * model.h * rel_linf_error(pi_hat, model.pi) + 1e-12

    def test_kendall_tau(self):
        assert kendall_tau([0.1, 0.2, 0.7], [0.2, 0.3, 0.5]) == pytest.approx(1.0)
        assert kendall_tau([0.7, 0.2, 0.1], [0.2, 0.3, 0.5]) == pytest.approx(-1.0)


class TestVariationCondition:

    def test_uniform_plan(self):
        for n in (2, 5, 40):
            holds, worst = check_variation_condition(SamplingPlan.uniform(n, 0.3), 2.0)
            assert holds
            assert worst == pytest.approx(n / (n - 1))

    def test_one_hot_rows(self):
        n = 8
        q = np.zeros((n, n))
        for i in range(0, n, 2):
            q[i, i + 1] = q[i + 1, i] = 1.0
        plan = SamplingPlan(n=n, base_p=0.0, q=q)
        holds, worst = check_variation_condition(plan, n - 0.5)
        assert not holds
        assert worst == pytest.approx(n)
        assert check_variation_condition(plan, n)[0]

    def test_empty_row_fails(self):
        holds, worst = check_variation_condition(SamplingPlan.uniform(4, 0.0), 100.0)
        assert not holds and math.isinf(worst)

    @pytest.mark.parametrize('m', [2, 3, 4])
    @pytest.mark.parametrize('n', [24, 48, 96])
    def test_sbm_holds_at_two_m(self, m, n):
        spec = SbmSpec.assortative(n, m, 0.05, np.linspace(0.3, 0.9, m))
        holds, _ = check_variation_condition(spec.to_plan(), 2 * m)
        assert holds

    def test_requires_s_above_one(self):
        with pytest.raises(ValueError):
            check_variation_condition(SamplingPlan.uniform(4, 0.5), 1.0)

    def test_angles(self):
        np.testing.assert_allclose(variation_angle(SamplingPlan.uniform(10, 0.4)),
                                   math.acos(math.sqrt(9 / 10)), atol=1e-12)


class TestScaling:

    def test_theoretical_rate(self):
        assert theoretical_rate(100, 0.2, 16) == pytest.approx(math.sqrt(math.log(100) / 320))

    def test_slope_of_power_law(self):
        k = np.array([16, 64, 256])
        assert fit_loglog_slope(k, 3.0 * k ** -0.5) == pytest.approx(-0.5)

    def test_slope_errors(self):
        with pytest.raises(LengthMismatch):
            fit_loglog_slope([1, 2], [1.0])
        with pytest.raises(ValueError):
            fit_loglog_slope([1], [1.0])
        with pytest.raises(ValueError):
            fit_loglog_slope([1, 2], [1.0, 0.0])
