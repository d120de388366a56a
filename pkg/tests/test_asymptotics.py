import math

import numpy as np
import pytest

from axioquad import (
    AsymmetryError,
    Function,
    HSchedule,
    InsufficientDataError,
    PreconditionError,
    check_increment_theorem,
    chord_model,
    differentiate,
    estimate_limit,
    evaluate,
    extract_coefficient,
    fit_order,
    is_little_o,
    parse,
    rectangle_model,
    shell_model,
)

POSITIVE = HSchedule(side="positive")


class TestEstimateLimit:
    def test_linear_vanishing(self):
        est = estimate_limit(lambda h: h)
        assert est.converged
        assert est.value == 0.0
        assert est.residual == 0.0

    def test_sinc_against_series_oracle(self):
        # Oracle: 1 - h^2/6 + h^4/120 - h^6/5040 at the scheduled steps.
        est = estimate_limit(lambda h: math.sin(h) / h)
        for h, g in est.samples:
            series = 1.0 - h**2 / 6.0 + h**4 / 120.0 - h**6 / 5040.0
            assert abs(g - series) < 1e-12
        assert est.converged
        assert abs(est.value - 1.0) <= 1e-9

    def test_divergent_case(self):
        # 1/h never settles; either verdict in the contract is acceptable,
        # and this implementation reports insufficient usable samples.
        with pytest.raises(InsufficientDataError):
            estimate_limit(lambda h: 1.0 / h)

    def test_samples_in_decreasing_magnitude(self):
        est = estimate_limit(lambda h: h * h, HSchedule(count=6))
        magnitudes = [abs(h) for h, _ in est.samples]
        # Both signs share each magnitude; within a sign they strictly drop.
        positives = [h for h, _ in est.samples if h > 0]
        negatives = [h for h, _ in est.samples if h < 0]
        assert positives == sorted(positives, reverse=True)
        assert negatives == sorted(negatives)
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_two_sided_disagreement_bounds_residual(self):
        est = estimate_limit(lambda h: math.copysign(1.0, h))
        assert not est.converged
        assert est.residual == pytest.approx(2.0, abs=1e-12)
        assert est.value == pytest.approx(0.0, abs=1e-12)

    def test_invariance_under_schedule_changes(self):
        g = lambda h: math.expm1(h) / h  # limit 1, generic O(h) error
        base = estimate_limit(g)
        halved = estimate_limit(g, HSchedule(h0=0.0625))
        coarse = estimate_limit(g, HSchedule(ratio=0.25, count=20))
        tolerance = 2.0 * max(base.residual, halved.residual, coarse.residual, 1e-15)
        assert abs(base.value - halved.value) <= tolerance
        assert abs(base.value - coarse.value) <= tolerance

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientDataError):
            estimate_limit(lambda h: h, HSchedule(count=3))

    def test_schedule_validation(self):
        with pytest.raises(PreconditionError):
            HSchedule(h0=-1.0)
        with pytest.raises(PreconditionError):
            HSchedule(ratio=1.5)
        with pytest.raises(PreconditionError):
            HSchedule(side="up")


class TestFitOrder:
    def test_quadratic(self):
        fit = fit_order(lambda h: h * h, POSITIVE)
        assert fit.slope == pytest.approx(2.0, abs=0.05)
        assert fit.r_squared > 0.999

    def test_sine_is_first_order(self):
        fit = fit_order(math.sin, POSITIVE)
        assert fit.slope == pytest.approx(1.0, abs=0.05)

    def test_power_law_with_coefficient(self):
        fit = fit_order(lambda h: 5.0 * h**3, POSITIVE)
        assert fit.slope == pytest.approx(3.0, abs=0.05)
        assert fit.intercept == pytest.approx(math.log(5.0), abs=0.05)

    @pytest.mark.parametrize("p", [1, 2, 3])
    @pytest.mark.parametrize("c", [0.1, 1.0, 50.0])
    def test_recovery_grid(self, p, c):
        fit = fit_order(lambda h: c * h**p, POSITIVE)
        assert fit.slope == pytest.approx(p, abs=0.05)
        assert fit.intercept == pytest.approx(math.log(c), abs=0.05)

    def test_exact_zero_sentinel(self):
        fit = fit_order(lambda h: 0.0, POSITIVE)
        assert fit.exact_zero
        assert math.isinf(fit.slope)
        assert fit.zeros_dropped == POSITIVE.count

    def test_window_records_steps_used(self):
        fit = fit_order(lambda h: h * h, POSITIVE)
        assert len(fit.window) >= 4
        assert all(h > 0 for h in fit.window)

    def test_sign_oscillation_fits_magnitude(self):
        fit = fit_order(lambda h: h * h * math.copysign(1.0, math.sin(1.0 / h)),
                        HSchedule(side="positive", count=20))
        assert fit.slope == pytest.approx(2.0, abs=0.05)


class TestIsLittleO:
    def test_examples(self):
        assert is_little_o(lambda h: h * h, 1).verdict is True
        assert is_little_o(math.sin, 0).verdict is True
        assert is_little_o(math.sin, 1).verdict is False

    def test_evidence_attached(self):
        decision = is_little_o(math.sin, 1)
        assert decision.evidence.converged
        assert abs(decision.evidence.value - 1.0) < 1e-9

    def test_negative_order_rejected(self):
        with pytest.raises(PreconditionError):
            is_little_o(math.sin, -1)


class TestIncrementTheorem:
    def test_quadratic_remainder_is_linear(self, fn):
        est = check_increment_theorem(fn("x^2"), 1.0)
        assert est.converged
        assert est.value == 0.0

    def test_gaussian_with_taylor_bound_oracle(self, fn):
        f = fn("exp(-x^2)")
        x = 0.5
        est = check_increment_theorem(f, x, tol=1e-6)
        # Second-derivative sup over the largest probed window bounds every
        # remainder sample: |f(x+h)-f(x)-f'(x)h| <= M2/2 h^2, up to the
        # rounding envelope of the subtraction (a few eps over h).
        second = differentiate(differentiate(f.body))
        window = np.linspace(x - 0.125, x + 0.125, 401)
        m2 = float(np.max(np.abs(evaluate(second, window))))
        eps = np.finfo(float).eps
        for h, g in est.samples:
            rounding = 6.0 * eps * (1.0 + abs(f(x))) / abs(h)
            assert abs(g) <= 0.5 * m2 * abs(h) + rounding
        assert est.converged
        assert abs(est.value) <= 1e-6

    def test_absolute_value_kink(self, fn):
        # Any finite slope supplied at the kink shifts both one-sided limits
        # equally, so the gap between them stays exactly 2.
        f = fn("abs(x)", domain=(-1.0, 1.0), derivative="0")
        est = check_increment_theorem(f, 0.0)
        assert not est.converged
        assert est.residual == pytest.approx(2.0, abs=1e-9)

    def test_boundary_point_rejected(self, fn):
        with pytest.raises(PreconditionError):
            check_increment_theorem(fn("x^2", domain=(0.0, 1.0)), 0.0)

    def test_plain_callable_needs_derivative(self):
        with pytest.raises(PreconditionError):
            check_increment_theorem(math.sin, 0.3)
        est = check_increment_theorem(math.sin, 0.3, derivative=math.cos)
        assert est.converged and abs(est.value) <= 1e-6


class TestExtractCoefficient:
    def test_rectangle_model_of_identity(self):
        f = Function.from_sources("x", (0.0, 4.0))
        result = extract_coefficient(rectangle_model(f).quantity, 2.0)
        assert result.rho == pytest.approx(2.0, abs=1e-12)
        assert result.side == "both"

    def test_chord_of_a_line(self):
        f = Function.from_sources("2*x", (-10.0, 10.0))
        result = extract_coefficient(chord_model(f).quantity, 3.0)
        assert result.rho == pytest.approx(math.sqrt(5.0), abs=1e-12)

    def test_shell_coefficient(self):
        f = Function.from_sources("1", (0.0, 3.0))
        result = extract_coefficient(shell_model(f).quantity, 1.0)
        assert result.rho == pytest.approx(2.0 * math.pi, abs=1e-6)

    def test_one_sided_fallback_near_endpoint(self):
        # The chord from x=0.05 with h=-0.125 leaves the domain of sqrt, so
        # only the positive side is usable and must be recorded.
        f = Function.from_sources("sqrt(x)", (0.0, 4.0))
        result = extract_coefficient(chord_model(f).quantity, 0.05, tol=1e-4)
        assert result.side == "positive"
        fprime = 0.5 / math.sqrt(0.05)
        assert result.rho == pytest.approx(math.sqrt(1.0 + fprime**2), abs=1e-4)

    def test_asymmetry_detected(self):
        def lopsided(x, h):
            return abs(h) if h > 0 else 2.0 * abs(h)

        with pytest.raises(AsymmetryError):
            extract_coefficient(lopsided, 0.0)


class TestLittleOAlgebra:
    """Sum, product, and absolute-value closure of the vanishing classes.

    The slowly-vanishing factor u(h) = sqrt(h) needs a one-sided schedule
    and, for the sum rule, extra depth: the quotient decays like sqrt(h),
    so forty steps still move by more than the tolerance per step.
    """

    DEEP = HSchedule(side="positive", count=70)

    @pytest.mark.parametrize("m, n", [(1, 1), (1, 2), (2, 3)])
    def test_sum_rule(self, m, n):
        g1 = lambda h: h**m * math.sqrt(h)
        g2 = lambda h: h**n * math.sqrt(h)
        k = min(m, n)
        assert is_little_o(lambda h: g1(h) + g2(h), k, self.DEEP).verdict
        assert is_little_o(lambda h: g1(h) - g2(h), k, self.DEEP).verdict

    @pytest.mark.parametrize("m, n", [(1, 1), (1, 2), (2, 3)])
    def test_product_rule(self, m, n):
        g1 = lambda h: h**m * math.sqrt(h)
        g2 = lambda h: h**n * math.sqrt(h)
        assert is_little_o(lambda h: g1(h) * g2(h), m + n, POSITIVE).verdict

    @pytest.mark.parametrize("a", [-3.0, 0.0, 2.5])
    @pytest.mark.parametrize("n", [1, 2])
    def test_absolute_value_rule(self, a, n):
        # |a + g| - |a| is quantized at ulp(|a|), so pick the family member
        # g = h^(n+1) sqrt(h): still o(h^n), but its quotient decays like
        # h^1.5 and reaches the tolerance before the quantization floor.
        g = lambda h: h ** (n + 1) * math.sqrt(h)
        shifted = lambda h: abs(a + g(h)) - abs(a)
        assert is_little_o(shifted, n, POSITIVE).verdict
