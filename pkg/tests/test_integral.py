import math

import numpy as np
import pytest

from axioquad import (
    BadAntiderivativeError,
    CandidateIntegral,
    DomainError,
    Function,
    HSchedule,
    PreconditionError,
    VerificationError,
    check_increment_theorem,
    darboux_candidate,
    evaluate,
    integrate,
    uniqueness_crosscheck,
    verify_additivity,
    verify_asymptotic,
)

from conftest import maclaurin_exp_neg_square


class TestIntegrate:
    def test_ftc_path_identity(self, fn):
        f = fn("x", domain=(-1.0, 2.0), antiderivative="x^2/2")
        result = integrate(f, 0.0, 1.0)
        assert result.method == "ftc"
        assert result.value == 0.5
        assert result.bracket is None
        assert result.error_bound == 4 * np.spacing(0.5)

    def test_ftc_path_cosine(self, fn):
        f = fn("cos(x)", domain=(0.0, 2.0), antiderivative="sin(x)")
        result = integrate(f, 0.0, math.pi / 2)
        assert result.method == "ftc"
        assert result.value == 1.0

    def test_darboux_fallback_gaussian(self, fn):
        oracle = maclaurin_exp_neg_square(1.0)
        result = integrate(fn("exp(-x^2)", domain=(0.0, 1.0)), 0.0, 1.0, 1e-6)
        assert result.method == "darboux"
        assert abs(result.value - oracle) <= 1e-6

    def test_bad_antiderivative_rejected(self, fn):
        f = fn("x", domain=(0.0, 1.0), antiderivative="x^2")
        with pytest.raises(BadAntiderivativeError):
            integrate(f, 0.0, 1.0)

    def test_orientation_conventions_shared(self, fn):
        with_r = fn("x", domain=(0.0, 1.0), antiderivative="x^2/2")
        without = fn("x", domain=(0.0, 1.0))
        assert integrate(with_r, 1.0, 0.0).value == -0.5
        assert integrate(with_r, 0.3, 0.3).value == 0.0
        assert integrate(without, 0.3, 0.3).value == 0.0
        forward = integrate(without, 0.0, 1.0, 1e-5).value
        assert integrate(without, 1.0, 0.0, 1e-5).value == -forward

    def test_interval_must_fit_domain(self, fn):
        with pytest.raises(PreconditionError):
            integrate(fn("x", domain=(0.0, 1.0)), 0.0, 1.5)


class TestVerifyAdditivity:
    def test_length_functional_passes(self):
        candidate = CandidateIntegral(lambda x, y: y - x, "length")
        report = verify_additivity(candidate, 0.0, 1.0, trials=100, seed=42, tol=1e-5)
        assert report.passed
        assert report.max_residual <= 1e-12
        assert report.axiom == "additivity"
        assert len(report.trials) == 102

    def test_deterministic_sites_always_included(self):
        candidate = CandidateIntegral(lambda x, y: y - x, "length")
        report = verify_additivity(candidate, 0.0, 2.0, trials=1, seed=1, tol=1e-5)
        assert report.trials[0].site == (0.0, 0.0, 2.0)
        assert report.trials[1].site == (0.0, 2.0, 2.0)

    def test_squared_length_fails(self):
        candidate = CandidateIntegral(lambda x, y: (y - x) ** 2, "planted counterexample")
        report = verify_additivity(candidate, 0.0, 2.0, trials=200, seed=42, tol=1e-5)
        assert not report.passed
        assert report.max_residual > 0.01

    def test_seed_reproducibility(self):
        candidate = CandidateIntegral(lambda x, y: y - x, "length")
        first = verify_additivity(candidate, 0.0, 1.0, trials=25, seed=7, tol=1e-5)
        second = verify_additivity(candidate, 0.0, 1.0, trials=25, seed=7, tol=1e-5)
        assert [t.site for t in first.trials] == [t.site for t in second.trials]
        third = verify_additivity(candidate, 0.0, 1.0, trials=25, seed=8, tol=1e-5)
        assert [t.site for t in first.trials] != [t.site for t in third.trials]

    def test_darboux_candidate_passes_within_bracket_arithmetic(self, fn):
        # Each of the three integral evaluations is accurate to its bracket
        # half-width, so residuals stay within 3 eps.
        eps = 1e-8
        candidate = darboux_candidate(fn("exp(-x^2)", domain=(0.0, 0.1)), eps)
        report = verify_additivity(candidate, 0.0, 0.1, trials=10, seed=42, tol=1e-5)
        assert report.passed
        assert report.max_residual <= 3 * eps

    def test_too_many_failures_is_report_error(self):
        def flaky(x, y):
            if y < x:
                raise DomainError("backwards interval refused")
            return y - x

        with pytest.raises(VerificationError):
            verify_additivity(CandidateIntegral(flaky, "flaky"), 0.0, 1.0,
                              trials=100, seed=42, tol=1e-5)


class TestVerifyAsymptotic:
    def test_exact_antiderivative_pair(self, fn):
        candidate = CandidateIntegral(lambda x, y: math.sin(y) - math.sin(x), "sin diff")
        rho = fn("cos(x)", domain=(0.0, 2.0))
        report = verify_asymptotic(candidate, rho, [0.5, 1.0, 1.5], tol=1e-4)
        assert report.passed
        assert report.axiom == "asymptotic"

    def test_wrong_density_fails_with_unit_limit(self, fn):
        candidate = CandidateIntegral(lambda x, y: y - x, "length")
        rho = fn("0", domain=(0.0, 2.0))
        report = verify_asymptotic(candidate, rho, [0.5, 1.5], tol=1e-4)
        assert not report.passed
        for trial in report.trials:
            assert trial.residual == pytest.approx(1.0, abs=1e-6)

    def test_darboux_candidate_passes(self, fn):
        rho = fn("x^2", domain=(0.0, 1.0))
        candidate = darboux_candidate(rho, 1e-7)
        report = verify_asymptotic(candidate, rho, [0.25, 0.5, 0.75], tol=1e-4)
        assert report.passed

    def test_endpoint_uses_available_side(self, fn):
        rho = fn("cos(x)", domain=(0.0, 2.0))
        candidate = CandidateIntegral(lambda x, y: math.sin(y) - math.sin(x), "sin diff")
        report = verify_asymptotic(candidate, rho, [0.0, 2.0], tol=1e-4)
        assert report.passed

    def test_nonconvergence_recorded_not_raised(self, fn):
        # A candidate with a kink at the probe point: one-sided limits split.
        candidate = CandidateIntegral(lambda x, y: abs(y) - abs(x), "abs diff")
        rho = fn("0", domain=(-1.0, 1.0))
        report = verify_asymptotic(candidate, rho, [0.0], tol=1e-4)
        assert not report.passed
        assert report.trials[0].error is None
        assert report.trials[0].residual >= 1.0


class TestUniquenessCrosscheck:
    def test_identity(self, fn):
        f = fn("x", domain=(0.0, 1.0), antiderivative="x^2/2")
        check = uniqueness_crosscheck(f, 0.0, 1.0, 1e-6)
        assert check.discrepancy <= 1e-6 + 4 * np.spacing(0.5)

    def test_cosine(self, fn):
        f = fn("cos(x)", domain=(0.0, 1.0), antiderivative="sin(x)")
        check = uniqueness_crosscheck(f, 0.0, 0.8, 1e-6)
        assert check.discrepancy <= 1e-6 + 4 * np.spacing(1.0)

    def test_arctangent_anchor(self, fn):
        f = fn("1/(1+x^2)", domain=(0.0, 1.0), antiderivative="atan(x)")
        check = uniqueness_crosscheck(f, 0.0, 1.0, 1e-6)
        assert check.ftc_value == pytest.approx(math.pi / 4, abs=1e-12)
        assert check.darboux_value == pytest.approx(math.pi / 4, abs=1e-6)
        assert check.discrepancy <= 1e-6

    def test_tight_eps_short_interval(self, fn):
        f = fn("1/(1+x^2)", domain=(0.0, 1.0), antiderivative="atan(x)")
        check = uniqueness_crosscheck(f, 0.0, 0.125, 1e-8)
        assert check.discrepancy <= 1e-8

    def test_requires_antiderivative(self, fn):
        with pytest.raises(PreconditionError):
            uniqueness_crosscheck(fn("x"), 0.0, 1.0, 1e-6)


class TestIntegralInvariants:
    def test_linearity(self, fn):
        eps = 1e-4
        f_int = integrate(fn("x^2", domain=(0.0, 1.0)), 0.0, 1.0, eps).value
        g_int = integrate(fn("cos(x)", domain=(0.0, 1.0)), 0.0, 1.0, eps).value
        for c1 in (-2.0, 0.5, 3.0):
            for c2 in (-2.0, 0.5, 3.0):
                combo = fn(f"{c1!r}*x^2 + {c2!r}*cos(x)", domain=(0.0, 1.0))
                combined = integrate(combo, 0.0, 1.0, eps).value
                budget = (1 + abs(c1) + abs(c2)) * 3 * eps
                assert abs(combined - (c1 * f_int + c2 * g_int)) <= budget

    def test_range_bound(self, fn):
        eps = 1e-4
        rng = np.random.default_rng(3)
        for _ in range(10):
            c0, c1, c2, c3 = (float(v) for v in rng.uniform(-2, 2, 4))
            src = f"{c0!r} + {c1!r}*x + {c2!r}*sin(x) + {c3!r}*cos(x)"
            a = float(rng.uniform(-1, 0))
            b = a + float(rng.uniform(0.3, 1.2))
            f = fn(src, domain=(a, b))
            value = integrate(f, a, b, eps).value
            grid = np.linspace(a, b, 2001)
            vals = evaluate(f.body, grid)
            assert float(np.min(vals)) * (b - a) - eps <= value
            assert value <= float(np.max(vals)) * (b - a) + eps

    def test_derivative_of_the_integral(self, fn):
        """The increment theorem applied to x -> I(a, x) recovers the
        integrand at interior points."""
        rho = fn("x^2", domain=(0.0, 0.5))
        eps = 1e-5

        def accumulated(t):
            return integrate(rho, 0.0, t, eps).value

        for x in (0.15, 0.2, 0.25, 0.3, 0.35):
            est = check_increment_theorem(
                accumulated, x, tol=1e-4,
                derivative=lambda t: evaluate(rho.body, t))
            assert est.converged, (x, est.residual)
            assert abs(est.value) <= 1e-4
