"""Numerical limits as the step size shrinks: estimation, order fitting,
little-o decisions, increment-theorem checks, and first-order coefficient
extraction from local quantities.

All estimators share the same sampling discipline: evaluate on a geometric
step schedule, cut off the trailing samples once floating-point
cancellation takes over (the "clean window"), and Richardson-extrapolate
assuming a leading error term proportional to the step.  The spread of the
extrapolants over the window is reported as the residual, so a small
residual is evidence, not hope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetryError,
    DomainError,
    EvaluationError,
    InsufficientDataError,
    PreconditionError,
)
from .expr import Function, differentiate, evaluate

__all__ = [
    "HSchedule",
    "DEFAULT_SCHEDULE",
    "LimitEstimate",
    "OrderFit",
    "LittleODecision",
    "CoefficientExtraction",
    "DEFAULT_LIMIT_TOL",
    "estimate_limit",
    "fit_order",
    "is_little_o",
    "check_increment_theorem",
    "extract_coefficient",
]

DEFAULT_LIMIT_TOL = 1e-6

# Extrapolation uses the last WINDOW_POINTS samples of the clean window.
WINDOW_POINTS = 6
MIN_USABLE_SAMPLES = 4

SIDES = ("positive", "negative", "both")


@dataclass(frozen=True)
class HSchedule:
    """Geometric shrinking-step schedule ``h0 * ratio**k``.

    The default spans from 2**-3 down to about 2**-42, roughly twelve
    decades, which is as far as double precision supports before
    cancellation dominates smooth quantities.
    """

    h0: float = 0.125
    ratio: float = 0.5
    count: int = 40
    side: str = "both"

    def __post_init__(self):
        if not (self.h0 > 0 and math.isfinite(self.h0)):
            raise PreconditionError("h0 must be positive and finite", field="h0")
        if not 0 < self.ratio < 1:
            raise PreconditionError("ratio must lie in (0, 1)", field="ratio")
        if self.count < 1:
            raise PreconditionError("count must be a positive integer", field="count")
        if self.side not in SIDES:
            raise PreconditionError(f"side must be one of {SIDES}", field="side")

    def steps(self, sign: int = 1) -> list[float]:
        """Signed steps in strictly decreasing magnitude."""
        return [sign * self.h0 * self.ratio**k for k in range(self.count)]

    def sides(self) -> tuple[int, ...]:
        if self.side == "positive":
            return (1,)
        if self.side == "negative":
            return (-1,)
        return (1, -1)


DEFAULT_SCHEDULE = HSchedule()


@dataclass(frozen=True)
class LimitEstimate:
    """Result of a numerical limit extraction.

    ``residual`` bounds the spread of the extrapolants over the clean
    window and, for two-sided estimates, additionally the disagreement of
    the one-sided limits.  ``samples`` holds the raw ``(h, g(h))`` pairs in
    decreasing step magnitude (positive step first when both signs share a
    magnitude).  ``noise_floor_hit`` reports whether trailing samples were
    discarded as cancellation noise.
    """

    value: float
    residual: float
    samples: tuple[tuple[float, float], ...]
    converged: bool
    noise_floor_hit: bool


@dataclass(frozen=True)
class OrderFit:
    """Least-squares exponent fit ``g(h) ~ C * h**slope`` on log-log axes.

    ``intercept`` estimates ``log|C|`` (natural log).  ``window`` lists the
    steps that entered the fit after zero samples were dropped
    (``zeros_dropped`` of them) and the noisy tail was cut.  An input that
    is identically zero is reported with ``exact_zero=True`` and an
    infinite slope sentinel rather than fitted.
    """

    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, ...]
    zeros_dropped: int = 0
    exact_zero: bool = False


@dataclass(frozen=True)
class LittleODecision:
    verdict: bool
    evidence: LimitEstimate


@dataclass(frozen=True)
class CoefficientExtraction:
    """First-order coefficient of a local quantity, with its evidence."""

    rho: float
    evidence: LimitEstimate
    side: str


def _sample(g, steps):
    """Evaluate ``g`` on the schedule, insisting on finite values."""
    values = []
    for h in steps:
        value = g(h)
        if not math.isfinite(value):
            raise EvaluationError(f"g({h!r}) is not finite", h=h)
        values.append(float(value))
    return values


NOISE_FLOOR_ULPS = 64.0
_EPS = float(np.finfo(float).eps)


def _clean_prefix(values):
    """Number of leading samples to keep, and whether noise was detected.

    A sample is considered polluted once the forward differences of the
    sequence stop decreasing *and* the offending difference sits above the
    rounding floor of the values themselves (64 machine epsilons of the
    local scale).  For a quantity with a leading error term in h the
    differences shrink geometrically, so the first genuine non-decrease
    marks the crossover where cancellation noise or outright divergence
    takes over; ulp-level wobble around an already-converged value stays
    in the window.  The noise-floor flag distinguishes noise from
    divergence: it is set only when the differences had already fallen
    below their initial size, i.e. real progress was made before the
    crossover.
    """
    m = len(values)
    diffs = [abs(values[k + 1] - values[k]) for k in range(m - 1)]
    for k in range(1, len(diffs)):
        floor = NOISE_FLOOR_ULPS * _EPS * (1.0 + abs(values[k + 1]))
        if diffs[k] > floor and diffs[k] >= diffs[k - 1]:
            return k + 1, diffs[k] < diffs[0]
    return m, False


def _extrapolate(hs, values, ratio):
    """Richardson step eliminating a C*h error term, plus the spread."""
    window_h = hs[-WINDOW_POINTS:]
    window_g = values[-WINDOW_POINTS:]
    extrapolants = [
        (window_g[j + 1] - ratio * window_g[j]) / (1.0 - ratio)
        for j in range(len(window_g) - 1)
    ]
    value = extrapolants[-1]
    residual = max(extrapolants) - min(extrapolants)
    return value, residual


def _one_sided(g, schedule: HSchedule, sign: int):
    steps = schedule.steps(sign)
    values = _sample(g, steps)
    keep, noise_hit = _clean_prefix(values)
    if keep < MIN_USABLE_SAMPLES:
        raise InsufficientDataError(
            f"only {keep} usable samples before the noise/divergence crossover; "
            "need at least 4 (shrink h0 or supply a smoother quantity)")
    value, residual = _extrapolate(steps[:keep], values[:keep], schedule.ratio)
    samples = list(zip(steps, values))
    return value, residual, samples, noise_hit


def _merge_samples(positive, negative):
    merged = []
    for p, n in zip(positive, negative):
        merged.append(p)
        merged.append(n)
    return tuple(merged)


def estimate_limit(g, schedule: HSchedule = DEFAULT_SCHEDULE,
                   tol: float = DEFAULT_LIMIT_TOL) -> LimitEstimate:
    """Estimate ``lim_{h -> 0} g(h)`` over a shrinking schedule.

    For a two-sided schedule the value is the mean of the one-sided limits
    and the residual additionally bounds their disagreement.  Raises
    :class:`EvaluationError` if ``g`` returns a non-finite value and
    :class:`InsufficientDataError` if fewer than four samples survive the
    noise cut; domain errors from ``g`` propagate unchanged.
    """
    if schedule.side == "both":
        vp, rp, sp, np_hit = _one_sided(g, schedule, 1)
        vn, rn, sn, nn_hit = _one_sided(g, schedule, -1)
        value = 0.5 * (vp + vn)
        residual = max(rp, rn, abs(vp - vn))
        samples = _merge_samples(sp, sn)
        noise_hit = np_hit or nn_hit
    else:
        sign = 1 if schedule.side == "positive" else -1
        value, residual, samples, noise_hit = _one_sided(g, schedule, sign)
        samples = tuple(samples)
    return LimitEstimate(
        value=value,
        residual=residual,
        samples=samples,
        converged=residual <= tol,
        noise_floor_hit=noise_hit,
    )


def fit_order(g, schedule: HSchedule = DEFAULT_SCHEDULE) -> OrderFit:
    """Fit the asymptotic order of ``g`` by ordinary least squares of
    ``log|g(h)|`` against ``log|h|`` over the clean window.

    Zero samples are excluded (their count is recorded); an identically
    zero input is reported as an exact zero with an infinite slope
    sentinel, which is a stronger verdict than any finite fit.
    """
    window_h: list[float] = []
    window_g: list[float] = []
    zeros = 0
    for sign in schedule.sides():
        steps = schedule.steps(sign)
        values = _sample(g, steps)
        keep, _ = _clean_prefix(values)
        for h, v in zip(steps[:keep], values[:keep]):
            if v == 0.0:
                zeros += 1
            else:
                window_h.append(h)
                window_g.append(v)
    if not window_h:
        return OrderFit(slope=math.inf, intercept=math.nan, r_squared=1.0,
                        window=(), zeros_dropped=zeros, exact_zero=True)
    if len(window_h) < 4:
        raise InsufficientDataError(
            f"only {len(window_h)} non-zero samples; need at least 4 for an order fit")
    logs_h = np.log(np.abs(np.array(window_h)))
    logs_g = np.log(np.abs(np.array(window_g)))
    slope, intercept = np.polyfit(logs_h, logs_g, 1)
    fitted = slope * logs_h + intercept
    ss_res = float(np.sum((logs_g - fitted) ** 2))
    ss_tot = float(np.sum((logs_g - logs_g.mean()) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return OrderFit(slope=float(slope), intercept=float(intercept),
                    r_squared=r_squared, window=tuple(window_h),
                    zeros_dropped=zeros)


def is_little_o(g, n: int, schedule: HSchedule = DEFAULT_SCHEDULE,
                tol: float = DEFAULT_LIMIT_TOL) -> LittleODecision:
    """Decide whether ``g(h)`` vanishes faster than ``h**n`` as h -> 0.

    True exactly when the limit of ``g(h)/h**n`` converged to within
    ``tol`` of zero.
    """
    if n < 0:
        raise PreconditionError("order n must be a non-negative integer", field="n")
    evidence = estimate_limit(lambda h: g(h) / h**n, schedule, tol)
    verdict = evidence.converged and abs(evidence.value) <= tol
    return LittleODecision(verdict=verdict, evidence=evidence)


def check_increment_theorem(f, x: float, schedule: HSchedule = DEFAULT_SCHEDULE,
                            tol: float = DEFAULT_LIMIT_TOL,
                            derivative=None) -> LimitEstimate:
    """Test differentiability at ``x`` through the remainder quotient
    ``(f(x+h) - f(x) - f'(x) h) / h``.

    Convergence to zero certifies that the increment is the differential
    plus a term vanishing faster than h.  ``f`` is either a
    :class:`Function` (whose stored or symbolic derivative supplies f')
    or a plain callable, in which case ``derivative`` must be given as a
    callable.  At a point where the two one-sided limits disagree the
    estimate comes back non-converged with the gap in its residual.
    """
    if isinstance(f, Function):
        a, b = f.domain
        if not a < x < b:
            raise PreconditionError(
                f"x={x} must be interior to the domain [{a}, {b}]", field="x")
        fprime = evaluate(f.derivative_expression(), x)
        fx = f(x)
        body = f
    else:
        if derivative is None:
            raise PreconditionError(
                "a derivative callable is required when f is not a Function",
                field="derivative")
        fprime = float(derivative(x))
        fx = float(f(x))
        body = f

    def remainder_quotient(h):
        return (body(x + h) - fx - fprime * h) / h

    return estimate_limit(remainder_quotient, schedule, tol)


def extract_coefficient(Q, x: float, schedule: HSchedule = DEFAULT_SCHEDULE,
                        tol: float = DEFAULT_LIMIT_TOL) -> CoefficientExtraction:
    """Recover the coefficient in front of h of a signed local quantity.

    ``Q(x, h)`` is a nonnegative local quantity (a rectangle area, a chord
    length, a shell volume).  The limit of ``Q(x, h)/h`` is taken with the
    orientation convention of additive local models: for negative h the
    quantity enters with a minus sign, so both sides estimate the same
    coefficient.  When both sides are available and disagree beyond
    ``tol``, an :class:`AsymmetryError` is raised: the local model is not
    differentiably additive at ``x``.  Near a domain endpoint the available
    side is used and recorded in the result.
    """

    def g(h):
        q = Q(x, h)
        return q / h if h > 0 else -q / h

    sides = {}
    errors = {}
    for sign in schedule.sides():
        label = "positive" if sign > 0 else "negative"
        try:
            sides[label] = _one_sided(g, schedule, sign)
        except DomainError as exc:
            errors[label] = exc
    if not sides:
        raise next(iter(errors.values()))

    if len(sides) == 2:
        vp, rp, sp, np_hit = sides["positive"]
        vn, rn, sn, nn_hit = sides["negative"]
        if abs(vp - vn) > tol:
            raise AsymmetryError(
                f"one-sided coefficients at x={x} disagree: "
                f"{vp!r} (h>0) vs {vn!r} (h<0)", x, vp, vn)
        value = 0.5 * (vp + vn)
        residual = max(rp, rn, abs(vp - vn))
        samples = _merge_samples(sp, sn)
        noise_hit = np_hit or nn_hit
        side = "both"
    else:
        side, (value, residual, samples, noise_hit) = next(iter(sides.items()))
        samples = tuple(samples)
    evidence = LimitEstimate(value=value, residual=residual, samples=samples,
                             converged=residual <= tol, noise_floor_hit=noise_hit)
    return CoefficientExtraction(rho=value, evidence=evidence, side=side)
