"""The axiomatic facade: evaluate definite integrals and verify the two
defining properties of an integral function.

An integral function ``I(x, y)`` is characterized by additivity
(``I(x,y) + I(y,z) = I(x,z)`` for all points) together with the local
asymptotic property (``I(x, x+h) = rho(x) h + o(h)``).  This module
evaluates integrals through whichever construction is available — an
antiderivative difference when the caller supplies one, a refined Darboux
bracket otherwise — and turns both axioms into numerical report cards
that can be run against *any* candidate bivariate function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .asymptotics import DEFAULT_SCHEDULE, HSchedule, estimate_limit
from .darboux import DEFAULT_EPS, IntegralResult, darboux_integral
from .errors import (
    AxioquadError,
    BadAntiderivativeError,
    PreconditionError,
    VerificationError,
)
from .expr import Function, differentiate, evaluate

__all__ = [
    "CandidateIntegral",
    "AxiomTrial",
    "AxiomReport",
    "UniquenessCrosscheck",
    "DEFAULT_SEED",
    "integrate",
    "darboux_candidate",
    "verify_additivity",
    "verify_asymptotic",
    "uniqueness_crosscheck",
]

DEFAULT_SEED = 42

# Residual assigned to a trial whose evaluation failed: it must sink the
# report, since an erroring candidate certifies nothing.
FAILED_TRIAL_RESIDUAL = math.inf


@dataclass(frozen=True)
class CandidateIntegral:
    """An arbitrary bivariate function proposed as an integral function.

    ``eval`` must be total on the declared square domain.  Randomized
    trials use the Philox 4x64 counter-based generator, so reports are
    reproducible from their seed alone.
    """

    eval: Callable[[float, float], float]
    description: str = ""


@dataclass(frozen=True)
class AxiomTrial:
    site: tuple[float, ...]
    residual: float
    error: str | None = None


@dataclass(frozen=True)
class AxiomReport:
    """Residual statistics from testing one axiom at sampled sites."""

    axiom: str
    trials: tuple[AxiomTrial, ...]
    max_residual: float
    tolerance: float
    passed: bool
    seed: int


@dataclass(frozen=True)
class UniquenessCrosscheck:
    """Two independent constructions of the same integral, compared."""

    ftc_value: float
    darboux_value: float
    discrepancy: float


def _spot_check_antiderivative(rho: Function, a: float, b: float):
    """Nine-point numeric comparison of the supplied antiderivative's
    derivative against the integrand, at 1e-6 relative tolerance."""
    rprime = differentiate(rho.antiderivative)
    lo, hi = min(a, b), max(a, b)
    used = 0
    for k in range(1, 10):
        t = lo + k * (hi - lo) / 10.0
        got = evaluate(rprime, t)
        want = rho(t)
        used += 2
        if abs(got - want) > 1e-6 * (1.0 + abs(want)):
            raise BadAntiderivativeError(
                f"antiderivative check failed at x={t}: its derivative is "
                f"{got!r} but the integrand is {want!r}",
                field="antiderivative")
    return used


def integrate(rho: Function, a: float, b: float, eps: float = DEFAULT_EPS) -> IntegralResult:
    """Definite integral of ``rho`` from a to b.

    Uses the antiderivative difference when ``rho.antiderivative`` is
    present (after a numeric spot check, so a bad antiderivative raises
    rather than silently corrupting the value) and falls back to a
    refined Darboux bracket otherwise.  Orientation conventions agree in
    both paths: the diagonal is exactly zero and swapping the endpoints
    negates the value.
    """
    lo, hi = min(a, b), max(a, b)
    dom_a, dom_b = rho.domain
    if lo < dom_a or hi > dom_b:
        raise PreconditionError(
            f"[{lo}, {hi}] leaves the domain [{dom_a}, {dom_b}]", field="interval")
    if eps <= 0:
        raise PreconditionError("eps must be positive", field="eps")
    if rho.antiderivative is not None:
        evaluations = 0
        if a != b:
            evaluations += _spot_check_antiderivative(rho, a, b)
        value = evaluate(rho.antiderivative, b) - evaluate(rho.antiderivative, a)
        evaluations += 2
        error_bound = 4.0 * float(np.spacing(abs(value)))
        return IntegralResult(value, error_bound, "ftc", evaluations, None)
    return darboux_integral(rho, a, b, eps)


def darboux_candidate(rho: Function, eps: float = DEFAULT_EPS) -> CandidateIntegral:
    """The bracket-construction integral of ``rho`` as a candidate."""
    stripped = replace(rho, antiderivative=None)

    def eval_pair(x: float, y: float) -> float:
        return darboux_integral(stripped, x, y, eps).value

    return CandidateIntegral(eval=eval_pair,
                             description=f"darboux integral of {_describe(rho)}, eps={eps!r}")


def _describe(rho: Function) -> str:
    from .expr import to_source

    return to_source(rho.body)


def verify_additivity(candidate: CandidateIntegral, a: float, b: float,
                      trials: int = 200, seed: int = DEFAULT_SEED,
                      tol: float = 1e-5) -> AxiomReport:
    """Test ``I(x,y) + I(y,z) = I(x,z)`` on random triples from [a, b].

    Triples are unordered (the axiom quantifies over all of them, reversed
    and coincident included); the degenerate triples ``(a, a, b)`` and
    ``(a, b, b)`` are always tested first.  Residuals are scaled by
    ``1 + |I(x, z)|`` so the tolerance means the same thing across
    magnitudes.  Evaluation failures are recorded per trial; more than 10%
    of them aborts the report.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1", field="trials")
    rng = np.random.Generator(np.random.Philox(key=seed))
    sites = [(a, a, b), (a, b, b)]
    for _ in range(trials):
        sites.append(tuple(float(v) for v in rng.uniform(a, b, 3)))
    records = []
    failures = 0
    for site in sites:
        x, y, z = site
        try:
            whole = candidate.eval(x, z)
            split = candidate.eval(x, y) + candidate.eval(y, z)
            residual = abs(split - whole) / (1.0 + abs(whole))
            records.append(AxiomTrial(site=site, residual=residual))
        except AxioquadError as exc:
            failures += 1
            records.append(AxiomTrial(site=site, residual=FAILED_TRIAL_RESIDUAL,
                                      error=str(exc)))
    if failures > 0.1 * len(sites):
        raise VerificationError(
            f"{failures} of {len(sites)} additivity trials failed to evaluate")
    max_residual = max(r.residual for r in records)
    return AxiomReport(axiom="additivity", trials=tuple(records),
                       max_residual=max_residual, tolerance=tol,
                       passed=max_residual <= tol, seed=seed)


def _point_schedule(x: float, a: float, b: float, schedule: HSchedule) -> HSchedule:
    """Clip the schedule to the side(s) reachable from ``x`` inside [a, b]."""
    room_left = x - a
    room_right = b - x
    side = schedule.side
    if room_right < schedule.h0 and room_left < schedule.h0:
        raise PreconditionError(
            f"x={x} leaves no room for steps of size h0={schedule.h0} inside "
            f"[{a}, {b}]", field="points")
    if room_right < schedule.h0:
        side = "negative"
    elif room_left < schedule.h0:
        side = "positive"
    return replace(schedule, side=side) if side != schedule.side else schedule


def verify_asymptotic(candidate: CandidateIntegral, rho: Function,
                      points, schedule: HSchedule = DEFAULT_SCHEDULE,
                      tol: float = 1e-4) -> AxiomReport:
    """Test ``I(x, x+h) = rho(x) h + o(h)`` at the given points.

    Each site's residual is ``max(|limit|, spread)`` for the limit of
    ``(I(x, x+h) - rho(x) h)/h``, so both a wrong limit and a
    non-converged one fail the site without raising.  Points closer than
    one ``h0`` to an endpoint are probed from the available side only.
    Point selection is deterministic, so the report's seed is zero.
    """
    a, b = rho.domain
    records = []
    failures = 0
    for x in points:
        try:
            if not a <= x <= b:
                raise PreconditionError(f"point {x} outside the domain [{a}, {b}]",
                                        field="points")
            local = _point_schedule(x, a, b, schedule)
            rho_x = rho(x)

            def quotient(h, x=x, rho_x=rho_x):
                return (candidate.eval(x, x + h) - rho_x * h) / h

            estimate = estimate_limit(quotient, local, tol)
            residual = max(abs(estimate.value), estimate.residual)
            records.append(AxiomTrial(site=(x,), residual=residual))
        except AxioquadError as exc:
            failures += 1
            records.append(AxiomTrial(site=(x,), residual=FAILED_TRIAL_RESIDUAL,
                                      error=str(exc)))
    if not records:
        raise PreconditionError("at least one probe point is required", field="points")
    if failures > 0.1 * len(records):
        raise VerificationError(
            f"{failures} of {len(records)} asymptotic trials failed to evaluate")
    max_residual = max(r.residual for r in records)
    return AxiomReport(axiom="asymptotic", trials=tuple(records),
                       max_residual=max_residual, tolerance=tol,
                       passed=max_residual <= tol, seed=0)


def uniqueness_crosscheck(rho: Function, a: float, b: float,
                          eps: float = DEFAULT_EPS) -> UniquenessCrosscheck:
    """Compare the antiderivative construction against the bracket one.

    Two constructions that both satisfy additivity and the asymptotic
    property must produce the same number; the discrepancy should not
    exceed ``eps`` plus a few ulps.
    """
    if rho.antiderivative is None:
        raise PreconditionError(
            "uniqueness crosscheck needs a function with an antiderivative",
            field="antiderivative")
    ftc = integrate(rho, a, b, eps)
    bracket = integrate(replace(rho, antiderivative=None), a, b, eps)
    return UniquenessCrosscheck(
        ftc_value=ftc.value,
        darboux_value=bracket.value,
        discrepancy=abs(ftc.value - bracket.value),
    )
