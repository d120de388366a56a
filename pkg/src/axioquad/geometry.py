"""Geometric quantities built from local Euclidean models.

Area under a curve, arclength, and shell volume are defined here the same
way: an additive interval functional that is asymptotic, to first order in
the step, to an elementary Euclidean quantity (a rectangle's area, the
distance between two curve points, a cylindrical shell's volume).  The
integrands are not assumed — each operation extracts the coefficient in
front of h from its local model numerically and checks it against the
closed form before reporting a value.

A left-endpoint accumulation of the raw local model is kept around as an
independent brute-force oracle: it is the only Riemann-sum-style machinery
in the package and exists purely for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .asymptotics import DEFAULT_SCHEDULE, HSchedule, estimate_limit, extract_coefficient
from .darboux import DEFAULT_EPS
from .errors import (
    AxioquadError,
    DomainError,
    NonFiniteError,
    NotC1Error,
    PreconditionError,
    VerificationError,
)
from .expr import BinOp, Call, Const, Function, Var, evaluate, to_source
from .integral import AxiomReport, AxiomTrial, CandidateIntegral, integrate, verify_additivity
from .summation import compensated_sum

__all__ = [
    "LocalModel",
    "GeometricResult",
    "rectangle_model",
    "chord_model",
    "shell_model",
    "area_under_curve",
    "arclength",
    "volume_of_revolution_shells",
    "accumulate_local_model",
    "verify_geometric_axioms",
]

EXTRACTION_TOL = 1e-4
EXTRACTION_POINTS = 9
ORACLE_CELLS = 8192
SCAN_POINTS = 1001
DERIVATIVE_CEILING = 1e8


@dataclass(frozen=True)
class LocalModel:
    """A nonnegative local Euclidean quantity attached to a function.

    ``quantity(x, h)`` vanishes at h = 0 and measures the elementary
    object spanning x to x+h: ``f(x)|h|`` for a rectangle, the distance
    between the curve points for a chord, ``|pi (x+h)^2 - pi x^2| f(x)``
    for a cylindrical shell.
    """

    kind: str
    quantity: Callable[[float, float], float]
    source: Function


def rectangle_model(f: Function) -> LocalModel:
    def quantity(x, h):
        return f(x) * np.abs(h)

    return LocalModel("rectangle", quantity, f)


def chord_model(f: Function) -> LocalModel:
    def quantity(x, h):
        dy = f(x + h) - f(x)
        return np.sqrt(h * h + dy * dy)

    return LocalModel("chord", quantity, f)


def shell_model(f: Function) -> LocalModel:
    def quantity(x, h):
        return np.abs(np.pi * (x + h) ** 2 - np.pi * x**2) * f(x)

    return LocalModel("shell", quantity, f)


@dataclass(frozen=True)
class GeometricResult:
    """A geometric quantity with its extraction audit trail.

    ``extracted_rho_samples`` holds ``(x, rho)`` pairs recovered from the
    local model; they agreed with the closed-form integrand to within
    ``extraction_tolerance`` at construction time (the operation refuses
    to return otherwise).  ``oracle_value`` is the brute-force local-model
    accumulation at a fixed resolution, for eyeballing convergence.
    """

    value: float
    closed_form_integrand: str
    extracted_rho_samples: tuple[tuple[float, float], ...]
    oracle_value: float | None
    method: str
    extraction_tolerance: float = EXTRACTION_TOL


def _scan_grid(a: float, b: float) -> np.ndarray:
    return np.linspace(a, b, SCAN_POINTS)


def _check_interval(f: Function, a: float, b: float, nonneg_from: float | None = None):
    if not a < b:
        raise PreconditionError(f"interval needs a < b, got [{a}, {b}]", field="interval")
    if nonneg_from is not None and a < nonneg_from:
        raise PreconditionError(
            f"interval must start at or above {nonneg_from}, got a={a}", field="a")
    dom_a, dom_b = f.domain
    if a < dom_a or b > dom_b:
        raise PreconditionError(
            f"[{a}, {b}] leaves the domain [{dom_a}, {dom_b}]", field="interval")


def _check_nonnegative(f: Function, a: float, b: float):
    grid = _scan_grid(a, b)
    values = np.asarray(f(grid), dtype=float)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape)
    bad = values < 0
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise PreconditionError(
            f"integrand must be nonnegative: f({float(grid[idx])!r}) = "
            f"{float(values[idx])!r}", field="f")


def _extraction_schedule(a: float, b: float) -> HSchedule:
    margin = (b - a) / 10.0
    h0 = min(DEFAULT_SCHEDULE.h0, margin)
    return replace(DEFAULT_SCHEDULE, h0=h0)


def _extract_samples(model: LocalModel, closed_form, a: float, b: float):
    """Coefficient extraction at nine interior points, checked against the
    closed-form integrand."""
    schedule = _extraction_schedule(a, b)
    samples = []
    for k in range(1, EXTRACTION_POINTS + 1):
        x = a + k * (b - a) / 10.0
        extraction = extract_coefficient(model.quantity, x, schedule, EXTRACTION_TOL)
        expected = float(closed_form(x))
        if abs(extraction.rho - expected) > EXTRACTION_TOL:
            raise VerificationError(
                f"extracted {model.kind} coefficient {extraction.rho!r} at x={x} "
                f"disagrees with the closed-form integrand {expected!r} beyond "
                f"{EXTRACTION_TOL}")
        samples.append((x, extraction.rho))
    return tuple(samples)


def area_under_curve(f: Function, a: float, b: float, eps: float = DEFAULT_EPS) -> GeometricResult:
    """Area between a nonnegative curve and the axis over [a, b].

    The value is the integral of f; the reported samples re-derive f(x)
    from the rectangle model at nine interior points as an audit that the
    local model really does have f as its first-order coefficient.
    Only continuity of f is required.
    """
    _check_interval(f, a, b)
    _check_nonnegative(f, a, b)
    model = rectangle_model(f)
    result = integrate(f, a, b, eps)
    samples = _extract_samples(model, f, a, b)
    oracle = accumulate_local_model(model, a, b, ORACLE_CELLS)
    return GeometricResult(
        value=result.value,
        closed_form_integrand=to_source(f.body),
        extracted_rho_samples=samples,
        oracle_value=oracle,
        method="closed-form",
    )


def arclength(f: Function, a: float, b: float, eps: float = DEFAULT_EPS) -> GeometricResult:
    """Length of the curve y = f(x) over [a, b] for continuously
    differentiable f.

    The integrand sqrt(1 + f'(x)^2) is cross-checked by extracting the
    chord model's first-order coefficient at nine interior points.
    """
    _check_interval(f, a, b)
    dexpr = f.derivative_expression()
    grid = _scan_grid(a, b)
    try:
        dvals = np.asarray(evaluate(dexpr, grid), dtype=float)
    except (DomainError, NonFiniteError) as exc:
        raise NotC1Error(
            f"derivative failed to evaluate on [{a}, {b}]: {exc}", field="f") from None
    if dvals.shape != grid.shape:
        dvals = np.broadcast_to(dvals, grid.shape)
    big = np.abs(dvals) > DERIVATIVE_CEILING
    if np.any(big):
        idx = int(np.argmax(big))
        raise NotC1Error(
            f"derivative magnitude {float(dvals[idx])!r} at x={float(grid[idx])!r} "
            f"exceeds {DERIVATIVE_CEILING:.0e}", field="f")
    integrand = Call("sqrt", BinOp("+", Const(1.0), BinOp("^", dexpr, Const(2.0))))
    speed = Function(body=integrand, domain=f.domain)
    result = integrate(speed, a, b, eps)
    samples = _extract_samples(chord_model(f), speed, a, b)
    oracle = accumulate_local_model(chord_model(f), a, b, ORACLE_CELLS)
    return GeometricResult(
        value=result.value,
        closed_form_integrand=to_source(integrand),
        extracted_rho_samples=samples,
        oracle_value=oracle,
        method="closed-form",
    )


def volume_of_revolution_shells(f: Function, a: float, b: float,
                                eps: float = DEFAULT_EPS) -> GeometricResult:
    """Volume swept by revolving the region under f over [a, b] (with
    0 <= a < b) about the vertical axis.

    The integrand 2 pi x f(x) is cross-checked by extracting the shell
    model's first-order coefficient, which exercises the absolute-value
    cancellation of the shell volume's expansion.
    """
    _check_interval(f, a, b, nonneg_from=0.0)
    _check_nonnegative(f, a, b)
    integrand = BinOp("*", BinOp("*", Const(2.0 * math.pi), Var()), f.body)
    spinning = Function(body=integrand, domain=f.domain)
    result = integrate(spinning, a, b, eps)
    samples = _extract_samples(shell_model(f), spinning, a, b)
    oracle = accumulate_local_model(shell_model(f), a, b, ORACLE_CELLS)
    return GeometricResult(
        value=result.value,
        closed_form_integrand=to_source(integrand),
        extracted_rho_samples=samples,
        oracle_value=oracle,
        method="closed-form",
    )


def accumulate_local_model(model: LocalModel, a: float, b: float, n: int) -> float:
    """Left-endpoint accumulation of the raw local quantity over n cells.

    This is the brute-force convergence oracle: as n doubles it must
    approach the corresponding geometric result, but it carries no error
    certificate of its own.
    """
    if n < 1:
        raise PreconditionError("n must be at least 1", field="n")
    if not a < b:
        raise PreconditionError(f"interval needs a < b, got [{a}, {b}]", field="interval")
    h = (b - a) / n
    xs = a + h * np.arange(n)
    try:
        terms = np.asarray(model.quantity(xs, h), dtype=float)
        if terms.shape != xs.shape:
            terms = np.broadcast_to(terms, xs.shape)
    except DomainError as exc:
        cell = "?"
        if exc.x is not None:
            cell = int(np.clip((exc.x - a) / h, 0, n - 1))
        raise DomainError(f"{exc} (cell {cell})", exc.subexpression, exc.x) from None
    except (TypeError, ValueError):
        # Scalar-only quantity: fall back to a per-cell loop.
        terms = np.empty(n)
        for k in range(n):
            try:
                terms[k] = model.quantity(float(xs[k]), h)
            except DomainError as exc:
                raise DomainError(f"{exc} (cell {k})", exc.subexpression, exc.x) from None
    return compensated_sum(terms)


def verify_geometric_axioms(functional: Callable[[float, float], float],
                            model: LocalModel, a: float, b: float,
                            trials: int = 50,
                            schedule: HSchedule = DEFAULT_SCHEDULE,
                            tol: float = 1e-4) -> tuple[AxiomReport, AxiomReport]:
    """Check that an interval functional is additive and locally
    asymptotic to the given Euclidean model.

    The first report is the additivity check on random triples; the second
    probes ``(functional(x, x+h) -/+ Q(x, h)) / h -> 0`` at five interior
    points, with the quantity entering negatively for h < 0 per the
    orientation convention of additive local models.
    """
    candidate = CandidateIntegral(eval=functional,
                                  description=f"{model.kind}-model functional")
    additivity = verify_additivity(candidate, a, b, trials=trials, tol=tol)
    margin = (b - a) / 6.0
    local_schedule = replace(schedule, h0=min(schedule.h0, margin))
    records = []
    for k in range(1, 6):
        x = a + k * (b - a) / 6.0

        def signed_defect(h, x=x):
            q = model.quantity(x, h)
            return (functional(x, x + h) - q) / h if h > 0 else (functional(x, x + h) + q) / h

        try:
            estimate = estimate_limit(signed_defect, local_schedule, tol)
            residual = max(abs(estimate.value), estimate.residual)
            records.append(AxiomTrial(site=(x,), residual=residual))
        except AxioquadError as exc:
            records.append(AxiomTrial(site=(x,), residual=math.inf, error=str(exc)))
    max_residual = max(r.residual for r in records)
    asymptotic = AxiomReport(axiom="asymptotic", trials=tuple(records),
                             max_residual=max_residual, tolerance=tol,
                             passed=max_residual <= tol, seed=0)
    return additivity, asymptotic
