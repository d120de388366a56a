"""Partitions, lower/upper Darboux sums, and bracket refinement.

Cell extrema are sampled on an equispaced per-cell grid (endpoints
included), not computed exactly: exact extrema of arbitrary expressions
are unavailable, and for continuous integrands the sampled bracket
converges to the true one as the partition refines.  Refinement doubles a
uniform partition until the bracket is narrower than the requested
epsilon *and* one further doubling moves neither sum by epsilon, which
guards against sampling aliasing.

Sums are accumulated left to right with compensated summation, so equal
inputs produce bit-identical results run after run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergenceError, PreconditionError
from .expr import Function
from .summation import compensated_sum

__all__ = [
    "Partition",
    "DarbouxBracket",
    "IntegralResult",
    "DEFAULT_EPS",
    "DEFAULT_SAMPLES_PER_CELL",
    "REFINEMENT_CAP",
    "lower_sum",
    "upper_sum",
    "refine_until",
    "darboux_integral",
]

DEFAULT_EPS = 1e-6
# Kept small so that certifying a 1e-6 bracket on a unit interval stays
# within a few million integrand evaluations; on monotone cells the
# endpoint samples are the exact extrema anyway, and the doubling
# stability check covers what interior sampling might miss.
DEFAULT_SAMPLES_PER_CELL = 3
START_PARTITION = 16
REFINEMENT_CAP = 2**22


@dataclass(frozen=True)
class Partition:
    """A strictly increasing finite grid spanning an interval."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if len(pts) < 2:
            raise PreconditionError("a partition needs at least two points", field="points")
        if not all(math.isfinite(p) for p in pts):
            raise PreconditionError("partition points must be finite", field="points")
        if any(pts[i] >= pts[i + 1] for i in range(len(pts) - 1)):
            raise PreconditionError("partition points must be strictly increasing",
                                    field="points")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Partition":
        return cls(tuple(np.linspace(a, b, n + 1)))

    @property
    def a(self) -> float:
        return self.points[0]

    @property
    def b(self) -> float:
        return self.points[-1]

    @property
    def size(self) -> int:
        return len(self.points) - 1

    def union(self, other: "Partition") -> "Partition":
        """Concatenate two partitions that share one endpoint."""
        if self.b != other.a:
            raise PreconditionError(
                "partitions can only be joined end to end", field="points")
        return Partition(self.points + other.points[1:])


@dataclass(frozen=True)
class DarbouxBracket:
    """Paired lower/upper sum estimates with their partition metadata."""

    lower: float
    upper: float
    partition_size: int
    samples_per_cell: int
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise PreconditionError("bracket sums must be finite")
        if self.lower > self.upper:
            raise PreconditionError("bracket lower sum exceeds upper sum")


@dataclass(frozen=True)
class IntegralResult:
    """A definite integral value with a certified error bound.

    ``method`` is ``"darboux"`` when the value is the midpoint of a
    refined bracket (then ``bracket`` is present and ``error_bound`` is
    half its width) and ``"ftc"`` when it came from an antiderivative
    difference.  ``evaluations`` counts scalar expression evaluations
    spent producing the result.
    """

    value: float
    error_bound: float
    method: str
    evaluations: int
    bracket: DarbouxBracket | None = None


def _annotate_cell(exc: DomainError, boundaries, n: int) -> DomainError:
    if exc.x is None:
        return exc
    cell = int(np.clip(np.searchsorted(boundaries, exc.x, side="right") - 1, 0, n - 1))
    return DomainError(f"{exc} (cell {cell})", exc.subexpression, exc.x)


def _partition_sums(rho, partition: Partition, samples_per_cell: int):
    """Sampled lower and upper sums over an arbitrary partition."""
    if samples_per_cell < 2:
        raise PreconditionError("samples_per_cell must be at least 2",
                                field="samples_per_cell")
    pts = np.asarray(partition.points)
    lefts = pts[:-1]
    rights = pts[1:]
    offsets = np.linspace(0.0, 1.0, samples_per_cell)
    # Affine blend keeps both cell endpoints exact, so adjacent cells and
    # concatenated partitions sample identical boundary values.
    grid = lefts[:, None] * (1.0 - offsets)[None, :] + rights[:, None] * offsets[None, :]
    try:
        values = rho(grid)
    except DomainError as exc:
        raise _annotate_cell(exc, pts, partition.size) from None
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape)
    mins = values.min(axis=1)
    maxs = values.max(axis=1)
    widths = rights - lefts
    lower = compensated_sum(mins * widths)
    upper = compensated_sum(maxs * widths)
    return lower, upper, grid.size


def lower_sum(rho, partition: Partition, samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL) -> float:
    """Sampled lower Darboux sum: per-cell minimum times cell width."""
    _check_partition_domain(rho, partition)
    lower, _, _ = _partition_sums(rho, partition, samples_per_cell)
    return lower


def upper_sum(rho, partition: Partition, samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL) -> float:
    """Sampled upper Darboux sum: per-cell maximum times cell width."""
    _check_partition_domain(rho, partition)
    _, upper, _ = _partition_sums(rho, partition, samples_per_cell)
    return upper


def _check_partition_domain(rho, partition: Partition):
    if isinstance(rho, Function):
        a, b = rho.domain
        if partition.a < a or partition.b > b:
            raise PreconditionError(
                f"partition [{partition.a}, {partition.b}] leaves the domain [{a}, {b}]",
                field="partition")


def _uniform_sums(rho, x: float, y: float, n: int, samples_per_cell: int):
    """Lower/upper sums on the uniform n-cell partition of [x, y].

    Evaluates the integrand once on the shared global sample grid; cell
    extrema come from strided views, so no per-cell copies are made.
    """
    stride = samples_per_cell - 1
    grid = np.linspace(x, y, n * stride + 1)
    boundaries = grid[::stride]
    try:
        values = rho(grid)
    except DomainError as exc:
        raise _annotate_cell(exc, boundaries, n) from None
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape)
    mins = values[0::stride][:n].copy()
    maxs = mins.copy()
    for j in range(1, samples_per_cell):
        sl = values[j::stride][:n]
        np.minimum(mins, sl, out=mins)
        np.maximum(maxs, sl, out=maxs)
    widths = np.diff(boundaries)
    lower = compensated_sum(mins * widths)
    upper = compensated_sum(maxs * widths)
    return lower, upper, grid.size


def _refine(rho, x: float, y: float, eps: float,
            samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
            cap: int = REFINEMENT_CAP):
    """Refine uniform partitions (16, 32, 64, ...) until the bracket is
    narrower than ``eps`` and stable under one further doubling.

    Returns ``(bracket, evaluations)``.  Raises
    :class:`NoConvergenceError` carrying the best bracket if the cap is
    reached first, which signals an eps below the achievable resolution.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive", field="eps")
    evaluations = 0
    n = START_PARTITION
    lower, upper, used = _uniform_sums(rho, x, y, n, samples_per_cell)
    evaluations += used
    best = DarbouxBracket(lower, upper, n, samples_per_cell, upper - lower)
    while True:
        width = upper - lower
        if width < eps:
            # Stability check: one further doubling must move neither sum
            # by eps.  The companion partition may sit one step past the
            # cap; the returned bracket never does.
            next_lower, next_upper, used = _uniform_sums(rho, x, y, 2 * n, samples_per_cell)
            evaluations += used
            if abs(next_lower - lower) < eps and abs(next_upper - upper) < eps:
                return DarbouxBracket(lower, upper, n, samples_per_cell, width), evaluations
            if 2 * n > cap:
                raise NoConvergenceError(
                    f"bracket sums still moving by more than eps={eps!r} at the "
                    f"{n}-cell cap; eps is below the achievable resolution",
                    bracket=best, evaluations=evaluations)
            n, lower, upper = 2 * n, next_lower, next_upper
        else:
            if 2 * n > cap:
                raise NoConvergenceError(
                    f"bracket width {width!r} still above eps={eps!r} at the "
                    f"{n}-cell cap; eps is below the achievable resolution",
                    bracket=best, evaluations=evaluations)
            n *= 2
            lower, upper, used = _uniform_sums(rho, x, y, n, samples_per_cell)
            evaluations += used
        if upper - lower < best.width:
            best = DarbouxBracket(lower, upper, n, samples_per_cell, upper - lower)


def refine_until(rho, x: float, y: float, eps: float,
                 samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL) -> DarbouxBracket:
    """Bracket the integral of ``rho`` over [x, y] to width below ``eps``."""
    if isinstance(rho, Function):
        a, b = rho.domain
        if x < a or y > b:
            raise PreconditionError(
                f"[{x}, {y}] leaves the domain [{a}, {b}]", field="interval")
    if not x < y:
        raise PreconditionError("refinement requires x < y", field="interval")
    bracket, _ = _refine(rho, x, y, eps, samples_per_cell)
    return bracket


def darboux_integral(rho, x: float, y: float, eps: float = DEFAULT_EPS) -> IntegralResult:
    """Integral of ``rho`` from x to y as the midpoint of a refined bracket.

    The diagonal is exactly zero and reversed orientation is the exact
    negation (the bracket is negated alongside the value, preserving the
    midpoint relation).
    """
    if isinstance(rho, Function):
        a, b = rho.domain
        lo, hi = min(x, y), max(x, y)
        if lo < a or hi > b:
            raise PreconditionError(
                f"[{lo}, {hi}] leaves the domain [{a}, {b}]", field="interval")
    if x == y:
        empty = DarbouxBracket(0.0, 0.0, 0, DEFAULT_SAMPLES_PER_CELL, 0.0)
        return IntegralResult(0.0, 0.0, "darboux", 0, empty)
    if x > y:
        flipped = darboux_integral(rho, y, x, eps)
        br = flipped.bracket
        negated = DarbouxBracket(-br.upper, -br.lower, br.partition_size,
                                 br.samples_per_cell, br.width)
        return IntegralResult(-flipped.value, flipped.error_bound, "darboux",
                              flipped.evaluations, negated)
    bracket, evaluations = _refine(rho, x, y, eps)
    value = 0.5 * (bracket.lower + bracket.upper)
    return IntegralResult(value, 0.5 * bracket.width, "darboux", evaluations, bracket)
