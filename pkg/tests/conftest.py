import math

import pytest

from axioquad import Function


@pytest.fixture
def fn():
    """Shorthand builder for expression-backed functions."""

    def build(body, domain=(-2.0, 2.0), derivative=None, antiderivative=None):
        return Function.from_sources(body, domain, derivative=derivative,
                                     antiderivative=antiderivative)

    return build


def maclaurin_exp_neg_square(upper: float = 1.0, terms: int = 20) -> float:
    """Series oracle for the integral of exp(-t^2) from 0 to ``upper``.

    Integrating the Maclaurin series termwise gives
    sum_k (-1)^k upper^(2k+1) / (k! (2k+1)); twenty terms are far below
    double precision for upper <= 1.
    """
    return math.fsum(
        (-1) ** k * upper ** (2 * k + 1) / (math.factorial(k) * (2 * k + 1))
        for k in range(terms)
    )
