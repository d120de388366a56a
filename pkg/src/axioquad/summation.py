"""Deterministic compensated accumulation.

Every sum whose value the package reports goes through
:func:`compensated_sum`, a sequential left-to-right Neumaier accumulation
(Kahan summation with the improved handling of terms larger than the
running sum).  The loop is JIT-compiled so the exact sequential semantics
survive at native speed; nothing here runs in parallel, which keeps
results bit-identical between runs by construction.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["compensated_sum"]


@njit(cache=True)
def _neumaier(values):
    total = 0.0
    compensation = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        t = total + v
        if abs(total) >= abs(v):
            compensation += (total - t) + v
        else:
            compensation += (v - t) + total
        total = t
    return total + compensation


def compensated_sum(values) -> float:
    """Left-to-right compensated sum of a 1-D sequence of floats."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.ravel()
    return float(_neumaier(arr))
