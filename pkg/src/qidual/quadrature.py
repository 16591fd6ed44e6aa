"""Globally adaptive Gauss-Legendre quadrature over a piecewise-smooth integrand.

The caller supplies the points where the integrand has corners or jumps;
each resulting piece is smooth, so Gauss-Legendre converges quickly and the
difference between one panel and its two halves is a safe error estimate.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, Iterable

import numpy as np

from .errors import ParameterError, QuadratureNonConvergence

_ORDER = 10
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _panel(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    return half * float(np.dot(_WEIGHTS, f(x)))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Iterable[float],
    tol: float = 1e-12,
    max_evals: int = 10**6,
) -> tuple[float, float, int]:
    """Integrate a vectorised ``f`` over ``[min(breakpoints), max(breakpoints)]``.

    Returns ``(value, error_estimate, n_evals)``.  Raises
    :class:`QuadratureNonConvergence` if ``tol`` is not met within ``max_evals``
    integrand evaluations.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    pts = sorted(set(float(p) for p in breakpoints))
    if len(pts) < 2:
        return 0.0, 0.0, 0

    evals = 0
    heap = []  # (-err, a, b, fine)

    def push(a, b):
        nonlocal evals
        m = 0.5 * (a + b)
        coarse = _panel(f, a, b)
        fine = _panel(f, a, m) + _panel(f, m, b)
        evals += 3 * _ORDER
        heapq.heappush(heap, (-abs(fine - coarse), a, b, fine))

    for a, b in zip(pts, pts[1:]):
        if b > a:
            push(a, b)

    while True:
        total_err = -math.fsum(item[0] for item in heap)
        if total_err <= tol:
            break
        if evals >= max_evals:
            raise QuadratureNonConvergence(
                f"quadrature error {total_err:.3e} > tol {tol:.3e} after {evals} evaluations"
            )
        _, a, b, _ = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            raise QuadratureNonConvergence("panel width underflow before reaching tolerance")
        push(a, m)
        push(m, b)

    value = math.fsum(item[3] for item in heap)
    return value, total_err, evals
