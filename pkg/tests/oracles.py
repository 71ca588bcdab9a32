"""Independent reference computations used only by the tests."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate


def pv_variance(g, dg, a: float, b: float) -> float:
    """Limiting variance by adaptive double quadrature.

    The outer integral uses the algebraic endpoint weight and the inner
    principal value is taken by subtracting the singularity, so nothing here
    touches the Chebyshev machinery under test.
    """

    def h(y: float) -> float:
        return dg(y) * math.sqrt(max((b - y) * (y - a), 0.0))

    def inner(x: float) -> float:
        # P int h(y)/(x-y) dy = int (h(y)-h(x))/(x-y) dy + h(x) log((x-a)/(b-x))
        hx = h(x)
        smooth = lambda y: 0.0 if y == x else (h(y) - hx) / (x - y)  # noqa: E731
        pts = [x] if a < x < b else None
        val, _ = integrate.quad(smooth, a, b, points=pts, epsabs=0.0, epsrel=1e-10, limit=400)
        if hx != 0.0:
            val += hx * math.log((x - a) / (b - x))
        return val

    outer, _ = integrate.quad(lambda x: g(x) * inner(x), a, b, weight="alg", wvar=(-0.5, -0.5),
                              epsabs=0.0, epsrel=1e-9, limit=200)
    return outer / (2 * math.pi ** 2)


def mp_moment(c: float, k: int) -> float:
    """k-th moment of the Marchenko-Pastur law with ratio c (Narayana polynomial)."""
    return sum(math.comb(k, j) * math.comb(k, j - 1) / k * c ** j for j in range(1, k + 1))


def power_sum(x, k: int) -> float:
    return float(np.sum(np.asarray(x)) ** k)
