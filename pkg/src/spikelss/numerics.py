"""Quadrature, Chebyshev and contour primitives.

Every real integral over a support ``[a, b]`` is mapped affinely onto
``[-1, 1]``; the square-root weights ``sqrt((b-x)(x-a))`` and their
reciprocals are absorbed into Gauss-Chebyshev rules and never sampled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct

DEFAULT_QUAD_N = 128
DEFAULT_CONTOUR_NODES = 256


def _sample(f: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array, falling back to pointwise calls."""
    try:
        y = np.asarray(f(x))
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).copy()
    except (TypeError, ValueError):
        y = np.array([f(float(t)) for t in x])
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite function value")
    return y


@dataclass(frozen=True)
class ChebSeries:
    """Chebyshev series ``sum c_k T_k(t)`` with ``x = (a+b)/2 + (b-a)/2 t``."""

    a: float
    b: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("ChebSeries requires b > a")
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("non-finite Chebyshev coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def interval(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_unit(self, x):
        return (2.0 * np.asarray(x, dtype=float) - (self.a + self.b)) / (self.b - self.a)

    def __call__(self, x):
        # chebval uses Clenshaw's recurrence
        return C.chebval(self.to_unit(x), self.coeffs)


def cheb_fit(f: Callable, a: float, b: float, N: int) -> ChebSeries:
    """Degree-``N`` interpolant of ``f`` at the Chebyshev points of the second kind."""
    if N < 1:
        raise ValueError("N must be >= 1")
    t = np.cos(np.pi * np.arange(N + 1) / N)
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    values = _sample(f, x)
    # DCT-I of the samples gives the interpolant's coefficients up to end scaling
    coeffs = dct(values, type=1) / N
    coeffs[0] /= 2.0
    coeffs[-1] /= 2.0
    return ChebSeries(a, b, coeffs)


def cheb_derivative(s: ChebSeries) -> ChebSeries:
    if s.degree == 0:
        return ChebSeries(s.a, s.b, np.zeros(1))
    d = C.chebder(s.coeffs) * (2.0 / (s.b - s.a))
    return ChebSeries(s.a, s.b, d)


def _cheb_to_u(coeffs: np.ndarray) -> np.ndarray:
    """Convert T-basis coefficients to U-basis coefficients.

    Uses ``T_0 = U_0``, ``T_1 = U_1 / 2`` and ``T_k = (U_k - U_{k-2}) / 2``.
    """
    d = np.zeros(len(coeffs))
    for k, ck in enumerate(coeffs):
        if k == 0:
            d[0] += ck
        elif k == 1:
            d[1] += 0.5 * ck
        else:
            d[k] += 0.5 * ck
            d[k - 2] -= 0.5 * ck
    return d


def pv_hilbert(s: ChebSeries, x):
    """Principal value of ``int_a^b s(y) sqrt((b-y)(y-a)) / (x-y) dy``.

    Closed form per Chebyshev mode: on ``t in [-1, 1]``,
    ``P int sqrt(1-t^2) U_{k-1}(t) / (s-t) dt = pi T_k(s)``.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= s.a) or np.any(xs >= s.b):
        raise ValueError("pv point outside support")
    h = 0.5 * (s.b - s.a)
    d = _cheb_to_u(s.coeffs)
    # U_j contributes pi * T_{j+1}
    shifted = np.concatenate(([0.0], d))
    return h * np.pi * C.chebval(s.to_unit(xs), shifted)


def gc2_nodes(a: float, b: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_a^b g(x) sqrt((b-x)(x-a)) dx``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    i = np.arange(1, N + 1)
    theta = i * np.pi / (N + 1)
    h = 0.5 * (b - a)
    x = 0.5 * (a + b) + h * np.cos(theta)
    w = h * h * np.pi / (N + 1) * np.sin(theta) ** 2
    return x, w


def gc1_nodes(a: float, b: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_a^b g(x) / sqrt((b-x)(x-a)) dx``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    i = np.arange(1, N + 1)
    x = 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * i - 1) * np.pi / (2 * N))
    w = np.full(N, np.pi / N)
    return x, w


def gc2_integrate(g: Callable, a: float, b: float, N: int = DEFAULT_QUAD_N) -> float:
    x, w = gc2_nodes(a, b, N)
    return float(np.dot(w, _sample(g, x)))


def gc1_integrate(g: Callable, a: float, b: float, N: int = DEFAULT_QUAD_N) -> float:
    x, w = gc1_nodes(a, b, N)
    return float(np.dot(w, _sample(g, x)))


@dataclass(frozen=True)
class ContourSpec:
    """Counter-clockwise circle used for Cauchy-type integrals."""

    center: complex
    radius: float
    nodes: int = DEFAULT_CONTOUR_NODES

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 8:
            raise ValueError("contour needs at least 8 nodes")

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes ``z_k`` and weights such that ``sum w_k g(z_k) ~ (1/2 pi i) oint g``."""
        phase = np.exp(2j * np.pi * np.arange(self.nodes) / self.nodes)
        z = self.center + self.radius * phase
        return z, self.radius * phase / self.nodes

    def encloses(self, pts, margin: float = 0.0) -> bool:
        pts = np.asarray(pts, dtype=complex)
        return bool(np.all(np.abs(pts - self.center) < self.radius * (1.0 - margin)))


def contour_trapezoid(g: Callable, spec: ContourSpec) -> complex:
    """``(1/2 pi i) oint g(z) dz`` on the circle by the trapezoid rule."""
    z, w = spec.points()
    vals = np.asarray(g(z), dtype=complex)
    if vals.shape != z.shape:
        vals = np.array([g(zk) for zk in z], dtype=complex)
    return complex(np.dot(w, vals))
