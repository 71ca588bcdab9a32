"""Reduced-rank representations of pFq of two matrix arguments.

When ``X`` has rank ``r < n`` the n x n series can be rewritten as an
r-fold contour integral of an r x r series (general even ``beta = 2/alpha``),
and for ``alpha = 1`` as an r x r determinant of scalar contour integrals.
The scalar integrals are closed contour integrals around the ``y`` values
with simple poles, so they are evaluated exactly as residue sums.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .jack import HypgeomSpec, Spectrum, mhg_series, scalar_pfq
from .numerics import ContourSpec

DEFAULT_SERIES_K = 60


@dataclass(frozen=True)
class RankRArgument:
    """``X = diag(x_1..x_r, 0..0)`` of ambient size ``n``."""

    nonzero: tuple[float, ...]
    ambient_n: int

    def __post_init__(self):
        vals = tuple(self.nonzero)
        if not vals:
            raise ValueError("need at least one nonzero entry")
        if any(v == 0 for v in vals):
            raise ValueError("nonzero entries must be nonzero")
        if len(vals) > self.ambient_n:
            raise ValueError("rank exceeds ambient dimension")
        object.__setattr__(self, "nonzero", vals)

    @property
    def r(self) -> int:
        return len(self.nonzero)

    def full(self) -> np.ndarray:
        out = np.zeros(self.ambient_n, dtype=np.result_type(*self.nonzero, float))
        out[: self.r] = self.nonzero
        return out


@dataclass(frozen=True)
class MultSpectrum:
    """Distinct values ``x~_1 > ... > x~_M`` with multiplicities ``k_1..k_M``."""

    distinct: tuple[float, ...]
    mults: tuple[int, ...]

    def __post_init__(self):
        d = tuple(float(v) for v in self.distinct)
        k = tuple(int(v) for v in self.mults)
        if len(d) != len(k) or not d:
            raise ValueError("distinct values and multiplicities must pair up")
        if any(d[i] <= d[i + 1] for i in range(len(d) - 1)):
            raise ValueError("distinct values must be strictly decreasing")
        if any(v < 1 for v in k):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "distinct", d)
        object.__setattr__(self, "mults", k)

    @property
    def r(self) -> int:
        return sum(self.mults)

    def expanded(self) -> np.ndarray:
        return np.repeat(self.distinct, self.mults)


def theta(n: int, r: int, alpha: float) -> float:
    """Parameter shift ``(n - r + 1 - alpha) / alpha``; must be a non-negative integer."""
    if not (n >= r >= 1):
        raise ValueError("need n >= r >= 1")
    value = (n - r + 1 - alpha) / alpha
    if abs(value - round(value)) > 1e-12 or round(value) < 0:
        raise ValueError("theta not integral")
    return float(round(value))


def phi_alpha(params, alpha: float, r: int, theta_value: float, denominator: bool = False) -> float:
    """``prod_j prod_i Gamma(a_j-(i-1)/alpha) / Gamma(a_j-theta-(i-1)/alpha)`` as linear factors."""
    t = int(round(theta_value))
    if t != theta_value or t < 0:
        raise ValueError("theta must be a non-negative integer")
    out = 1.0
    for a in params:
        for i in range(r):
            base = a - i / alpha
            for k in range(1, t + 1):
                out *= base - k
    if denominator and out == 0:
        raise ValueError("pochhammer pole")
    return out


def _check_distinct(y: np.ndarray) -> None:
    diffs = np.abs(y[:, None] - y[None, :])
    np.fill_diagonal(diffs, np.inf)
    if np.any(diffs == 0):
        raise ValueError("requires distinct y-spectrum")


def default_contour(y, nodes: int = 64) -> ContourSpec:
    """Circle around the y values with half their spread (at least 0.5) as clearance."""
    y = np.asarray(y, dtype=complex)
    center = 0.5 * (y.real.max() + y.real.min()) + 0.5j * (y.imag.max() + y.imag.min())
    spread = float(np.max(np.abs(y - center)))
    return ContourSpec(center, spread + max(0.5 * spread, 0.5), nodes)


def mhg_contour(spec: HypgeomSpec, Xr: RankRArgument, Y, contour: ContourSpec | None = None,
               K: int = DEFAULT_SERIES_K) -> float:
    """r-fold contour representation of pFq for even ``beta = 2/alpha``.

    The r-dimensional integral is discretized by a tensor trapezoid rule.
    """
    alpha = spec.alpha
    inv = 1.0 / alpha
    if abs(inv - round(inv)) > 1e-12:
        raise ValueError("unsupported branch structure")
    inv = int(round(inv))
    y = np.asarray(Y.values if isinstance(Y, Spectrum) else Y)
    n, r = len(y), Xr.r
    if Xr.ambient_n != n:
        raise ValueError("X and Y must have the same ambient size")
    th = theta(n, r, alpha)
    contour = contour or default_contour(y)
    if not contour.encloses(y, margin=1e-3):
        raise ValueError("pole outside contour")

    z1, w1 = contour.points()
    grid = np.array(list(itertools.product(range(contour.nodes), repeat=r)))
    Z = z1[grid]
    W = np.prod(w1[grid], axis=1)

    x = np.asarray(Xr.nonzero)
    inner_spec = spec.shifted(-th)
    if r == 1:
        inner = scalar_pfq(inner_spec, x[0] * Z[:, 0], K)
    else:
        inner, _ = mhg_series(inner_spec, x, Z, K)

    sign = (-1.0) ** ((r * (r - 1) // 2) * inv)
    gam = 1.0
    for j in range(1, r + 1):
        gam *= math.gamma((n + 1 - j) * inv) * math.gamma(inv) / math.gamma((r + 1 - j) * inv)
    vand = np.ones(len(Z), dtype=complex)
    for i in range(r):
        for j in range(i + 1, r):
            vand *= (Z[:, j] - Z[:, i]) ** (2 * inv)
    poles = np.prod((Z[:, :, None] - y[None, None, :]) ** (-inv), axis=(1, 2))
    omega = sign * gam * vand * np.prod(x ** (-th)) * poles

    total = np.sum(W * inner * omega)
    ratio = phi_alpha(spec.b, alpha, r, th) / phi_alpha(spec.a, alpha, r, th, denominator=True)
    value = ratio * total / math.factorial(r)
    return float(value.real) if abs(value.imag) <= 1e-8 * max(1.0, abs(value.real)) else complex(value)


def complete_homogeneous(y, degree: int) -> np.ndarray:
    """``h_0(y) .. h_degree(y)``, the complete homogeneous symmetric polynomials."""
    y = np.asarray(y)
    h = np.zeros(degree + 1, dtype=np.result_type(y, float))
    h[0] = 1.0
    for ys in y:
        # multiply the generating function by 1 / (1 - ys t)
        for j in range(1, degree + 1):
            h[j] = h[j] + ys * h[j - 1]
    return h


def pfq_coefficients(spec: HypgeomSpec, K: int) -> np.ndarray:
    """Taylor coefficients of the scalar pFq up to degree ``K``."""
    c = np.zeros(K + 1)
    c[0] = 1.0
    for k in range(K):
        num = 1.0
        for a in spec.a:
            num *= a + k
        if num == 0:
            break
        den = 1.0
        for b in spec.b:
            den *= b + k
        if den == 0:
            raise ValueError("pochhammer pole")
        c[k + 1] = c[k] * num / (den * (k + 1))
    return c


def residue_entry(spec: HypgeomSpec, x: float, y, power: int, K: int = DEFAULT_SERIES_K,
                  method: str = "symmetric"):
    """``(1/2 pi i) oint pFq(a; b; x z) z^power / prod_s (z - y_s) dz`` at simple poles ``y``.

    ``method="residues"`` sums ``pFq(x y_s) y_s^power / prod_{t != s}(y_s - y_t)``
    directly. The default collapses that sum with the identity
    ``sum_s y_s^k / prod_{t != s}(y_s - y_t) = h_{k-n+1}(y)``, which gives the
    same number without dividing by the gaps between poles.
    """
    y = np.asarray(y)
    _check_distinct(y)
    if power < 0:
        raise ValueError("power must be >= 0")
    n = len(y)
    if method == "residues":
        diffs = y[:, None] - y[None, :]
        np.fill_diagonal(diffs, 1.0)
        denom = np.prod(diffs, axis=1)
        vals = scalar_pfq(spec, x * y, K)
        return np.sum(vals * y ** power / denom)
    if method != "symmetric":
        raise ValueError(f"unknown method {method!r}")
    shift = power - n + 1
    start = max(0, -shift)
    if start > K:
        return 0.0
    # rescale y to unit modulus and carry the Taylor terms of pFq(x rho t)
    # as sign and log-magnitude, so neither h_j nor the terms overflow
    rho = float(np.max(np.abs(y)))
    if rho == 0:
        rho = 1.0
    h = complete_homogeneous(y / rho, K + shift)
    log_mag = np.full(K + 1, -np.inf)
    phase = np.ones(K + 1, dtype=np.result_type(x, float))
    log_mag[0] = 0.0
    z = x * rho
    for k in range(K):
        ratio = z / (k + 1)
        for a in spec.a:
            ratio = ratio * (a + k)
        for bb in spec.b:
            if bb + k == 0:
                raise ValueError("pochhammer pole")
            ratio = ratio / (bb + k)
        if ratio == 0:
            break
        log_mag[k + 1] = log_mag[k] + math.log(abs(ratio))
        phase[k + 1] = phase[k] * (ratio / abs(ratio))
    top = float(np.max(log_mag[start:]))
    if top == -np.inf:
        return 0.0  # series terminated before the first surviving power
    terms = phase[start:] * np.exp(log_mag[start:] - top)
    total = np.dot(terms, h[start + shift:])
    return total * math.exp(top) * rho ** shift


def _k_const(spec: HypgeomSpec, n: int, r: int) -> float:
    out = 1.0
    for ell in range(1, r + 1):
        out *= math.factorial(n - ell)
        for b in spec.b:
            for t in range(ell, n):
                out *= b - t
        den = 1.0
        for a in spec.a:
            for t in range(ell, n):
                den *= a - t
        if den == 0:
            raise ValueError("pochhammer pole")
        out /= den
    return out


def _k_block(spec: HypgeomSpec, n: int, k: int) -> float:
    out = 1.0
    for j in range(1, k):
        out /= math.factorial(k - j)
        for a in spec.a:
            for t in range(1, j + 1):
                out *= a - n + t
        den = 1.0
        for b in spec.b:
            for t in range(1, j + 1):
                den *= b - n + t
        if den == 0:
            raise ValueError("pochhammer pole")
        out /= den
    return out


def _require_unit_alpha(spec: HypgeomSpec) -> None:
    if spec.alpha != 1.0:
        raise ValueError("determinant representation requires alpha = 1")


def mhg_det_distinct(spec: HypgeomSpec, x, Y, K: int = DEFAULT_SERIES_K) -> float:
    """pFq^(1)(a; b; diag(x, 0..0), Y) for distinct nonzero ``x`` via an r x r determinant."""
    _require_unit_alpha(spec)
    y = np.asarray(Y.values if isinstance(Y, Spectrum) else Y)
    x = np.sort(np.asarray(x, dtype=float))[::-1]
    n, r = len(y), len(x)
    if r > n:
        raise ValueError("rank exceeds ambient dimension")
    if np.any(x == 0):
        raise ValueError("x entries must be nonzero")
    if np.any(np.diff(x) == 0):
        raise ValueError("coinciding x values: use mhg_det_mult")
    _check_distinct(y)
    shifted = spec.shifted(-(n - 1))
    A = np.empty((r, r), dtype=np.result_type(y, float))
    for i in range(r):
        for j in range(r):
            A[i, j] = residue_entry(shifted, x[i], y, j, K)
    vand = np.prod([x[i] - x[j] for i in range(r) for j in range(i + 1, r)])
    return _k_const(spec, n, r) / (vand * np.prod(x ** (n - r))) * np.linalg.det(A)


def mhg_det_mult(spec: HypgeomSpec, x: MultSpectrum, Y, K: int = DEFAULT_SERIES_K) -> float:
    """pFq^(1) with a rank-r argument whose nonzero values repeat with multiplicities."""
    _require_unit_alpha(spec)
    y = np.asarray(Y.values if isinstance(Y, Spectrum) else Y)
    n, r = len(y), x.r
    if r > n:
        raise ValueError("rank exceeds ambient dimension")
    if any(v == 0 for v in x.distinct):
        raise ValueError("x entries must be nonzero")
    _check_distinct(y)
    rows = []
    for xv, k in zip(x.distinct, x.mults):
        for i in range(1, k + 1):
            shifted = spec.shifted(-(n - 1) + k - i)
            rows.append([residue_entry(shifted, xv, y, k - i + j - 1, K) for j in range(1, r + 1)])
    A = np.array(rows)
    M = len(x.distinct)
    # repeated values contribute to the cross differences once per pair of copies
    vand = 1.0
    for i in range(M):
        for j in range(i + 1, M):
            vand *= (x.distinct[i] - x.distinct[j]) ** (x.mults[i] * x.mults[j])
    scale = 1.0
    for xv, k in zip(x.distinct, x.mults):
        scale *= _k_block(spec, n, k) / xv ** (k * (n - r))
    return _k_const(spec, n, r) / vand * scale * np.linalg.det(A)
