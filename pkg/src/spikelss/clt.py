"""Limiting Gaussian law of linear spectral statistics for the spiked models.

For models A and B the statistic is ``sum f(x_k / n)``; for model C it is
``sum f(x_k)`` over the F eigenvalues, and every integral is taken in the
variable ``f = x/(1+x)``, i.e. over ``g(y) = f(y / (1 - y))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .models import SpikedModel
from .numerics import (DEFAULT_QUAD_N, cheb_derivative, cheb_fit, gc1_nodes,
                       gc2_nodes, pv_hilbert)
from .statistics import LinearStatistic

NEAR_CRITICAL = "near-critical spike, slow convergence"
NEAR_CRITICAL_TOL = 1e-3


@dataclass(frozen=True)
class SupportInterval:
    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise ValueError("support needs 0 <= a < b")

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def half(self) -> float:
        return 0.5 * (self.b - self.a)


@dataclass(frozen=True)
class SaddleInfo:
    """Saddlepoint ``z0`` and the signed value of ``sqrt((z0-a)(z0-b))``."""

    z0: float
    sqrt_branch: float
    regime: str
    spike: float = float("nan")
    multiplicity: int = 1
    warnings: tuple[str, ...] = ()


@dataclass
class CLTResult:
    mu: float
    sigma2: float
    mu_bars: list[float]
    support: SupportInterval
    saddles: list[SaddleInfo] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def mean_offset(self) -> float:
        return float(sum(self.mu_bars))

    def predicted_mean(self, n: int) -> float:
        return n * self.mu + self.mean_offset

    @property
    def predicted_var(self) -> float:
        return self.sigma2


def support(model: SpikedModel) -> SupportInterval:
    """Edges of the limiting spectrum (of ``x/n`` for A/B, of ``x/(1+x)`` for C)."""
    if model.kind in ("A", "B"):
        c = model.c
        if c < 1:
            raise ValueError("models A and B need c = m/n >= 1")
        s = math.sqrt(c)
        return SupportInterval((1 - s) ** 2, (1 + s) ** 2)
    c1, c2 = model.c1, model.c2
    if not (c1 > 1 and c2 > 1):
        raise ValueError("model C needs c1 > 1 and c2 > 1")
    root = math.sqrt(c1 * c2 * (c1 + c2 - 1))
    base = c1 * (c1 + c2 - 1) + c2
    den = (c1 + c2) ** 2
    return SupportInterval((base - 2 * root) / den, (base + 2 * root) / den)


def critical_spike(model: SpikedModel) -> float:
    """Spike value at which the saddlepoint touches the upper support edge."""
    if model.kind == "A":
        return 1.0 / math.sqrt(model.c)
    if model.kind == "B":
        return math.sqrt(model.c)
    c1, c2 = model.c1, model.c2
    return (c1 + math.sqrt(c1 * c2 * (c1 + c2 - 1))) / (c2 - 1)


def saddle_for_value(model: SpikedModel, value: float, multiplicity: int = 1) -> SaddleInfo:
    if not value > 0:
        raise ValueError("spike value must be positive")
    if model.kind == "A":
        c, d = model.c, value
        z0 = (1 + c * d) * (1 + d) / d
        branch = (1 - c * d * d) / d
    elif model.kind == "B":
        c, v = model.c, value
        z0 = (1 + v) * (c + v) / v
        branch = c / v - v
    else:
        c1, c2, v = model.c1, model.c2, value
        z0 = (1 + v) * (c1 + v) / (v * (c1 + c2 + v))
        branch = (c1 * (c1 + c2) + 2 * c1 * v - (c2 - 1) * v * v) / (v * (c1 + c2 + v) * (c1 + c2))
    crit = critical_spike(model)
    if math.isclose(value, crit, rel_tol=1e-12):
        regime = "critical"
    else:
        regime = "supercritical" if value > crit else "subcritical"
    sup = support(model)
    notes = ()
    if abs(z0 - sup.b) < NEAR_CRITICAL_TOL * (sup.b - sup.a):
        notes = (NEAR_CRITICAL,)
    return SaddleInfo(z0, branch, regime, value, multiplicity, notes)


def saddlepoint(model: SpikedModel, ell: int) -> SaddleInfo:
    """Saddlepoint of the ``ell``-th distinct spike (0-based)."""
    s = model.spikes[ell]
    return saddle_for_value(model, s.value, s.multiplicity)


def mp_density(x, sup: SupportInterval):
    """Marchenko-Pastur density on ``[a, b]``; zero outside."""
    x = np.asarray(x, dtype=float)
    inside = (x >= sup.a) & (x <= sup.b) & (x > 0)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt((sup.b - xi) * (xi - sup.a)) / (2 * np.pi * xi)
    return out[()] if out.ndim == 0 else out


def integrand(f: LinearStatistic, model: SpikedModel):
    """The function integrated against the limiting weights."""
    if model.kind == "C":
        return lambda y: f(y / (1.0 - y))
    return f


def integrand_derivative(f: LinearStatistic, model: SpikedModel):
    if model.kind == "C":
        # chain rule: d/dy f(y/(1-y)) = f'(y/(1-y)) / (1-y)^2
        return lambda y: f.derivative(y / (1.0 - y)) / (1.0 - y) ** 2
    return f.derivative


def _check_edges(f: LinearStatistic, model: SpikedModel, sup: SupportInterval) -> None:
    g = integrand(f, model)
    with np.errstate(all="ignore"):
        edge = np.asarray(g(np.array([sup.a, sup.b])), dtype=float)
    if not np.all(np.isfinite(edge)):
        raise ValueError("statistic singular at support edge")


def _values(g, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        y = np.asarray(g(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite function value")
    return y


def mean_mu(f: LinearStatistic, model: SpikedModel, N: int = DEFAULT_QUAD_N) -> float:
    """Per-eigenvalue mean coefficient ``mu`` (``mu_F`` for model C)."""
    sup = support(model)
    _check_edges(f, model, sup)
    a, b = sup.a, sup.b
    if model.kind == "C":
        x, w = gc2_nodes(a, b, N)
        g = _values(integrand(f, model), x)
        return (model.c1 + model.c2) / (2 * np.pi) * float(np.dot(w, g / (x * (1 - x))))
    if a > 0:
        x, w = gc2_nodes(a, b, N)
        return float(np.dot(w, _values(f, x) / x)) / (2 * np.pi)
    # a = 0: sqrt((b-x)x)/x = (b-x)/sqrt((b-x)x), a first-kind weight
    x, w = gc1_nodes(a, b, N)
    return float(np.dot(w, _values(f, x) * (b - x))) / (2 * np.pi)


def var_sigma2(f: LinearStatistic, model: SpikedModel, N: int = DEFAULT_QUAD_N) -> float:
    """Limiting variance via Chebyshev fit of ``g'`` and its finite Hilbert transform."""
    sup = support(model)
    _check_edges(f, model, sup)
    if f.is_constant():
        return 0.0
    dg = cheb_derivative(cheb_fit(integrand(f, model), sup.a, sup.b, N))
    x, w = gc1_nodes(sup.a, sup.b, N)
    g = _values(integrand(f, model), x)
    return float(np.dot(w, g * pv_hilbert(dg, x))) / (2 * np.pi ** 2)


def var_sigma2_chebyshev(f: LinearStatistic, model: SpikedModel, N: int = DEFAULT_QUAD_N) -> float:
    """Cross-check: ``sigma^2 = (1/4) sum_k k c_k^2`` from the Chebyshev coefficients of g."""
    sup = support(model)
    _check_edges(f, model, sup)
    c = cheb_fit(integrand(f, model), sup.a, sup.b, N).coeffs
    k = np.arange(len(c))
    return 0.25 * float(np.sum(k * c * c))


def mu_bar(f: LinearStatistic, model: SpikedModel, sp: SaddleInfo, N: int = DEFAULT_QUAD_N) -> float:
    """Spike correction to the mean for one spike (counted once).

    The resolvent integral ``int w(x)/(z0-x) dx`` is continued onto the sheet
    selected by the signed square root ``s``, where it equals ``pi/s``. Writing
    ``g(x) = g(z0) + (g(x)-g(z0))`` then gives

        mu_bar = g(z0)/2 + (s/2pi) int (g(x)-g(z0))/(z0-x) w dx - (1/2pi) int g w dx

    which is finite at the critical point and analytic in the spike. When
    ``g(z0)`` is undefined and ``s > 0`` the principal sheet applies and the
    integral is taken as written.
    """
    sup = support(model)
    _check_edges(f, model, sup)
    g = integrand(f, model)
    x, w = gc1_nodes(sup.a, sup.b, N)
    gx = _values(g, x)
    I0 = float(np.dot(w, gx))
    z0, s = sp.z0, sp.sqrt_branch
    with np.errstate(all="ignore"):
        gz = float(np.asarray(g(np.array([z0])), dtype=float)[0])
    if np.isfinite(gz):
        J = float(np.dot(w, (gx - gz) / (z0 - x)))
        return 0.5 * gz + s * J / (2 * np.pi) - I0 / (2 * np.pi)
    if s > 0:
        I1 = float(np.dot(w, gx / (z0 - x)))
        return (s * I1 - I0) / (2 * np.pi)
    raise ValueError("statistic undefined at the saddlepoint")


def rho_tilde2(x, sp: SaddleInfo, sup: SupportInterval):
    """Spike-induced first-order density correction, as written on the principal sheet."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= sup.a) or np.any(x >= sup.b):
        raise ValueError("point outside open support")
    root = np.sqrt((sup.b - x) * (x - sup.a))
    return (sp.sqrt_branch / (sp.z0 - x) - 1.0) / (2 * np.pi * root)


def clt_params(model: SpikedModel, f: LinearStatistic, N: int = DEFAULT_QUAD_N) -> CLTResult:
    """Assemble ``mu``, ``sigma^2`` and one ``mu_bar`` per spike copy."""
    sup = support(model)
    mu = mean_mu(f, model, N)
    sigma2 = var_sigma2(f, model, N)
    mu_bars: list[float] = []
    saddles: list[SaddleInfo] = []
    notes: list[str] = []
    for ell, spike in enumerate(model.spikes):
        sp = saddlepoint(model, ell)
        saddles.append(sp)
        value = 0.0 if f.is_constant() else mu_bar(f, model, sp, N)
        mu_bars.extend([value] * spike.multiplicity)
        for note in sp.warnings:
            msg = f"spike {spike.value!r}: {note}"
            notes.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return CLTResult(mu, sigma2, mu_bars, sup, saddles, notes)
