"""Joint eigenvalue densities of the spiked ensembles at small n.

Each density is a spike-free weight times a pFq^(1) of two matrix
arguments whose first argument has rank r:

* A: ``0F0(diag(delta/(1+delta)), x)`` against the Laguerre weight
* B: ``0F1(m; diag(n nu), x)`` against the same weight
* C: ``1F1(m1+m2; m1; diag(n nu), f)`` against the Jacobi weight in
  ``f = x/(1+x)`` coordinates

The pFq is evaluated through the r x r determinant of residue sums
(repeated spikes use the multiplicity form), so the r-fold contour integral
never has to be discretized. Densities are of the unordered eigenvalues,
hence the ``1/n!``.
"""

from __future__ import annotations

import math

import numpy as np

from .hypmatrix import MultSpectrum, mhg_det_distinct, mhg_det_mult
from .jack import HypgeomSpec
from .models import SpikedModel


def _lfact(k: int) -> float:
    return math.lgamma(k + 1)


def log_norm_const(model: SpikedModel) -> float:
    """Log of the constant in front of weight x Vandermonde^2 x pFq."""
    n = model.n
    vals, mults = model.values, np.array(model.mults)
    out = -_lfact(n)
    if model.kind in ("A", "B"):
        out -= sum(_lfact(model.m - j) + _lfact(n - j) for j in range(1, n + 1))
        if model.kind == "A":
            out -= model.m * float(np.dot(mults, np.log1p(vals))) if len(vals) else 0.0
        else:
            out -= n * float(np.dot(mults, vals)) if len(vals) else 0.0
    else:
        m1, m2 = model.m1, model.m2
        out += sum(_lfact(m1 + m2 - j) - _lfact(m1 - j) - _lfact(m2 - j) - _lfact(n - j)
                   for j in range(1, n + 1))
        out -= n * float(np.dot(mults, vals)) if len(vals) else 0.0
    return out


def hypergeometric_spec(model: SpikedModel) -> tuple[HypgeomSpec, np.ndarray]:
    """The pFq parameters and the nonzero first-argument values for a model."""
    n = model.n
    if model.kind == "A":
        d = model.values
        return HypgeomSpec((), (), 1.0), d / (1.0 + d)
    if model.kind == "B":
        return HypgeomSpec((), (float(model.m),), 1.0), n * model.values
    return HypgeomSpec((float(model.m1 + model.m2),), (float(model.m1),), 1.0), n * model.values


def _series_order(scale: float, n: int) -> int:
    # terms behave like scale^k / k!, which is negligible past e*scale + margin
    return int(math.e * scale) + 40 + 2 * n


def spike_factor(model: SpikedModel, eigs: np.ndarray) -> float:
    """The pFq^(1) value carrying the spike dependence (1 without spikes)."""
    if model.r == 0:
        return 1.0
    spec, xs = hypergeometric_spec(model)
    K = _series_order(float(np.max(np.abs(xs)) * np.max(np.abs(eigs))), model.n)
    if all(k == 1 for k in model.mults):
        return float(mhg_det_distinct(spec, xs, eigs, K))
    return float(mhg_det_mult(spec, MultSpectrum(tuple(xs), model.mults), eigs, K))


def _log_vandermonde_sq(x: np.ndarray) -> float:
    d = np.abs(x[:, None] - x[None, :])
    iu = np.triu_indices(len(x), 1)
    return 2.0 * float(np.sum(np.log(d[iu])))


def log_joint_density(model: SpikedModel, eigs) -> float:
    """Natural log of the joint density; ``-inf`` outside the support."""
    x = np.sort(np.asarray(eigs, dtype=float))
    if x.shape != (model.n,):
        raise ValueError(f"expected {model.n} eigenvalues")
    if np.any(np.diff(x) == 0):
        raise ValueError("coinciding eigenvalues")
    n = model.n
    if model.kind in ("A", "B"):
        if x[0] <= 0:
            return -math.inf
        weight = float(np.sum((model.m - n) * np.log(x) - x))
    else:
        if x[0] <= 0 or x[-1] >= 1:
            return -math.inf
        weight = float(np.sum((model.m1 - n) * np.log(x) + (model.m2 - n) * np.log1p(-x)))
    value = spike_factor(model, x)
    if not value > 0:
        raise ArithmeticError(f"spike factor evaluated to non-positive {value!r}")
    return log_norm_const(model) + weight + _log_vandermonde_sq(x) + math.log(value)


def joint_density(model: SpikedModel, eigs) -> float:
    """Joint density of the unordered eigenvalues (f-coordinates for model C)."""
    return math.exp(log_joint_density(model, eigs))


def joint_density_f_ratio(model: SpikedModel, x) -> float:
    """Model C density in the F-eigenvalue coordinates ``x`` (Jacobian included)."""
    if model.kind != "C":
        raise ValueError("only model C has an f-coordinate form")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        return 0.0
    f = x / (1.0 + x)
    return joint_density(model, f) * float(np.prod(1.0 / (1.0 + x) ** 2))


def _laguerre_rule(N: int, scale: float) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.laguerre.laggauss(N)
    # int_0^inf g(x) dx = scale * int e^{-t} [e^t g(scale t)] dt
    return scale * t, scale * w * np.exp(t)


def normalization_integral(model: SpikedModel, N: int = 60) -> float:
    """Tensor-product quadrature of the density over its support (n = 2 only)."""
    if model.n != 2:
        raise ValueError("normalization quadrature is implemented for n = 2")
    if model.kind in ("A", "B"):
        spread = 1.0 + (float(np.max(model.values)) if model.kind == "A" and model.r else 0.0)
        nodes, weights = _laguerre_rule(N, spread)
    else:
        t, w = np.polynomial.legendre.leggauss(N)
        nodes, weights = 0.5 * (t + 1.0), 0.5 * w
    total = 0.0
    for i in range(N):
        for j in range(N):
            if i == j:
                continue  # the density vanishes on the diagonal
            total += weights[i] * weights[j] * joint_density(model, [nodes[i], nodes[j]])
    return total
