"""Partitions, Jack polynomials and truncated hypergeometric series.

Jack polynomials are expanded in the monomial symmetric basis. The
coefficients come from the triangular action of the Laplace-Beltrami type
operator

    D = (alpha/2) sum_i x_i^2 d_i^2 + sum_{i != j} x_i^2 / (x_i - x_j) d_i

on monomial symmetric functions, of which the Jack polynomials are the
eigenfunctions. Coefficients are cached per ``(kappa, alpha, max_len)``;
only monomials with at most ``max_len`` parts are ever needed to evaluate
on ``max_len`` variables, and that subsystem is closed under the recurrence.

This module is the slow, trusted reference for the determinant and contour
formulas in :mod:`spikelss.hypmatrix`.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in parts):
            raise ValueError(f"partition parts must be non-negative: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        parts = tuple(p for p in parts if p)
        object.__setattr__(self, "parts", parts)

    def weight(self) -> int:
        return sum(self.parts)

    def length(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def cells(self) -> Iterator[tuple[int, int]]:
        """Cells ``(i, j)`` of the Young diagram, 1-based."""
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"


@dataclass(frozen=True)
class HypgeomSpec:
    """Parameters ``(a_1..a_p; b_1..b_q)`` and ``alpha`` of a pFq series."""

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def shifted(self, da: float, db: float | None = None) -> "HypgeomSpec":
        db = da if db is None else db
        return HypgeomSpec(tuple(v + da for v in self.a), tuple(v + db for v in self.b), self.alpha)


@dataclass(frozen=True)
class Spectrum:
    """Diagonal of a matrix argument."""

    values: tuple = field(default_factory=tuple)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.all(np.isfinite(vals)):
            raise ValueError("spectrum entries must be finite")
        object.__setattr__(self, "values", tuple(vals.tolist()))

    def __len__(self):
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values)


def _as_array(x) -> np.ndarray:
    if isinstance(x, Spectrum):
        return x.array()
    return np.asarray(x)


def _as_partition(kappa) -> Partition:
    return kappa if isinstance(kappa, Partition) else Partition(tuple(kappa))


# ---------------------------------------------------------------- partitions

@lru_cache(maxsize=None)
def _partitions_of(k: int, max_len: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if k == 0:
        return ((),)
    if max_len == 0:
        return ()
    out = []
    for first in range(min(k, max_part), 0, -1):
        for rest in _partitions_of(k - first, max_len - 1, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(k: int, max_len: int | None = None) -> list[Partition]:
    """Partitions of ``k`` with at most ``max_len`` parts, in reverse lexicographic order."""
    max_len = k if max_len is None else max_len
    return [Partition(p) for p in _partitions_of(k, max_len, k)]


def partitions_up_to(k: int, max_len: int) -> list[Partition]:
    if k < 0 or max_len < 1:
        raise ValueError("need k >= 0 and max_len >= 1")
    out = []
    for w in range(k + 1):
        out.extend(partitions_of(w, max_len))
    return out


# ---------------------------------------------------------------- pochhammer

def gen_pochhammer(a, kappa, alpha: float, denominator: bool = False):
    """Generalized Pochhammer symbol as a finite product of linear factors.

    The product ``prod_i prod_{j<kappa_i} (a - (i-1)/alpha + j)`` is the
    analytic value of the gamma ratio. With ``denominator=True`` a vanishing
    product (a pole of the reciprocal) raises.
    """
    kappa = _as_partition(kappa)
    out = 1.0
    for i, ki in enumerate(kappa.parts):
        base = a - i / alpha
        for j in range(ki):
            out = out * (base + j)
    if denominator and out == 0:
        raise ValueError("pochhammer pole")
    return out


# ---------------------------------------------------------------- jack coefficients

def _hooks(kappa: Partition, alpha: float) -> tuple[float, float]:
    """Products of lower hooks ``l+1+alpha*a`` and upper hooks ``l+alpha*(a+1)``."""
    conj = kappa.conjugate().parts
    lower = upper = 1.0
    for i, j in kappa.cells():
        arm = kappa.parts[i - 1] - j
        leg = conj[j - 1] - i
        lower *= leg + 1 + alpha * arm
        upper *= leg + alpha * (arm + 1)
    return lower, upper


def _eigen_offset(mu: tuple[int, ...], alpha: float) -> float:
    # n-independent part of the operator's diagonal on m_mu
    return 0.5 * alpha * sum(p * (p - 1) for p in mu) - sum(i * p for i, p in enumerate(mu))


def _dominates(lam: tuple[int, ...], mu: tuple[int, ...]) -> bool:
    s1 = s2 = 0
    for i in range(max(len(lam), len(mu))):
        s1 += lam[i] if i < len(lam) else 0
        s2 += mu[i] if i < len(mu) else 0
        if s1 < s2:
            return False
    return True


def _spreads(mu: tuple[int, ...]) -> dict[tuple[int, ...], float]:
    """Partitions ``nu`` with ``m_mu`` appearing in ``D m_nu``, and that coefficient.

    ``nu`` arises from ``mu`` by replacing a pair of parts ``(u, v)`` with
    ``(p, u + v - p)`` for ``p > max(u, v)``; each position pair contributes
    ``p - q``.
    """
    out: dict[tuple[int, ...], float] = {}
    L = len(mu)
    for i in range(L):
        for j in range(i + 1, L):
            u, v = mu[i], mu[j]
            rest = mu[:i] + mu[i + 1:j] + mu[j + 1:]
            for p in range(max(u, v) + 1, u + v + 1):
                q = u + v - p
                nu = tuple(sorted(rest + (p, q), reverse=True))
                if nu[-1] == 0:
                    nu = tuple(t for t in nu if t > 0)
                out[nu] = out.get(nu, 0.0) + (p - q)
    return out


_COEFF_CACHE: dict[tuple, dict[tuple[int, ...], float]] = {}
_COEFF_LOCK = threading.Lock()


def jack_coefficients(kappa, alpha: float, max_len: int | None = None) -> dict[tuple[int, ...], float]:
    """Monomial coefficients of the C-normalized Jack polynomial.

    Returns ``{mu: c}`` for ``mu <= kappa`` (dominance) with at most
    ``max_len`` parts such that ``C_kappa = sum c_mu m_mu``.
    """
    kappa = _as_partition(kappa)
    k = kappa.weight()
    max_len = k if max_len is None else min(max_len, k)
    key = (kappa.parts, float(alpha), max_len)
    cached = _COEFF_CACHE.get(key)
    if cached is not None:
        return cached
    with _COEFF_LOCK:
        cached = _COEFF_CACHE.get(key)
        if cached is not None:
            return cached
        coeffs = _compute_coefficients(kappa, float(alpha), max_len)
        _COEFF_CACHE[key] = coeffs
        return coeffs


def _compute_coefficients(kappa: Partition, alpha: float, max_len: int) -> dict[tuple[int, ...], float]:
    k = kappa.weight()
    if kappa.length() > max_len:
        return {}
    if k == 0:
        return {(): 1.0}
    lower, upper = _hooks(kappa, alpha)
    # J-normalization puts the product of lower hooks on m_kappa; C = alpha^k k!/j_kappa J
    lead = alpha ** k * math.factorial(k) / upper
    ek = _eigen_offset(kappa.parts, alpha)
    # decreasing reverse-lex order is a linear extension of dominance
    mus = [m.parts for m in partitions_of(k, max_len) if _dominates(kappa.parts, m.parts)]
    coeffs: dict[tuple[int, ...], float] = {kappa.parts: lead}
    for mu in mus:
        if mu == kappa.parts:
            continue
        total = 0.0
        for nu, d in _spreads(mu).items():
            c = coeffs.get(nu)
            if c is not None:
                total += d * c
        coeffs[mu] = total / (ek - _eigen_offset(mu, alpha))
    return coeffs


# ---------------------------------------------------------------- evaluation

@lru_cache(maxsize=None)
def _exponent_rows(mu: tuple[int, ...], n: int) -> np.ndarray:
    padded = mu + (0,) * (n - len(mu))
    return np.array(sorted(set(itertools.permutations(padded))), dtype=int)


def monomial(mu, x) -> np.ndarray:
    """Monomial symmetric function ``m_mu`` at ``x`` (last axis = variables)."""
    mu = tuple(_as_partition(mu).parts)
    x = _as_array(x)
    n = x.shape[-1]
    if len(mu) > n:
        return np.zeros(x.shape[:-1], dtype=x.dtype)
    if not mu:
        return np.ones(x.shape[:-1], dtype=x.dtype)
    E = _exponent_rows(mu, n)
    return np.prod(x[..., None, :] ** E, axis=-1).sum(axis=-1)


def jack_C(kappa, x, alpha: float):
    """C-normalized Jack polynomial ``C_kappa^(alpha)(x)``; 0 when ``l(kappa) > n``."""
    kappa = _as_partition(kappa)
    x = _as_array(x)
    n = x.shape[-1]
    if kappa.length() > n:
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
    coeffs = jack_coefficients(kappa, alpha, n)
    out = sum(c * monomial(mu, x) for mu, c in coeffs.items())
    return out if x.ndim > 1 else out[()] if isinstance(out, np.ndarray) else out


def jack_C_identity(kappa, n: int, alpha: float) -> float:
    """``C_kappa(1, ..., 1)`` with ``n`` ones, summed from the monomial expansion."""
    kappa = _as_partition(kappa)
    if kappa.length() > n:
        return 0.0
    total = 0.0
    for mu, c in jack_coefficients(kappa, alpha, n).items():
        total += c * len(_exponent_rows(mu, n))
    return total


def _nonzero_count(x: np.ndarray) -> int:
    if x.ndim == 1:
        return int(np.count_nonzero(x))
    return int(np.max(np.count_nonzero(x, axis=-1)))


def _check_convergence(spec: HypgeomSpec, X: np.ndarray, Y: np.ndarray) -> None:
    if spec.p > spec.q + 1:
        raise ValueError("divergent series")
    if spec.p == spec.q + 1:
        if np.max(np.abs(X)) * np.max(np.abs(Y)) >= 1:
            raise ValueError("series requires max|x| * max|y| < 1 when p = q + 1")


def mhg_shells(spec: HypgeomSpec, X, Y) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(shell_sum, shell_abs)`` for degrees 0, 1, 2, ...

    ``Y`` may carry leading batch axes; the shell arrays then share them.
    """
    X = _as_array(X)
    Y = _as_array(Y)
    n = X.shape[-1]
    if Y.shape[-1] != n:
        raise ValueError("matrix arguments must have equal size")
    _check_convergence(spec, X, Y)
    max_len = min(n, _nonzero_count(X), _nonzero_count(Y))
    batch = Y.shape[:-1]
    for k in itertools.count():
        shell = np.zeros(batch, dtype=np.result_type(X, Y, float))
        shell_abs = np.zeros(batch)
        if k == 0:
            shell = shell + 1.0
            shell_abs = shell_abs + 1.0
            yield shell, shell_abs
            continue
        if max_len == 0:
            yield shell, shell_abs
            continue
        kfact = math.factorial(k)
        for kappa in partitions_of(k, max_len):
            num = 1.0
            for a in spec.a:
                num *= gen_pochhammer(a, kappa, spec.alpha)
            if num == 0:
                continue
            den = 1.0
            for b in spec.b:
                den *= gen_pochhammer(b, kappa, spec.alpha, denominator=True)
            cx = jack_C(kappa, X, spec.alpha)
            if cx == 0:
                continue
            cy = jack_C(kappa, Y, spec.alpha)
            term = (num / den) * cx * cy / (jack_C_identity(kappa, n, spec.alpha) * kfact)
            shell = shell + term
            shell_abs = shell_abs + np.abs(term)
        yield shell, shell_abs


def mhg_series(spec: HypgeomSpec, X, Y, K: int):
    """Partial sum of the pFq series over ``|kappa| <= K``.

    Returns ``(value, tail_estimate)``; the tail estimate is the absolute
    magnitude of the degree-``K`` shell.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    value = 0.0
    last = 0.0
    for k, (shell, shell_abs) in enumerate(mhg_shells(spec, X, Y)):
        value = value + shell
        last = shell_abs
        if k == K:
            break
    return value, last


def mhg_series_auto(spec: HypgeomSpec, X, Y, tol: float = 1e-12, K_max: int = 120):
    """Sum shells until two consecutive shells fall below ``tol * max(1, |value|)``.

    Returns ``(value, tail_estimate, K)``.
    """
    value = 0.0
    small = 0
    for k, (shell, shell_abs) in enumerate(mhg_shells(spec, X, Y)):
        value = value + shell
        scale = np.maximum(1.0, np.abs(value))
        if k > 0 and np.all(shell_abs < tol * scale):
            small += 1
            if small >= 2:
                return value, float(np.max(shell_abs)), k
        else:
            small = 0
        if k >= K_max:
            raise RuntimeError(f"series not converged after K={K_max} shells")
    raise AssertionError("unreachable")


def scalar_pfq(spec: HypgeomSpec, z, K: int):
    """Truncated scalar ``pFq(a; b; z)`` summed to degree ``K`` (vectorized in ``z``)."""
    if spec.p > spec.q + 1:
        raise ValueError("divergent series")
    z = np.asarray(z)
    if spec.p == spec.q + 1 and np.any(np.abs(z) >= 1):
        raise ValueError("series requires |z| < 1 when p = q + 1")
    term = np.ones_like(z, dtype=np.result_type(z, float))
    total = term.copy()
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
        term = term * (num / den) * z / (k + 1)
        total = total + term
    return total[()] if total.ndim == 0 else total


def ensure_sequence(v) -> Sequence:
    return list(v) if not isinstance(v, (list, tuple)) else v
