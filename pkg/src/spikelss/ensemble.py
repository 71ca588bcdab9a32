"""Seeded Monte Carlo sampling of the spiked ensembles.

Every trial owns an independent Philox stream derived from ``(seed, trial)``,
so results do not depend on worker count or scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.linalg import solve_triangular

from .clt import CLTResult, SupportInterval, clt_params, mp_density
from .models import SpikedModel
from .numerics import DEFAULT_QUAD_N
from .statistics import LinearStatistic

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Circular complex Gaussian entries with ``E|g|^2 = 1``."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def hermitian_eigenvalues(H) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if np.max(np.abs(H - H.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(H)


def _spike_diagonal(n: int, values: np.ndarray) -> np.ndarray:
    d = np.zeros(n)
    d[: len(values)] = values
    return d


def _noncentral_factor(n: int, m: int, nus: np.ndarray, rng) -> np.ndarray:
    X = complex_gaussian(rng, (n, m))
    shift = np.sqrt(n * _spike_diagonal(n, nus))
    k = min(n, m)
    X[np.arange(k), np.arange(k)] += shift[:k]
    return X


def sample_model_A(n: int, m: int, spikes, rng) -> np.ndarray:
    """Eigenvalues of ``X X^H`` with columns ``CN(0, diag(1 + delta))``."""
    deltas = np.asarray(spikes, dtype=float)
    X = complex_gaussian(rng, (n, m))
    X *= np.sqrt(1.0 + _spike_diagonal(n, deltas))[:, None]
    return hermitian_eigenvalues(X @ X.conj().T)


def sample_model_B(n: int, m: int, spikes, rng) -> np.ndarray:
    """Eigenvalues of ``(M + G)(M + G)^H`` where ``M M^H`` has eigenvalues ``n nu``."""
    X = _noncentral_factor(n, m, np.asarray(spikes, dtype=float), rng)
    return hermitian_eigenvalues(X @ X.conj().T)


@dataclass
class ResampleCounter:
    count: int = 0


def sample_model_C(n: int, m1: int, m2: int, spikes, rng, counter: ResampleCounter | None = None) -> np.ndarray:
    """Eigenvalues of ``W1 W2^{-1}`` through the Cholesky factor of ``W2``."""
    X1 = _noncentral_factor(n, m1, np.asarray(spikes, dtype=float), rng)
    W1 = X1 @ X1.conj().T
    while True:
        X2 = complex_gaussian(rng, (n, m2))
        try:
            L = np.linalg.cholesky(X2 @ X2.conj().T)
            break
        except np.linalg.LinAlgError:
            if counter is not None:
                counter.count += 1
            log.warning("W2 numerically singular, resampling")
    T = solve_triangular(L, W1, lower=True)
    H = solve_triangular(L, T.conj().T, lower=True)
    return hermitian_eigenvalues(0.5 * (H + H.conj().T))


def sample_model(model: SpikedModel, rng, counter: ResampleCounter | None = None) -> np.ndarray:
    spikes = model.expanded_values()
    if model.kind == "A":
        return sample_model_A(model.n, model.m, spikes, rng)
    if model.kind == "B":
        return sample_model_B(model.n, model.m, spikes, rng)
    return sample_model_C(model.n, model.m1, model.m2, spikes, rng, counter)


def lss(eigs, f: LinearStatistic, kind: str) -> float:
    """``sum f(x/n)`` for models A and B, ``sum f(x)`` for model C."""
    eigs = np.asarray(eigs, dtype=float)
    points = eigs / len(eigs) if kind in ("A", "B") else eigs
    vals = np.asarray(f(points), dtype=float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise ValueError(f"statistic undefined at eigenvalue {points[bad][0]!r}")
    return float(np.sum(vals))


@dataclass(frozen=True)
class MCTolerances:
    max_abs_z: float = 4.0
    var_ratio_low: float = 0.85
    var_ratio_high: float = 1.15
    min_ks_pvalue: float = 0.01


@dataclass
class MCConfig:
    model: SpikedModel
    statistic: LinearStatistic
    trials: int
    seed: int
    workers: int = 1
    quad_n: int = DEFAULT_QUAD_N
    tolerances: MCTolerances = field(default_factory=MCTolerances)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class MCReport:
    trials: int
    empirical_mean: float
    mean_stderr: float
    empirical_var: float
    var_stderr: float
    predicted_mean: float
    predicted_var: float
    mean_z_score: float
    var_ratio: float
    ks_statistic: float
    ks_pvalue: float
    samples: np.ndarray
    resamples: int = 0
    flags: list[str] = field(default_factory=list)
    prediction: CLTResult | None = None

    @property
    def standardized(self) -> np.ndarray:
        if not self.predicted_var > 0:
            return np.full_like(self.samples, np.nan)
        return (self.samples - self.predicted_mean) / math.sqrt(self.predicted_var)

    def checks(self, tol: MCTolerances = MCTolerances()) -> dict[str, bool]:
        return {
            "mean": bool(abs(self.mean_z_score) < tol.max_abs_z),
            "variance": bool(tol.var_ratio_low <= self.var_ratio <= tol.var_ratio_high),
            "normality": bool(self.ks_pvalue > tol.min_ks_pvalue),
        }

    def passed(self, tol: MCTolerances = MCTolerances()) -> bool:
        return all(self.checks(tol).values())


def _trial_block(args) -> tuple[list[float], int]:
    model, f, seed, trials = args
    counter = ResampleCounter()
    out = [lss(sample_model(model, trial_rng(seed, t), counter), f, model.kind) for t in trials]
    return out, counter.count


def simulate_lss(model: SpikedModel, f: LinearStatistic, trials: int, seed: int,
                 workers: int = 1) -> tuple[np.ndarray, int]:
    """LSS values for trials ``0..trials-1`` in trial order, plus the resample count."""
    if workers <= 1 or trials < 2:
        vals, resamples = _trial_block((model, f, seed, range(trials)))
        return np.array(vals), resamples
    chunks = np.array_split(np.arange(trials), workers)
    jobs = [(model, f, seed, [int(t) for t in c]) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_trial_block, jobs))
    vals = [v for block, _ in results for v in block]
    return np.array(vals), sum(r for _, r in results)


def run_mc(cfg: MCConfig) -> MCReport:
    """Compare empirical LSS moments and shape with the predicted Gaussian law."""
    pred = clt_params(cfg.model, cfg.statistic, cfg.quad_n)
    samples, resamples = simulate_lss(cfg.model, cfg.statistic, cfg.trials, cfg.seed, cfg.workers)
    T = len(samples)
    pmean = pred.predicted_mean(cfg.model.n)
    pvar = pred.predicted_var
    flags: list[str] = list(pred.warnings)
    emp_mean = float(np.mean(samples))
    if T < 2:
        flags.append("variance undefined for a single trial")
        emp_var = mean_se = var_se = z = ratio = float("nan")
        ks_stat = ks_p = float("nan")
    else:
        emp_var = float(np.var(samples, ddof=1))
        sd = math.sqrt(emp_var)
        mean_se = sd / math.sqrt(T)
        var_se = emp_var * math.sqrt(2.0 / (T - 1))
        z = (emp_mean - pmean) / mean_se if mean_se > 0 else float("nan")
        ratio = emp_var / pvar if pvar > 0 else float("nan")
        if pvar > 0:
            ks = stats.kstest((samples - pmean) / math.sqrt(pvar), "norm")
            ks_stat, ks_p = float(ks.statistic), float(ks.pvalue)
        else:
            flags.append("predicted variance is zero; shape test skipped")
            ks_stat = ks_p = float("nan")
    if resamples:
        flags.append(f"W2 resampled {resamples} times")
    return MCReport(T, emp_mean, mean_se, emp_var, var_se, pmean, pvar, z, ratio,
                    ks_stat, ks_p, samples, resamples, flags, pred)


def dump_samples(path, samples) -> None:
    """One value per line with 17 significant digits."""
    with open(path, "w") as fh:
        for v in samples:
            fh.write(f"{float(v):.17g}\n")


def histogram_sup_distance(points, density, sup: SupportInterval, bins: int = 40) -> float:
    """Largest gap between a normalized histogram on ``[a, b]`` and bin averages of a density."""
    edges = np.linspace(sup.a, sup.b, bins + 1)
    counts, _ = np.histogram(points, bins=edges)
    width = edges[1] - edges[0]
    emp = counts / (len(points) * width)
    # bin averages of the density by a fine midpoint rule
    fine = np.linspace(0, 1, 33)[1:-1]
    ref = np.array([np.mean(density(lo + fine * width)) for lo in edges[:-1]])
    return float(np.max(np.abs(emp - ref)))


def null_mp_distance(model: SpikedModel, seed: int, trials: int = 1, bins: int = 40) -> float:
    """Sup distance between pooled null spectra of ``x/n`` and the limiting law (A/B)."""
    from .clt import support

    null = model.with_spikes(())
    pts = np.concatenate([sample_model(null, trial_rng(seed, t)) / null.n for t in range(trials)])
    sup = support(null)
    return histogram_sup_distance(pts, lambda x: mp_density(x, sup), sup, bins)


def mass_outside(points, sup: SupportInterval, widen: float) -> float:
    points = np.asarray(points)
    return float(np.mean((points < sup.a - widen) | (points > sup.b + widen)))
