"""Acceptance criteria AC-1 .. AC-10 at their stated tolerances.

Each test prints one PASS/FAIL line; the same lines are repeated in the
pytest terminal summary.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning

from oracles import power_sum, pv_variance
from spikelss import clt, density, ensemble, hypmatrix, jack
from spikelss.models import SpikedModel, parse_spikes
from spikelss.statistics import LinearStatistic

SEED = 20240611
MC_TRIALS = 2000


def _rel(u, v) -> float:
    return abs(u - v) / max(abs(v), 1e-300)


def test_ac1_jack_power_sum_identity(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        for n in range(1, 5):
            for _ in range(20):
                x = rng.uniform(0.05, 2.0, n)
                for k in range(1, 9):
                    total = sum(jack.jack_C(p, x, alpha) for p in jack.partitions_of(k, n))
                    worst = max(worst, _rel(total, power_sum(x, k)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 30
    record("AC-1", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")
    assert ok


def _distinct_instance(rng, n: int, r: int):
    x = np.sort(rng.uniform(0.05, 0.7, r))[::-1]
    y = rng.uniform(-0.7, 0.7, n)
    assert np.max(np.abs(x)) * np.max(np.abs(y)) < 0.5
    return x, y


def _series(spec, x, y):
    full = np.zeros(len(y))
    full[: len(x)] = x
    value, tail, _ = jack.mhg_series_auto(spec, full, y, tol=1e-13)
    return float(value), float(np.max(tail))


PQ_SPECS = {(0, 0): ((), ()), (0, 1): ((), (3.5,)), (1, 1): ((1.5,), (3.5,))}


def test_ac2_determinant_vs_series(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst, worst_tail = 0.0, 0.0
    for a, b in PQ_SPECS.values():
        spec = jack.HypgeomSpec(a, b, 1.0)
        for n in (3, 4, 5):
            for r in (1, 2, 3):
                for _ in range(10):
                    x, y = _distinct_instance(rng, n, r)
                    ser, tail = _series(spec, x, y)
                    det = hypmatrix.mhg_det_distinct(spec, x, y)
                    worst = max(worst, _rel(det, ser))
                    worst_tail = max(worst_tail, tail)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-5 and worst_tail < 1e-9 and elapsed < 300
    record("AC-2", ok, f"max rel diff {worst:.2e}, max series tail {worst_tail:.1e}, {elapsed:.1f}s")
    assert ok


def _spread(values, mults, eps):
    return np.array([v - j * eps for v, k in zip(values, mults) for j in range(k)])


def test_ac3_multiplicity_determinant(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 3)
    eps = 1e-3
    worst_series, worst_eps, worst_order = 0.0, 0.0, 0.0
    for a, b in PQ_SPECS.values():
        spec = jack.HypgeomSpec(a, b, 1.0)
        for mults in ((2,), (2, 1)):
            for n in (4, 5):
                for _ in range(3):
                    values = np.sort(rng.uniform(0.1, 0.7, len(mults)))[::-1]
                    y = rng.uniform(-0.7, 0.7, n)
                    ms = hypmatrix.MultSpectrum(tuple(values), mults)
                    det = hypmatrix.mhg_det_mult(spec, ms, y)
                    ser, _ = _series(spec, ms.expanded(), y)
                    worst_series = max(worst_series, _rel(det, ser))
                    d1 = abs(hypmatrix.mhg_det_distinct(spec, _spread(values, mults, eps), y) - det)
                    d2 = abs(hypmatrix.mhg_det_distinct(spec, _spread(values, mults, eps / 2), y) - det)
                    worst_eps = max(worst_eps, d1 / abs(det) / eps)
                    # first-order convergence: halving eps halves the gap
                    worst_order = max(worst_order, abs(d1 / d2 - 2.0))
    elapsed = time.perf_counter() - t0
    ok = worst_series < 1e-5 and worst_eps < 10 and worst_order < 0.5 and elapsed < 120
    record("AC-3", ok, f"series rel diff {worst_series:.2e}, perturbed gap/eps {worst_eps:.3f}, "
                       f"halving ratio off by {worst_order:.3f}, {elapsed:.1f}s")
    assert ok


def test_ac4_closed_form_clt_values(record):
    worst = 0.0
    for c in (1.5, 2.0, 4.0):
        n = 100
        m = int(round(c * n))
        deltas = parse_spikes("3.0:1,1.5:1,0.3:1")
        for kind in ("A", "B"):
            model = SpikedModel(kind, n, m=m, spikes=deltas)
            res = clt.clt_params(model, LinearStatistic.linear())
            errs = [abs(res.mu - c), abs(res.sigma2 - c)]
            if kind == "A":
                errs += [abs(mb - c * d) for mb, d in zip(res.mu_bars, model.expanded_values())]
            worst = max(worst, *errs)
    const_err = 0.0
    for kind, kw in (("A", {"m": 200}), ("B", {"m": 200}), ("C", {"m1": 200, "m2": 200})):
        model = SpikedModel(kind, 100, spikes=parse_spikes("3.0:1,1.5:2"), **kw)
        res = clt.clt_params(model, LinearStatistic.constant(1.0))
        const_err = max(const_err, abs(res.mu - 1), abs(res.sigma2), *map(abs, res.mu_bars))
    ok = worst < 1e-8 and const_err < 1e-12
    record("AC-4", ok, f"f=x max abs err {worst:.1e}, f=1 max abs err {const_err:.1e}")
    assert ok


def _mc_line(rep: ensemble.MCReport, elapsed: float) -> str:
    return (f"z {rep.mean_z_score:+.3f}, var ratio {rep.var_ratio:.4f}, "
            f"KS p {rep.ks_pvalue:.3f}, {elapsed:.1f}s")


def _run_mc(model, stat):
    t0 = time.perf_counter()
    rep = ensemble.run_mc(ensemble.MCConfig(model, stat, MC_TRIALS, SEED))
    return rep, time.perf_counter() - t0


def test_ac5_monte_carlo_model_a(record):
    model = SpikedModel("A", 100, m=200, spikes=parse_spikes("3.0:1,1.5:1"))
    rep, elapsed = _run_mc(model, LinearStatistic.log())
    ok = rep.passed() and elapsed < 300
    record("AC-5", ok, _mc_line(rep, elapsed))
    assert ok


def test_ac6_monte_carlo_multiplicity(record):
    model = SpikedModel("A", 100, m=200, spikes=parse_spikes("3.0:2"))
    rep, elapsed = _run_mc(model, LinearStatistic.log())
    assert len(rep.prediction.mu_bars) == 2
    ok = rep.passed() and elapsed < 300
    record("AC-6", ok, _mc_line(rep, elapsed))
    assert ok


def test_ac7_monte_carlo_model_b(record):
    model = SpikedModel("B", 100, m=200, spikes=parse_spikes("2.5:1,1.2:1"))
    rep, elapsed = _run_mc(model, LinearStatistic.power(2))
    ok = rep.passed()
    record("AC-7", ok, _mc_line(rep, elapsed))
    assert ok


def test_ac8_monte_carlo_model_c(record):
    model = SpikedModel("C", 100, m1=200, m2=200, spikes=parse_spikes("2.0:1"))
    rep, elapsed = _run_mc(model, LinearStatistic.log())
    null = model.with_spikes(())
    sup = clt.support(null)
    pts = np.concatenate([ensemble.sample_model(null, ensemble.trial_rng(SEED, t)) for t in range(50)])
    outside = ensemble.mass_outside(pts / (1 + pts), sup, 0.05 * (sup.b - sup.a))
    ok = rep.passed() and outside < 0.01
    record("AC-8", ok, f"{_mc_line(rep, elapsed)}, null mass outside widened support {outside:.4f}")
    assert ok


def test_ac9_variance_cross_method(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 9)
    models = [SpikedModel("A", 100, m=200), SpikedModel("C", 100, m1=200, m2=200)]
    worst_identity, worst_pipeline = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for model in models:
            sup = clt.support(model)
            for _ in range(10):
                deg = int(rng.integers(1, 9))
                f = LinearStatistic.poly(rng.normal(size=deg + 1))
                ref = pv_variance(clt.integrand(f, model), clt.integrand_derivative(f, model), sup.a, sup.b)
                worst_identity = max(worst_identity, _rel(clt.var_sigma2_chebyshev(f, model), ref))
                worst_pipeline = max(worst_pipeline, _rel(clt.var_sigma2(f, model), ref))
    elapsed = time.perf_counter() - t0
    ok = worst_identity < 1e-6 and worst_pipeline < 1e-6
    record("AC-9", ok, f"identity vs double quadrature {worst_identity:.1e}, "
                       f"pipeline vs double quadrature {worst_pipeline:.1e}, {elapsed:.1f}s")
    assert ok


def test_ac10_density_normalization(record):
    t0 = time.perf_counter()
    cases = {
        "A": SpikedModel("A", 2, m=3, spikes=parse_spikes("1.0:1")),
        "B": SpikedModel("B", 2, m=3, spikes=parse_spikes("1.0:1")),
        "C": SpikedModel("C", 2, m1=3, m2=4, spikes=parse_spikes("1.0:1")),
    }
    totals = {k: density.normalization_integral(m, 40) for k, m in cases.items()}
    elapsed = time.perf_counter() - t0
    ok = all(abs(t - 1) < 1e-3 for t in totals.values()) and elapsed < 120
    detail = ", ".join(f"{k} {v:.12f}" for k, v in totals.items())
    record("AC-10", ok, f"{detail}, {elapsed:.1f}s")
    assert ok
