"""Fast invariant checks across all modules, used by ``spikelss selftest``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import clt, density, ensemble, hypmatrix, jack, numerics
from .models import SpikedModel, parse_spikes
from .statistics import LinearStatistic


@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def check_quadrature():
    got = [numerics.gc2_integrate(lambda x: np.ones_like(x), 0, 4, 16),
           numerics.gc1_integrate(lambda x: x, 0, 4, 16),
           numerics.gc1_integrate(lambda x: 1 / (5 - x), 0, 4, 64)]
    want = [2 * math.pi, 2 * math.pi, math.pi / math.sqrt(5)]
    err = max(_rel(g, w) for g, w in zip(got, want))
    return err < 1e-12, f"max rel err {err:.2e}"


def check_chebyshev():
    s = numerics.cheb_fit(np.log, 1, 9, 32)
    d = numerics.cheb_derivative(s)
    e1, e2 = abs(s(5.0) - math.log(5)), abs(d(3.0) - 1 / 3)
    return e1 < 1e-12 and e2 < 1e-10, f"fit err {e1:.1e}, derivative err {e2:.1e}"


def check_contour():
    spec = numerics.ContourSpec(0, 1, 64)
    v = numerics.contour_trapezoid(lambda z: np.exp(z) / z ** 2, spec)
    return abs(v - 1) < 1e-12, f"residue {v.real:.15f}"


def check_jack_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        x = rng.uniform(-1, 1, 3)
        for k in range(1, 6):
            s = sum(jack.jack_C(p, x, alpha) for p in jack.partitions_of(k, 3))
            worst = max(worst, _rel(s, x.sum() ** k))
    return worst < 1e-9, f"max rel err {worst:.1e}"


def check_determinant():
    rng = np.random.default_rng(11)
    spec = jack.HypgeomSpec((), (4.5,), 1.0)
    x, y = np.array([0.6, 0.2]), rng.uniform(-0.7, 0.7, 4)
    ser = jack.mhg_series_auto(spec, np.r_[x, 0, 0], y, tol=1e-13)[0]
    det = hypmatrix.mhg_det_distinct(spec, x, y)
    err = _rel(det, ser)
    return err < 1e-8, f"rel diff {err:.1e}"


def check_multiplicity():
    rng = np.random.default_rng(12)
    spec = jack.HypgeomSpec((), (), 1.0)
    y = rng.uniform(-0.7, 0.7, 4)
    ser = jack.mhg_series_auto(spec, np.array([0.5, 0.5, 0, 0]), y, tol=1e-13)[0]
    det = hypmatrix.mhg_det_mult(spec, hypmatrix.MultSpectrum((0.5,), (2,)), y)
    err = _rel(det, ser)
    return err < 1e-8, f"rel diff {err:.1e}"


def check_clt_closed_forms():
    m = SpikedModel("A", 100, m=200, spikes=parse_spikes("3.0:1,1.5:1"))
    r = clt.clt_params(m, LinearStatistic.linear())
    err = max(abs(r.mu - 2), abs(r.sigma2 - 2), abs(r.mu_bars[0] - 6), abs(r.mu_bars[1] - 3))
    return err < 1e-8, f"max abs err {err:.1e}"


def check_density_normalization():
    m = SpikedModel("A", 2, m=3, spikes=parse_spikes("1.0:1"))
    total = density.normalization_integral(m, 30)
    return abs(total - 1) < 1e-3, f"integral {total:.10f}"


def check_sampler_determinism():
    m = SpikedModel("C", 10, m1=15, m2=20, spikes=parse_spikes("2.0:1"))
    a, _ = ensemble.simulate_lss(m, LinearStatistic.log(), 5, 99)
    b, _ = ensemble.simulate_lss(m, LinearStatistic.log(), 5, 99)
    return bool(np.array_equal(a, b)), "bit-identical" if np.array_equal(a, b) else "mismatch"


def check_trace_moment():
    m = SpikedModel("A", 30, m=60, spikes=parse_spikes("2.0:1"))
    vals, _ = ensemble.simulate_lss(m, LinearStatistic.linear(), 400, 5)
    expected = m.m * (m.n + 2.0) / m.n
    z = (vals.mean() - expected) / (vals.std(ddof=1) / math.sqrt(len(vals)))
    return abs(z) < 4, f"z = {z:.2f}"


CHECKS: list[tuple[str, str, Callable]] = [
    ("numerics", "gauss-chebyshev rules", check_quadrature),
    ("numerics", "chebyshev fit and derivative", check_chebyshev),
    ("numerics", "contour trapezoid residue", check_contour),
    ("jack", "power-sum identity", check_jack_identity),
    ("hypmatrix", "determinant vs series", check_determinant),
    ("hypmatrix", "multiplicity vs series", check_multiplicity),
    ("clt", "closed forms for f(x)=x", check_clt_closed_forms),
    ("density", "normalization n=2", check_density_normalization),
    ("ensemble", "seeded determinism", check_sampler_determinism),
    ("ensemble", "trace expectation", check_trace_moment),
]


def run_selftest() -> list[CheckResult]:
    out = []
    for module, name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(module, name, bool(ok), f"{detail} ({time.perf_counter() - t0:.2f}s)"))
    return out
