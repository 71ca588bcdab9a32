from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from oracles import mp_moment
from spikelss import clt
from spikelss.models import SpikedModel, parse_spikes
from spikelss.statistics import LinearStatistic, parse_statistic


def _a(n=100, m=200, spikes=""):
    return SpikedModel("A", n, m=m, spikes=parse_spikes(spikes))


def test_support_edges():
    s = clt.support(_a())
    assert (s.a, s.b) == pytest.approx(((1 - math.sqrt(2)) ** 2, (1 + math.sqrt(2)) ** 2))
    c = clt.support(SpikedModel("C", 100, m1=200, m2=200))
    assert 0 < c.a < c.b < 1


@pytest.mark.parametrize("c", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_mean_matches_mp_moments(c, k):
    model = _a(100, int(100 * c))
    assert clt.mean_mu(LinearStatistic.power(k), model) == pytest.approx(mp_moment(c, k), rel=1e-10)


def test_mean_at_square_case_uses_edge_rewrite():
    model = _a(100, 100)
    assert clt.mean_mu(LinearStatistic.linear(), model) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError, match="singular at support edge"):
        clt.mean_mu(LinearStatistic.log(), model)


@pytest.mark.parametrize("c", [1.5, 2.0, 4.0])
def test_variance_closed_forms(c):
    model = _a(100, int(100 * c))
    assert clt.var_sigma2(LinearStatistic.linear(), model) == pytest.approx(c, rel=1e-12)
    assert clt.var_sigma2(LinearStatistic.log(), model) == pytest.approx(-math.log(1 - 1 / c), rel=1e-10)


def test_variance_routes_agree_for_smooth_statistics():
    for model in (_a(), SpikedModel("C", 100, m1=300, m2=250)):
        for f in (parse_statistic("exp:0.3"), parse_statistic("log"), parse_statistic("x3")):
            assert clt.var_sigma2(f, model) == pytest.approx(clt.var_sigma2_chebyshev(f, model), rel=1e-10)


def test_constant_statistic_has_zero_variance_and_offsets():
    res = clt.clt_params(_a(spikes="3.0:1,0.2:2"), LinearStatistic.constant(1.0))
    assert res.mu == pytest.approx(1.0, abs=1e-14)
    assert res.sigma2 == 0.0
    assert res.mu_bars == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("delta", [0.1, 0.5, 3.0, 10.0])
def test_mu_bar_linear_model_a(delta):
    model = _a(spikes=f"{delta}:1")
    res = clt.clt_params(model, LinearStatistic.linear())
    assert res.mu_bars[0] == pytest.approx(2 * delta, rel=1e-12)


@pytest.mark.parametrize("nu", [0.4, 1.0, 2.5])
def test_mu_bar_linear_model_b(nu):
    model = SpikedModel("B", 100, m=200, spikes=parse_spikes(f"{nu}:1"))
    assert clt.clt_params(model, LinearStatistic.linear()).mu_bars[0] == pytest.approx(nu, rel=1e-12)


def test_critical_spike_is_finite():
    model = _a(100, 100, "1.0:1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = clt.clt_params(model, LinearStatistic.linear())
    sp = res.saddles[0]
    assert sp.regime == "critical"
    assert sp.sqrt_branch == pytest.approx(0.0, abs=1e-14)
    assert res.mu_bars[0] == pytest.approx(1.0, rel=1e-12)


def test_near_critical_flag():
    model = SpikedModel("B", 100, m=200, spikes=parse_spikes(f"{math.sqrt(2) + 1e-4}:1"))
    with pytest.warns(RuntimeWarning, match="near-critical"):
        res = clt.clt_params(model, LinearStatistic.linear())
    assert any("near-critical" in w for w in res.warnings)


@pytest.mark.parametrize("model", [
    _a(spikes="3.0:1,0.3:1"),
    SpikedModel("B", 100, m=300, spikes=parse_spikes("4.0:1,0.5:1")),
    SpikedModel("C", 100, m1=200, m2=300, spikes=parse_spikes("6.0:1,0.5:1")),
])
def test_branch_squares_to_saddle_product(model):
    sup = clt.support(model)
    for ell in range(len(model.spikes)):
        sp = clt.saddlepoint(model, ell)
        assert sp.z0 > sup.b
        assert sp.sqrt_branch ** 2 == pytest.approx((sp.z0 - sup.a) * (sp.z0 - sup.b), rel=1e-12)
        assert (sp.sqrt_branch > 0) == (sp.regime == "subcritical")


def test_multiplicity_repeats_mu_bar():
    res = clt.clt_params(_a(spikes="3.0:2,1.0:1"), LinearStatistic.log())
    assert len(res.mu_bars) == 3
    assert res.mu_bars[0] == res.mu_bars[1]


def test_model_c_log_pinned_values():
    # first verified run, cross-checked by Monte Carlo; equal to closed forms ln 4 and ln 1.5 / ln 2
    f = LinearStatistic.log()
    res1 = clt.clt_params(SpikedModel("C", 100, m1=200, m2=200, spikes=parse_spikes("1.0:1")), f)
    res2 = clt.clt_params(SpikedModel("C", 100, m1=200, m2=200, spikes=parse_spikes("2.0:1")), f)
    assert abs(res1.mu) < 1e-12
    assert res1.sigma2 == pytest.approx(math.log(4), rel=1e-10)
    assert res1.mu_bars[0] == pytest.approx(math.log(1.5), rel=1e-10)
    assert res2.mu_bars[0] == pytest.approx(math.log(2), rel=1e-10)


def test_rho_tilde2_integrates_to_mu_bar_when_subcritical():
    model = _a(spikes="0.3:1")
    sp = clt.saddlepoint(model, 0)
    sup = clt.support(model)
    f = parse_statistic("exp:0.4")
    x = np.linspace(sup.a, sup.b, 9)[1:-1]
    root = np.sqrt((sup.b - x) * (x - sup.a))
    kernel = (sp.sqrt_branch / (sp.z0 - x) - 1) / (2 * np.pi)
    assert np.allclose(clt.rho_tilde2(x, sp, sup) * root, kernel, rtol=1e-13)
    val, _ = integrate.quad(lambda t: f(t) * (sp.sqrt_branch / (sp.z0 - t) - 1) / (2 * np.pi),
                            sup.a, sup.b, weight="alg", wvar=(-0.5, -0.5))
    assert val == pytest.approx(clt.mu_bar(f, model, sp), rel=1e-10)
