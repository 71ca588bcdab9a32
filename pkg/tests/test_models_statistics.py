from __future__ import annotations

import numpy as np
import pytest

from spikelss.models import Spike, SpikedModel, format_spikes, parse_spikes
from spikelss.statistics import LinearStatistic, parse_statistic


def test_parse_spikes_sorts_and_defaults_multiplicity():
    spikes = parse_spikes("1.5:1,3.0:2,0.5")
    assert spikes == (Spike(3.0, 2), Spike(1.5, 1), Spike(0.5, 1))
    assert parse_spikes("") == ()
    assert parse_spikes(format_spikes(spikes)) == spikes


def test_model_validation():
    with pytest.raises(ValueError):
        SpikedModel("D", 3, m=4)
    with pytest.raises(ValueError):
        SpikedModel("A", 5, m=4)
    with pytest.raises(ValueError):
        SpikedModel("C", 5, m1=5, m2=9)
    with pytest.raises(ValueError):
        SpikedModel("A", 2, m=4, spikes=parse_spikes("1.0:3"))
    with pytest.raises(ValueError):
        SpikedModel("A", 4, m=4, spikes=(Spike(1.0), Spike(2.0)))
    with pytest.raises(ValueError):
        SpikedModel("B", 4, m=4, spikes=(Spike(-1.0),))


def test_model_properties():
    m = SpikedModel("a", 10, m=25, spikes=parse_spikes("3.0:2,1.0:1"))
    assert m.kind == "A" and m.r == 3 and m.c == 2.5
    assert np.array_equal(m.expanded_values(), [3.0, 3.0, 1.0])
    assert m.with_spikes(()).r == 0
    assert m.describe()["spikes"][0] == {"value": 3.0, "multiplicity": 2}
    c = SpikedModel("C", 10, m1=20, m2=30)
    assert (c.c1, c.c2) == (2.0, 3.0)
    with pytest.raises(ValueError):
        _ = c.c


@pytest.mark.parametrize("text", ["x", "x2", "x5", "log", "exp:0.5", "poly:1.0,-2.0,0.5"])
def test_statistic_label_round_trip(text):
    f = parse_statistic(text)
    assert parse_statistic(f.label()) == f


def test_statistic_values_and_derivatives():
    x = np.array([0.5, 1.0, 2.0])
    h = 1e-6
    for f in (parse_statistic(t) for t in ("x", "x3", "log", "exp:0.7", "poly:1,2,3")):
        numeric = (f(x + h) - f(x - h)) / (2 * h)
        assert np.allclose(f.derivative(x), numeric, rtol=1e-7)
    assert parse_statistic("x2")(np.array(3.0)) == 9.0


def test_constant_detection():
    assert LinearStatistic.constant(2.0).is_constant()
    assert parse_statistic("poly:4").is_constant()
    assert parse_statistic("exp:0").is_constant()
    assert not parse_statistic("log").is_constant()


def test_bad_statistics_rejected():
    for text in ("sin", "poly:", "xq"):
        with pytest.raises(ValueError):
            parse_statistic(text)
