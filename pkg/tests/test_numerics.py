from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikelss import numerics


def test_gc2_constant_gives_half_disc_area():
    # int_0^4 sqrt((4-x)x) dx = 2 pi
    assert numerics.gc2_integrate(lambda x: np.ones_like(x), 0, 4, 16) == pytest.approx(2 * math.pi, rel=1e-14)


def test_gc1_resolvent_closed_form():
    a, b, z = 0.5, 3.0, 4.0
    got = numerics.gc1_integrate(lambda x: 1 / (z - x), a, b, 128)
    assert got == pytest.approx(math.pi / math.sqrt((z - a) * (z - b)), rel=1e-13)


def test_gc_rules_reject_tiny_n():
    with pytest.raises(ValueError):
        numerics.gc1_nodes(0, 1, 1)
    with pytest.raises(ValueError):
        numerics.gc2_nodes(0, 1, 1)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8))
def test_cheb_fit_reproduces_polynomials(coeffs):
    p = np.polynomial.Polynomial(coeffs)
    s = numerics.cheb_fit(p, -1.0, 2.5, 16)
    x = np.linspace(-1, 2.5, 9)
    assert np.allclose(s(x), p(x), atol=1e-11 * (1 + np.abs(coeffs).sum() * 3.5 ** len(coeffs)))


def test_cheb_derivative_of_exp():
    s = numerics.cheb_derivative(numerics.cheb_fit(np.exp, 0, 2, 40))
    x = np.linspace(0.1, 1.9, 7)
    assert np.allclose(s(x), np.exp(x), rtol=1e-11)


def test_pv_hilbert_linear_function():
    # s(y)=1 on [0,4]: P int sqrt((4-y)y)/(x-y) dy = pi (x - 2)
    s = numerics.cheb_fit(lambda y: np.ones_like(y), 0, 4, 8)
    x = np.array([0.5, 2.0, 3.3])
    assert np.allclose(numerics.pv_hilbert(s, x), math.pi * (x - 2), atol=1e-13)


def test_pv_hilbert_outside_support_raises():
    s = numerics.cheb_fit(np.sin, 0, 1, 8)
    with pytest.raises(ValueError, match="outside support"):
        numerics.pv_hilbert(s, np.array([1.5]))


def test_contour_trapezoid_residue_and_encloses():
    spec = numerics.ContourSpec(0.5, 2.0, 64)
    assert spec.encloses([0.0, 1.0 + 1.0j])
    assert not spec.encloses([3.0])
    val = numerics.contour_trapezoid(lambda z: 1 / ((z - 0.2) * (z - 1.0)), spec)
    assert abs(val) < 1e-13  # residues cancel
    val = numerics.contour_trapezoid(lambda z: np.exp(z) / (z - 1.0), spec)
    assert val == pytest.approx(math.e, rel=1e-13)


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        numerics.ContourSpec(0, -1.0)
    with pytest.raises(ValueError):
        numerics.ContourSpec(0, 1.0, nodes=4)
