"""Test functions for linear spectral statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .numerics import ChebSeries, cheb_derivative

FORMS = ("linear", "power", "log", "exp", "poly", "cheb")


@dataclass(frozen=True)
class LinearStatistic:
    """An analytic function ``f`` with its derivative.

    ``params`` depends on the form: ``(alpha0, alpha1)`` for linear,
    ``(k,)`` for power, ``(t,)`` for exp, coefficients in increasing degree
    for poly. The cheb form wraps a fitted :class:`ChebSeries`.
    """

    form: str
    params: tuple = ()
    series: ChebSeries | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown statistic form {self.form!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.form == "cheb" and self.series is None:
            raise ValueError("cheb statistic needs a series")
        if self.form == "power" and (len(self.params) != 1 or self.params[0] != int(self.params[0])):
            raise ValueError("power statistic needs one integer exponent")

    @classmethod
    def linear(cls, alpha0: float = 0.0, alpha1: float = 1.0) -> "LinearStatistic":
        return cls("linear", (alpha0, alpha1))

    @classmethod
    def power(cls, k: int) -> "LinearStatistic":
        return cls("power", (k,))

    @classmethod
    def log(cls) -> "LinearStatistic":
        return cls("log")

    @classmethod
    def exp(cls, t: float = 1.0) -> "LinearStatistic":
        return cls("exp", (t,))

    @classmethod
    def poly(cls, coeffs) -> "LinearStatistic":
        return cls("poly", tuple(coeffs))

    @classmethod
    def cheb(cls, series: ChebSeries) -> "LinearStatistic":
        return cls("cheb", (), series)

    @classmethod
    def constant(cls, value: float = 1.0) -> "LinearStatistic":
        return cls("poly", (value,))

    def _poly_coeffs(self) -> np.ndarray | None:
        if self.form == "linear":
            return np.array(self.params)
        if self.form == "power":
            c = np.zeros(int(self.params[0]) + 1)
            c[-1] = 1.0
            return c
        if self.form == "poly":
            return np.array(self.params) if self.params else np.zeros(1)
        return None

    def is_constant(self) -> bool:
        c = self._poly_coeffs()
        if c is not None:
            return not np.any(c[1:])
        if self.form == "exp":
            return self.params[0] == 0
        if self.form == "cheb":
            return not np.any(self.series.coeffs[1:])
        return False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = self._poly_coeffs()
        if c is not None:
            return P.polyval(x, c)
        if self.form == "log":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log(x)
        if self.form == "exp":
            return np.exp(self.params[0] * x)
        return self.series(x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        c = self._poly_coeffs()
        if c is not None:
            return P.polyval(x, P.polyder(c)) if len(c) > 1 else np.zeros_like(x)
        if self.form == "log":
            with np.errstate(divide="ignore"):
                return 1.0 / x
        if self.form == "exp":
            t = self.params[0]
            return t * np.exp(t * x)
        return cheb_derivative(self.series)(x)

    def label(self) -> str:
        if self.form == "linear":
            a0, a1 = self.params
            return "x" if (a0, a1) == (0.0, 1.0) else f"linear:{a0!r},{a1!r}"
        if self.form == "power":
            k = int(self.params[0])
            return "x" if k == 1 else f"x{k}"
        if self.form == "log":
            return "log"
        if self.form == "exp":
            return f"exp:{self.params[0]!r}"
        if self.form == "poly":
            return "poly:" + ",".join(repr(p) for p in self.params)
        return f"cheb:degree={self.series.degree}"


def parse_statistic(text: str) -> LinearStatistic:
    """Parse ``x``, ``x2`` (any ``xK``), ``log``, ``exp:t`` or ``poly:c0,c1,...``."""
    text = text.strip()
    if text == "x":
        return LinearStatistic.linear()
    if text == "log":
        return LinearStatistic.log()
    if text.startswith("x") and text[1:].isdigit():
        return LinearStatistic.power(int(text[1:]))
    if text.startswith("exp"):
        _, _, t = text.partition(":")
        return LinearStatistic.exp(float(t) if t else 1.0)
    if text.startswith("poly:"):
        coeffs = [float(v) for v in text[5:].split(",") if v.strip()]
        if not coeffs:
            raise ValueError("poly statistic needs at least one coefficient")
        return LinearStatistic.poly(coeffs)
    raise ValueError(f"cannot parse statistic {text!r}")
