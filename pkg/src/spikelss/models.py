"""Spiked ensemble descriptions shared by the density, CLT and sampling code."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("A", "B", "C")
KIND_NAMES = {
    "A": "spiked central Wishart",
    "B": "spiked non-central Wishart",
    "C": "spiked multivariate F",
}


@dataclass(frozen=True)
class Spike:
    value: float
    multiplicity: int = 1


def parse_spikes(text: str) -> tuple[Spike, ...]:
    """Parse ``"3.0:2,1.5:1"`` into spikes sorted by decreasing value.

    A bare value means multiplicity 1. An empty string means no spikes.
    """
    text = text.strip()
    if not text:
        return ()
    out = []
    for item in text.split(","):
        item = item.strip()
        if ":" in item:
            v, k = item.split(":", 1)
            out.append(Spike(float(v), int(k)))
        else:
            out.append(Spike(float(item), 1))
    return tuple(sorted(out, key=lambda s: -s.value))


def format_spikes(spikes) -> str:
    return ",".join(f"{s.value!r}:{s.multiplicity}" for s in spikes)


@dataclass(frozen=True)
class SpikedModel:
    """One of the three ensembles with its dimensions and spikes.

    ``spikes`` hold the delta values (model A) or the nu values (models B
    and C); the noncentrality eigenvalues of B and C are ``n * nu``.
    """

    kind: str
    n: int
    m: int | None = None
    m1: int | None = None
    m2: int | None = None
    spikes: tuple[Spike, ...] = field(default_factory=tuple)

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        spikes = tuple(s if isinstance(s, Spike) else Spike(*s) for s in self.spikes)
        object.__setattr__(self, "spikes", spikes)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if kind in ("A", "B"):
            if self.m is None or self.m < self.n:
                raise ValueError("models A and B need m >= n")
        else:
            if self.m1 is None or self.m2 is None:
                raise ValueError("model C needs m1 and m2")
            if self.m1 <= self.n or self.m2 <= self.n:
                raise ValueError("model C needs m1 > n and m2 > n")
        for s in spikes:
            if not (np.isfinite(s.value) and s.value > 0):
                raise ValueError(f"spike values must be positive, got {s.value}")
            if s.multiplicity < 1:
                raise ValueError("spike multiplicities must be >= 1")
        if any(spikes[i].value <= spikes[i + 1].value for i in range(len(spikes) - 1)):
            raise ValueError("spike values must be strictly decreasing")
        if self.r > self.n:
            raise ValueError("total spike multiplicity exceeds n")

    @property
    def r(self) -> int:
        return sum(s.multiplicity for s in self.spikes)

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.spikes], dtype=float)

    @property
    def mults(self) -> tuple[int, ...]:
        return tuple(s.multiplicity for s in self.spikes)

    def expanded_values(self) -> np.ndarray:
        """Spike values repeated by multiplicity."""
        return np.repeat(self.values, self.mults) if self.spikes else np.zeros(0)

    @property
    def c(self) -> float:
        if self.kind == "C":
            raise ValueError("model C has two ratios c1, c2")
        return self.m / self.n

    @property
    def c1(self) -> float:
        return self.m1 / self.n

    @property
    def c2(self) -> float:
        return self.m2 / self.n

    def with_spikes(self, spikes) -> "SpikedModel":
        return SpikedModel(self.kind, self.n, self.m, self.m1, self.m2, tuple(spikes))

    def describe(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.kind == "C":
            d.update(m1=self.m1, m2=self.m2)
        else:
            d["m"] = self.m
        d["spikes"] = [{"value": s.value, "multiplicity": s.multiplicity} for s in self.spikes]
        return d
