"""Gingerbread-man and Tinkerbell two-dimensional chaotic maps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from chaosde import _kernels


class MapEscapeError(ArithmeticError):
    """Raised when an orbit leaves the finite floats."""

    def __init__(self, index: int, kind: str = ""):
        self.index = index
        super().__init__(
            f"{kind or 'map'} orbit became non-finite at iteration {index}; "
            "initial point lies outside the usable basin"
        )


@dataclass(frozen=True)
class MapPoint:
    x: float
    y: float

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True)
class TinkerbellParams:
    a: float = 0.9
    b: float = -0.6013
    c: float = 2.0
    d: float = 0.5


def gingerbread_step(p: MapPoint) -> MapPoint:
    return MapPoint(1.0 - p.y + abs(p.x), p.x)


def tinkerbell_step(p: MapPoint, q: TinkerbellParams = TinkerbellParams()) -> MapPoint:
    x, y = p.x, p.y
    return MapPoint(x * x - y * y + q.a * x + q.b * y, 2.0 * x * y + q.c * x + q.d * y)


@dataclass(frozen=True)
class Gingerbread:
    name: str = field(default="gingerbread", init=False)
    start: MapPoint = MapPoint(9.0, 3.7)

    def step(self, p: MapPoint) -> MapPoint:
        return gingerbread_step(p)

    def orbit(self, p0: MapPoint, n: int):
        return _kernels.gingerbread_orbit(float(p0.x), float(p0.y), n)


@dataclass(frozen=True)
class Tinkerbell:
    params: TinkerbellParams = TinkerbellParams()
    name: str = field(default="tinkerbell", init=False)
    start: MapPoint = MapPoint(0.1, -0.1)

    def step(self, p: MapPoint) -> MapPoint:
        return tinkerbell_step(p, self.params)

    def orbit(self, p0: MapPoint, n: int):
        q = self.params
        return _kernels.tinkerbell_orbit(float(p0.x), float(p0.y), q.a, q.b, q.c, q.d, n)


ChaoticMapKind = Union[Gingerbread, Tinkerbell]

GINGERBREAD = Gingerbread()
TINKERBELL = Tinkerbell()
MAPS: dict[str, ChaoticMapKind] = {"gingerbread": GINGERBREAD, "tinkerbell": TINKERBELL}


def get_map(name: str) -> ChaoticMapKind:
    try:
        return MAPS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown chaotic map {name!r}; expected one of {sorted(MAPS)}") from None


def iterate(kind: ChaoticMapKind, p0: MapPoint, n: int) -> list[MapPoint]:
    """Return the first ``n`` iterates of ``p0`` (``p0`` itself is not included).

    Pure-Python reference path; :func:`orbit` is the fast equivalent.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    out = []
    p = p0
    for k in range(n):
        p = kind.step(p)
        if not p.is_finite():
            raise MapEscapeError(k, kind.name)
        out.append(p)
    return out


def orbit(kind: ChaoticMapKind, p0: MapPoint, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`iterate`: x and y coordinates of the first ``n`` iterates."""
    if n < 0:
        raise ValueError("n must be non-negative")
    xs, ys, bad = kind.orbit(p0, int(n))
    if bad >= 0:
        raise MapEscapeError(int(bad), kind.name)
    return xs, ys
