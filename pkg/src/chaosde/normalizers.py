"""Mapping raw map coordinates into [0, 1): Modulo, Bounds and Atan2."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from chaosde.chaos_maps import ChaoticMapKind, MapPoint, orbit

#: Largest double strictly below 1.
BELOW_ONE = math.nextafter(1.0, 0.0)

BOUNDS_SAMPLES = 10**6
ATAN2_WARMUP = 1000


@dataclass(frozen=True)
class BoundsEstimate:
    min_x: float
    max_x: float
    sample_count: int

    def __post_init__(self):
        if not self.min_x < self.max_x:
            raise ValueError(f"degenerate bounds: min={self.min_x}, max={self.max_x}")
        if self.sample_count < 2:
            raise ValueError("bounds need at least two samples")


@dataclass(frozen=True)
class CenterState:
    mean_x: float = 0.0
    mean_y: float = 0.0
    count: int = 0


# Scheme descriptors. Bounds carries its estimate; Atan2 its warm-up length.

@dataclass(frozen=True)
class Modulo:
    name = "modulo"


@dataclass(frozen=True)
class Bounds:
    estimate: BoundsEstimate
    name = "bounds"


@dataclass(frozen=True)
class Atan2:
    warmup: int = ATAN2_WARMUP
    name = "atan2"


NormalizerKind = Union[Modulo, Bounds, Atan2]
SCHEMES = ("modulo", "bounds", "atan2")


def normalize_modulo(n):
    """``|n| mod 1``; works elementwise on arrays."""
    a = np.abs(n)
    r = a - np.floor(a)
    r = np.where(r >= 1.0, BELOW_ONE, r)
    return float(r) if np.ndim(r) == 0 else r


def normalize_bounds(x, b: BoundsEstimate):
    z = (np.asarray(x, dtype=float) - b.min_x) / (b.max_x - b.min_x)
    z = np.clip(z, 0.0, BELOW_ONE)
    return float(z) if z.ndim == 0 else z


def normalize_atan2(p: MapPoint, c: CenterState) -> float:
    if c.count < 1:
        raise ValueError("center must have observed at least one point")
    dx = p.x - c.mean_x
    dy = p.y - c.mean_y
    if dx == 0.0 and dy == 0.0:
        return 0.0
    z = (math.atan2(dy, dx) + math.pi) / (2.0 * math.pi)
    return 0.0 if z >= 1.0 else z


def update_center(c: CenterState, p: MapPoint) -> CenterState:
    count = c.count + 1
    return CenterState(
        c.mean_x + (p.x - c.mean_x) / count,
        c.mean_y + (p.y - c.mean_y) / count,
        count,
    )


@functools.lru_cache(maxsize=None)
def estimate_bounds(kind: ChaoticMapKind, samples: int = BOUNDS_SAMPLES) -> BoundsEstimate:
    """Min/max of the x coordinate over the first ``samples`` iterates from the default start."""
    if samples < 2:
        raise ValueError("estimate_bounds needs samples >= 2")
    xs, _ = orbit(kind, kind.start, samples)
    return BoundsEstimate(float(xs.min()), float(xs.max()), samples)
