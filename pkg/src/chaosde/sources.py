"""Random sources feeding differential evolution.

Every source yields samples in [0, 1). Concrete sources generate in blocks and
serve from a buffer; block size never changes the stream, only its cost.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from chaosde import _kernels
from chaosde.chaos_maps import ChaoticMapKind, MapPoint, get_map, orbit
from chaosde.mt19937 import MT19937
from chaosde.normalizers import (
    Atan2,
    Bounds,
    CenterState,
    Modulo,
    SCHEMES,
    estimate_bounds,
    normalize_bounds,
    normalize_modulo,
)

BLOCK = 4096
MATCH_SAMPLES = 10**6
MATCH_BINS = 1024


class RandomSource:
    """Buffered stream of unit samples. Subclasses implement ``_generate(n)``."""

    label = "source"

    def __init__(self):
        self._buf = np.empty(0)
        self._pos = 0

    def _generate(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def next_unit(self) -> float:
        if self._pos >= self._buf.shape[0]:
            self._buf = self._generate(BLOCK)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def next_units(self, n: int) -> np.ndarray:
        avail = self._buf.shape[0] - self._pos
        if n <= avail:
            out = self._buf[self._pos:self._pos + n].copy()
            self._pos += n
            return out
        head = self._buf[self._pos:]
        self._buf = self._generate(max(BLOCK, n - avail))
        self._pos = n - avail
        if self._buf.shape[0] < self._pos:
            raise IndexError("source exhausted")
        return np.concatenate([head, self._buf[:self._pos]])


def rand_index(src: RandomSource, n: int) -> int:
    if n < 1:
        raise ValueError("rand_index needs n >= 1")
    return int(src.next_unit() * n)


def rand_range(src: RandomSource, lo: float, hi: float) -> float:
    if not lo < hi:
        raise ValueError(f"empty range [{lo}, {hi})")
    return lo + src.next_unit() * (hi - lo)


class ScriptedSource(RandomSource):
    """Replays a fixed list of samples; optionally cycles."""

    label = "scripted"

    def __init__(self, values: Sequence[float], cycle: bool = False):
        super().__init__()
        vals = np.asarray(values, dtype=float)
        if vals.size == 0 or np.any((vals < 0) | (vals >= 1)):
            raise ValueError("scripted samples must be non-empty and in [0, 1)")
        self._values = vals
        self._cursor = 0
        self._cycle = cycle

    def _generate(self, n: int) -> np.ndarray:
        if self._cycle:
            idx = (self._cursor + np.arange(n)) % self._values.size
            self._cursor = int((self._cursor + n) % self._values.size)
            return self._values[idx]
        out = self._values[self._cursor:self._cursor + n]
        if out.size == 0:
            raise IndexError("scripted source exhausted")
        self._cursor += out.size
        return out


class MtSource(RandomSource):
    def __init__(self, seed: int = 5489):
        super().__init__()
        self.mt = MT19937(seed)
        self.label = "mt"

    def _generate(self, n: int) -> np.ndarray:
        return self.mt.units(n)


class ChaoticSource(RandomSource):
    """A chaotic map composed with a normalization scheme."""

    def __init__(self, kind: ChaoticMapKind, normalizer=Modulo(), start: MapPoint | None = None):
        super().__init__()
        self.kind = kind
        self.normalizer = normalizer
        self.current = kind.start if start is None else start
        self.center = CenterState()
        self.label = f"chaos:{kind.name}:{normalizer.name}"
        if isinstance(normalizer, Atan2) and normalizer.warmup > 0:
            xs, ys = self._advance(normalizer.warmup)
            mx, my, cnt = _kernels.running_center(xs, ys, 0.0, 0.0, 0)
            self.center = CenterState(mx, my, cnt)

    def _advance(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        xs, ys = orbit(self.kind, self.current, n)
        if n:
            self.current = MapPoint(float(xs[-1]), float(ys[-1]))
        return xs, ys

    def _generate(self, n: int) -> np.ndarray:
        xs, ys = self._advance(n)
        nz = self.normalizer
        if isinstance(nz, Modulo):
            return normalize_modulo(xs)
        if isinstance(nz, Bounds):
            return normalize_bounds(xs, nz.estimate)
        c = self.center
        out, mx, my, cnt = _kernels.atan2_stream(xs, ys, c.mean_x, c.mean_y, c.count)
        self.center = CenterState(mx, my, cnt)
        return out


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram CDF over uniform bins of [0, 1); ``cdf[0] == 0`` and ``cdf[-1] == 1``."""

    cdf: np.ndarray
    counts: np.ndarray

    @property
    def bins(self) -> int:
        return self.counts.shape[0]

    @property
    def width(self) -> float:
        return 1.0 / self.bins

    @classmethod
    def from_counts(cls, counts) -> "EmpiricalDistribution":
        counts = np.asarray(counts, dtype=np.int64)
        total = counts.sum()
        if counts.ndim != 1 or counts.size < 2 or total <= 0:
            raise ValueError("need >= 2 bins and a positive total count")
        cdf = np.concatenate([[0.0], np.cumsum(counts) / total])
        cdf[-1] = 1.0
        return cls(cdf=cdf, counts=counts)

    @classmethod
    def from_samples(cls, samples, bins: int) -> "EmpiricalDistribution":
        s = np.asarray(samples, dtype=float)
        idx = np.minimum((s * bins).astype(np.int64), bins - 1)
        return cls.from_counts(np.bincount(idx, minlength=bins))

    def invert(self, u):
        """Inverse CDF with linear interpolation inside the selected bin."""
        u = np.asarray(u, dtype=float)
        j = np.searchsorted(self.cdf, u, side="right") - 1
        j = np.clip(j, 0, self.bins - 1)
        lo, hi = self.cdf[j], self.cdf[j + 1]
        w = self.width
        z = j * w + w * (u - lo) / (hi - lo)
        # rounding must not push a sample into the (possibly empty) next bin
        z = np.minimum(z, np.nextafter((j + 1) * w, 0.0))
        return float(z) if z.ndim == 0 else z


def build_empirical_distribution(src: RandomSource, n: int = MATCH_SAMPLES,
                                 bins: int = MATCH_BINS) -> EmpiricalDistribution:
    if n < 10**5:
        raise ValueError("an empirical distribution needs at least 1e5 samples")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    return EmpiricalDistribution.from_samples(src.next_units(n), bins)


class MatchedSource(RandomSource):
    """MT19937 pushed through the inverse CDF of a chaotic source."""

    def __init__(self, dist: EmpiricalDistribution, seed: int = 5489, label: str = "matched"):
        super().__init__()
        self.dist = dist
        self.mt = MT19937(seed)
        self.label = label

    def _generate(self, n: int) -> np.ndarray:
        return self.dist.invert(self.mt.units(n))


def make_chaotic(map_name: str, scheme: str, start: MapPoint | None = None) -> ChaoticSource:
    kind = get_map(map_name)
    scheme = scheme.lower()
    if scheme == "modulo":
        nz = Modulo()
    elif scheme == "bounds":
        nz = Bounds(estimate_bounds(kind))
    elif scheme == "atan2":
        nz = Atan2()
    else:
        raise ValueError(f"unknown normalization scheme {scheme!r}; expected one of {SCHEMES}")
    return ChaoticSource(kind, nz, start)


@dataclass(frozen=True)
class SourceSpec:
    """Parsed form of ``mt``, ``chaos:<map>:<scheme>`` or ``matched:<map>:<scheme>``."""

    family: str
    map_name: str | None = None
    scheme: str | None = None

    @classmethod
    def parse(cls, text: str) -> "SourceSpec":
        parts = text.strip().lower().split(":")
        if parts == ["mt"]:
            return cls("mt")
        if len(parts) == 3 and parts[0] in ("chaos", "matched"):
            get_map(parts[1])
            if parts[2] not in SCHEMES:
                raise ValueError(f"unknown normalization scheme {parts[2]!r} in {text!r}")
            return cls(parts[0], parts[1], parts[2])
        raise ValueError(
            f"bad source spec {text!r}; expected 'mt', 'chaos:<map>:<scheme>' or 'matched:<map>:<scheme>'"
        )

    def __str__(self) -> str:
        if self.family == "mt":
            return "mt"
        return f"{self.family}:{self.map_name}:{self.scheme}"


def reference_distribution(map_name: str, scheme: str, n: int = MATCH_SAMPLES,
                           bins: int = MATCH_BINS) -> EmpiricalDistribution:
    """Distribution of the chaotic source started at the map's default point."""
    return build_empirical_distribution(make_chaotic(map_name, scheme), n, bins)


def jittered_start(kind: ChaoticMapKind, rng_seed: int, scale: float = 1e-3) -> MapPoint:
    mt = MT19937(rng_seed)
    dx, dy = (2.0 * mt.units(2) - 1.0) * scale
    return MapPoint(kind.start.x + float(dx), kind.start.y + float(dy))


def is_unit(u) -> bool:
    u = np.asarray(u)
    return bool(np.all((u >= 0.0) & (u < 1.0)))


__all__ = [
    "RandomSource", "ScriptedSource", "MtSource", "ChaoticSource", "MatchedSource",
    "EmpiricalDistribution", "SourceSpec", "build_empirical_distribution", "make_chaotic",
    "reference_distribution", "jittered_start", "rand_index", "rand_range", "is_unit",
    "BLOCK", "MATCH_SAMPLES", "MATCH_BINS",
]
