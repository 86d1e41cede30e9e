"""Nine CEC2013 test functions with seed-generated shifts and rotations.

The official data files and the T_osz/T_asy/ill-conditioning transforms are not
used; each instance is ``g(scale * M @ (x - o)) + bias`` with an orthogonal
``M``, so the optimum sits exactly at the primary shift.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SHIFT_RANGE = 80.0
DOMAIN = (-100.0, 100.0)
ORTHO_TOL = 1e-10
MAX_REDRAWS = 10

SCHWEFEL_OFFSET = 420.9687462275036
SCHWEFEL_CONST = 418.9828872724338


class BenchmarkId(enum.Enum):
    F1 = 1
    F5 = 5
    F9 = 9
    F13 = 13
    F15 = 15
    F16 = 16
    F17 = 17
    F22 = 22
    F23 = 23

    @property
    def title(self) -> str:
        return _INFO[self][0]

    @property
    def bias(self) -> float:
        return _INFO[self][1]

    @property
    def scale(self) -> float:
        return _INFO[self][2]

    @property
    def is_composition(self) -> bool:
        return self in (BenchmarkId.F22, BenchmarkId.F23)

    @property
    def label(self) -> str:
        return f"f{self.value}"

    @classmethod
    def parse(cls, text) -> "BenchmarkId":
        if isinstance(text, BenchmarkId):
            return text
        key = str(text).strip().upper()
        if not key.startswith("F"):
            key = "F" + key
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown function {text!r}; expected one of {[b.label for b in cls]}") from None


# (name, bias, input scale)
_INFO = {
    BenchmarkId.F1: ("Sphere", -1400.0, 1.0),
    BenchmarkId.F5: ("Different Powers", -1000.0, 1.0),
    BenchmarkId.F9: ("Rotated Weierstrass", -600.0, 0.5 / 100),
    BenchmarkId.F13: ("Non-Continuous Rotated Rastrigin", -200.0, 1.0),
    BenchmarkId.F15: ("Rotated Schwefel", 100.0, 10.0),
    BenchmarkId.F16: ("Rotated Katsuura", 200.0, 5.0 / 100),
    BenchmarkId.F17: ("Lunacek Bi-Rastrigin", 300.0, 10.0 / 100),
    BenchmarkId.F22: ("Composition Function 2", 800.0, 10.0),
    BenchmarkId.F23: ("Composition Function 3", 900.0, 10.0),
}


def _round_half_away(v):
    return np.sign(v) * np.floor(np.abs(v) + 0.5)


# Core functions. Each takes z of shape (n, D) and returns shape (n,).

def sphere(z):
    return np.sum(z * z, axis=-1)


def different_powers(z):
    d = z.shape[-1]
    expo = 2.0 + 4.0 * np.arange(d) / max(d - 1, 1)
    return np.sqrt(np.sum(np.abs(z) ** expo, axis=-1))


_WEI_K = np.arange(21)
_WEI_A = 0.5 ** _WEI_K
_WEI_B = 3.0 ** _WEI_K
_WEI_CONST = float(np.sum(_WEI_A * np.cos(np.pi * _WEI_B)))


def weierstrass(z):
    d = z.shape[-1]
    terms = _WEI_A * np.cos(2.0 * np.pi * _WEI_B * (z[..., None] + 0.5))
    return np.sum(terms, axis=(-2, -1)) - d * _WEI_CONST


def noncontinuous_rastrigin(z):
    y = np.where(np.abs(z) <= 0.5, z, _round_half_away(2.0 * z) / 2.0)
    return np.sum(y * y - 10.0 * np.cos(2.0 * np.pi * y) + 10.0, axis=-1)


def schwefel(z):
    d = z.shape[-1]
    y = z + SCHWEFEL_OFFSET
    inner = y * np.sin(np.sqrt(np.abs(y)))
    m_hi = 500.0 - np.fmod(y, 500.0)
    upper = m_hi * np.sin(np.sqrt(np.abs(m_hi))) - (y - 500.0) ** 2 / (10000.0 * d)
    m_lo = np.fmod(np.abs(y), 500.0) - 500.0
    lower = m_lo * np.sin(np.sqrt(np.abs(m_lo))) - (y + 500.0) ** 2 / (10000.0 * d)
    s = np.where(y > 500.0, upper, np.where(y < -500.0, lower, inner))
    return SCHWEFEL_CONST * d - np.sum(s, axis=-1)


_KAT_P = 2.0 ** np.arange(1, 33)


def katsuura(z):
    d = z.shape[-1]
    t = z[..., None] * _KAT_P
    inner = np.sum(np.abs(t - _round_half_away(t)) / _KAT_P, axis=-1)
    i = np.arange(1, d + 1)
    prod = np.prod((1.0 + i * inner) ** (10.0 / d ** 1.2), axis=-1)
    c = 10.0 / (d * d)
    return c * prod - c


def lunacek_bi_rastrigin(z):
    d = z.shape[-1]
    mu0, dd = 2.5, 1.0
    s = 1.0 - 1.0 / (2.0 * math.sqrt(d + 20.0) - 8.2)
    mu1 = -math.sqrt((mu0 * mu0 - dd) / s)
    xh = z + mu0
    first = np.sum((xh - mu0) ** 2, axis=-1)
    second = dd * d + s * np.sum((xh - mu1) ** 2, axis=-1)
    return np.minimum(first, second) + 10.0 * (d - np.sum(np.cos(2.0 * np.pi * (xh - mu0)), axis=-1))


CORES: dict[BenchmarkId, Callable] = {
    BenchmarkId.F1: sphere,
    BenchmarkId.F5: different_powers,
    BenchmarkId.F9: weierstrass,
    BenchmarkId.F13: noncontinuous_rastrigin,
    BenchmarkId.F15: schwefel,
    BenchmarkId.F16: katsuura,
    BenchmarkId.F17: lunacek_bi_rastrigin,
    BenchmarkId.F22: schwefel,
    BenchmarkId.F23: schwefel,
}


def base_function(fid, z) -> float | np.ndarray:
    """Unbiased core value of function ``fid`` at ``z`` (a vector or a batch of rows)."""
    z = np.asarray(z, dtype=float)
    out = CORES[BenchmarkId.parse(fid)](np.atleast_2d(z))
    return float(out[0]) if z.ndim == 1 else out


@dataclass(frozen=True)
class Component:
    core: Callable
    shift: np.ndarray
    rotation: np.ndarray
    scale: float = 1.0
    lam: float = 1.0
    sigma: float = 20.0
    bias: float = 0.0

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.lam * self.core(self.scale * ((x - self.shift) @ self.rotation.T)) + self.bias


def compose(components: list[Component], x, fstar: float):
    """Gaussian-distance weighted mix of components, anchored at ``fstar``."""
    if not components:
        raise ValueError("composition needs at least one component")
    x = np.asarray(x, dtype=float)
    X = np.atleast_2d(x)
    d = X.shape[-1]
    sq = np.stack([np.sum((X - c.shift) ** 2, axis=-1) for c in components], axis=-1)
    sig = np.array([c.sigma for c in components])
    with np.errstate(divide="ignore"):
        w = np.exp(-sq / (2.0 * d * sig * sig)) / np.sqrt(sq)
    exact = sq == 0.0
    hit = exact.any(axis=-1)
    # at a component optimum the weight is exactly one-hot
    first_hit = np.argmax(exact, axis=-1)
    w[hit] = 0.0
    w[hit, first_hit[hit]] = 1.0
    total = w.sum(axis=-1)
    dead = total == 0.0
    w[dead] = 1.0
    total[dead] = len(components)
    omega = w / total[:, None]
    vals = np.stack([c.value(X) for c in components], axis=-1)
    out = np.sum(omega * vals, axis=-1) + fstar
    return float(out[0]) if x.ndim == 1 else out


def gram_schmidt(a: np.ndarray) -> np.ndarray | None:
    """Orthonormalise the columns of ``a`` (modified Gram-Schmidt, two passes).

    Returns None when a column collapses, i.e. the draw is numerically singular.
    """
    q = np.array(a, dtype=float, copy=True)
    n = q.shape[1]
    for j in range(n):
        v = q[:, j]
        norm0 = np.linalg.norm(v)
        for _ in range(2):
            for i in range(j):
                v -= (q[:, i] @ v) * q[:, i]
        nv = np.linalg.norm(v)
        if norm0 == 0.0 or nv <= 1e-10 * norm0:
            return None
        q[:, j] = v / nv
    return q


def random_rotation(rs: np.random.RandomState, d: int) -> np.ndarray:
    for _ in range(MAX_REDRAWS):
        q = gram_schmidt(rs.standard_normal((d, d)))
        if q is not None and np.linalg.norm(q.T @ q - np.eye(d), np.inf) <= ORTHO_TOL:
            return q
    raise RuntimeError(f"could not draw an orthogonal {d}x{d} matrix in {MAX_REDRAWS} attempts")


@dataclass(frozen=True, eq=False)
class BenchmarkInstance:
    id: BenchmarkId
    dim: int
    shifts: np.ndarray  # (k, D); row 0 is the global optimum
    rotations: np.ndarray  # (k, D, D)
    seed: int | None = None
    lo: float = DOMAIN[0]
    hi: float = DOMAIN[1]
    components: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.id.is_composition:
            rotated = self.id is BenchmarkId.F23
            comps = [
                Component(schwefel, self.shifts[k], self.rotations[k] if rotated else np.eye(self.dim),
                          scale=self.id.scale, lam=1.0, sigma=20.0, bias=100.0 * k)
                for k in range(self.shifts.shape[0])
            ]
        else:
            comps = [Component(CORES[self.id], self.shifts[0], self.rotations[0], scale=self.id.scale)]
        object.__setattr__(self, "components", comps)

    @property
    def bias(self) -> float:
        return self.id.bias

    @property
    def optimum(self) -> np.ndarray:
        return self.shifts[0]

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}, got shape {x.shape}")
        if self.id.is_composition:
            return compose(self.components, x, self.bias)
        c = self.components[0]
        out = c.value(np.atleast_2d(x)) + self.bias
        return float(out[0]) if x.ndim == 1 else out

    __call__ = evaluate

    def to_json(self) -> dict:
        comp = self.id.is_composition
        return {
            "id": self.id.label,
            "D": self.dim,
            "shift": (self.shifts if comp else self.shifts[0]).tolist(),
            "rotation": (self.rotations if comp else self.rotations[0]).tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BenchmarkInstance":
        fid = BenchmarkId.parse(data["id"])
        d = int(data["D"])
        shifts = np.asarray(data["shift"], dtype=float).reshape(-1, d)
        rots = np.asarray(data["rotation"], dtype=float).reshape(-1, d, d)
        return cls(fid, d, shifts, rots, data.get("seed"))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "BenchmarkInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def make_instance(fid, dim: int, seed: int = 0) -> BenchmarkInstance:
    """Seeded instance; composition functions get three shifts and rotations."""
    fid = BenchmarkId.parse(fid)
    if not 2 <= dim <= 100:
        raise ValueError("dimension must be in 2..100")
    rs = np.random.RandomState(seed)
    k = 3 if fid.is_composition else 1
    shifts = np.stack([rs.uniform(-SHIFT_RANGE, SHIFT_RANGE, dim) for _ in range(k)])
    rots = np.stack([random_rotation(rs, dim) for _ in range(k)])
    return BenchmarkInstance(fid, dim, shifts, rots, seed)
