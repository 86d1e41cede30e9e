"""DE/rand/1/bin and DE/best/1/bin, with every random draw taken from one source."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from chaosde.sources import RandomSource, rand_index, rand_range

VARIANTS = ("rand1bin", "best1bin")

# dimension -> (population size, generations)
SCHEDULE = {10: (50, 200), 20: (100, 400), 30: (150, 600)}


@dataclass(frozen=True)
class DeConfig:
    variant: str = "rand1bin"
    dim: int = 10
    pop_size: int = 50
    generations: int = 200
    F: float = 0.5
    CR: float = 0.85
    lo: float = -100.0
    hi: float = 100.0
    force_jrand: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown DE variant {self.variant!r}; expected one of {VARIANTS}")
        if self.pop_size < 4:
            raise ValueError("population size must be at least 4")
        if self.dim < 1 or self.generations < 0:
            raise ValueError("dim must be >= 1 and generations >= 0")
        if not self.lo < self.hi:
            raise ValueError("empty search domain")

    @classmethod
    def for_dimension(cls, variant: str, dim: int, **overrides) -> "DeConfig":
        if dim in SCHEDULE:
            np_, g = SCHEDULE[dim]
            overrides.setdefault("pop_size", np_)
            overrides.setdefault("generations", g)
        elif "pop_size" not in overrides or "generations" not in overrides:
            raise ValueError(f"no default schedule for D={dim}; pass pop_size and generations")
        return cls(variant=variant, dim=dim, **overrides)


@dataclass
class Individual:
    params: np.ndarray
    fitness: float


@dataclass
class Population:
    X: np.ndarray  # (NP, D)
    fitness: np.ndarray  # (NP,)

    @property
    def size(self) -> int:
        return self.X.shape[0]

    @property
    def best_index(self) -> int:
        # argmin returns the lowest index among ties
        return int(np.argmin(self.fitness))


@dataclass
class RunRecord:
    best_by_generation: np.ndarray
    final_vector: np.ndarray
    evaluations: int

    @property
    def final_best(self) -> float:
        return float(self.best_by_generation[-1])


def _batch(func: Callable, X: np.ndarray) -> np.ndarray:
    return np.asarray(func(X), dtype=float).reshape(X.shape[0])


def init_population(cfg: DeConfig, src: RandomSource, func: Callable) -> Population:
    if cfg.pop_size < 4:
        raise ValueError("population size must be at least 4")
    X = np.empty((cfg.pop_size, cfg.dim))
    for i in range(cfg.pop_size):
        for j in range(cfg.dim):
            X[i, j] = rand_range(src, cfg.lo, cfg.hi)
    return Population(X, _batch(func, X))


def _distinct_index(src: RandomSource, n: int, taken: tuple) -> int:
    while True:
        r = int(src.next_unit() * n)
        if r not in taken:
            return r


def mutate_rand1(pop: Population, target: int, F: float, src: RandomSource) -> np.ndarray:
    """``x_r3 + F * (x_r1 - x_r2)``; indices drawn r1, r2, r3 in that order."""
    n = pop.size
    r1 = _distinct_index(src, n, (target,))
    r2 = _distinct_index(src, n, (target, r1))
    r3 = _distinct_index(src, n, (target, r1, r2))
    X = pop.X
    return X[r3] + F * (X[r1] - X[r2])


def mutate_best1(pop: Population, target: int, F: float, src: RandomSource,
                 best: int | None = None) -> np.ndarray:
    """``x_best + F * (x_r2 - x_r3)``; ``best`` lets a caller freeze the best index."""
    if best is None:
        best = pop.best_index
    n = pop.size
    r2 = _distinct_index(src, n, (target, best))
    r3 = _distinct_index(src, n, (target, best, r2))
    X = pop.X
    return X[best] + F * (X[r2] - X[r3])


def crossover_bin(target: np.ndarray, noise: np.ndarray, CR: float, src: RandomSource,
                  force_jrand: bool = False) -> np.ndarray:
    if target.shape != noise.shape:
        raise ValueError("target and noise vectors differ in length")
    r = src.next_units(target.shape[0])
    trial = np.where(r < CR, noise, target)
    if force_jrand:
        j = rand_index(src, target.shape[0])
        trial[j] = noise[j]
    return trial


def select(target: Individual, trial: Individual) -> Individual:
    # NaN compares False, so a NaN trial never replaces the target
    return trial if trial.fitness < target.fitness else target


def repair_bounds(v: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if not lo < hi:
        raise ValueError("empty bounds")
    return np.minimum(np.maximum(v, lo), hi)


def run_de(cfg: DeConfig, src: RandomSource, func: Callable) -> RunRecord:
    """Minimise ``func`` (which maps an (n, D) batch to n values).

    Replacement is generational: trials are built from the frozen current
    population and selected into the next one.
    """
    pop = init_population(cfg, src, func)
    NP = cfg.pop_size
    history = np.empty(cfg.generations + 1)
    history[0] = pop.fitness.min()
    best1 = cfg.variant == "best1bin"
    trials = np.empty_like(pop.X)
    for g in range(cfg.generations):
        best = pop.best_index
        for i in range(NP):
            if best1:
                v = mutate_best1(pop, i, cfg.F, src, best)
            else:
                v = mutate_rand1(pop, i, cfg.F, src)
            v = repair_bounds(v, cfg.lo, cfg.hi)
            trials[i] = crossover_bin(pop.X[i], v, cfg.CR, src, cfg.force_jrand)
        tf = _batch(func, trials)
        better = tf < pop.fitness
        pop = Population(np.where(better[:, None], trials, pop.X), np.where(better, tf, pop.fitness))
        history[g + 1] = pop.fitness.min()
    return RunRecord(history, pop.X[pop.best_index].copy(), NP * (cfg.generations + 1))
