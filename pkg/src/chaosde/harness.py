"""Experiment grid runner, winner and summary tables, and result files."""
from __future__ import annotations

import csv
import io
import json
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from chaosde import __version__
from chaosde.benchmarks import BenchmarkId, make_instance
from chaosde.chaos_maps import get_map
from chaosde.de import DeConfig, RunRecord, run_de
from chaosde.sources import (
    MATCH_BINS,
    MATCH_SAMPLES,
    EmpiricalDistribution,
    MatchedSource,
    MtSource,
    RandomSource,
    SourceSpec,
    jittered_start,
    make_chaotic,
    reference_distribution,
)
from chaosde.statistics import StatConfig, StatReport, SummaryStats, stats_pipeline, summary

DEFAULT_TOL = 1e-3
JITTER = 1e-3
CACHE_ENV = "CHAOSDE_CACHE_DIR"


@dataclass(frozen=True)
class ExperimentSpec:
    algorithm: str
    function: str
    dimension: int
    sources: tuple
    repeats: int = 50
    seed: int = 0
    tol: float = DEFAULT_TOL
    out: str | None = None
    pop_size: int | None = None
    generations: int | None = None
    F: float = 0.5
    CR: float = 0.85
    force_jrand: bool = False
    instance_seed: int = 2013
    match_samples: int = MATCH_SAMPLES
    match_bins: int = MATCH_BINS
    jitter: float = JITTER

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(str(SourceSpec.parse(s)) for s in self.sources))
        object.__setattr__(self, "function", BenchmarkId.parse(self.function).label)
        if not self.sources:
            raise ValueError("an experiment needs at least one source")
        if len(set(self.sources)) != len(self.sources):
            raise ValueError("duplicate source specs")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.tol > 0:
            raise ValueError("tie tolerance must be positive")
        self.de_config()  # validates algorithm and schedule

    def de_config(self) -> DeConfig:
        over = {"F": self.F, "CR": self.CR, "force_jrand": self.force_jrand}
        if self.pop_size is not None:
            over["pop_size"] = self.pop_size
        if self.generations is not None:
            over["generations"] = self.generations
        return DeConfig.for_dimension(self.algorithm, self.dimension, **over)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sources"] = list(self.sources)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown experiment fields: {sorted(extra)}")
        data = dict(data)
        if isinstance(data.get("sources"), str):
            data["sources"] = data["sources"].split(",")
        return cls(**data)


@dataclass
class SchemeResult:
    label: str
    records: list
    stats: SummaryStats = field(init=False)

    def __post_init__(self):
        self.stats = summary(self.finals)

    @property
    def finals(self) -> np.ndarray:
        return np.array([r.final_best for r in self.records])

    def first_hits(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        return np.array([first_hit_generation(r.best_by_generation, tol) for r in self.records])


def _tie_key(v, tol: float):
    return np.floor(np.asarray(v, dtype=float) / tol + 0.5)


def first_hit_generation(history, tol: float = DEFAULT_TOL) -> int:
    """Earliest generation whose best value rounds to the final one on the tol grid."""
    h = _tie_key(history, tol)
    return int(np.argmax(h == h[-1]))


# Seeding. Each stream gets its own seed derived from (master, repeat, source).

def _source_tag(label: str) -> int:
    return zlib.crc32(label.encode())


def stream_seed(master: int, repeat: int, label: str) -> int:
    ss = np.random.SeedSequence([master, repeat, _source_tag(label)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def jitter_seed(master: int, repeat: int) -> int:
    ss = np.random.SeedSequence([master, repeat])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "chaosde")


@lru_cache(maxsize=None)
def _matched_distribution_mem(map_name: str, scheme: str, n: int, bins: int, root: str) -> EmpiricalDistribution:
    kind = get_map(map_name)
    start = kind.start
    name = f"{map_name}-{scheme}-n{n}-b{bins}-x{start.x!r}-y{start.y!r}.npy"
    path = Path(root) / name
    if path.exists():
        try:
            return EmpiricalDistribution.from_counts(np.load(path))
        except (OSError, ValueError):
            pass  # corrupt cache entry; rebuild
    dist = reference_distribution(map_name, scheme, n, bins)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".{os.getpid()}.tmp")
        with open(tmp, "wb") as fh:
            np.save(fh, dist.counts)
        os.replace(tmp, path)
    except OSError:
        pass  # a read-only cache only costs time
    return dist


def matched_distribution(map_name: str, scheme: str, n: int = MATCH_SAMPLES,
                         bins: int = MATCH_BINS) -> EmpiricalDistribution:
    """Histogram of the chaotic source from its default start, cached in memory and on disk."""
    return _matched_distribution_mem(map_name, scheme, n, bins, str(cache_dir()))


def build_source(spec: ExperimentSpec, repeat: int, label: str,
                 dists: dict | None = None) -> RandomSource:
    s = SourceSpec.parse(label)
    if s.family == "mt":
        return MtSource(stream_seed(spec.seed, repeat, label))
    if s.family == "chaos":
        kind = get_map(s.map_name)
        start = jittered_start(kind, jitter_seed(spec.seed, repeat), spec.jitter)
        return make_chaotic(s.map_name, s.scheme, start)
    key = (s.map_name, s.scheme)
    dist = (dists or {}).get(key) or matched_distribution(s.map_name, s.scheme, spec.match_samples,
                                                          spec.match_bins)
    return MatchedSource(dist, stream_seed(spec.seed, repeat, label), label)


def _needed_distributions(spec: ExperimentSpec) -> dict:
    out = {}
    for label in spec.sources:
        s = SourceSpec.parse(label)
        if s.family == "matched":
            out[(s.map_name, s.scheme)] = matched_distribution(s.map_name, s.scheme, spec.match_samples,
                                                               spec.match_bins)
    return out


@lru_cache(maxsize=8)
def _instance(function: str, dim: int, seed: int):
    return make_instance(function, dim, seed)


def run_single(spec: ExperimentSpec, repeat: int, label: str, dists: dict | None = None) -> RunRecord:
    """One DE run; fully determined by (spec, repeat, label)."""
    func = _instance(spec.function, spec.dimension, spec.instance_seed)
    src = build_source(spec, repeat, label, dists)
    try:
        return run_de(spec.de_config(), src, func)
    except Exception as exc:
        raise RuntimeError(f"run failed (repeat={repeat}, source={label}): {exc}") from exc


def _run_repeat(args) -> list:
    spec, repeat, dists = args
    return [run_single(spec, repeat, label, dists) for label in spec.sources]


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[SchemeResult]:
    dists = _needed_distributions(spec)
    tasks = [(spec, r, dists) for r in range(spec.repeats)]
    if workers > 1 and spec.repeats > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_repeat = list(pool.map(_run_repeat, tasks))
    else:
        per_repeat = [_run_repeat(t) for t in tasks]
    return [SchemeResult(label, [row[k] for row in per_repeat]) for k, label in enumerate(spec.sources)]


# Tables

@dataclass
class WinTable:
    """Win percentage per (function, scheme); co-winners each get the credit."""

    schemes: list
    rows: dict  # function label -> {scheme: percentage}
    repeats: dict = field(default_factory=dict)

    def to_markdown(self) -> str:
        head = "| function | " + " | ".join(self.schemes) + " |"
        sep = "|---|" + "---:|" * len(self.schemes)
        lines = [head, sep]
        for func, row in self.rows.items():
            lines.append(f"| {func} | " + " | ".join(f"{row[s]:.1f}" for s in self.schemes) + " |")
        return "\n".join(lines) + "\n"


def win_counts(finals: np.ndarray, first_hits: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """finals and first_hits have shape (schemes, repeats); returns wins per scheme."""
    finals = np.asarray(finals, dtype=float)
    hits = np.asarray(first_hits)
    if finals.shape != hits.shape or finals.ndim != 2:
        raise ValueError("finals and first-hit arrays must share a (schemes, repeats) shape")
    key = _tie_key(finals, tol)
    best = key.min(axis=0)
    on_value = key == best
    h = np.where(on_value, hits, np.iinfo(np.int64).max)
    winners = on_value & (h == h.min(axis=0))
    return winners.sum(axis=1)


def win_table(results: Sequence[SchemeResult], tol: float = DEFAULT_TOL, function: str = "") -> WinTable:
    reps = {len(r.records) for r in results}
    if len(reps) != 1:
        raise ValueError(f"schemes have different repeat counts: {sorted(reps)}")
    n = reps.pop()
    finals = np.stack([r.finals for r in results])
    hits = np.stack([r.first_hits(tol) for r in results])
    wins = win_counts(finals, hits, tol)
    labels = [r.label for r in results]
    row = {lab: 100.0 * int(w) / n for lab, w in zip(labels, wins)}
    return WinTable(labels, {function: row}, {function: n})


SUMMARY_COLUMNS = ("min", "max", "mean", "median", "std")


def summary_rows(results: Sequence[SchemeResult], function: str = "") -> list[dict]:
    rows = []
    for r in results:
        s = r.stats
        rows.append({"function": function, "scheme": r.label, "min": s.min, "max": s.max, "mean": s.mean,
                     "median": s.median, "std": s.std, "n": s.n})
    return rows


def summary_table(results: Sequence[SchemeResult], function: str = "") -> str:
    lines = ["| function | scheme | Min | Max | Mean | Med. | Std. dev. |",
             "|---|---|---:|---:|---:|---:|---:|"]
    for row in summary_rows(results, function):
        vals = " | ".join(f"{row[c]:.3f}" for c in SUMMARY_COLUMNS)
        std_note = "" if row["n"] >= 2 else " (n=1)"
        lines.append(f"| {row['function']} | {row['scheme']}{std_note} | {vals} |")
    return "\n".join(lines) + "\n"


def parse_summary_table(text: str) -> list[dict]:
    """Inverse of :func:`summary_table` (numbers come back at 3-decimal precision)."""
    out = []
    for line in text.splitlines():
        cells = [c.strip() for c in line.strip().strip("|").split("|")]
        if len(cells) != 7 or cells[0] == "function" or cells[0].startswith("---"):
            continue
        scheme = cells[1].removesuffix(" (n=1)")
        out.append({"function": cells[0], "scheme": scheme,
                    **{c: float(v) for c, v in zip(SUMMARY_COLUMNS, cells[2:])}})
    return out


def compare(results: Sequence[SchemeResult], cfg: StatConfig = StatConfig()) -> StatReport:
    return stats_pipeline({r.label: r.finals for r in results}, cfg)


# Result files. Floats go through repr so reloading is exact.

FINALS_HEADER = ["algo", "source", "func", "dim", "repeat", "final_best", "first_hit_generation"]
TRAJ_HEADER = ["run_id", "generation", "best_fitness"]


def run_id(label: str, repeat: int) -> str:
    return f"{label}#{repeat}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def render_outputs(spec: ExperimentSpec, results: Sequence[SchemeResult]) -> dict[str, str]:
    """File name -> contents; a pure function of the spec and its results."""
    finals, traj = [], []
    for res in results:
        hits = res.first_hits(spec.tol)
        for r, rec in enumerate(res.records):
            finals.append([spec.algorithm, res.label, spec.function, spec.dimension, r,
                           repr(rec.final_best), int(hits[r])])
            rid = run_id(res.label, r)
            traj.extend([rid, g, repr(float(v))] for g, v in enumerate(rec.best_by_generation))
    report = compare(results) if len(results) >= 2 else None
    md = [f"# {spec.algorithm} {spec.function} D={spec.dimension}", "",
          f"repeats: {spec.repeats}, seed: {spec.seed}, tie tolerance: {spec.tol:g}", "",
          "## Summary", "", summary_table(results, spec.function),
          "## Wins", "", win_table(results, spec.tol, spec.function).to_markdown()]
    if report is not None:
        md += ["## Statistics", "", report.to_markdown()]
    spec_fields = spec.to_dict()
    spec_fields.pop("out")  # keep the files independent of where they are written
    meta = {
        "spec": spec_fields,
        "version": __version__,
        "chaotic_start_jitter": spec.jitter,
        "seeding": "SeedSequence([seed, repeat, crc32(source)]) for MT streams; "
                   "SeedSequence([seed, repeat]) seeds the start jitter",
    }
    files = {
        "finals.csv": _csv_text(FINALS_HEADER, finals),
        "trajectories.csv": _csv_text(TRAJ_HEADER, traj),
        "summary.md": "\n".join(md),
        "experiment.json": json.dumps(meta, indent=2, sort_keys=True) + "\n",
    }
    if report is not None:
        files["stats.json"] = json.dumps(report.to_dict(), indent=2, sort_keys=True, default=_json_default) + "\n"
    return files


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_outputs(spec: ExperimentSpec, results: Sequence[SchemeResult], out: str | os.PathLike) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in render_outputs(spec, results).items():
        (out / name).write_text(text)
    return out


@dataclass
class LoadedExperiment:
    spec: ExperimentSpec
    results: list


def load_outputs(path: str | os.PathLike) -> LoadedExperiment:
    path = Path(path)
    meta = json.loads((path / "experiment.json").read_text())
    spec = ExperimentSpec.from_dict(meta["spec"])
    hist: dict[str, list] = {}
    with open(path / "trajectories.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            hist.setdefault(row["run_id"], []).append((int(row["generation"]), float(row["best_fitness"])))
    finals: dict[tuple, float] = {}
    with open(path / "finals.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            finals[(row["source"], int(row["repeat"]))] = float(row["final_best"])
    results = []
    for label in spec.sources:
        recs = []
        for r in range(spec.repeats):
            pts = sorted(hist.get(run_id(label, r), []))
            if not pts:
                raise ValueError(f"{path}: no trajectory for {run_id(label, r)}")
            h = np.array([v for _, v in pts])
            if (label, r) in finals and finals[(label, r)] != h[-1]:
                raise ValueError(f"{path}: finals.csv disagrees with trajectories for {run_id(label, r)}")
            cfg = spec.de_config()
            recs.append(RunRecord(h, np.empty(0), cfg.pop_size * (len(h))))
        results.append(SchemeResult(label, recs))
    return LoadedExperiment(spec, results)

