"""Command line entry point: ``chaosde <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from chaosde import harness
from chaosde.chaos_maps import MapEscapeError, get_map
from chaosde.normalizers import estimate_bounds
from chaosde.sources import MtSource, SourceSpec, make_chaotic
from chaosde.statistics import StatConfig


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # Subcommand copies use SUPPRESS so a flag given before the command survives.
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d(None), help="master seed")
    p.add_argument("--out", default=d(None), help="output file or directory")
    p.add_argument("--config", default=d(None), help="JSON file with experiment fields")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chaosde", parents=[_global_flags(False)],
                                 description="Chaotic random sources for differential evolution.")
    sub = ap.add_subparsers(dest="command", required=True)
    g = [_global_flags(True)]

    h = sub.add_parser("histogram", parents=g, help="histogram of a source over [0, 1)")
    h.add_argument("--source", required=True)
    h.add_argument("--samples", type=int, default=10**6)
    h.add_argument("--bins", type=int, default=64)

    b = sub.add_parser("bounds", parents=g, help="estimate x-bounds of a map")
    b.add_argument("--map", required=True)
    b.add_argument("--samples", type=int, default=10**6)

    r = sub.add_parser("run", parents=g, help="run an experiment grid cell")
    r.add_argument("--algo", dest="algorithm")
    r.add_argument("--func", dest="function")
    r.add_argument("--dim", dest="dimension", type=int)
    r.add_argument("--sources", help="comma-separated source specs")
    r.add_argument("--repeats", type=int)
    r.add_argument("--tol", type=float)
    r.add_argument("--pop-size", dest="pop_size", type=int)
    r.add_argument("--generations", type=int)
    r.add_argument("--instance-seed", dest="instance_seed", type=int)
    r.add_argument("--force-jrand", dest="force_jrand", action="store_true", default=None)
    r.add_argument("--workers", type=int, default=1)

    for name, text in (("table", "summary table"), ("wins", "win table"), ("stats", "statistical comparison")):
        s = sub.add_parser(name, parents=g, help=f"{text} from result directories")
        s.add_argument("--in", dest="inputs", required=True, nargs="+")
        if name == "wins":
            s.add_argument("--tol", type=float, default=harness.DEFAULT_TOL)
        if name == "stats":
            s.add_argument("--alpha", type=float, default=0.1)
    return ap


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_histogram(args) -> int:
    if args.bins < 1 or args.samples < 1:
        raise ValueError("--bins and --samples must be positive")
    spec = SourceSpec.parse(args.source)
    if spec.family == "mt":
        src = MtSource(args.seed if args.seed is not None else 5489)
    elif spec.family == "chaos":
        src = make_chaotic(spec.map_name, spec.scheme)
    else:
        dist = harness.matched_distribution(spec.map_name, spec.scheme)
        src = harness.MatchedSource(dist, args.seed if args.seed is not None else 5489)
    u = src.next_units(args.samples)
    counts, edges = np.histogram(u, bins=args.bins, range=(0.0, 1.0))
    rows = [[repr(float(edges[i])), repr(float(edges[i + 1])), int(counts[i])] for i in range(args.bins)]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_left", "bin_right", "count"])
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_bounds(args) -> int:
    kind = get_map(args.map)
    est = estimate_bounds(kind, args.samples)
    _emit(json.dumps({"map": kind.name, "min_x": est.min_x, "max_x": est.max_x,
                      "samples": est.sample_count}) + "\n", args.out)
    return 0


def _spec_from_args(args) -> harness.ExperimentSpec:
    data = {}
    if args.config:
        data.update(json.loads(Path(args.config).read_text()))
    for key in ("algorithm", "function", "dimension", "sources", "repeats", "tol", "pop_size",
                "generations", "instance_seed", "force_jrand", "seed", "out"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if isinstance(data.get("sources"), str):
        data["sources"] = [s for s in data["sources"].split(",") if s]
    missing = [k for k in ("algorithm", "function", "dimension", "sources") if k not in data]
    if missing:
        raise ValueError("missing experiment fields: " + ", ".join(missing))
    return harness.ExperimentSpec.from_dict(data)


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    if not spec.out:
        raise ValueError("run needs --out (or 'out' in the config)")
    results = harness.run_experiment(spec, workers=args.workers)
    out = harness.write_outputs(spec, results, spec.out)
    print(f"wrote {out}")
    return 0


def _load_all(inputs):
    return [harness.load_outputs(p) for p in inputs]


def cmd_table(args) -> int:
    parts = [harness.summary_table(e.results, e.spec.function) for e in _load_all(args.inputs)]
    _emit("".join(parts), args.out)
    return 0


def cmd_wins(args) -> int:
    tables = [harness.win_table(e.results, args.tol, e.spec.function) for e in _load_all(args.inputs)]
    merged = tables[0]
    for t in tables[1:]:
        if t.schemes != merged.schemes:
            raise ValueError("win tables over different scheme sets cannot be merged")
        merged.rows.update(t.rows)
        merged.repeats.update(t.repeats)
    _emit(merged.to_markdown(), args.out)
    return 0


def cmd_stats(args) -> int:
    cfg = StatConfig(args.alpha)
    text = []
    for e in _load_all(args.inputs):
        rep = harness.compare(e.results, cfg)
        text.append(f"## {e.spec.algorithm} {e.spec.function} D={e.spec.dimension}\n\n" + rep.to_markdown())
    _emit("\n".join(text), args.out)
    return 0


COMMANDS = {"histogram": cmd_histogram, "bounds": cmd_bounds, "run": cmd_run,
            "table": cmd_table, "wins": cmd_wins, "stats": cmd_stats}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError, MapEscapeError, RuntimeError) as exc:
        print(f"chaosde {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
