"""Command-line front door: stream ingestion, verification, benchmarks.

Stream grammar, one update per line, ``#`` starts a comment::

    <relname> <+|-> <v1> [<v2> ...] [* <mult>]

Values are decimal integers, the default multiplicity is 1, and ``-``
negates it. Relation names and arities come from the selected query
family: triangle (R, S, T binary), triangle-selfjoin (R binary), path4
(R unary, S, T binary, U unary), lw:<n> (R1..Rn of arity n-1).

``run`` replays a stream into the selected engine and prints JSON records
{step, answer, N, db_size, ops, rebalances}, one per update or only the
final one. ``--verify`` cross-checks every prefix against the oracle
trackers and exits nonzero on the first mismatch. ``bench`` generates
seeded insert streams at several sizes, replays them, and emits a CSV of
operation totals, peak state size, wall time, and the fitted log-log
exponent per configuration.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.

The seeded stream generators used by benchmarks and tests live here too;
engines never generate data.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .enumeration import EnumTriangleEngine
from .loomis_whitney import LWEngine
from .metrics import fit_scaling
from .oracle import (LWTracker, Path4Tracker, SelfJoinTracker, TriangleTracker,
                     brute_force_enumerate)
from .path4 import Path4Engine
from .refined import RefinedTriangleEngine
from .selfjoin import SelfJoinEngine
from .triangle import EpsConfig, TriangleEngine, static_count


class Update(NamedTuple):
    rel: str
    values: tuple
    mult: int


class StreamFormatError(ValueError):
    """Malformed update line."""


class ConfigError(ValueError):
    """Inconsistent run configuration."""


MODES = ("ivm-eps", "classic", "factorized", "refined", "enum", "static")


def family_arities(query: str) -> dict[str, int]:
    if query == "triangle":
        return {"R": 2, "S": 2, "T": 2}
    if query == "triangle-selfjoin":
        return {"R": 2}
    if query == "path4":
        return {"R": 1, "S": 2, "T": 2, "U": 1}
    if query.startswith("lw:"):
        n = int(query.split(":", 1)[1])
        if n < 3:
            raise ConfigError("lw degree must be at least 3")
        return {f"R{i+1}": n - 1 for i in range(n)}
    raise ConfigError(f"unknown query family {query!r}")


def parse_stream(lines: Iterable[str], arities: dict[str, int]) -> list[Update]:
    out = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) < 3:
            raise StreamFormatError(f"line {lineno}: expected '<rel> <+|-> <values...>'")
        rel, sign = toks[0], toks[1]
        if rel not in arities:
            raise StreamFormatError(f"line {lineno}: unknown relation {rel!r}")
        if sign not in ("+", "-"):
            raise StreamFormatError(f"line {lineno}: sign must be + or -, got {sign!r}")
        rest = toks[2:]
        mult = 1
        if "*" in rest:
            star = rest.index("*")
            if star != len(rest) - 2:
                raise StreamFormatError(f"line {lineno}: '*' must precede a single multiplicity")
            try:
                mult = int(rest[star + 1])
            except ValueError:
                raise StreamFormatError(f"line {lineno}: bad multiplicity {rest[star+1]!r}") from None
            rest = rest[:star]
        try:
            values = tuple(int(v) for v in rest)
        except ValueError:
            raise StreamFormatError(f"line {lineno}: values must be decimal integers") from None
        if len(values) != arities[rel]:
            raise StreamFormatError(
                f"line {lineno}: {rel} takes {arities[rel]} values, got {len(values)}")
        if mult == 0:
            raise StreamFormatError(f"line {lineno}: zero multiplicity")
        out.append(Update(rel, values, mult if sign == "+" else -mult))
    return out


def format_stream(updates: Iterable[Update]) -> list[str]:
    lines = []
    for rel, values, m in updates:
        sign = "+" if m > 0 else "-"
        body = " ".join(str(v) for v in values)
        suffix = f" * {abs(m)}" if abs(m) != 1 else ""
        lines.append(f"{rel} {sign} {body}{suffix}")
    return lines


# ---------------------------------------------------------------------------
# seeded stream generators


def random_mixed_stream(query: str, length: int, domain: int, seed: int,
                        mults=(-2, -1, 1, 2)) -> list[Update]:
    """Uniform mixed inserts and deletes over a bounded value domain."""
    rng = random.Random(seed)
    arities = family_arities(query)
    names = list(arities)
    out = []
    for _ in range(length):
        rel = names[rng.randrange(len(names))]
        values = tuple(rng.randrange(domain) for _ in range(arities[rel]))
        out.append(Update(rel, values, rng.choice(mults)))
    return out


def er_insert_stream(length: int, nodes: int, seed: int,
                     query: str = "triangle") -> list[Update]:
    """Insert-only uniform random edges, one relation per step, round robin."""
    rng = random.Random(seed)
    names = list(family_arities(query))
    out = []
    for i in range(length):
        rel = names[i % len(names)]
        out.append(Update(rel, (rng.randrange(nodes), rng.randrange(nodes)), 1))
    return out


def hub_insert_stream(length: int, seed: int, hubs: int = 8) -> list[Update]:
    """Insert-only triangle stream with hub-concentrated A and B values.

    A and B are drawn from a handful of hubs while C ranges over a wide
    domain, so hub degrees grow linearly in the stream length and blow far
    past any square-root threshold. Degree-oblivious strategies then pay
    hub-sized scans on most updates while a balanced split promotes the
    hubs once and keeps every later scan short. Used by the scaling probes.
    """
    rng = random.Random(seed)
    wide = max(4 * length, 16)
    out = []
    for i in range(length):
        rel = ("R", "S", "T")[i % 3]
        a = rng.randrange(hubs)
        b = rng.randrange(hubs)
        cv = rng.randrange(wide)
        if rel == "R":
            values = (a, b)
        elif rel == "S":
            values = (b, cv)
        else:
            values = (cv, a)
        out.append(Update(rel, values, 1))
    return out


def space_probe_stream(length: int, seed: int) -> list[Update]:
    """Insert-only triangle stream that inflates one wedge view.

    A tiny pool of A values turns heavy in R while the B values, shared
    between R and S, stay light in S with square-root-sized neighbor
    lists. The heavy-light wedge between R and S then grows like the
    number of heavy tuples times the light budget, clearly superlinear,
    while refined two-variable splits keep every view empty (the C side
    never gets heavy).
    """
    rng = random.Random(seed)
    root = max(4, math.isqrt(length))
    heavy_pool = max(1, root // 68)
    mid_pool = 3 * root
    wide = max(4 * length, 16)
    out = []
    for i in range(length):
        rel = ("R", "S", "T")[i % 3]
        if rel == "R":
            a = rng.randrange(heavy_pool) if rng.random() < 0.12 else heavy_pool + rng.randrange(wide)
            values = (a, rng.randrange(mid_pool))
        elif rel == "S":
            values = (rng.randrange(mid_pool), rng.randrange(wide))
        else:
            values = (rng.randrange(wide), heavy_pool + rng.randrange(wide))
        out.append(Update(rel, values, 1))
    return out


GENERATORS = {
    "mixed": lambda n, seed, query: random_mixed_stream(query, n, max(8, math.isqrt(n)), seed),
    "er": lambda n, seed, query: er_insert_stream(n, max(8, math.isqrt(2 * n)), seed, query),
    "hub": lambda n, seed, query: hub_insert_stream(n, seed),
    "space": lambda n, seed, query: space_probe_stream(n, seed),
}


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    query: str = "triangle"
    mode: str = "ivm-eps"
    eps: float = 0.5
    eps_rst: tuple[float, float, float] | None = None
    stream: str = "-"
    verify: bool = False
    metrics: str | None = None
    seed: int = 0
    emit: str = "final"

    def validate(self) -> None:
        family_arities(self.query)
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "classic":
            if self.eps not in (0.0, 1.0):
                raise ConfigError("classic mode requires epsilon 0 or 1")
        if self.mode == "factorized":
            if self.query != "triangle":
                raise ConfigError("factorized mode applies to the triangle family")
            t = self.eps_rst
            if t is None:
                raise ConfigError("factorized mode requires --epsilon-rst")
            if any(v not in (0.0, 1.0) for v in t) or len(set(t)) == 1:
                raise ConfigError(
                    "factorized mode needs per-relation epsilons in {0,1}, not all equal")
        if self.mode in ("refined", "enum") and self.query != "triangle":
            raise ConfigError(f"{self.mode} mode applies to the triangle family")
        if self.mode == "static" and self.query != "triangle":
            raise ConfigError("static mode applies to the triangle family")
        if self.emit not in ("final", "per-step"):
            raise ConfigError("emit must be 'final' or 'per-step'")


def build_engine(cfg: RunConfig):
    q = cfg.query
    if q == "triangle":
        if cfg.mode == "factorized":
            return TriangleEngine(EpsConfig(*cfg.eps_rst))
        if cfg.mode == "refined":
            return RefinedTriangleEngine(cfg.eps)
        if cfg.mode == "enum":
            return EnumTriangleEngine(cfg.eps)
        return TriangleEngine(EpsConfig.uniform(cfg.eps))
    if q == "triangle-selfjoin":
        return SelfJoinEngine(cfg.eps)
    if q == "path4":
        return Path4Engine(cfg.eps)
    return LWEngine(int(q.split(":", 1)[1]), cfg.eps)


def build_tracker(query: str):
    if query == "triangle":
        return TriangleTracker()
    if query == "triangle-selfjoin":
        return SelfJoinTracker()
    if query == "path4":
        return Path4Tracker()
    return LWTracker(int(query.split(":", 1)[1]))


def _tracker_update(tracker, upd: Update):
    if isinstance(tracker, SelfJoinTracker):
        tracker.update(upd.values, upd.mult)
    elif isinstance(tracker, LWTracker):
        tracker.update(int(upd.rel[1:]) - 1, upd.values, upd.mult)
    else:
        tracker.update(upd.rel, upd.values, upd.mult)


def _record(step: int, engine) -> dict:
    ops = engine.counters.snapshot()
    return {
        "step": step,
        "answer": engine.answer(),
        "N": engine.N,
        "db_size": engine.db_size,
        "ops": {k: ops[k] for k in ("lookups", "iterations", "moves")},
        "rebalances": {"major": ops["rebalance_major"], "minor": ops["rebalance_minor"]},
    }


def _read_stream(cfg: RunConfig) -> list[Update]:
    arities = family_arities(cfg.query)
    if cfg.stream == "-":
        return parse_stream(sys.stdin, arities)
    with open(cfg.stream, "r", encoding="utf-8") as fh:
        return parse_stream(fh, arities)


def run(cfg: RunConfig, out=None) -> int:
    cfg.validate()
    out = out if out is not None else sys.stdout
    updates = _read_stream(cfg)

    metrics_fh = open(cfg.metrics, "w", encoding="utf-8") if cfg.metrics else None
    try:
        if cfg.mode == "static":
            db: dict[str, dict] = {"R": {}, "S": {}, "T": {}}
            for rel, values, m in updates:
                nv = db[rel].get(values, 0) + m
                if nv:
                    db[rel][values] = nv
                else:
                    del db[rel][values]
            answer = static_count(db)
            if cfg.verify:
                from .oracle import brute_force_triangle
                expect = brute_force_triangle(db["R"], db["S"], db["T"])
                if answer != expect:
                    print(f"verification failed: {answer} != {expect}", file=sys.stderr)
                    return 1
            rec = {"step": len(updates), "answer": answer, "N": None,
                   "db_size": sum(len(r) for r in db.values()),
                   "ops": {}, "rebalances": {}}
            print(json.dumps(rec), file=out)
            if metrics_fh:
                print(json.dumps(rec), file=metrics_fh)
            return 0

        engine = build_engine(cfg)
        tracker = build_tracker(cfg.query) if cfg.verify else None
        for step, upd in enumerate(updates, 1):
            engine.on_update(upd.rel, upd.values, upd.mult)
            if tracker is not None:
                _tracker_update(tracker, upd)
                if cfg.mode == "enum":
                    got = engine.result_multiset()
                    want = brute_force_enumerate(*(dict(r) for r in tracker.rels))
                    ok = got == want
                else:
                    ok = engine.answer() == tracker.count
                if not ok:
                    print(f"verification failed at step {step}", file=sys.stderr)
                    return 1
            if cfg.emit == "per-step" or metrics_fh:
                rec = _record(step, engine)
                if cfg.emit == "per-step":
                    print(json.dumps(rec), file=out)
                if metrics_fh:
                    print(json.dumps(rec), file=metrics_fh)
        if cfg.emit == "final":
            print(json.dumps(_record(len(updates), engine)), file=out)
        return 0
    finally:
        if metrics_fh:
            metrics_fh.close()


def bench(cfg: RunConfig, sizes: list[int], gen: str = "hub", out=None) -> int:
    cfg.validate()
    if gen not in GENERATORS:
        raise ConfigError(f"unknown generator {gen!r}")
    out = out if out is not None else sys.stdout
    rows = []
    totals = []
    for size in sizes:
        stream = GENERATORS[gen](size, cfg.seed, cfg.query)
        engine = build_engine(cfg)
        peak_space = 0
        t0 = time.perf_counter()
        for upd in stream:
            engine.on_update(upd.rel, upd.values, upd.mult)
            space = engine.space_used()
            if space > peak_space:
                peak_space = space
        wall = time.perf_counter() - t0
        ops = engine.counters.snapshot()
        total = ops["lookups"] + ops["iterations"] + ops["moves"]
        totals.append(total)
        rows.append({
            "query": cfg.query, "mode": cfg.mode, "eps": cfg.eps, "gen": gen,
            "size": size, "lookups": ops["lookups"], "iterations": ops["iterations"],
            "moves": ops["moves"], "majors": ops["rebalance_major"],
            "minors": ops["rebalance_minor"], "total_ops": total,
            "peak_space": peak_space, "wall_s": round(wall, 4), "slope": "",
        })
    if len(sizes) >= 3:
        slope = round(fit_scaling(sizes, totals), 4)
        for row in rows:
            row["slope"] = slope
    writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if cfg.metrics:
        with open(cfg.metrics, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            for row in rows:
                w.writerow(row)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--query", default="triangle",
                   help="triangle | triangle-selfjoin | path4 | lw:<n>")
    p.add_argument("--mode", default="ivm-eps", choices=MODES)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--epsilon-rst", default=None,
                   help="per-relation epsilons 'r,s,t' for factorized mode")
    p.add_argument("--metrics", default=None, help="write records to this path")
    p.add_argument("--seed", type=int, default=0)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewivm",
                                     description="incremental count/enumeration maintenance")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="replay an update stream")
    _add_common(runp)
    runp.add_argument("--stream", default="-", help="update stream path, '-' for stdin")
    runp.add_argument("--verify", action="store_true",
                      help="cross-check every prefix against the oracle")
    runp.add_argument("--emit", default="final", choices=("final", "per-step"))
    benchp = sub.add_parser("bench", help="seeded scaling benchmark")
    _add_common(benchp)
    benchp.add_argument("--sizes", default="4000,16000,64000",
                        help="comma-separated stream lengths")
    benchp.add_argument("--gen", default="hub", choices=sorted(GENERATORS))
    return parser


def _config_from_args(args) -> RunConfig:
    eps_rst = None
    if args.epsilon_rst:
        parts = [float(x) for x in args.epsilon_rst.split(",")]
        if len(parts) != 3:
            raise ConfigError("--epsilon-rst takes three comma-separated values")
        eps_rst = tuple(parts)
    return RunConfig(
        query=args.query, mode=args.mode, eps=args.epsilon, eps_rst=eps_rst,
        stream=getattr(args, "stream", "-"), verify=getattr(args, "verify", False),
        metrics=args.metrics, seed=args.seed, emit=getattr(args, "emit", "final"),
    )


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _config_from_args(args)
        if args.command == "run":
            return run(cfg)
        sizes = [int(s) for s in args.sizes.split(",") if s]
        return bench(cfg, sizes, gen=args.gen)
    except (ConfigError, StreamFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
