"""Benchmark harness: timed runs over generated suites, regret tables, CSV/JSON output."""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .engine import SolveConfig, portfolio_solve
from .formula import preprocess
from .generators import Family, expected_size, generate
from .oracle import verify

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "family", "k", "num_vars", "num_clauses", "time_limit_s", "seed", "workers",
    "best_cost", "time_to_best_s", "iterations",
]
REGRET_COLUMNS = ["solver", "dataset", "time_limit_s", "instances", "total_regret", "mean_regret"]
BASELINE_COLUMNS = ["dataset", "k", "time_limit_s", "cost"]
BUILTIN_COST_TABLES = ("rc2", "fm", "lsu", "torchmsat")

BaselineKey = tuple  # (dataset, k, time_limit_s)


class MissingBaselineError(KeyError):
    pass


@dataclass
class BenchRecord:
    family: str
    k: int
    num_vars: int
    num_clauses: int
    time_limit: float
    seed: int
    worker_count: int
    best_cost: int
    time_to_best: Optional[float]
    iterations: int
    trace: list = field(default_factory=list)  # (elapsed_s, cost) pairs
    assignment: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def key(self) -> BaselineKey:
        return (self.family, self.k, float(self.time_limit))

    def as_row(self) -> dict:
        return {
            "family": self.family,
            "k": self.k,
            "num_vars": self.num_vars,
            "num_clauses": self.num_clauses,
            "time_limit_s": self.time_limit,
            "seed": self.seed,
            "workers": self.worker_count,
            "best_cost": self.best_cost,
            "time_to_best_s": self.time_to_best,
            "iterations": self.iterations,
        }

    @classmethod
    def from_row(cls, row: Mapping, trace=()) -> "BenchRecord":
        ttb = row["time_to_best_s"]
        return cls(
            family=str(row["family"]),
            k=int(row["k"]),
            num_vars=int(row["num_vars"]),
            num_clauses=int(row["num_clauses"]),
            time_limit=float(row["time_limit_s"]),
            seed=int(row["seed"]),
            worker_count=int(row["workers"]),
            best_cost=int(row["best_cost"]),
            time_to_best=None if ttb in ("", None) else float(ttb),
            iterations=int(row["iterations"]),
            trace=[(float(t), int(c)) for t, c in trace],
        )


@dataclass(frozen=True)
class RegretRow:
    solver: str
    dataset: str
    time_limit: float
    total: int
    count: int

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    def as_row(self) -> dict:
        return {
            "solver": self.solver,
            "dataset": self.dataset,
            "time_limit_s": self.time_limit,
            "instances": self.count,
            "total_regret": self.total,
            "mean_regret": self.mean,
        }


def _run_one(family: Family, k: int, cfg: SolveConfig, workers: int) -> BenchRecord:
    f = generate(family, k)
    cf = preprocess(f)
    rep = portfolio_solve(cf, None, cfg, workers)
    if not verify(f, rep.best_assignment, rep.best_cost):
        raise AssertionError(f"{family.value}({k}): reported cost {rep.best_cost} does not re-verify")
    return BenchRecord(
        family=family.value,
        k=k,
        num_vars=f.num_vars,
        num_clauses=f.num_clauses,
        time_limit=float(cfg.time_limit),
        seed=rep.seed,
        worker_count=workers,
        best_cost=rep.best_cost,
        time_to_best=rep.time_to_best,
        iterations=rep.iterations,
        trace=[(e.elapsed, e.cost) for e in rep.trace],
        assignment=rep.best_assignment,
    )


def run_suite(family, count: int, cfg: Optional[SolveConfig] = None,
              time_limits: Sequence[float] = (60.0,), workers: int = 1,
              jobs: int = 1, on_record=None) -> list[BenchRecord]:
    """Solve ``family`` instances ``k = 1..count`` once per time limit.

    Records come back in ascending ``k`` (then time limit order). Instances
    are spread over ``jobs`` processes only when each solve is single-worker,
    so per-run timings are not distorted by nested parallelism.
    """
    family = Family.parse(family)
    cfg = cfg or SolveConfig()
    tasks = [
        (family, k, replace(cfg, time_limit=float(t)), workers)
        for k in range(1, count + 1)
        for t in time_limits
    ]
    if jobs > 1 and workers > 1:
        logger.info("workers > 1: running instances sequentially")
        jobs = 1
    records = []
    if not tasks:
        return records
    if jobs <= 1:
        for task in tasks:
            rec = _run_one(*task)
            records.append(rec)
            if on_record is not None:
                on_record(rec)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rec in pool.map(_run_one, *zip(*tasks)):
                records.append(rec)
                if on_record is not None:
                    on_record(rec)
    return records


def regret(records: Iterable[BenchRecord], baseline: Mapping[BaselineKey, int],
           solver: str = "gradsat") -> list[RegretRow]:
    """Sum of ``cost - baseline_cost`` per (dataset, time limit).

    ``baseline`` maps ``(dataset, k, time_limit_s)`` to the reference cost.
    """
    totals: dict[tuple, list[int]] = defaultdict(lambda: [0, 0])
    for rec in records:
        try:
            ref = baseline[rec.key]
        except KeyError:
            raise MissingBaselineError(
                f"no baseline cost for {rec.family} k={rec.k} T={rec.time_limit:g}s"
            ) from None
        acc = totals[(rec.family, float(rec.time_limit))]
        acc[0] += rec.best_cost - ref
        acc[1] += 1
    return [
        RegretRow(solver, ds, t, total, n)
        for (ds, t), (total, n) in sorted(totals.items())
    ]


def load_costs(path) -> dict[BaselineKey, int]:
    """Read a cost table (``dataset,k,time_limit_s,cost``) into a baseline mapping.

    ``path`` may also be ``builtin:<name>`` for one of the bundled published
    cost tables (rc2, fm, lsu, torchmsat).
    """
    with _open_table(path) as fh:
        reader = csv.DictReader(fh)
        missing = set(BASELINE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return {
            (row["dataset"].upper(), int(row["k"]), float(row["time_limit_s"])): int(row["cost"])
            for row in reader
        }


def _open_table(path):
    path = str(path)
    if path.startswith("builtin:"):
        name = path.split(":", 1)[1].lower()
        if name not in BUILTIN_COST_TABLES:
            raise FileNotFoundError(f"no builtin cost table {name!r}; choose from {BUILTIN_COST_TABLES}")
        return (resources.files("gradsat") / "data" / f"published_{name}.csv").open(encoding="utf-8")
    return open(path, encoding="utf-8", newline="")


def records_from_costs(costs: Mapping[BaselineKey, int], families=None) -> list[BenchRecord]:
    """Turn a cost table into records so recorded results can be replayed through :func:`regret`.

    CB sizes are those of the half chessboard encoding, which the bundled
    published tables were measured on.
    """
    wanted = None if families is None else {Family.parse(f).value for f in families}
    out = []
    for (ds, k, t), cost in sorted(costs.items()):
        if wanted is not None and ds not in wanted:
            continue
        nv, nc = expected_size(ds, k, exhaustive=False)
        out.append(BenchRecord(ds, k, nv, nc, t, 0, 1, cost, None, 0))
    return out


def _is_regret(items) -> bool:
    return bool(items) and isinstance(items[0], RegretRow)


def emit(items: Sequence, fmt: str, path) -> Path:
    """Write records or regret rows as ``csv`` or ``json``; traces go to JSON only."""
    items = list(items)
    path = Path(path)
    regret_rows = _is_regret(items)
    if fmt == "csv":
        cols = REGRET_COLUMNS if regret_rows else RECORD_COLUMNS
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for it in items:
                row = it.as_row()
                if row.get("time_to_best_s") is None and not regret_rows:
                    row["time_to_best_s"] = ""
                w.writerow(row)
    elif fmt == "json":
        payload = []
        for it in items:
            row = it.as_row()
            if not regret_rows:
                row["trace"] = [[t, c] for t, c in it.trace]
            payload.append(row)
        path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv or json")
    return path


def load_records(path, fmt: Optional[str] = None) -> list[BenchRecord]:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        return [BenchRecord.from_row(r, r.get("trace", ())) for r in json.loads(path.read_text())]
    with open(path, newline="", encoding="utf-8") as fh:
        return [BenchRecord.from_row(r) for r in csv.DictReader(fh)]


def format_regret_table(rows: Sequence[RegretRow]) -> str:
    lines = [f"{'solver':<12}{'dataset':<8}{'T(s)':>8}{'n':>5}{'total':>10}{'mean':>12}"]
    for r in rows:
        lines.append(
            f"{r.solver:<12}{r.dataset:<8}{r.time_limit:>8g}{r.count:>5}{r.total:>10}{r.mean:>12.2f}"
        )
    return "\n".join(lines)


def truncated_mean(rows: Sequence[RegretRow]) -> dict[tuple, int]:
    """``{(dataset, time_limit): floor(mean)}``, the rounding used by the published summary table."""
    return {(r.dataset, r.time_limit): math.floor(r.mean) for r in rows}
