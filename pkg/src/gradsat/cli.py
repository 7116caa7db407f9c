"""``gradsat`` command line: solve, generate, bench, oracle, verify."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import bench
from .encoding import build_incidence
from .engine import SolveConfig, portfolio_solve
from .formula import DimacsError, evaluate, preprocess, read_dimacs, save_dimacs
from .generators import Family, cb, generate
from .oracle import DEFAULT_VAR_CAP, OracleRefusal, brute_force
from .validation import bits_to_literals, literals_to_bits

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SAT = 10
EXIT_UNKNOWN = 20

log = logging.getLogger("gradsat")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return value


def _family(text):
    try:
        return Family.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _time_limits(values):
    out = []
    for v in values:
        out.extend(float(t) for t in str(v).split(",") if t.strip())
    if not out or any(t <= 0 for t in out):
        raise argparse.ArgumentTypeError("time limits must be positive")
    return out


def _default_workers():
    env = os.environ.get("GRADSAT_THREADS")
    if not env:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _emit(line: str):
    sys.stdout.write(line + "\n")
    sys.stdout.flush()


def _solution_lines(cost: int, bits) -> list[str]:
    status = "s SATISFIABLE" if cost == 0 else "s UNKNOWN"
    return [status, " ".join(["v"] + [str(l) for l in bits_to_literals(bits)])]


def cmd_solve(args) -> int:
    formula = read_dimacs(args.file)
    cfg = SolveConfig(
        time_limit=args.time_limit,
        max_iters=args.max_iters,
        learning_rate=args.lr,
        seed=args.seed,
        target_cost=args.target_cost,
        restart_after=args.restart_after,
        dtype="float32" if args.float32 else "float64",
    )
    cf = preprocess(formula)
    W = build_incidence(cf)
    best = {}

    def on_improve(elapsed, cost, bits):
        best["cost"], best["bits"] = cost, bits
        _emit(f"o {cost}")

    try:
        report = portfolio_solve(cf, W, cfg, args.workers, on_improve)
    except KeyboardInterrupt:
        if "cost" not in best:
            return EXIT_ERROR
        for line in _solution_lines(best["cost"], best["bits"]):
            _emit(line)
        return EXIT_SAT if best["cost"] == 0 else EXIT_UNKNOWN

    if evaluate(formula, report.best_assignment) != report.best_cost:
        raise AssertionError("internal error: reported cost does not re-verify")
    if args.trace:
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["elapsed_s", "iteration", "cost"])
            w.writerows((f"{e.elapsed:.6f}", e.iteration, e.cost) for e in report.trace)
    log.info("termination=%s iterations=%d seed=%d", report.termination.value,
             report.iterations, report.seed)
    for line in _solution_lines(report.best_cost, report.best_assignment):
        _emit(line)
    return EXIT_SAT if report.best_cost == 0 else EXIT_UNKNOWN


def cmd_generate(args, parser) -> int:
    if (args.k is None) == (args.suite is None):
        parser.error("give either an index k or --suite N")
    ks = [args.k] if args.k is not None else list(range(1, args.suite + 1))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k in ks:
        if args.family is Family.CB:
            f = cb(k, exhaustive=args.cb_encoding == "exhaustive")
        else:
            f = generate(args.family, k)
        path = out / f"{args.family.value.lower()}_{k}.cnf"
        header = f"family={args.family.value} k={k} vars={f.num_vars} clauses={f.num_clauses}"
        save_dimacs(f, path, [header])
        print(path)
    return EXIT_OK


def cmd_oracle(args) -> int:
    formula = read_dimacs(args.file)
    try:
        res = brute_force(formula, var_cap=args.cap, method=args.method)
    except OracleRefusal as exc:
        print(f"gradsat oracle: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"optimum {res.optimal_cost}")
    print(" ".join(["v"] + [str(l) for l in bits_to_literals(res.witness)]))
    return EXIT_OK


def read_assignment(path, n: int):
    """Literals from a solution file: ``v`` lines, or bare literal lines; ``c``/``o``/``s`` lines skipped."""
    lits = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            toks = line.split()
            if not toks or toks[0] in ("c", "o", "s"):
                continue
            if toks[0] == "v":
                toks = toks[1:]
            lits.extend(int(t) for t in toks)
    return literals_to_bits(lits, n)


def cmd_verify(args) -> int:
    formula = read_dimacs(args.file)
    bits = read_assignment(args.assignment, formula.num_vars)
    actual = evaluate(formula, bits)
    if actual == args.claimed:
        print(f"verified cost {actual}")
        return EXIT_OK
    print(f"mismatch: assignment falsifies {actual} clauses, claimed {args.claimed}")
    return EXIT_ERROR


def cmd_bench(args) -> int:
    baseline = bench.load_costs(args.baseline) if args.baseline else None
    families = None if args.family == "all" else [args.family]
    if args.replay:
        records = bench.records_from_costs(bench.load_costs(args.replay), families)
        if args.count is not None:
            records = [r for r in records if r.k <= args.count]
        if args.time_limits:
            wanted = set(args.time_limits)
            records = [r for r in records if r.time_limit in wanted]
    else:
        if families is None:
            raise ValueError("'all' is only valid with --replay")
        cfg = SolveConfig(learning_rate=args.lr, seed=args.seed, restart_after=args.restart_after)

        def progress(rec):
            log.info("%s k=%d T=%gs cost=%d", rec.family, rec.k, rec.time_limit, rec.best_cost)

        records = bench.run_suite(
            args.family, 3 if args.count is None else args.count, cfg,
            args.time_limits or [60.0], args.workers, args.jobs, progress,
        )

    out = Path(args.out)
    fmt = "json" if out.suffix.lower() == ".json" else "csv"
    bench.emit(records, fmt, out)
    print(f"wrote {len(records)} records to {out}")
    if baseline is not None:
        rows = bench.regret(records, baseline, args.solver_label)
        regret_path = out.with_name(out.stem + "_regret" + out.suffix)
        bench.emit(rows, fmt, regret_path)
        print(bench.format_regret_table(rows))
        print(f"wrote regret table to {regret_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gradsat", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a DIMACS CNF file")
    s.add_argument("file")
    s.add_argument("--time-limit", type=float, default=60.0, help="seconds (default 60)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lr", type=float, default=1e-4, help="Adam learning rate (default 1e-4)")
    s.add_argument("--workers", type=_positive_int, default=_default_workers(),
                   help="parallel searches (default $GRADSAT_THREADS or 1)")
    s.add_argument("--restart-after", type=_positive_int)
    s.add_argument("--target-cost", type=_nonneg_int)
    s.add_argument("--max-iters", type=_positive_int)
    s.add_argument("--trace", help="write the improvement trace as CSV")
    s.add_argument("--float32", action="store_true", help="single precision arithmetic")

    g = sub.add_parser("generate", help="write benchmark instances as DIMACS files")
    g.add_argument("family", type=_family)
    g.add_argument("k", type=_positive_int, nargs="?")
    g.add_argument("--suite", type=_positive_int, metavar="N", help="write k = 1..N")
    g.add_argument("--out", default=".", help="output directory")
    g.add_argument("--cb-encoding", choices=["exhaustive", "half"], default="exhaustive")

    b = sub.add_parser("bench", help="run a suite and write CSV/JSON results")
    b.add_argument("family", type=lambda t: t if t.lower() == "all" else _family(t))
    b.add_argument("--count", type=_nonneg_int)
    b.add_argument("--time-limits", nargs="+", default=None, metavar="T")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--lr", type=float, default=1e-4)
    b.add_argument("--restart-after", type=_positive_int)
    b.add_argument("--workers", type=_positive_int, default=_default_workers())
    b.add_argument("--jobs", type=_positive_int, default=1, help="instances solved in parallel")
    b.add_argument("--baseline", help="cost table CSV (dataset,k,time_limit_s,cost) or builtin:<name>")
    b.add_argument("--replay", help="read costs from a table instead of solving")
    b.add_argument("--solver-label", default="gradsat")
    b.add_argument("--out", required=True, help="results file (.csv or .json)")

    o = sub.add_parser("oracle", help="exact optimum by exhaustive enumeration")
    o.add_argument("file")
    o.add_argument("--cap", type=_nonneg_int, default=DEFAULT_VAR_CAP)
    o.add_argument("--method", choices=["binary", "gray"], default="binary")

    v = sub.add_parser("verify", help="check that an assignment has the claimed cost")
    v.add_argument("file")
    v.add_argument("assignment")
    v.add_argument("claimed", type=_nonneg_int)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="c %(message)s", stream=sys.stderr)
    if getattr(args, "time_limits", None) is not None:
        try:
            args.time_limits = _time_limits(args.time_limits)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"--time-limits: {exc}")
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "generate":
            return cmd_generate(args, parser)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        return cmd_verify(args)
    except (OSError, DimacsError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gradsat {args.command}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
