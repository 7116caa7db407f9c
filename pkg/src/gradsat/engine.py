"""Anytime gradient-descent MaxSAT search.

Each iteration runs the forward pass, projects ``x`` to Booleans, masks the
falsified clauses, records the assignment if it beats the best cost so far,
and takes one Adam step on the masked loss. The loop stops on the time limit,
an iteration cap, a reached target cost, or zero loss (everything satisfied).
"""

from __future__ import annotations

import logging
import multiprocessing as mp
import queue as queue_mod
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np

from .encoding import IncidenceMatrix, build_incidence
from .formula import CompiledFormula

logger = logging.getLogger(__name__)

ImproveCallback = Callable[[float, int, np.ndarray], None]


class NonFiniteStateError(FloatingPointError):
    """The relaxed state or its gradient stopped being finite."""


class Termination(str, Enum):
    TIME_LIMIT = "time_limit"
    ZERO_LOSS = "zero_loss"
    TARGET_REACHED = "target_reached"
    ITER_CAP = "iter_cap"
    # portfolio members halted because a sibling already finished the job
    STOPPED = "stopped"


class TraceEntry(NamedTuple):
    elapsed: float
    iteration: int
    cost: int


@dataclass
class SolveConfig:
    time_limit: float = 60.0
    max_iters: Optional[int] = None
    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    target_cost: Optional[int] = None
    restart_after: Optional[int] = None
    dtype: str = "float64"

    def __post_init__(self):
        if not self.time_limit >= 0:
            raise ValueError(f"time_limit must be >= 0, got {self.time_limit}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        for name in ("adam_beta1", "adam_beta2"):
            b = getattr(self, name)
            if not 0 <= b < 1:
                raise ValueError(f"{name} must lie in [0, 1), got {b}")
        if not self.adam_eps > 0:
            raise ValueError(f"adam_eps must be > 0, got {self.adam_eps}")
        if self.restart_after is not None and self.restart_after < 1:
            raise ValueError(f"restart_after must be >= 1, got {self.restart_after}")
        if self.target_cost is not None and self.target_cost < 0:
            raise ValueError(f"target_cost must be >= 0, got {self.target_cost}")
        if np.dtype(self.dtype) not in (np.dtype(np.float32), np.dtype(np.float64)):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype}")


@dataclass
class RelaxationState:
    x: np.ndarray
    adam_m: np.ndarray
    adam_v: np.ndarray
    step: int
    rng_seed: int
    rng: np.random.Generator = field(repr=False)


@dataclass
class SolveReport:
    best_cost: int
    best_assignment: np.ndarray
    trace: list[TraceEntry]
    iterations: int
    termination: Termination
    seed: int
    elapsed: float = 0.0

    @property
    def time_to_best(self) -> float:
        return self.trace[-1].elapsed if self.trace else float("nan")

    @property
    def satisfiable(self) -> bool:
        return self.best_cost == 0


def _uniform_nonzero(rng: np.random.Generator, n: int, dtype) -> np.ndarray:
    x = rng.uniform(-1.0, 1.0, n)
    bad = (x == 0.0) | (x == -1.0)
    while bad.any():
        x[bad] = rng.uniform(-1.0, 1.0, int(bad.sum()))
        bad = (x == 0.0) | (x == -1.0)
    return x.astype(dtype)


def init_state(n: int, seed: int, dtype="float64") -> RelaxationState:
    """Fresh state: ``x`` i.i.d. Uniform(-1, 1) with exact zeros redrawn, zero Adam moments."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    dtype = np.dtype(dtype)
    rng = np.random.default_rng(seed)
    x = _uniform_nonzero(rng, n, dtype)
    return RelaxationState(x, np.zeros(n, dtype), np.zeros(n, dtype), 0, seed, rng)


def _adam_update(state: RelaxationState, grad: np.ndarray, cfg: SolveConfig) -> None:
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    t = state.step + 1
    m, v = state.adam_m, state.adam_v
    m *= b1
    m += (1.0 - b1) * grad
    v *= b2
    v += (1.0 - b2) * (grad * grad)
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    state.x -= (cfg.learning_rate / bc1) * m / (np.sqrt(v / bc2) + cfg.adam_eps)
    state.step = t


def adam_step(state: RelaxationState, grad, cfg: SolveConfig) -> RelaxationState:
    """One bias-corrected Adam update of ``state.x`` (in place); returns ``state``."""
    grad = np.asarray(grad, dtype=state.x.dtype)
    if grad.shape != state.x.shape:
        raise ValueError(f"grad must have shape {state.x.shape}, got {grad.shape}")
    if not np.all(np.isfinite(grad)):
        raise NonFiniteStateError("gradient contains non-finite values")
    _adam_update(state, grad, cfg)
    return state


def _restart(state: RelaxationState) -> None:
    state.x[:] = _uniform_nonzero(state.rng, state.x.shape[0], state.x.dtype)
    state.adam_m[:] = 0
    state.adam_v[:] = 0
    state.step = 0


def solve(
    cf: CompiledFormula,
    W: Optional[IncidenceMatrix] = None,
    cfg: Optional[SolveConfig] = None,
    on_improve: Optional[ImproveCallback] = None,
    stop_event=None,
) -> SolveReport:
    """Run the anytime loop on ``cf`` and return the best assignment found.

    ``on_improve(elapsed, cost, assignment)`` fires on every strict improvement;
    ``cost`` includes ``cf.base_cost``. ``stop_event`` is polled periodically
    and halts the run when set (used by the portfolio).
    """
    cfg = cfg or SolveConfig()
    dtype = np.dtype(cfg.dtype)
    if W is None:
        W = build_incidence(cf, dtype)
    elif W.by_clause.dtype != dtype:
        W = W.astype(dtype)
    if W.n != cf.num_vars or W.m != cf.num_active:
        raise ValueError("incidence matrix does not match the compiled formula")

    start = time.perf_counter()
    state = init_state(cf.num_vars, cfg.seed, dtype)
    Wc, Wv, s = W.by_clause, W.by_var, W.s.astype(dtype)
    keep = ~W.free_vars
    base = cf.base_cost
    target = cfg.target_cost
    deadline = cfg.time_limit
    max_iters = cfg.max_iters
    restart_after = cfg.restart_after

    best_cost = None
    best_bits = np.zeros(cf.num_vars, dtype=bool)
    trace: list[TraceEntry] = []
    it = 0
    last_improve = 0
    termination = Termination.TIME_LIMIT

    while True:
        x = state.x
        t = np.tanh(x)
        f = Wc @ t
        bits = x > 0
        mask = (Wc @ np.where(bits, dtype.type(1), dtype.type(-1))) == s
        k = int(np.count_nonzero(mask))
        cost = base + k
        it += 1

        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_bits = bits & keep
            last_improve = it
            elapsed = time.perf_counter() - start
            trace.append(TraceEntry(elapsed, it - 1, cost))
            if on_improve is not None:
                on_improve(elapsed, cost, best_bits.copy())

        if k == 0:
            termination = Termination.ZERO_LOSS
            break
        if target is not None and best_cost <= target:
            termination = Termination.TARGET_REACHED
            break

        fu = f * mask
        loss = float(fu @ fu)
        grad = (Wv @ fu) * ((2.0 / k) * (1.0 - t * t))
        if not (np.isfinite(loss) and np.isfinite(grad.sum())):
            raise NonFiniteStateError(f"non-finite loss or gradient at iteration {it}")
        _adam_update(state, grad, cfg)

        if restart_after is not None and it - last_improve >= restart_after:
            _restart(state)
            last_improve = it

        if max_iters is not None and it >= max_iters:
            termination = Termination.ITER_CAP
            break
        if time.perf_counter() - start >= deadline:
            termination = Termination.TIME_LIMIT
            break
        if stop_event is not None and it % 64 == 0 and stop_event.is_set():
            termination = Termination.STOPPED
            break

    return SolveReport(
        best_cost=best_cost,
        best_assignment=best_bits,
        trace=trace,
        iterations=it,
        termination=termination,
        seed=cfg.seed,
        elapsed=time.perf_counter() - start,
    )


def _portfolio_worker(cf, W, cfg, out_q, stop_event):
    def report_improvement(elapsed, cost, bits):
        out_q.put(("improve", cfg.seed, cost, bits))

    try:
        rep = solve(cf, W, cfg, report_improvement, stop_event)
    except Exception as exc:  # surfaced in the parent
        out_q.put(("error", cfg.seed, repr(exc), None))
        return
    out_q.put(("done", cfg.seed, rep, None))


_FINISHED = (Termination.ZERO_LOSS, Termination.TARGET_REACHED)


def portfolio_solve(
    cf: CompiledFormula,
    W: Optional[IncidenceMatrix] = None,
    cfg: Optional[SolveConfig] = None,
    worker_count: int = 1,
    on_improve: Optional[ImproveCallback] = None,
) -> SolveReport:
    """Run ``worker_count`` independent searches with seeds ``seed, seed+1, ...``.

    Improvements from all workers are merged by this process into one
    strictly decreasing stream; the report holds the global best. Workers are
    stopped as soon as one of them proves it cannot be beaten (zero loss or
    target cost).
    """
    cfg = cfg or SolveConfig()
    if worker_count < 1:
        raise ValueError(f"worker_count must be >= 1, got {worker_count}")
    if worker_count == 1:
        return solve(cf, W, cfg, on_improve)

    ctx = mp.get_context()
    out_q = ctx.Queue()
    stop_event = ctx.Event()
    procs = []
    for w in range(worker_count):
        wcfg = SolveConfig(**{**cfg.__dict__, "seed": cfg.seed + w})
        p = ctx.Process(target=_portfolio_worker, args=(cf, W, wcfg, out_q, stop_event), daemon=True)
        procs.append(p)

    start = time.perf_counter()
    for p in procs:
        p.start()

    best_cost, best_bits, best_seed = None, None, cfg.seed
    stream: list[tuple[float, int, int]] = []  # (elapsed, seed, cost)
    reports: dict[int, SolveReport] = {}
    errors = []
    pending = worker_count
    try:
        while pending:
            try:
                kind, seed, payload, bits = out_q.get(timeout=1.0)
            except queue_mod.Empty:
                if not any(p.is_alive() for p in procs) and out_q.empty():
                    errors.append("portfolio worker exited without reporting")
                    break
                continue
            if kind == "improve":
                if best_cost is None or payload < best_cost:
                    best_cost, best_bits, best_seed = payload, bits, seed
                    elapsed = time.perf_counter() - start
                    stream.append((elapsed, seed, payload))
                    if on_improve is not None:
                        on_improve(elapsed, payload, bits.copy())
            elif kind == "done":
                pending -= 1
                reports[seed] = payload
                if payload.termination in _FINISHED:
                    stop_event.set()
            else:
                pending -= 1
                errors.append(f"seed {seed}: {payload}")
                stop_event.set()
    finally:
        stop_event.set()
        for p in procs:
            p.join(timeout=5.0)
            if p.is_alive():
                p.terminate()

    if errors:
        raise RuntimeError("; ".join(errors))

    winner = reports[best_seed]
    finished = [r for r in reports.values() if r.termination in _FINISHED]
    termination = finished[0].termination if finished else winner.termination
    merged = []
    for elapsed, seed, cost in stream:
        its = [e.iteration for e in reports[seed].trace if e.cost == cost]
        merged.append(TraceEntry(elapsed, its[0] if its else -1, cost))
    return SolveReport(
        best_cost=best_cost,
        best_assignment=best_bits,
        trace=merged,
        iterations=sum(r.iterations for r in reports.values()),
        termination=termination,
        seed=best_seed,
        elapsed=time.perf_counter() - start,
    )

