"""Exhaustive MaxSAT: the exact reference every approximate result is checked against."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formula import Formula, evaluate

DEFAULT_VAR_CAP = 26


class OracleRefusal(ValueError):
    """The formula has more variables than the enumeration cap allows."""


@dataclass(frozen=True)
class OracleResult:
    optimal_cost: int
    witness: np.ndarray
    enumerated: int


def _bits_of(index: int, n: int) -> np.ndarray:
    return np.array([(index >> i) & 1 for i in range(n)], dtype=bool)


def _clause_masks(f: Formula):
    """Per clause, bitmasks of the variables appearing positively / negatively."""
    pos = np.zeros(f.num_clauses, dtype=np.int64)
    neg = np.zeros(f.num_clauses, dtype=np.int64)
    for j, clause in enumerate(f.clauses):
        for lit in clause:
            if lit > 0:
                pos[j] |= 1 << (lit - 1)
            else:
                neg[j] |= 1 << (-lit - 1)
    return pos, neg


def _binary(f: Formula, chunk: int) -> tuple[int, int]:
    n = f.num_vars
    pos, neg = _clause_masks(f)
    total = 1 << n
    best_cost, best_idx = f.num_clauses + 1, 0
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        cost = np.zeros(idx.shape[0], dtype=np.int32)
        for p, q in zip(pos.tolist(), neg.tolist()):
            # satisfied iff some positive var is set or some negative var is clear
            sat = (idx & p) != 0
            if q:
                sat |= (~idx & q) != 0
            cost += ~sat
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            best_cost, best_idx = int(cost[i]), lo + i
    return best_cost, best_idx


def _gray(f: Formula) -> tuple[int, int]:
    n = f.num_vars
    occurs: list[list[tuple[int, bool]]] = [[] for _ in range(n)]
    for j, clause in enumerate(f.clauses):
        for lit in clause:
            occurs[abs(lit) - 1].append((j, lit > 0))
    # all variables false: only negative literals are true
    true_count = [sum(1 for lit in c if lit < 0) for c in f.clauses]
    cost = sum(1 for c in true_count if c == 0)
    best_cost, best_code = cost, 0
    code = 0
    for step in range(1, 1 << n):
        i = (step & -step).bit_length() - 1
        code ^= 1 << i
        now_true = (code >> i) & 1 == 1
        for j, positive in occurs[i]:
            if positive == now_true:
                if true_count[j] == 0:
                    cost -= 1
                true_count[j] += 1
            else:
                true_count[j] -= 1
                if true_count[j] == 0:
                    cost += 1
        if cost < best_cost:
            best_cost, best_code = cost, code
    return best_cost, best_code


def brute_force(f: Formula, var_cap: int = DEFAULT_VAR_CAP, method: str = "binary",
                chunk: int = 1 << 16) -> OracleResult:
    """Minimum cost over all ``2**num_vars`` assignments.

    ``method="binary"`` enumerates assignment indices in increasing order
    (bit ``i`` is variable ``i + 1``), vectorized in chunks; ``method="gray"``
    walks the reflected Gray code and updates clause states incrementally.
    The witness is the first optimum in the chosen enumeration order.
    """
    n = f.num_vars
    if n > var_cap:
        raise OracleRefusal(f"refusing to enumerate 2^{n} assignments (cap is {var_cap} variables)")
    if n > 62:
        raise OracleRefusal("more than 62 variables cannot be enumerated")
    if method == "binary":
        cost, index = _binary(f, chunk)
    elif method == "gray":
        cost, index = _gray(f)
    else:
        raise ValueError(f"unknown method {method!r}")
    witness = _bits_of(index, n)
    assert evaluate(f, witness) == cost
    return OracleResult(cost, witness, 1 << n)


def verify(f: Formula, a, claimed: int) -> bool:
    """True iff ``a`` falsifies exactly ``claimed`` clauses of ``f``."""
    return evaluate(f, a) == claimed
