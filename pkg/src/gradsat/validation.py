"""Input coercion and checks shared by the estimator, the CLI and the core modules."""

from __future__ import annotations

import numbers
import os
from pathlib import Path

import numpy as np


def check_assignment(a, n: int) -> np.ndarray:
    """Coerce ``a`` to a length-``n`` boolean vector.

    Accepts booleans, 0/1 values, or a full set of signed DIMACS literals.
    """
    arr = np.asarray(a)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.dtype == bool:
        bits = arr
    elif arr.size and np.issubdtype(arr.dtype, np.integer) and (arr.min() < 0 or arr.max() > 1):
        bits = literals_to_bits(arr.tolist(), n)
    else:
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("assignment values must be booleans, 0/1, or signed literals")
        bits = arr.astype(bool)
    if bits.shape[0] != n:
        raise ValueError(f"assignment has {bits.shape[0]} values, formula has {n} variables")
    return bits


def literals_to_bits(lits, n: int) -> np.ndarray:
    """Signed literals (one per variable, any order) to a boolean vector."""
    bits = np.zeros(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            continue
        v = abs(lit)
        if v > n:
            raise ValueError(f"literal {lit} exceeds variable count {n}")
        if seen[v - 1] and bits[v - 1] != (lit > 0):
            raise ValueError(f"variable {v} assigned both polarities")
        seen[v - 1] = True
        bits[v - 1] = lit > 0
    if not seen.all():
        missing = np.flatnonzero(~seen)[:5] + 1
        raise ValueError(f"assignment leaves variables unassigned, e.g. {missing.tolist()}")
    return bits


def bits_to_literals(bits) -> list[int]:
    return [i + 1 if b else -(i + 1) for i, b in enumerate(np.asarray(bits, dtype=bool).tolist())]


def check_relaxed(x, n: int, dtype=np.float64) -> np.ndarray:
    x = np.asarray(x, dtype=dtype)
    if x.shape != (n,):
        raise ValueError(f"expected a vector of shape ({n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains NaN or infinity")
    return x


def check_formula(X):
    """Coerce ``X`` to a :class:`~gradsat.formula.Formula`.

    Accepts a Formula, a CompiledFormula, a path to a DIMACS file, DIMACS
    text, or a sequence of clauses (integer literal lists).
    """
    from .formula import CompiledFormula, Formula, parse_dimacs, read_dimacs

    if isinstance(X, Formula):
        return X
    if isinstance(X, CompiledFormula):
        return X.source
    if isinstance(X, (str, os.PathLike)):
        text = str(X)
        if "\n" in text or text.lstrip().startswith(("p ", "c")):
            return parse_dimacs(text)
        if Path(text).exists():
            return read_dimacs(text)
        raise ValueError(f"not a DIMACS file or DIMACS text: {text[:40]!r}")
    try:
        clauses = [list(c) for c in X]
    except TypeError:
        raise TypeError(f"cannot interpret {type(X).__name__} as a CNF formula") from None
    for c in clauses:
        if not all(isinstance(l, numbers.Integral) for l in c):
            raise TypeError("clauses must contain integer literals")
    return Formula.from_clauses(clauses)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
