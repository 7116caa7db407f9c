"""CNF formulas: the data model, DIMACS reading/writing and clause normalization."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from itertools import chain
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class DimacsError(ValueError):
    """Raised for malformed DIMACS input."""


class WeightedInputError(DimacsError):
    """Raised when a weighted (``p wcnf``) file is given to an unweighted solver."""

    def __init__(self, msg: str = "weighted input unsupported: only unweighted CNF MaxSAT is handled"):
        super().__init__(msg)


@dataclass(frozen=True)
class Formula:
    """A CNF formula over variables ``1..num_vars``.

    Clauses are tuples of nonzero signed integers. Clause order and literal
    order are kept exactly as given, so clause index ``j`` is stable.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    comments: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError(f"num_vars must be nonnegative, got {self.num_vars}")
        clauses = tuple(c if type(c) is tuple else tuple(map(int, c)) for c in self.clauses)
        lits = list(chain.from_iterable(clauses))
        if lits and (0 in lits or max(lits) > self.num_vars or min(lits) < -self.num_vars):
            for j, clause in enumerate(clauses):
                for lit in clause:
                    if lit == 0:
                        raise ValueError(f"clause {j} contains literal 0")
                    if abs(lit) > self.num_vars:
                        raise ValueError(
                            f"clause {j}: literal {lit} exceeds variable count {self.num_vars}"
                        )
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "comments", tuple(self.comments))

    @classmethod
    def _trusted(cls, num_vars: int, clauses: tuple) -> "Formula":
        """Build without validation; for generators whose output is valid by construction."""
        f = object.__new__(cls)
        object.__setattr__(f, "num_vars", num_vars)
        object.__setattr__(f, "clauses", clauses)
        object.__setattr__(f, "comments", ())
        return f

    @classmethod
    def from_clauses(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "Formula":
        clauses = [tuple(c) for c in clauses]
        if num_vars is None:
            num_vars = max((abs(lit) for c in clauses for lit in c), default=0)
        return cls(num_vars, tuple(clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __repr__(self):
        return f"Formula(num_vars={self.num_vars}, num_clauses={self.num_clauses})"


@dataclass(frozen=True)
class CompiledFormula:
    """A formula with pathological clauses normalized away.

    ``active_clauses[j]`` came from ``source.clauses[source_index[j]]``.
    Tautologies are always satisfied and dropped; empty clauses are always
    falsified and folded into ``base_cost``.
    """

    source: Formula
    active_clauses: tuple[tuple[int, ...], ...]
    source_index: tuple[int, ...]
    base_cost: int
    tautology_count: int

    @property
    def num_vars(self) -> int:
        return self.source.num_vars

    @property
    def num_active(self) -> int:
        return len(self.active_clauses)


def parse_dimacs(text: str | io.TextIOBase | Iterable[str]) -> Formula:
    """Parse DIMACS CNF from a string, an open text stream or an iterable of lines.

    A clause-count mismatch with the header is logged as a warning. Weighted
    (``p wcnf``) input raises :class:`WeightedInputError`.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = text

    num_vars = None
    declared = None
    comments: list[str] = []
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []

    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("%"):
            # SATLIB end-of-file marker
            break
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            toks = line.split()
            if len(toks) >= 2 and toks[1].lower() == "wcnf":
                raise WeightedInputError()
            if len(toks) != 4 or toks[1].lower() != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, declared = int(toks[2]), int(toks[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if num_vars < 0 or declared < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause data before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > num_vars:
                raise DimacsError(
                    f"line {lineno}: literal {lit} exceeds declared variable count {num_vars}"
                )
            else:
                current.append(lit)

    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("unterminated final clause (missing trailing 0)")
    if declared != len(clauses):
        logger.warning("header declares %d clauses but %d were read", declared, len(clauses))
    return Formula(num_vars, tuple(clauses), tuple(comments))


def read_dimacs(path: str | Path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh)


def write_dimacs(f: Formula, comments: Sequence[str] = ()) -> str:
    """Serialize ``f`` as canonical DIMACS; ``comments`` become leading ``c`` lines."""
    out = [f"c {c}" if c else "c" for c in comments]
    out.append(f"p cnf {f.num_vars} {f.num_clauses}")
    for clause in f.clauses:
        out.append(" ".join(map(str, clause + (0,))))
    return "\n".join(out) + "\n"


def save_dimacs(f: Formula, path: str | Path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(write_dimacs(f, comments), encoding="utf-8")


def preprocess(f: Formula) -> CompiledFormula:
    active, index = [], []
    base_cost = tautologies = 0
    for j, clause in enumerate(f.clauses):
        if not clause:
            base_cost += 1
            continue
        lits = tuple(dict.fromkeys(clause))
        seen = set(lits)
        if any(-lit in seen for lit in lits):
            tautologies += 1
            continue
        active.append(lits)
        index.append(j)
    return CompiledFormula(f, tuple(active), tuple(index), base_cost, tautologies)


def _check_assignment(f: Formula, a) -> np.ndarray:
    bits = np.asarray(a, dtype=bool).reshape(-1)
    if bits.shape[0] != f.num_vars:
        raise ValueError(f"assignment has {bits.shape[0]} values, formula has {f.num_vars} variables")
    return bits


def evaluate(f: Formula, a) -> int:
    """Number of clauses of ``f`` falsified by the Boolean assignment ``a``.

    ``a[i]`` is the value of variable ``i + 1``.
    """
    bits = _check_assignment(f, a).tolist()
    cost = 0
    for clause in f.clauses:
        for lit in clause:
            if bits[abs(lit) - 1] == (lit > 0):
                break
        else:
            cost += 1
    return cost


def falsified_clauses(f: Formula, a) -> list[int]:
    """Indices of clauses falsified by ``a`` (semantic clause evaluation)."""
    bits = _check_assignment(f, a).tolist()
    return [
        j
        for j, clause in enumerate(f.clauses)
        if not any(bits[abs(lit) - 1] == (lit > 0) for lit in clause)
    ]
