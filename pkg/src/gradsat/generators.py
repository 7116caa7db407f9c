"""Unsatisfiable CNF families from proof complexity: PHP, GT, PAR and CB.

Every generator is a pure function of its size index ``k >= 1``, with fixed
variable numbering and clause order so instances are byte-reproducible.
"""

from __future__ import annotations

from enum import Enum
from itertools import combinations, permutations
from math import comb

from .formula import Formula


class Family(str, Enum):
    PHP = "PHP"
    GT = "GT"
    PAR = "PAR"
    CB = "CB"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValueError(f"unknown family {name!r}; expected one of php, gt, par, cb") from None


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise ValueError(f"size index k must be an integer >= 1, got {k!r}")
    return int(k)


def php(k: int) -> Formula:
    """Pigeonhole: ``k + 1`` pigeons, ``k`` holes; ``v(i, j) = (i-1)*k + j``."""
    k = _check_k(k)
    pigeons, holes = k + 1, k

    def v(i, j):
        return (i - 1) * holes + j

    clauses = [tuple(v(i, j) for j in range(1, holes + 1)) for i in range(1, pigeons + 1)]
    for j in range(1, holes + 1):
        clauses += combinations([-v(i, j) for i in range(1, pigeons + 1)], 2)
    return Formula._trusted(pigeons * holes, tuple(clauses))


def gt(k: int) -> Formula:
    """Ordering principle on ``k + 1`` elements: a strict total order with no minimum.

    Variable ``o(i, j)`` for ordered pairs ``i != j``, numbered row-major with
    the diagonal skipped.
    """
    k = _check_k(k)
    n = k + 1

    def o(i, j):
        return (i - 1) * (n - 1) + (j if j < i else j - 1)

    ids = [[o(i, j) if i != j else 0 for j in range(n + 1)] for i in range(n + 1)]
    clauses = [
        (-ids[i][j], -ids[j][l], ids[i][l]) for i, j, l in permutations(range(1, n + 1), 3)
    ]
    clauses += [(-ids[i][j], -ids[j][i]) for i, j in combinations(range(1, n + 1), 2)]
    clauses += [tuple(ids[i][j] for i in range(1, n + 1) if i != j) for j in range(1, n + 1)]
    return Formula._trusted(n * (n - 1), tuple(clauses))


def par(k: int) -> Formula:
    """Parity principle: no perfect matching on ``2k + 1`` elements.

    Variable ``p(i, j)`` for unordered pairs ``i < j`` in lexicographic order.
    """
    k = _check_k(k)
    n = 2 * k + 1
    ids = [[0] * (n + 1) for _ in range(n + 1)]
    for idx, (a, b) in enumerate(combinations(range(1, n + 1), 2), 1):
        ids[a][b] = ids[b][a] = idx

    clauses = [tuple(ids[i][j] for j in range(1, n + 1) if j != i) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        row = ids[i]
        others = [-row[j] for j in range(1, n + 1) if j != i]
        clauses += combinations(others, 2)
    return Formula._trusted(comb(n, 2), tuple(clauses))


def _cb_dominoes(k: int):
    side = 2 * k + 2
    removed = {(1, 1), (side, side)}
    cells = [(r, c) for r in range(1, side + 1) for c in range(1, side + 1) if (r, c) not in removed]
    present = set(cells)
    dominoes = {}
    for r, c in cells:
        for nb in ((r, c + 1), (r + 1, c)):  # right, then down
            if nb in present:
                dominoes[((r, c), nb)] = len(dominoes) + 1
    covering = {cell: [] for cell in cells}
    for (a, b), var in dominoes.items():
        covering[a].append(var)
        covering[b].append(var)
    for cell in cells:
        covering[cell].sort()
    return side, cells, dominoes, covering


def cb(k: int, exhaustive: bool = True) -> Formula:
    """Mutilated chessboard: a ``(2k+2)``-square board minus two opposite corners.

    One variable per domino placement, numbered by (cell row-major, right
    before down). The exhaustive encoding has an at-least-one clause per cell
    and pairwise at-most-one clauses per cell. With ``exhaustive=False`` only
    half is kept: at-most-one on cells of the removed corners' colour and
    at-least-one on the others, which is still unsatisfiable and matches the
    clause counts of the widely used benchmark tables.
    """
    k = _check_k(k)
    side, cells, dominoes, covering = _cb_dominoes(k)
    clauses = []
    if exhaustive:
        clauses.extend(tuple(covering[cell]) for cell in cells)
        for cell in cells:
            clauses += combinations([-v for v in covering[cell]], 2)
    else:
        for r, c in cells:
            lits = covering[(r, c)]
            if (r - c) % 2 == 0:  # same colour as the removed corners
                clauses += combinations([-v for v in lits], 2)
            else:
                clauses.append(tuple(lits))
    return Formula._trusted(len(dominoes), tuple(clauses))


GENERATORS = {Family.PHP: php, Family.GT: gt, Family.PAR: par, Family.CB: cb}


def generate(family, k: int) -> Formula:
    return GENERATORS[Family.parse(family)](k)


def suite(family, count: int = 50) -> list[Formula]:
    """Instances ``k = 1..count`` of one family, in ascending order."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    gen = GENERATORS[Family.parse(family)]
    return [gen(k) for k in range(1, count + 1)]


def expected_size(family, k: int, exhaustive: bool = True) -> tuple[int, int]:
    """Closed-form ``(num_vars, num_clauses)`` of ``generate(family, k)``."""
    family = Family.parse(family)
    k = _check_k(k)
    if family is Family.PHP:
        return k * (k + 1), (k + 1) + k * comb(k + 1, 2)
    if family is Family.GT:
        n = k + 1
        return n * (n - 1), n * (n - 1) * (n - 2) + comb(n, 2) + n
    if family is Family.PAR:
        n = 2 * k + 1
        return comb(n, 2), n * (1 + comb(n - 1, 2))
    num_vars = 8 * k * k + 12 * k
    if not exhaustive:
        return num_vars, 14 * k * k + 16 * k + 2
    # (4k^2+8k+2) cells plus sum of C(deg, 2) over the mutilated grid
    return num_vars, 28 * k * k + 32 * k - 4
