import numpy as np
import pytest

from gradsat.formula import Formula

EXAMPLE_TEXT = "p cnf 2 3\n-1 0\n-2 0\n1 2 0\n"


@pytest.fixture
def example():
    """Two variables, three clauses: (not x1) and (not x2) and (x1 or x2)."""
    return Formula(2, ((-1,), (-2,), (1, 2)))


def random_formula(rng, n_max=12, m_max=40, len_max=5, n_min=1):
    """Random tautology-free CNF with distinct variables in each clause."""
    n = int(rng.integers(n_min, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    clauses = []
    for _ in range(m):
        size = int(rng.integers(1, min(len_max, n) + 1))
        vars_ = rng.choice(n, size=size, replace=False) + 1
        signs = rng.choice([-1, 1], size=size)
        clauses.append(tuple(int(v * s) for v, s in zip(vars_, signs)))
    return Formula(n, tuple(clauses))


# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def report_criterion(cid: str, title: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {cid}: {title} ({detail})"
    ACCEPTANCE[cid] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=int):
        terminalreporter.write_line(ACCEPTANCE[cid])
