import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradsat.formula import (
    DimacsError,
    Formula,
    WeightedInputError,
    evaluate,
    falsified_clauses,
    parse_dimacs,
    preprocess,
    read_dimacs,
    save_dimacs,
    write_dimacs,
)
from gradsat.generators import php

from conftest import EXAMPLE_TEXT


def test_parse_example(example):
    f = parse_dimacs(EXAMPLE_TEXT)
    assert f == example
    assert f.clauses == ((-1,), (-2,), (1, 2))


def test_parse_empty():
    f = parse_dimacs("p cnf 0 0\n")
    assert f.num_vars == 0 and f.num_clauses == 0


def test_parse_comments_and_multiline_clauses():
    f = parse_dimacs("c hello\nc world\np cnf 3 2\n1 -2\n 3 0 -1\n0\n")
    assert f.clauses == ((1, -2, 3), (-1,))
    assert f.comments == ("hello", "world")


def test_parse_accepts_stream_and_lines():
    assert parse_dimacs(io.StringIO(EXAMPLE_TEXT)).num_clauses == 3
    assert parse_dimacs(EXAMPLE_TEXT.splitlines()).num_clauses == 3


def test_weighted_input_rejected():
    with pytest.raises(WeightedInputError, match="weighted input unsupported"):
        parse_dimacs("p wcnf 2 3 4\n4 -1 0\n1 -2 0\n1 1 2 0\n")


@pytest.mark.parametrize(
    "text",
    [
        "p cnf 2\n1 0\n",
        "p cnf 2 1\n1 3 0\n",
        "p cnf 2 1\n1 2\n",
        "p cnf 2 1\np cnf 2 1\n1 0\n",
        "1 2 0\n",
        "p cnf 2 1\n1 x 0\n",
    ],
)
def test_malformed_input(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_count_mismatch_is_only_a_warning(caplog):
    f = parse_dimacs("p cnf 2 5\n1 0\n-2 0\n")
    assert f.num_clauses == 2
    assert any("clause" in r.message for r in caplog.records)


def test_write_example(example):
    assert write_dimacs(example) == EXAMPLE_TEXT
    assert write_dimacs(Formula(0, ())) == "p cnf 0 0\n"


def test_round_trip_php3(tmp_path):
    f = php(3)
    assert parse_dimacs(write_dimacs(f)) == f
    save_dimacs(f, tmp_path / "p.cnf", ["generated"])
    assert read_dimacs(tmp_path / "p.cnf") == f


clause_lists = st.integers(1, 8).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])), max_size=6),
            max_size=12,
        ),
    )
)


@settings(max_examples=150, deadline=None)
@given(clause_lists)
def test_round_trip_property(data):
    n, clauses = data
    # the empty clause has no DIMACS spelling distinct from a bare terminator
    clauses = [c for c in clauses if c]
    f = Formula(n, tuple(tuple(c) for c in clauses))
    assert parse_dimacs(write_dimacs(f)) == f


def test_formula_validation():
    with pytest.raises(ValueError):
        Formula(2, ((1, 0),))
    with pytest.raises(ValueError):
        Formula(1, ((2,),))
    with pytest.raises(ValueError):
        Formula(-1, ())
    assert Formula.from_clauses([[1, -3]]).num_vars == 3


def test_preprocess_examples():
    cf = preprocess(Formula(2, ((1, 1, 2),)))
    assert cf.active_clauses == ((1, 2),)
    cf = preprocess(Formula(1, ((1, -1),)))
    assert cf.active_clauses == () and cf.tautology_count == 1
    cf = preprocess(Formula(1, ((), (1,))))
    assert cf.active_clauses == ((1,),) and cf.base_cost == 1
    assert cf.source_index == (1,)


@settings(max_examples=200, deadline=None)
@given(clause_lists, st.integers(0, 2**32 - 1))
def test_preprocess_soundness(data, seed):
    n, clauses = data
    rng = np.random.default_rng(seed)
    clauses = list(clauses) + [[]] * int(rng.integers(0, 3))
    if clauses:
        clauses.append(list(clauses[0]))  # an injected duplicate
    clauses.append([1, -1])
    f = Formula(n, tuple(tuple(c) for c in clauses))
    cf = preprocess(f)
    assert len(cf.active_clauses) + cf.tautology_count + cf.base_cost == f.num_clauses
    for c in cf.active_clauses:
        assert len({abs(l) for l in c}) == len(c)
    for _ in range(4):
        a = rng.random(n) < 0.5
        active = Formula(n, cf.active_clauses)
        assert evaluate(f, a) == cf.base_cost + evaluate(active, a)


def test_evaluate_examples(example):
    assert evaluate(example, [True, True]) == 2
    assert evaluate(example, [False, True]) == 1
    assert evaluate(Formula(0, ()), []) == 0
    assert falsified_clauses(example, [True, True]) == [0, 1]


def test_evaluate_length_mismatch(example):
    with pytest.raises(ValueError):
        evaluate(example, [True])
