import numpy as np
import pytest

from gradsat.formula import Formula, evaluate
from gradsat.generators import cb, gt, par, php
from gradsat.oracle import OracleRefusal, brute_force, verify

from conftest import random_formula


def test_example_optimum(example):
    res = brute_force(example)
    assert res.optimal_cost == 1
    assert res.enumerated == 4
    # index 0 (all false) already falsifies only the last clause
    np.testing.assert_array_equal(res.witness, [False, False])


@pytest.mark.parametrize("method", ["binary", "gray"])
def test_family_optima(method):
    assert brute_force(php(2), method=method).optimal_cost == 1
    assert brute_force(gt(2), method=method).optimal_cost == 1
    assert brute_force(par(1), method=method).optimal_cost == 1


def test_methods_agree_on_random_formulas():
    rng = np.random.default_rng(2)
    for _ in range(60):
        f = random_formula(rng, n_max=10, m_max=30)
        a, b = brute_force(f, method="binary", chunk=64), brute_force(f, method="gray")
        assert a.optimal_cost == b.optimal_cost
        assert evaluate(f, b.witness) == b.optimal_cost


def test_binary_witness_is_first_in_index_order():
    rng = np.random.default_rng(4)
    for _ in range(20):
        f = random_formula(rng, n_max=6, m_max=12)
        res = brute_force(f)
        n = f.num_vars
        costs = [evaluate(f, [(i >> b) & 1 for b in range(n)]) for i in range(1 << n)]
        first = costs.index(min(costs))
        np.testing.assert_array_equal(res.witness, [(first >> b) & 1 for b in range(n)])


def test_refusal():
    with pytest.raises(OracleRefusal):
        brute_force(cb(2))
    with pytest.raises(OracleRefusal):
        brute_force(php(3), var_cap=5)
    with pytest.raises(ValueError):
        brute_force(php(1), method="dfs")


def test_empty_formula():
    res = brute_force(Formula(0, ()))
    assert res.optimal_cost == 0 and res.witness.shape == (0,)


def test_verify(example):
    assert verify(example, [False, True], 1)
    assert not verify(example, [True, True], 1)
    assert verify(Formula(0, ()), [], 0)
    with pytest.raises(ValueError):
        verify(example, [True], 1)
