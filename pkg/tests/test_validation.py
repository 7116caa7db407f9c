import numpy as np
import pytest

from gradsat.validation import (
    bits_to_literals,
    check_assignment,
    check_formula,
    check_positive_int,
    check_relaxed,
    literals_to_bits,
)


def test_check_assignment_forms():
    assert check_assignment([True, False], 2).tolist() == [True, False]
    assert check_assignment([1, 0], 2).tolist() == [True, False]
    assert check_assignment([-2, 1], 2).tolist() == [True, False]
    with pytest.raises(ValueError):
        check_assignment([0.5, 1], 2)
    with pytest.raises(ValueError):
        check_assignment([True], 2)


def test_literal_conversion():
    assert bits_to_literals([True, False, True]) == [1, -2, 3]
    assert literals_to_bits([3, -2, 1, 0], 3).tolist() == [True, False, True]
    with pytest.raises(ValueError):
        literals_to_bits([1, -1, 2], 2)
    with pytest.raises(ValueError):
        literals_to_bits([1], 2)
    with pytest.raises(ValueError):
        literals_to_bits([3], 2)


def test_check_relaxed():
    assert check_relaxed([1, 2], 2).dtype == np.float64
    with pytest.raises(ValueError):
        check_relaxed([np.inf, 0], 2)
    with pytest.raises(ValueError):
        check_relaxed([1.0], 2)


def test_check_formula_errors(tmp_path):
    with pytest.raises(ValueError):
        check_formula(str(tmp_path / "missing.cnf"))
    with pytest.raises(TypeError):
        check_formula([[1.5]])


def test_check_positive_int():
    assert check_positive_int(3, "n") == 3
    with pytest.raises(ValueError):
        check_positive_int(0, "n")
    with pytest.raises(ValueError):
        check_positive_int(2.0, "n")
