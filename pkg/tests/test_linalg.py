from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gptcone.linalg import (
    canonical_ray,
    identity,
    independent_subset,
    inverse,
    matmul,
    matvec,
    nullspace,
    primitive,
    rank,
    rat,
    solve,
    vec,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def square_matrices(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_rat_rejects_floats():
    with pytest.raises(TypeError):
        rat(0.5)
    assert rat("3/4") == Fraction(3, 4)
    assert vec([1, "1/2"]) == (Fraction(1), Fraction(1, 2))


def test_primitive_keeps_direction():
    assert primitive([Fraction(-2, 3), Fraction(4, 9)]) == (-3, 2)
    assert canonical_ray([0, -6, 3]) == (0, -2, 1)


@given(square_matrices(3))
def test_inverse_round_trip(m):
    if rank(m) < 3:
        with pytest.raises(ZeroDivisionError):
            inverse(m)
        return
    assert matmul(m, inverse(m)) == identity(3)


@given(square_matrices(3), st.lists(small, min_size=3, max_size=3))
def test_solve_residual_is_zero(m, b):
    if rank(m) < 3:
        return
    x = solve(m, b)
    assert matvec(m, x) == tuple(b)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_nullity(rows):
    ns = nullspace(rows, 4)
    assert rank(rows) + len(ns) == 4
    for v in ns:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


def test_independent_subset_is_greedy():
    vs = [(1, 0, 0), (2, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 5)]
    assert independent_subset(vs) == [0, 2, 4]
