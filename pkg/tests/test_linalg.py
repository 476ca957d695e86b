import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from wpva.coeffs import K, ONE
from wpva.linalg import Echelon, inverse_dense, nullspace, rank, solve

entries = st.integers(-3, 3).map(Fraction)


@given(st.lists(st.lists(entries, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_and_nullspace_match_sympy(mat):
    rows = [{j: v for j, v in enumerate(r) if v} for r in mat]
    m = sympy.Matrix(mat)
    assert rank(rows) == m.rank()
    kern, _ = nullspace(rows, 4)
    assert len(kern) == 4 - m.rank()
    for v in kern:
        for r in rows:
            assert sum(r.get(j, 0) * v.get(j, 0) for j in range(4)) == 0


def test_nullspace_over_qk():
    rows = [{0: K, 1: ONE}, {1: K - 1, 2: ONE}]
    kern, ech = nullspace(rows, 3, ONE)
    assert len(kern) == 1
    v = kern[0]
    for r in rows:
        assert sum((r.get(j, 0) * v.get(j, 0) for j in range(3)), start=0 * K) == 0


def test_solve_and_inverse():
    rng = random.Random(3)
    for _ in range(20):
        n = 3
        mat = [[Fraction(rng.randint(-4, 4)) for _ in range(n)] for _ in range(n)]
        if sympy.Matrix(mat).det() == 0:
            with pytest.raises(ZeroDivisionError):
                inverse_dense(mat)
            continue
        inv = inverse_dense(mat)
        assert sympy.Matrix(inv) == sympy.Matrix(mat).inv()
        rhs = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
        x = solve([{j: v for j, v in enumerate(r) if v} for r in mat], rhs, n)
        assert [sum(mat[i][j] * x.get(j, 0) for j in range(n)) for i in range(n)] == rhs


def test_echelon_reports_dependence():
    e = Echelon()
    assert e.add({0: Fraction(1), 1: Fraction(2)}) == 0
    assert e.add({0: Fraction(2), 1: Fraction(4)}) is None
    assert e.rank == 1
