from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfsched.errors import InvalidInputError, NotSolvableError
from cfsched.linalg import DecodingMatrix, find_completing_unit, rank_int, rank_mod2, solve_exact


def _rank_fraction(M):
    """Independent oracle: Gaussian elimination over exact rationals."""
    A = [[Fraction(int(x)) for x in row] for row in M]
    r = 0
    cols = len(A[0]) if A else 0
    for c in range(cols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, len(A)):
            f = A[i][c] / A[r][c]
            A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    return r


def test_rank_examples():
    assert rank_int([[1, 1], [1, -1]]) == 2
    assert rank_mod2([[1, 1], [1, -1]]) == 1
    assert rank_int(np.eye(4, dtype=int)) == 4
    assert rank_int(np.zeros((3, 3), dtype=int)) == 0
    with pytest.raises(InvalidInputError):
        rank_int([[0.5, 1.0]])


matrices = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=1, max_size=7)
)


@given(matrices)
def test_rank_int_matches_rational_oracle(M):
    assert rank_int(M) == _rank_fraction(M)


@given(matrices)
def test_mod2_never_exceeds_rational_rank(M):
    assert rank_mod2(M) <= rank_int(M)


def test_rank_escalates_to_big_integers():
    M = np.array([[3**39, 1], [3**39 + 1, 1]], dtype=np.int64)
    assert rank_int(M) == 2
    M2 = np.array([[2**40, 2**41], [2**41, 2**42]], dtype=np.int64)
    assert rank_int(M2) == 1


@given(matrices, st.randoms())
def test_incremental_rank_matches_batch(M, rnd):
    D = DecodingMatrix(len(M[0]))
    for j, row in enumerate(M):
        D.add_row_if_independent(row)
        assert D.rank == rank_int(M[: j + 1])
    # order and sign of rows do not matter
    perm = list(M)
    rnd.shuffle(perm)
    perm = [[-x for x in r] if rnd.random() < 0.5 else r for r in perm]
    assert rank_int(perm) == rank_int(M) == DecodingMatrix(len(M[0]), perm).rank


def test_completing_unit():
    D = DecodingMatrix(2, [[1, 1]])
    assert find_completing_unit(D) == 0
    D = DecodingMatrix(3, [[1, 0, 0], [0, 1, 1]])
    assert D.find_completing_unit() == 1
    D.add_row_if_independent([0, 1, 0])
    with pytest.raises(InvalidInputError):
        D.find_completing_unit()


def test_completing_unit_is_lowest_independent(rng):
    for _ in range(30):
        L = 8
        D = DecodingMatrix(L)
        while D.rank < L - 1:
            v = np.zeros(L, dtype=int)
            idx = rng.choice(L, 3, replace=False)
            v[idx] = rng.choice([-1, 1], 3)
            D.add_row_if_independent(v)
        i = D.find_completing_unit()
        M = D.matrix()
        for j in range(L):
            e = np.zeros((1, L), dtype=int)
            e[0, j] = 1
            grows = rank_int(np.vstack([M, e])) > D.rank
            if j < i:
                assert not grows
            if j == i:
                assert grows


def test_solve_exact():
    D = DecodingMatrix(2, [[1, 1], [1, -1]])
    sol = solve_exact(D, ["y1", "y2"])
    assert sol[0] == {"y1": Fraction(1, 2), "y2": Fraction(1, 2)}
    assert sol[1] == {"y1": Fraction(1, 2), "y2": Fraction(-1, 2)}
    with pytest.raises(NotSolvableError):
        solve_exact(DecodingMatrix(2, [[1, 1], [2, 2]]), ["a", "b"])


def test_solve_exact_recovers_messages(rng):
    L = 12
    D = DecodingMatrix(L)
    while D.rank < L:
        v = np.zeros(L, dtype=int)
        idx = rng.choice(L, 4, replace=False)
        v[idx] = rng.choice([-1, 1, 2], 4)
        D.add_row_if_independent(v)
    x = rng.integers(-50, 50, L)
    y = {f"y{j}": int(D.rows[j] @ x) for j in range(len(D.rows))}
    sol = solve_exact(D, list(y))
    for u in range(L):
        assert sum(c * y[name] for name, c in sol[u].items()) == x[u]


def test_copy_is_independent():
    D = DecodingMatrix(3, [[1, 1, 0]])
    C = D.copy()
    C.add_row_if_independent([0, 0, 1])
    assert D.rank == 1 and C.rank == 2
