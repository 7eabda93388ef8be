"""Exact rank and solvability of integer decoding matrices.

Everything here is exact: elimination is fraction-free on machine integers
and switches to Python integers (``object`` arrays) as soon as an update
could overflow 64 bits.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import InvalidInputError, NotSolvableError

__all__ = [
    "rank_int",
    "rank_mod2",
    "DecodingMatrix",
    "find_completing_unit",
    "add_row_if_independent",
    "solve_exact",
]

_SAFE = 2**62


def _as_int_matrix(M) -> np.ndarray:
    A = np.asarray(M)
    if A.size == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise InvalidInputError("matrix must be 2-D")
    if A.dtype == object:
        return np.array([[int(x) for x in row] for row in A], dtype=object)
    if A.dtype.kind not in "iub":
        raise InvalidInputError("matrix must have integer entries")
    return A.astype(np.int64)


def _maxabs(A) -> int:
    return int(np.max(np.abs(A))) if A.size else 0


def rank_int(M) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    A = _as_int_matrix(M)
    A = A.copy()
    n_rows, n_cols = A.shape
    r = 0
    prev = 1
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        if A.dtype != object:
            m = _maxabs(A[r:, c:])
            if 2 * m * m >= _SAFE:
                A = A.astype(object)
        piv = A[r, c]
        below = A[r + 1 :, c:]
        # Sylvester's identity makes this division exact
        A[r + 1 :, c:] = (below * piv - A[r + 1 :, c : c + 1] * A[r, c:]) // prev
        prev = piv
        r += 1
    return r


def rank_mod2(M) -> int:
    """Rank over GF(2) of the entrywise reduction ``M mod 2``."""
    A = _as_int_matrix(M)
    basis: dict[int, int] = {}
    for row in A:
        bits = 0
        for j, x in enumerate(row):
            if int(x) % 2:
                bits |= 1 << j
        while bits:
            top = bits.bit_length() - 1
            if top in basis:
                bits ^= basis[top]
            else:
                basis[top] = bits
                break
    return len(basis)


def _row_gcd(v) -> int:
    if v.dtype == object:
        return reduce(math.gcd, (abs(int(x)) for x in v), 0)
    return int(np.gcd.reduce(np.abs(v)))


class DecodingMatrix:
    """Decoding matrix with an incrementally maintained row-echelon basis.

    Rows are kept as given; a separate echelon basis (each basis row scaled
    to content 1) answers independence queries without re-eliminating.
    Single writer; reads of :attr:`rank` are safe once a mutation returns.
    """

    def __init__(self, L: int, rows=None):
        if int(L) < 1:
            raise InvalidInputError("number of columns must be positive")
        self.L = int(L)
        self.rows: list[np.ndarray] = []
        self.independent_rows: list[int] = []
        self._pivots: list[int] = []
        self._basis: dict[int, np.ndarray] = {}
        self._big = False
        for v in rows or ():
            self.add_row_if_independent(v)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    cached_rank = rank

    def __len__(self) -> int:
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.L), dtype=np.int64)
        return np.vstack(self.rows)

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v)
        if v.ndim != 1 or v.size != self.L:
            raise InvalidInputError(f"row must have length {self.L}")
        if v.dtype.kind not in "iub" and v.dtype != object:
            raise InvalidInputError("row must have integer entries")
        return np.array([int(x) for x in v], dtype=object) if v.dtype == object else v.astype(np.int64)

    def _promote(self):
        self._big = True
        for p in self._basis:
            self._basis[p] = self._basis[p].astype(object)

    def _reduce(self, v: np.ndarray) -> np.ndarray:
        v = v.astype(object) if self._big else v.copy()
        for p in self._pivots:
            vp = v[p]
            if vp == 0:
                continue
            b = self._basis[p]
            bp = b[p]
            if not self._big:
                if abs(int(bp)) * _maxabs(v) + abs(int(vp)) * _maxabs(b) >= _SAFE:
                    self._promote()
                    v = v.astype(object)
                    b = self._basis[p]
            v = bp * v - vp * b
            g = _row_gcd(v)
            if g > 1:
                v = v // g
        return v

    def is_independent(self, v) -> bool:
        return bool(np.any(self._reduce(self._check(v)) != 0))

    def add_row_if_independent(self, v) -> bool:
        """Append ``v``; return True iff the rank increased."""
        v = self._check(v)
        self.rows.append(v.copy())
        rem = self._reduce(v)
        nz = np.flatnonzero(rem != 0)
        if nz.size == 0:
            return False
        q = int(nz[0])
        if rem[q] < 0:
            rem = -rem
        bisect.insort(self._pivots, q)
        self._basis[q] = rem
        self.independent_rows.append(len(self.rows) - 1)
        return True

    def find_completing_unit(self) -> int:
        """Smallest ``i`` whose unit vector lies outside the row space."""
        if self.rank >= self.L:
            raise InvalidInputError("matrix already has full rank")
        pivots = set(self._pivots)
        for i in range(self.L):
            if i not in pivots:
                return i
            e = np.zeros(self.L, dtype=np.int64)
            e[i] = 1
            if self.is_independent(e):
                return i
        raise AssertionError("rank < L but every unit vector is spanned")

    def copy(self) -> "DecodingMatrix":
        other = DecodingMatrix(self.L)
        other.rows = [r.copy() for r in self.rows]
        other.independent_rows = list(self.independent_rows)
        other._pivots = list(self._pivots)
        other._basis = {p: b.copy() for p, b in self._basis.items()}
        other._big = self._big
        return other


def add_row_if_independent(D: DecodingMatrix, v) -> bool:
    return D.add_row_if_independent(v)


def find_completing_unit(D: DecodingMatrix) -> int:
    return D.find_completing_unit()


def solve_exact(D: DecodingMatrix, rhs) -> dict:
    """Express every user's message through the decoded combinations.

    ``rhs[j]`` names the combination carried by row ``j`` of ``D``.  Returns
    ``{user: {name: Fraction}}`` with ``x_user = sum coeff * y_name``, using
    the first ``L`` linearly independent rows.

    Raises
    ------
    NotSolvableError
        If the rank of ``D`` is below ``L``.
    """
    rhs = list(rhs)
    if len(rhs) != len(D.rows):
        raise InvalidInputError("need one right-hand-side name per row")
    if D.rank < D.L:
        raise NotSolvableError(f"rank {D.rank} < {D.L}")
    L = D.L
    sel = D.independent_rows[:L]
    # fraction-free Gauss-Jordan on [A | I]
    aug = [[int(x) for x in D.rows[j]] + [int(i == r) for i in range(L)] for r, j in enumerate(sel)]
    for c in range(L):
        p = next(i for i in range(c, L) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pr = aug[c]
        piv = pr[c]
        for i in range(L):
            if i == c or aug[i][c] == 0:
                continue
            ri = aug[i]
            f = ri[c]
            row = [piv * x - f * y for x, y in zip(ri, pr)]
            g = reduce(math.gcd, row, 0)
            aug[i] = [x // g for x in row] if g > 1 else row
    out = {}
    for u in range(L):
        d = aug[u][u]
        out[u] = {rhs[sel[r]]: Fraction(aug[u][L + r], d) for r in range(L) if aug[u][L + r] != 0}
    return out
