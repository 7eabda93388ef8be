"""Search for the rate-maximising integer coefficient vector.

For a fixed scaling ``alpha`` the best integer vector is the coordinatewise
rounding of ``alpha * h``.  As ``alpha`` grows from 0, ``round(alpha * h)``
only changes when some ``alpha |h_i|`` crosses ``m + 1/2``, so walking these
breakpoints up to the largest useful scaling enumerates every vector that
can be optimal.  Together with the unit vectors (for scalings where every
coordinate rounds to zero) this is a finite candidate set whose size grows
linearly in ``L``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .rate import as_channel, as_coeffs, _check_power, computation_rate, quad_form

__all__ = [
    "SearchResult",
    "CandidateSet",
    "canonicalize",
    "enumerate_candidates",
    "best_coeff",
    "best_coeff_bruteforce",
    "best_unit",
    "sign_match",
    "cos2_angle",
]

# Breakpoint sweep guard so the boundary candidate survives rounding.
ALPHA_MARGIN = 1e-9
# Relative width inside which two quadratic-form values count as a tie.
TIE_RTOL = 1e-12
BRUTEFORCE_LIMIT = 10**9


@dataclass(frozen=True)
class SearchResult:
    best: np.ndarray
    rate: float
    f_value: float
    is_unit: bool


@dataclass(frozen=True)
class CandidateSet:
    """Canonical candidate vectors, one per row (first nonzero entry positive)."""

    vectors: np.ndarray

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __contains__(self, a) -> bool:
        a = np.asarray(a)
        return bool(np.any(np.all(self.vectors == a, axis=1)))


def canonicalize(A) -> np.ndarray:
    """Flip the sign of each row whose first nonzero entry is negative."""
    A = np.array(A, dtype=np.int64, copy=True)
    squeeze = A.ndim == 1
    A = np.atleast_2d(A)
    nz = A != 0
    first = np.argmax(nz, axis=1)
    lead = A[np.arange(len(A)), first]
    A[lead < 0] *= -1
    return A[0] if squeeze else A


def _is_unit(a: np.ndarray) -> bool:
    return int(np.count_nonzero(a)) == 1 and int(np.max(np.abs(a))) == 1


def _quad_forms(h: np.ndarray, P: float, A: np.ndarray) -> np.ndarray:
    Af = A.astype(float)
    na = np.einsum("ij,ij->i", Af, Af)
    s = Af @ h
    return na + P * np.maximum(na * (h @ h) - s * s, 0.0)


def _pick(A: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Row of ``A`` minimising ``f``; ties by smaller norm, then lexicographic."""
    fmin = f.min()
    idx = np.flatnonzero(f <= fmin + TIE_RTOL * abs(fmin))
    if idx.size == 1:
        return A[idx[0]]
    tied = A[idx]
    norms = np.einsum("ij,ij->i", tied, tied)
    tied = tied[norms == norms.min()]
    # lexsort sorts by the last key first
    order = np.lexsort(tied.T[::-1])
    return tied[order[0]]


def _result(h: np.ndarray, P: float, a: np.ndarray) -> SearchResult:
    a = np.array(a, dtype=np.int64)
    return SearchResult(
        best=a,
        rate=computation_rate(h, a, P),
        f_value=quad_form(h, P, a),
        is_unit=_is_unit(a),
    )


def _nonzero_channel(h) -> np.ndarray:
    h = as_channel(h)
    if not np.any(h):
        raise InvalidInputError("channel vector must not be all-zero")
    return h


def enumerate_candidates(h, P: float) -> CandidateSet:
    """All vectors ``round(alpha h)`` over the breakpoints, plus unit vectors.

    Rows are canonical, unique, sorted lexicographically and satisfy
    ``||a||^2 <= 1 + P||h||^2``.  Coordinates with ``h_i = 0`` stay zero
    except in the unit vector ``e_i``.
    """
    h = _nonzero_channel(h)
    P = _check_power(P)
    L = h.size
    budget = 1.0 + P * (h @ h)
    alpha_max = np.sqrt(budget) / np.linalg.norm(h) * (1.0 + ALPHA_MARGIN)

    mag = np.abs(h)
    active = np.flatnonzero(mag > 0)
    # coordinate i gains magnitude m+1 when alpha crosses (m + 1/2)/|h_i|
    n_events = np.floor(alpha_max * mag[active] - 0.5).astype(np.int64) + 1
    n_events = np.maximum(n_events, 0)
    coords = np.repeat(active, n_events)
    steps = np.concatenate([np.arange(n) for n in n_events]) if coords.size else np.zeros(0)
    times = (steps + 0.5) / mag[coords]
    order = np.lexsort((coords, times))

    onehot = np.zeros((coords.size, L), dtype=np.int64)
    onehot[np.arange(coords.size), coords[order]] = 1
    mags = np.cumsum(onehot, axis=0)
    signs = np.where(h < 0, -1, 1).astype(np.int64)
    walked = mags * signs
    norms = np.einsum("ij,ij->i", walked, walked)
    walked = walked[norms <= budget * (1.0 + TIE_RTOL)]

    units = np.eye(L, dtype=np.int64)
    allv = np.vstack([canonicalize(walked) if len(walked) else walked.reshape(0, L), units])
    return CandidateSet(np.unique(allv, axis=0))


def best_coeff(h, P: float) -> SearchResult:
    """Rate-maximising integer vector, found over :func:`enumerate_candidates`."""
    h = _nonzero_channel(h)
    P = _check_power(P)
    cands = enumerate_candidates(h, P).vectors
    return _result(h, P, _pick(cands, _quad_forms(h, P, cands)))


def best_coeff_bruteforce(h, P: float, box_limit: int | None = None) -> SearchResult:
    """Exhaustive scan of ``[-box_limit, box_limit]^L`` without the zero vector.

    ``box_limit`` defaults to ``ceil(sqrt(1 + P||h||^2))``, which contains
    every vector with a nonzero rate.
    """
    h = _nonzero_channel(h)
    P = _check_power(P)
    L = h.size
    if box_limit is None:
        box_limit = int(np.ceil(np.sqrt(1.0 + P * (h @ h))))
    box_limit = int(box_limit)
    if box_limit < 1:
        raise InvalidInputError("box_limit must be at least 1")
    side = 2 * box_limit + 1
    if side**L > BRUTEFORCE_LIMIT:
        raise ResourceLimitError(f"search space {side}^{L} exceeds {BRUTEFORCE_LIMIT:.0e} points")

    vals = np.arange(-box_limit, box_limit + 1)
    h2 = h @ h
    rest = L - 1
    # inner sums over coordinates 2..L, built as an outer sum on a (side,)*rest grid
    s_rest = np.zeros((1,) * rest)
    n_rest = np.zeros((1,) * rest)
    for j in range(rest):
        shape = [1] * rest
        shape[j] = side
        s_rest = s_rest + (vals * h[j + 1]).reshape(shape)
        n_rest = n_rest + (vals * vals).astype(float).reshape(shape)

    best_f = np.inf
    tied: list[np.ndarray] = []
    for v0 in vals:
        s = s_rest + v0 * h[0]
        n = n_rest + float(v0 * v0)
        f = n + P * np.maximum(n * h2 - s * s, 0.0)
        if v0 == 0:
            f = np.array(f, copy=True)
            f[(box_limit,) * rest] = np.inf
        fmin = f.min()
        if fmin > best_f + TIE_RTOL * abs(best_f):
            continue
        cut = fmin + TIE_RTOL * abs(fmin)
        idx = np.argwhere(f <= cut)
        vecs = np.column_stack([np.full(len(idx), v0), vals[idx]]) if rest else np.full((len(idx), 1), v0)
        best_f = min(best_f, fmin)
        tied.append(vecs)
    A = np.unique(canonicalize(np.vstack(tied)), axis=0)
    return _result(h, P, _pick(A, _quad_forms(h, P, A)))


def best_unit(h, P: float) -> SearchResult:
    """Best unit vector ``e_i``; ``i`` maximises ``h_i^2`` (lowest index on ties)."""
    h = _nonzero_channel(h)
    P = _check_power(P)
    i = int(np.argmax(h * h))
    e = np.zeros(h.size, dtype=np.int64)
    e[i] = 1
    return _result(h, P, e)


def sign_match(a_mag, h) -> np.ndarray:
    """Give each entry of a nonnegative magnitude vector the sign of ``h``."""
    h = as_channel(h)
    a_mag = as_coeffs(a_mag, h.size)
    if np.any(a_mag < 0):
        raise InvalidInputError("magnitude vector must be nonnegative")
    return np.where(h < 0, -a_mag, a_mag)


def cos2_angle(a, h) -> float:
    """Squared cosine of the angle between ``a`` and ``h``."""
    a = np.asarray(a, dtype=float)
    h = np.asarray(h, dtype=float)
    if a.shape != h.shape or a.ndim != 1:
        raise InvalidInputError("a and h must be 1-D of equal length")
    na, nh = a @ a, h @ h
    if na == 0 or nh == 0:
        raise InvalidInputError("cos2_angle undefined for a zero vector")
    return float(min((a @ h) ** 2 / (na * nh), 1.0))


def cos2_angle_batch(a, H) -> np.ndarray:
    """:func:`cos2_angle` of a fixed ``a`` against each row of ``H``."""
    a = np.asarray(a, dtype=float)
    H = np.asarray(H, dtype=float)
    return np.minimum((H @ a) ** 2 / ((a @ a) * np.einsum("ij,ij->i", H, H)), 1.0)


def sign_patterns(k: int):
    """Iterate over all ``2^k`` vectors in ``{-1, +1}^k``."""
    for signs in itertools.product((1, -1), repeat=k):
        yield np.array(signs, dtype=np.int64)
