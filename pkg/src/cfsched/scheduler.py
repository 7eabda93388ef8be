"""User scheduling with an all-ones coefficient pattern.

Per slot the scheduler picks ``k`` users whose gain magnitudes are
consecutive in sorted order (for the all-ones pattern the best subset is
always such a window) and gives each coefficient the sign of its channel.
A session runs ``L - 1`` such slots and then one single-user slot chosen
to complete the rank of the decoding matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidInputError
from .linalg import DecodingMatrix
from .rate import as_channel, _check_power, computation_rate, log2_plus
from .search import SearchResult, best_coeff, sign_match

__all__ = [
    "SchedParams",
    "SlotSchedule",
    "SessionResult",
    "choose_k",
    "window_rates",
    "schedule_slot",
    "lift",
    "run_session",
    "random_schedule_slot",
    "best_subset_exhaustive",
    "RANK_DEFICIENT",
    "RATE_VIOLATION",
]

RANK_DEFICIENT = "rank-deficient"
RATE_VIOLATION = "rate-violation"


@dataclass(frozen=True)
class SlotSchedule:
    users: tuple[int, ...]
    coeff: np.ndarray
    rate: float

    def __post_init__(self):
        if len(self.users) != len(self.coeff):
            raise InvalidInputError("users and coeff must have equal length")
        if len(set(self.users)) != len(self.users):
            raise InvalidInputError("scheduled users must be distinct")


@dataclass(frozen=True)
class SchedParams:
    L: int
    k: int
    P: float
    R: float = 0.0

    def __post_init__(self):
        if not 2 <= self.k <= self.L:
            raise InvalidInputError(f"need 2 <= k <= L, got k={self.k}, L={self.L}")
        if self.R < 0:
            raise InvalidInputError("target rate must be nonnegative")
        _check_power(self.P)

    @classmethod
    def for_users(cls, L: int, P: float, R: float = 0.0) -> "SchedParams":
        return cls(L=L, k=choose_k(L), P=P, R=R)


@dataclass
class SessionResult:
    slots: list[SlotSchedule]
    decoding_matrix: DecodingMatrix
    n_slots: int
    min_rate: float
    status: str
    cause: str | None = None
    siso_rate: float = 0.0
    channels: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def sum_rate(self) -> float:
        """``R L / N`` with the target set to the session's minimum slot rate."""
        return self.min_rate * self.decoding_matrix.L / self.n_slots


def choose_k(L: int) -> int:
    """Users per slot, ``ceil(ln L) + 1``; defined for ``L >= 4``."""
    if int(L) != L or L < 4:
        raise InvalidInputError(f"choose_k needs an integer L >= 4, got {L}")
    return math.ceil(math.log(L)) + 1


def window_rates(mag_sorted: np.ndarray, k: int, P: float) -> np.ndarray:
    """Rate of the all-ones vector on each window of ``k`` consecutive entries."""
    win = sliding_window_view(mag_sorted, k)
    s1 = win.sum(axis=1)
    s2 = (win * win).sum(axis=1)
    # same clamped closed form as quad_form, so x > 0 always
    x = (k + P * np.maximum(k * s2 - s1 * s1, 0.0)) / (1.0 + P * s2)
    return 0.5 * log2_plus(1.0 / x)


def schedule_slot(h_L, k: int, P: float) -> SlotSchedule:
    """Best window of ``k`` magnitude-sorted users for the all-ones pattern.

    Every one of the ``L - k + 1`` windows is scored; ties and the all-zero
    case go to the lowest window.  Returned users are in ascending index
    order, each coefficient carrying the sign of its channel gain.
    """
    h = as_channel(h_L)
    P = _check_power(P)
    L = h.size
    if not 1 <= k <= L:
        raise InvalidInputError(f"need 1 <= k <= L, got k={k}, L={L}")
    order = np.argsort(np.abs(h), kind="stable")
    rates = window_rates(np.abs(h)[order], k, P)
    start = int(np.argmax(rates))
    users = np.sort(order[start : start + k])
    coeff = sign_match(np.ones(k, dtype=np.int64), h[users])
    return SlotSchedule(tuple(int(u) for u in users), coeff, computation_rate(h[users], coeff, P))


def lift(slot: SlotSchedule, L: int) -> np.ndarray:
    """Embed the slot's coefficients into a length-``L`` row (zeros elsewhere)."""
    row = np.zeros(L, dtype=np.int64)
    if slot.users:
        idx = np.asarray(slot.users)
        if idx.min() < 0 or idx.max() >= L:
            raise InvalidInputError("user index out of range")
        row[idx] = slot.coeff
    return row


def run_session(channel_source: Callable[[int], np.ndarray], params: SchedParams) -> SessionResult:
    """Run ``L - 1`` window slots and one rank-completing single-user slot.

    ``channel_source(n)`` returns the length-``L`` channel of slot ``n``.  A
    target rate of zero is always met, so then only the rank decides.
    """
    L, k, P, R = params.L, params.k, params.P, params.R
    D = DecodingMatrix(L)
    slots: list[SlotSchedule] = []
    channels = []
    r_min = math.inf
    for n in range(L - 1):
        h = as_channel(channel_source(n))
        if h.size != L:
            raise InvalidInputError("channel source returned a vector of the wrong length")
        channels.append(h)
        slot = schedule_slot(h, k, P)
        slots.append(slot)
        D.add_row_if_independent(lift(slot, L))
        r_min = min(r_min, slot.rate)

    h = as_channel(channel_source(L - 1))
    channels.append(h)
    rank_before = D.rank
    i = D.find_completing_unit()
    unit = np.zeros(L, dtype=np.int64)
    unit[i] = 1
    siso = 0.5 * math.log2(1.0 + P * h[i] ** 2)
    slots.append(SlotSchedule((i,), np.ones(1, dtype=np.int64), siso))
    D.add_row_if_independent(unit)

    cause = None
    if rank_before < L - 1 or D.rank < L:
        cause = RANK_DEFICIENT
    elif R > 0 and not (R < r_min and R < siso):
        cause = RATE_VIOLATION
    return SessionResult(
        slots=slots,
        decoding_matrix=D,
        n_slots=L,
        min_rate=r_min,
        status="ok" if cause is None else "error",
        cause=cause,
        siso_rate=siso,
        channels=channels,
    )


def random_schedule_slot(L: int, k: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniformly random ``k``-subset of ``range(L)``, in ascending order."""
    if not 1 <= k <= L:
        raise InvalidInputError(f"need 1 <= k <= L, got k={k}, L={L}")
    return tuple(int(u) for u in np.sort(rng.choice(L, size=k, replace=False)))


def best_subset_exhaustive(h_L, k: int, P: float) -> tuple[tuple[int, ...], SearchResult]:
    """Best ``k``-subset with its rate-maximising integer vector, by full search.

    Only the scheduled users transmit.  Subsets are visited strongest user
    first; once ``1/2 log2(1 + P h_max^2)`` of the leading user cannot beat
    the incumbent, no later subset can either.
    """
    h = as_channel(h_L)
    P = _check_power(P)
    L = h.size
    if not 1 <= k <= L:
        raise InvalidInputError(f"need 1 <= k <= L, got k={k}, L={L}")
    order = np.argsort(-np.abs(h), kind="stable")
    ceiling = 0.5 * np.log2(1.0 + P * h[order] ** 2)
    best_users, best = None, None
    for combo in itertools.combinations(range(L), k):
        # combo[0] never decreases, so the ceiling only falls from here on
        if best is not None and ceiling[combo[0]] <= best.rate:
            break
        users = order[list(combo)]
        if not np.any(h[users]):
            continue
        res = best_coeff(h[users], P)
        if best is None or res.rate > best.rate:
            best_users, best = users, res
    if best is None:
        raise InvalidInputError("channel vector must not be all-zero")
    idx = np.argsort(best_users)
    users = tuple(int(u) for u in best_users[idx])
    res = SearchResult(best.best[idx], best.rate, best.f_value, best.is_unit)
    return users, res
