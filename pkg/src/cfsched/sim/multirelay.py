"""Several relays decoding in parallel with random scheduling.

Phase one schedules a uniform random ``k``-subset each slot; every relay
forwards the sign-matched all-ones combination of those users.  While the
rank grows by roughly ``M`` per slot this is efficient, but the gain
collapses once the row space nearly fills.  The session then switches to
single-user slots that each add one missing dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..linalg import DecodingMatrix
from ..rate import computation_rate
from ..scheduler import choose_k, lift, random_schedule_slot, SlotSchedule
from ..search import sign_match

__all__ = ["MultiRelaySession", "SlotRecord", "run_multirelay_session", "find_simultaneously_good"]

RANDOM_PHASE = "random-scheduling"
SISO_PHASE = "siso-completion"


@dataclass(frozen=True)
class SlotRecord:
    phase: str
    users: tuple[int, ...]
    relay_rates: tuple[float, ...]
    rank_gain: int


@dataclass
class MultiRelaySession:
    L: int
    M: int
    decoding_matrix: DecodingMatrix
    channels: list[np.ndarray] = field(default_factory=list, repr=False)
    slots: list[SlotRecord] = field(default_factory=list)
    rank_history: list[int] = field(default_factory=list)
    # rates of the rows that raised the rank, in order
    useful_rates: list[float] = field(default_factory=list)
    phase: str = RANDOM_PHASE

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def random_slots(self) -> int:
        return sum(s.phase == RANDOM_PHASE for s in self.slots)

    @property
    def min_rate(self) -> float:
        return min(self.useful_rates) if self.useful_rates else 0.0

    @property
    def sum_rate(self) -> float:
        """``R L / N`` with ``R`` the smallest rate among the rows that were needed."""
        return self.min_rate * self.L / self.n_slots if self.slots else 0.0

    @property
    def completion_overhead(self) -> float:
        """Fraction of slots spent completing the rank one user at a time."""
        return 1.0 - self.random_slots / self.n_slots if self.slots else 0.0


def run_multirelay_session(
    L: int,
    M: int,
    P: float,
    rng: np.random.Generator,
    k: int | None = None,
    window: int = 5,
    gain_fraction: float = 0.5,
) -> MultiRelaySession:
    """Random scheduling until the rank gain stalls, then single-user completion.

    The switch happens once the average rank gain over the last ``window``
    slots drops below ``gain_fraction * M``.  Channels for each slot are an
    ``(M, L)`` matrix drawn from ``rng`` after the user subset.
    """
    if M < 1 or L < 1:
        raise InvalidInputError("need L >= 1 and M >= 1")
    if k is None:
        k = choose_k(L) if L >= 4 else L
    D = DecodingMatrix(L)
    sess = MultiRelaySession(L=L, M=M, decoding_matrix=D)
    ones = np.ones(k, dtype=np.int64)

    while D.rank < L and sess.phase == RANDOM_PHASE:
        users = random_schedule_slot(L, k, rng)
        H = rng.standard_normal((M, L))
        sess.channels.append(H)
        before = D.rank
        rates = []
        for m in range(M):
            hm = H[m, list(users)]
            coeff = sign_match(ones, hm)
            rate = computation_rate(hm, coeff, P) if np.any(hm) else 0.0
            rates.append(rate)
            if D.add_row_if_independent(lift(SlotSchedule(users, coeff, rate), L)):
                sess.useful_rates.append(rate)
        sess.slots.append(SlotRecord(RANDOM_PHASE, users, tuple(rates), D.rank - before))
        sess.rank_history.append(D.rank)
        n = len(sess.rank_history)
        if n >= window:
            start = sess.rank_history[n - window - 1] if n > window else 0
            if (D.rank - start) / window < gain_fraction * M:
                sess.phase = SISO_PHASE

    sess.phase = SISO_PHASE
    while D.rank < L:
        H = rng.standard_normal((M, L))
        sess.channels.append(H)
        i = D.find_completing_unit()
        rates = tuple(0.5 * math.log2(1.0 + P * H[m, i] ** 2) for m in range(M))
        e = np.zeros(L, dtype=np.int64)
        e[i] = 1
        D.add_row_if_independent(e)
        # the relay with the strongest gain to user i carries the slot
        sess.useful_rates.append(max(rates))
        sess.slots.append(SlotRecord(SISO_PHASE, (i,), rates, 1))
        sess.rank_history.append(D.rank)
    return sess


def find_simultaneously_good(h_all_relays, u: float, delta: float, k: int) -> tuple[int, ...] | None:
    """First ``k`` users with ``u <= |h| <= u + delta`` at every relay, or ``None``."""
    H = np.atleast_2d(np.asarray(h_all_relays, dtype=float))
    if H.ndim != 2 or H.shape[1] == 0:
        raise InvalidInputError("expected an (M, L) array of channel gains")
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    mag = np.abs(H)
    good = np.flatnonzero(np.all((mag >= u) & (mag <= u + delta), axis=0))
    if good.size < k:
        return None
    return tuple(int(i) for i in good[:k])
