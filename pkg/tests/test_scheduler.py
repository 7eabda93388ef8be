import itertools
import math

import numpy as np
import pytest

from cfsched.errors import InvalidInputError
from cfsched.linalg import rank_int
from cfsched.rate import computation_rate
from cfsched.scheduler import (
    RANK_DEFICIENT,
    RATE_VIOLATION,
    SchedParams,
    SlotSchedule,
    best_subset_exhaustive,
    choose_k,
    lift,
    random_schedule_slot,
    run_session,
    schedule_slot,
)
from cfsched.search import best_coeff, sign_match, sign_patterns


def test_choose_k():
    assert choose_k(100) == 6
    assert choose_k(4) == 3
    assert math.log(55) > 4 and choose_k(55) == 6
    with pytest.raises(InvalidInputError):
        choose_k(3)


def test_schedule_slot_examples():
    s = schedule_slot([0.2, 1.01, 0.98, 3.0], 2, 10.0)
    assert s.users == (1, 2)
    assert tuple(s.coeff) == (1, 1)
    x = 2 - 10 * 1.99**2 / (1 + 10 * (1.01**2 + 0.98**2))
    assert s.rate == pytest.approx(0.5 * math.log2(1 / x), rel=1e-12)
    assert s.rate == pytest.approx(1.686, abs=1e-3)
    assert tuple(schedule_slot([-0.9, 1.1], 2, 10.0).coeff) == (-1, 1)


def test_schedule_slot_tie_goes_to_lowest_window():
    s = schedule_slot([1.0, -1.0, 1.0, 1.0], 2, 10.0)
    # stable sort keeps index order on equal magnitudes
    assert s.users == (0, 1)


def test_schedule_slot_rejects_large_k():
    with pytest.raises(InvalidInputError):
        schedule_slot([1.0, 2.0], 3, 1.0)


def _exhaustive_window(h, k, P):
    best = 0.0
    for S in itertools.combinations(range(len(h)), k):
        hs = h[list(S)]
        best = max(best, computation_rate(hs, sign_match(np.ones(k, dtype=int), hs), P))
    return best


def test_window_matches_exhaustive_subset(rng):
    for _ in range(150):
        L = int(rng.integers(3, 10))
        k = int(rng.integers(2, 4))
        P = float(rng.choice([1.0, 10.0, 100.0]))
        h = rng.standard_normal(L)
        assert schedule_slot(h, k, P).rate == pytest.approx(_exhaustive_window(h, k, P), abs=1e-9)


def test_slot_signs_are_optimal(rng):
    for _ in range(50):
        h = rng.standard_normal(8)
        s = schedule_slot(h, 3, 10.0)
        hs = h[list(s.users)]
        for pat in sign_patterns(3):
            assert computation_rate(hs, pat, 10.0) <= s.rate + 1e-9


def test_lift():
    slot = SlotSchedule((0, 1, 4), np.array([1, 1, 2]), 0.0)
    row = lift(slot, 6)
    assert tuple(row) == (1, 1, 0, 0, 2, 0)
    assert tuple(row[list(slot.users)]) == (1, 1, 2)
    assert not np.any(lift(SlotSchedule((), np.array([], dtype=int), 0.0), 4))
    with pytest.raises(InvalidInputError):
        lift(slot, 4)


def test_slot_schedule_validation():
    with pytest.raises(InvalidInputError):
        SlotSchedule((0, 0), np.array([1, 1]), 0.0)
    with pytest.raises(InvalidInputError):
        SlotSchedule((0, 1), np.array([1]), 0.0)


def test_sched_params_validation():
    with pytest.raises(InvalidInputError):
        SchedParams(L=4, k=1, P=1.0)
    with pytest.raises(InvalidInputError):
        SchedParams(L=4, k=5, P=1.0)
    with pytest.raises(InvalidInputError):
        SchedParams(L=4, k=2, P=1.0, R=-1.0)


def _source(seed, L):
    return lambda n: np.random.default_rng([seed, n]).standard_normal(L)


def test_run_session_small():
    ok = 0
    for seed in range(20):
        res = run_session(_source(seed, 4), SchedParams(L=4, k=3, P=10.0))
        assert res.n_slots == 4 and len(res.slots) == 4
        assert len(res.slots[-1].users) == 1
        assert res.min_rate == min(s.rate for s in res.slots[:-1])
        assert res.cause in (None, RANK_DEFICIENT)
        if res.ok:
            ok += 1
            assert rank_int(res.decoding_matrix.matrix()) == 4
    assert ok >= 15


def test_session_rows_are_sign_patterns():
    res = run_session(_source(7, 30), SchedParams.for_users(30, 100.0))
    M = res.decoding_matrix.matrix()
    k = choose_k(30)
    for row in M[:-1]:
        assert np.count_nonzero(row) == k and set(np.abs(row[row != 0])) == {1}
    assert np.count_nonzero(M[-1]) == 1


def test_run_session_rate_violation():
    res = run_session(_source(3, 12), SchedParams(L=12, k=3, P=10.0, R=50.0))
    assert res.cause in (RATE_VIOLATION, RANK_DEFICIENT)
    res0 = run_session(_source(3, 12), SchedParams(L=12, k=3, P=10.0, R=0.0))
    assert res0.cause != RATE_VIOLATION


def test_run_session_rejects_wrong_length():
    with pytest.raises(InvalidInputError):
        run_session(lambda n: np.ones(3), SchedParams(L=4, k=2, P=1.0))


def test_random_schedule_slot_frequencies():
    rng = np.random.default_rng(11)
    L, k, n = 10, 3, 100_000
    counts = np.zeros(L)
    for _ in range(n):
        S = random_schedule_slot(L, k, rng)
        assert list(S) == sorted(set(S)) and len(S) == k
        counts[list(S)] += 1
    p = k / L
    assert np.all(np.abs(counts - n * p) <= 3 * math.sqrt(n * p * (1 - p)) * 1.5)
    assert random_schedule_slot(5, 5, rng) == (0, 1, 2, 3, 4)
    assert random_schedule_slot(5, 1, rng)[0] in range(5)


def test_best_subset_exhaustive_matches_full_scan(rng):
    for _ in range(8):
        h = rng.standard_normal(7)
        users, res = best_subset_exhaustive(h, 3, 100.0)
        full = max(best_coeff(h[list(S)], 100.0).rate for S in itertools.combinations(range(7), 3))
        assert res.rate == pytest.approx(full, abs=1e-12)
        assert computation_rate(h[list(users)], res.best, 100.0) == pytest.approx(res.rate, abs=1e-12)
        assert res.rate >= schedule_slot(h, 3, 100.0).rate - 1e-12
