"""Monte Carlo experiment drivers.

Each driver turns an :class:`ExperimentConfig` into a list of
:class:`ResultRow`.  Work is split into units that seed their own streams
from ``(seed, experiment, cell, trial-or-block, slot, ...)``, so the rows
are a pure function of the configuration whatever the worker count.  The
cell coordinate is a hash of the cell's parameters, which makes a cell's
numbers independent of the rest of the grid.
"""

from __future__ import annotations

import math
import zlib
from functools import partial

import numpy as np

from ..bounds import (
    outage_estimate,
    rate_lb_theorem5,
    sumrate_ub_theorem7,
    u_delta,
    unit_pref_bound_beta,
    unit_pref_bound_exp,
)
from ..errors import BoundDomainError, ConfigError
from ..linalg import DecodingMatrix
from ..rate import rate_upper_bound
from ..scheduler import (
    RANK_DEFICIENT,
    RATE_VIOLATION,
    SchedParams,
    best_subset_exhaustive,
    choose_k,
    lift,
    random_schedule_slot,
    run_session,
    SlotSchedule,
)
from ..search import best_coeff, sign_match
from .config import ExperimentConfig
from .multirelay import find_simultaneously_good
from .output import ResultRow
from .rng import SCHEDULE_KEY, experiment_key, sample_channels, stream
from .runner import blocks, run_units

__all__ = ["run_experiment", "UNIT_PREF_VECTORS", "default_outage_rate", "EXHAUSTIVE_MAX_L"]

# test vectors for the unit-preference study, by squared norm
UNIT_PREF_VECTORS = {2: (1, 1), 3: (1, 1, 1), 6: (1, 1, 2)}
EXHAUSTIVE_MAX_L = 20
BLOCK = 500
UB_SLACK = 1e-9


def default_outage_rate(L: int) -> float:
    """``(1/4 - 0.05) log2 log2 L``, just under the scheduled-rate scaling."""
    return (0.25 - 0.05) * math.log2(math.log2(L))


def _cell_key(cell) -> int:
    text = "|".join(v.hex() if isinstance(v, float) else repr(v) for v in cell)
    return zlib.crc32(text.encode("ascii"))


def _keyed(cells):
    """``(key, cell)`` for each distinct cell, in grid order."""
    seen = set()
    for cell in cells:
        key = _cell_key(cell)
        if key not in seen:
            seen.add(key)
            yield key, cell


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    n = x.size
    m = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return m, se


class _Rows:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.rows: list[ResultRow] = []

    def add(self, L, M, P, k, metric, value, trials=None):
        self.rows.append(
            ResultRow(
                self.cfg.experiment,
                int(L),
                int(M),
                float(P),
                k,
                metric,
                float(value),
                self.cfg.trials if trials is None else int(trials),
                self.cfg.seed,
            )
        )


# ---------------------------------------------------------------- unit preference


def _unit_pref_block(unit, seed, ek):
    cell, L, P, start, stop = unit
    rng = stream(seed, ek, cell, start // BLOCK)
    H = rng.standard_normal((stop - start, L))
    h2 = np.einsum("ij,ij->i", H, H)
    f_unit = 1.0 + P * (h2 - np.max(H * H, axis=1))
    hits = {}
    for n2, a in UNIT_PREF_VECTORS.items():
        s = H[:, : len(a)] @ np.asarray(a, dtype=float)
        f_a = n2 + P * np.maximum(n2 * h2 - s * s, 0.0)
        hits[n2] = int(np.count_nonzero(f_a <= f_unit))
    return hits


def _exp_unit_pref(cfg: ExperimentConfig, out: _Rows):
    ek = experiment_key(cfg.experiment)
    cells = [(L, P) for L in cfg.L_grid for P in cfg.P_grid]
    for L, _ in cells:
        if L < max(len(a) for a in UNIT_PREF_VECTORS.values()):
            raise ConfigError("unit-preference study needs L >= 3")
    units = [(c, L, P, a, b) for c, (L, P) in _keyed(cells) for a, b in blocks(cfg.trials, BLOCK)]
    res = run_units(partial(_unit_pref_block, seed=cfg.seed, ek=ek), units, cfg.workers)
    n = cfg.trials
    for c, (L, P) in _keyed(cells):
        mine = [r for u, r in zip(units, res) if u[0] == c]
        for n2 in UNIT_PREF_VECTORS:
            hits = sum(r[n2] for r in mine)
            p = hits / n
            tag = f"[norm2={n2}]"
            out.add(L, 1, P, None, "unit_pref_empirical" + tag, p)
            out.add(L, 1, P, None, "unit_pref_se" + tag, math.sqrt(p * (1 - p) / n))
            out.add(L, 1, P, None, "unit_pref_bound_beta" + tag, unit_pref_bound_beta(n2, L))
            if L > 3:
                out.add(L, 1, P, None, "unit_pref_bound_exp" + tag, unit_pref_bound_exp(n2, L))


# ---------------------------------------------------------------- best rate vs L


def _rate_block(unit, seed, ek):
    cell, L, P, start, stop = unit
    rng = stream(seed, ek, cell, start // BLOCK)
    H = rng.standard_normal((stop - start, L))
    rates = np.empty(len(H))
    units = np.empty(len(H), dtype=bool)
    viol = 0
    for t, h in enumerate(H):
        r = best_coeff(h, P)
        rates[t], units[t] = r.rate, r.is_unit
        viol += r.rate > rate_upper_bound(h, P) + UB_SLACK
    return rates, units, viol


def _exp_rate_vs_L(cfg: ExperimentConfig, out: _Rows):
    ek = experiment_key(cfg.experiment)
    cells = [(L, P) for L in cfg.L_grid for P in cfg.P_grid]
    units = [(c, L, P, a, b) for c, (L, P) in _keyed(cells) for a, b in blocks(cfg.trials, BLOCK)]
    res = run_units(partial(_rate_block, seed=cfg.seed, ek=ek), units, cfg.workers)
    for c, (L, P) in _keyed(cells):
        mine = [r for u, r in zip(units, res) if u[0] == c]
        rates = np.concatenate([r[0] for r in mine])
        unit_flags = np.concatenate([r[1] for r in mine])
        m, se = _mean_se(rates)
        out.add(L, 1, P, None, "rate_mean", m)
        out.add(L, 1, P, None, "rate_se", se)
        out.add(L, 1, P, None, "unit_freq", float(unit_flags.mean()))
        out.add(L, 1, P, None, "ub_violations", sum(r[2] for r in mine))


# ---------------------------------------------------------------- sum-rate until full rank


def _sumrate_trial(unit, seed, ek, slot_cap):
    cell, L, M, P, k, trial = unit
    keys = (ek, cell, trial)
    D = DecodingMatrix(L)
    rows, rates = [], []
    viol = 0
    cap = slot_cap * L
    n = 0
    while D.rank < L and n < cap:
        H = sample_channels(seed, keys, n, M, L)
        if k is None:
            users = np.arange(L)
        else:
            users = np.asarray(random_schedule_slot(L, k, stream(seed, *keys, n, SCHEDULE_KEY)))
        for m in range(M):
            hs = H[m, users]
            if not np.any(hs):
                continue
            r = best_coeff(hs, P)
            row = np.zeros(L, dtype=np.int64)
            row[users] = r.best
            rows.append(row)
            rates.append(r.rate)
            viol += r.rate > rate_upper_bound(hs, P) + UB_SLACK
            D.add_row_if_independent(row)
        n += 1
    if D.rank < L:
        return None, n, viol, float(np.mean(rates)) if rates else 0.0
    # greedy on rates gives the highest-rate independent set (matroid)
    order = np.argsort(-np.asarray(rates), kind="stable")
    basis = DecodingMatrix(L)
    picked = []
    for j in order:
        if basis.add_row_if_independent(rows[j]):
            picked.append(rates[j])
            if basis.rank == L:
                break
    return (sum(picked) / n, min(picked) * L / n), n, viol, float(np.mean(rates))


def _exp_sumrate(cfg: ExperimentConfig, out: _Rows, scheduled: bool):
    ek = experiment_key(cfg.experiment)
    k = (cfg.k_override or 3) if scheduled else None
    cells = [(L, M, P) for L in cfg.L_grid for M in cfg.M_grid for P in cfg.P_grid]
    for L, _, _ in cells:
        if k is not None and k > L:
            raise ConfigError(f"k={k} exceeds L={L}")
    units = [(c, L, M, P, k, t) for c, (L, M, P) in _keyed(cells) for t in range(cfg.trials)]
    res = run_units(partial(_sumrate_trial, seed=cfg.seed, ek=ek, slot_cap=cfg.slot_cap), units, cfg.workers)
    for c, (L, M, P) in _keyed(cells):
        mine = [r for u, r in zip(units, res) if u[0] == c]
        if not mine:
            continue
        done = [r for r in mine if r[0] is not None]
        if done:
            m, se = _mean_se([r[0][0] for r in done])
            ms, ses = _mean_se([r[0][1] for r in done])
            out.add(L, M, P, k, "sumrate_mean", m)
            out.add(L, M, P, k, "sumrate_se", se)
            out.add(L, M, P, k, "sumrate_strict_mean", ms)
            out.add(L, M, P, k, "sumrate_strict_se", ses)
            out.add(L, M, P, k, "slots_mean", float(np.mean([r[1] for r in done])))
        out.add(L, M, P, k, "row_rate_mean", float(np.mean([r[3] for r in mine])))
        out.add(L, M, P, k, "incomplete", len(mine) - len(done))
        out.add(L, M, P, k, "ub_violations", sum(r[2] for r in mine))


# ---------------------------------------------------------------- scheduled sessions


def _session_trial(unit, seed, ek, target, exhaustive_trials):
    cell, L, P, k, trial = unit
    keys = (ek, cell, trial)
    R = 0.0 if target is None else target
    params = SchedParams(L=L, k=k, P=P, R=R)
    sess = run_session(lambda n: sample_channels(seed, keys, n, 1, L)[0], params)
    slot_rates = [s.rate for s in sess.slots[:-1]]
    viol = sum(
        s.rate > rate_upper_bound(h, P) + UB_SLACK for s, h in zip(sess.slots, sess.channels)
    )
    exhaustive = None
    if L <= EXHAUSTIVE_MAX_L and trial < exhaustive_trials:
        opt = [best_subset_exhaustive(h, k, P)[1].rate for h in sess.channels[:-1]]
        exhaustive = float(np.mean(opt))
    return {
        "cause": sess.cause,
        "n_slots": sess.n_slots,
        "min_rate": sess.min_rate,
        "sum_rate": sess.sum_rate,
        "slot_rate": float(np.mean(slot_rates)),
        "viol": int(viol),
        "exhaustive": exhaustive,
    }


def _exp_scheduled(cfg: ExperimentConfig, out: _Rows):
    if cfg.M_grid != [1]:
        raise ConfigError("the scheduled-session study is single-relay (M = 1)")
    ek = experiment_key(cfg.experiment)
    cells = []
    for L in cfg.L_grid:
        k = cfg.k_override or choose_k(L)
        if not 2 <= k <= L:
            raise ConfigError(f"need 2 <= k <= L, got k={k} at L={L}")
        cells.extend((L, P, k) for P in cfg.P_grid)
    units = [(c, L, P, k, t) for c, (L, P, k) in _keyed(cells) for t in range(cfg.trials)]
    fn = partial(_session_trial, seed=cfg.seed, ek=ek, target=cfg.rate, exhaustive_trials=cfg.exhaustive_trials)
    res = run_units(fn, units, cfg.workers)
    for c, (L, P, k) in _keyed(cells):
        mine = [r for u, r in zip(units, res) if u[0] == c]
        if not mine:
            continue
        n = len(mine)
        ok = [r for r in mine if r["cause"] is None]
        m, se = _mean_se([r["slot_rate"] for r in mine])
        out.add(L, 1, P, k, "slot_rate_mean", m)
        out.add(L, 1, P, k, "slot_rate_se", se)
        m, se = _mean_se([r["min_rate"] for r in mine])
        out.add(L, 1, P, k, "min_rate_mean", m)
        out.add(L, 1, P, k, "min_rate_se", se)
        if ok:
            out.add(L, 1, P, k, "sumrate_ok_mean", float(np.mean([r["sum_rate"] for r in ok])))
            out.add(L, 1, P, k, "n_slots_ok_min", min(r["n_slots"] for r in ok))
            out.add(L, 1, P, k, "n_slots_ok_max", max(r["n_slots"] for r in ok))
        out.add(L, 1, P, k, "error_rate", (n - len(ok)) / n)
        out.add(L, 1, P, k, "rank_deficient_rate", sum(r["cause"] == RANK_DEFICIENT for r in mine) / n)
        out.add(L, 1, P, k, "rate_violation_rate", sum(r["cause"] == RATE_VIOLATION for r in mine) / n)
        out.add(L, 1, P, k, "ub_violations", sum(r["viol"] for r in mine))
        if L >= 3:
            out.add(L, 1, P, k, "sumrate_ub", sumrate_ub_theorem7(L, P))
            out.add(L, 1, P, k, "loglog_L", math.log2(math.log2(L)))
        try:
            out.add(L, 1, P, k, "rate_lb", rate_lb_theorem5(L, P))
        except BoundDomainError:
            pass
        pairs = [(r["exhaustive"], r["slot_rate"]) for r in mine if r["exhaustive"] is not None]
        if pairs:
            out.add(L, 1, P, k, "exhaustive_slot_rate_mean", float(np.mean([e for e, _ in pairs])), len(pairs))
            out.add(L, 1, P, k, "scheduled_slot_rate_paired_mean", float(np.mean([a for _, a in pairs])), len(pairs))
            out.add(L, 1, P, k, "exhaustive_gap_min", min(e - a for e, a in pairs), len(pairs))


# ---------------------------------------------------------------- rank evolution


def _rank_trial(unit, seed, ek, n_max):
    cell, L, M, k, trial = unit
    keys = (ek, cell, trial)
    try:
        u, delta = u_delta(L)
    except BoundDomainError:
        u = None
    ones = np.ones(k, dtype=np.int64)
    D = DecodingMatrix(L)
    ranks = np.full(n_max, L, dtype=np.int64)
    fallback = 0
    for n in range(n_max):
        if D.rank == L:
            break
        H = sample_channels(seed, keys, n, M, L)
        users = find_simultaneously_good(H, u, delta, k) if u is not None else None
        if users is None:
            fallback += 1
            users = random_schedule_slot(L, k, stream(seed, *keys, n, SCHEDULE_KEY))
        for m in range(M):
            coeff = sign_match(ones, H[m, list(users)])
            D.add_row_if_independent(lift(SlotSchedule(users, coeff, 0.0), L))
        ranks[n] = D.rank
    return ranks, fallback


def _exp_rank_evolution(cfg: ExperimentConfig, out: _Rows):
    ek = experiment_key(cfg.experiment)
    P = cfg.P_grid[0]
    cells = []
    for L in cfg.L_grid:
        k = cfg.k_override or (choose_k(L) if L >= 4 else L)
        cells.extend((L, M, k) for M in cfg.M_grid)
    units = []
    for c, (L, M, k) in _keyed(cells):
        units.extend((c, L, M, k, t) for t in range(cfg.trials))
    res = []
    for L in dict.fromkeys(cfg.L_grid):
        n_max = cfg.n_max or L
        mine = [u for u in units if u[1] == L]
        res.extend(run_units(partial(_rank_trial, seed=cfg.seed, ek=ek, n_max=n_max), mine, cfg.workers))
    for c, (L, M, k) in _keyed(cells):
        mine = [r for u, r in zip(units, res) if u[0] == c]
        if not mine:
            continue
        avg = np.mean(np.vstack([r[0] for r in mine]), axis=0)
        for n, v in enumerate(avg, 1):
            out.add(L, M, P, k, f"avg_rank[n={n}]", v)
        out.add(L, M, P, k, "fallback_slot_freq", sum(r[1] for r in mine) / (len(mine) * len(avg)))


# ---------------------------------------------------------------- outage


def _outage_trial(unit, seed, ek):
    cell, L, M, P, k, R, trial = unit
    return outage_estimate(L, P, R, 1, stream(seed, ek, cell, trial), M=M, k=k)


def _exp_outage(cfg: ExperimentConfig, out: _Rows):
    ek = experiment_key(cfg.experiment)
    cells = []
    for L in cfg.L_grid:
        if L < 4:
            raise ConfigError("outage study needs L >= 4")
        k = cfg.k_override or choose_k(L)
        R = default_outage_rate(L) if cfg.rate is None else cfg.rate
        cells.extend((L, M, P, k, R) for M in cfg.M_grid for P in cfg.P_grid)
    units = [(c, *cell, t) for c, cell in _keyed(cells) for t in range(cfg.trials)]
    res = run_units(partial(_outage_trial, seed=cfg.seed, ek=ek), units, cfg.workers)
    n = cfg.trials
    for c, (L, M, P, k, R) in _keyed(cells):
        if n == 0:
            continue
        p = sum(r for u, r in zip(units, res) if u[0] == c) / n
        out.add(L, M, P, k, "outage", p)
        out.add(L, M, P, k, "outage_se", math.sqrt(p * (1 - p) / n))
        out.add(L, M, P, k, "target_rate", R)


_DRIVERS = {
    "fig2": _exp_unit_pref,
    "fig4": _exp_rate_vs_L,
    "fig5": partial(_exp_sumrate, scheduled=False),
    "fig6": partial(_exp_sumrate, scheduled=True),
    "fig7": _exp_scheduled,
    "fig8": _exp_rank_evolution,
    "outage": _exp_outage,
}


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the configured experiment; ``trials = 0`` yields no rows."""
    out = _Rows(cfg)
    if cfg.trials == 0:
        return out.rows
    _DRIVERS[cfg.experiment](cfg, out)
    return out.rows
