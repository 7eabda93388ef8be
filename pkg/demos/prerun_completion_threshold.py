"""Estimate how often a scheduled session ends rank-deficient.

The completion check in the acceptance suite compares a 200-session run
against a threshold.  This script fixes that threshold from an independent
run (different seed, more sessions): the 99.9% quantile of the count a
200-session run would see if the true frequency were the pre-run estimate.

    python3 demos/prerun_completion_threshold.py [sessions]
"""

import math
import sys
import time

from scipy.stats import binom

from cfsched.sim import make_config, run_experiment

SEED = 987_654_321

if __name__ == "__main__":
    sessions = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    t0 = time.time()
    cfg = make_config("fig7", L_grid=[50, 100], P_grid=[1000.0], trials=sessions, seed=SEED)
    rows = run_experiment(cfg)
    for r in rows:
        if r.metric == "rank_deficient_rate":
            se = math.sqrt(r.value * (1 - r.value) / sessions)
            limit = binom.ppf(0.999, 200, r.value) / 200
            print(f"L={r.L:4d}  rank-deficient {r.value:.4f} +- {se:.4f}  200-session threshold {limit:.3f}")
    print(f"{sessions} sessions per L in {time.time() - t0:.0f} s")
