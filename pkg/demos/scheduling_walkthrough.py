"""Why all-users-transmit degenerates, and what a window schedule recovers.

Draws one channel per size L, compares the best coefficient vector over
all users with the best window of ceil(ln L) + 1 users, then runs one full
scheduled session and decodes it exactly.

    python3 demos/scheduling_walkthrough.py
"""

import numpy as np

from cfsched import (
    SchedParams,
    best_coeff,
    choose_k,
    rate_upper_bound,
    run_session,
    schedule_slot,
    solve_exact,
)

P = 1000.0
rng = np.random.default_rng(7)

print(f"{'L':>5} {'all users':>10} {'unit?':>6} {'window':>8} {'ceiling':>8}")
for L in (4, 10, 30, 100):
    h = rng.standard_normal(L)
    full = best_coeff(h, P)
    slot = schedule_slot(h, choose_k(L), P)
    print(f"{L:5d} {full.rate:10.3f} {str(full.is_unit):>6} {slot.rate:8.3f} {rate_upper_bound(h, P):8.3f}")

# one session: L - 1 window slots plus a completing single-user slot
L = 40
session = run_session(lambda n: rng.standard_normal(L), SchedParams.for_users(L, P))
print(f"\nsession L={L}: status={session.status} N={session.n_slots} "
      f"R_min={session.min_rate:.3f} sum-rate={session.sum_rate:.3f}")
if session.ok:
    names = [f"y{j}" for j in range(len(session.decoding_matrix.rows))]
    sol = solve_exact(session.decoding_matrix, names)
    # the user whose message needs the most decoded combinations
    u = max(sol, key=lambda j: len(sol[j]))
    terms = " + ".join(f"({c})*{n}" for n, c in sol[u].items() if c != 0)
    print(f"user {u} = {terms}")
