"""Closed-form bounds for unit-vector degeneracy and scheduled rates.

Rates are in bits (base-2 logs); the exponents inside the probability
bounds use natural logs.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BoundDomainError, InvalidInputError
from .rate import computation_rate
from .scheduler import choose_k, schedule_slot
from .search import sign_match

__all__ = [
    "EULER_GAMMA",
    "reg_inc_beta",
    "phi_a",
    "normal_cdf",
    "unit_pref_bound_beta",
    "unit_pref_bound_exp",
    "u_delta",
    "p_interval",
    "pr_xi_lower",
    "rate_lb_theorem5",
    "sumrate_ub_theorem7",
    "BOUND_NOTES",
    "outage_estimate",
]

EULER_GAMMA = 0.5772156649015329

# How the asymptotic o(1) terms are treated; carried into experiment output.
BOUND_NOTES = {
    "rate_lb_theorem5": "o(1) instantiated with the finite-L Chernoff expression",
    "sumrate_ub_theorem7": "additive o(1) dropped",
}

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAXITER = 10_000


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for I_x(a, b) (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``."""
    x, a, b = float(x), float(a), float(b)
    if not (0.0 <= x <= 1.0) or not (a > 0 and b > 0) or not math.isfinite(a + b):
        raise InvalidInputError(f"reg_inc_beta domain: x in [0,1], a, b > 0 (got {x}, {a}, {b})")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # the fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def phi_a(a_norm2: float) -> float:
    """``1 - 1/||a||^2``, the cos^2 threshold for a non-unit vector to win."""
    return 1.0 - 1.0 / a_norm2


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _check_norm_L(a_norm2, L, L_min):
    if int(a_norm2) != a_norm2 or a_norm2 < 2:
        raise InvalidInputError("a_norm2 must be an integer >= 2")
    if int(L) != L or L < L_min:
        raise InvalidInputError(f"L must be an integer >= {L_min}")


def unit_pref_bound_beta(a_norm2: int, L: int) -> float:
    """Upper bound ``1 - I_{1-1/||a||^2}(1/2, (L-1)/2)`` on P(f(a) <= min_i f(e_i))."""
    _check_norm_L(a_norm2, L, 2)
    # 1 - I_x(a, b) = I_{1-x}(b, a) keeps precision in the far tail
    return reg_inc_beta(1.0 - phi_a(a_norm2), (L - 1) / 2.0, 0.5)


def unit_pref_bound_exp(a_norm2: int, L: int) -> float:
    """Exponential bound ``(1/||a||^2)^((L-1)/2 - 1)``; needs ``L > 3``."""
    if int(L) == L and L <= 3:
        raise BoundDomainError("exponential bound requires L > 3")
    _check_norm_L(a_norm2, L, 4)
    return float(a_norm2) ** (-((L - 1) / 2.0 - 1.0))


def u_delta(L: int) -> tuple[float, float]:
    """Channel-gain window ``[u, u + delta]`` used by the scheduled-rate bound."""
    if L < 2:
        raise BoundDomainError("u_delta needs L >= 2")
    delta = 1.0 / math.log(L)
    inner = delta * math.sqrt(L) / math.sqrt(2.0 * math.pi)
    if inner <= 1.0:
        raise BoundDomainError(f"u_delta undefined at L={L}: log argument {inner:.4g} <= 1")
    return math.sqrt(2.0 * math.log(inner)) - delta, delta


def p_interval(u: float, delta: float) -> float:
    """``2 (Phi(u + delta) - Phi(u))``: probability that ``|h|`` lands in the window."""
    if u < 0 or not delta > 0:
        raise InvalidInputError("p_interval needs u >= 0 and delta > 0")
    # erfc form avoids cancellation in the upper tail
    s = math.sqrt(2.0)
    return math.erfc(u / s) - math.erfc((u + delta) / s)


def pr_xi_lower(L: int, k: int, p: float) -> float:
    """Chernoff lower bound on P(at least k window users in each of L slots)."""
    if not 0 < p <= 1:
        raise InvalidInputError("p must lie in (0, 1]")
    excess = L * p - (k - 1)
    if excess < 0:
        raise BoundDomainError(f"Chernoff bound needs L p >= k - 1 (L p = {L * p:.4g}, k = {k})")
    if p == 1.0 and k <= L:
        # every gain lands in the window: the event is certain
        return 1.0
    tail = math.exp(-excess * excess / (2.0 * p * L))
    if tail >= 1.0:
        return 0.0
    return math.exp(L * math.log1p(-tail))


def rate_lb_theorem5(L: int, P: float) -> float:
    """Lower bound on the expected per-slot rate of the window scheduler.

    ``k = ceil(ln L) + 1``; the vanishing term is the finite-L Chernoff
    factor :func:`pr_xi_lower`, so the value is a curve, not an estimate.
    """
    if P <= 0:
        raise InvalidInputError("power must be positive")
    k = choose_k(L)
    u, delta = u_delta(L)
    if u < 0:
        raise BoundDomainError(f"window lower edge u = {u:.4g} < 0 at L={L}")
    p = p_interval(u, delta)
    xi = pr_xi_lower(L, k, p)
    shrink = P * k * u**4 / ((u + delta) ** 2 * (1.0 + P * k * u * u))
    arg = k * (1.0 - shrink * xi)
    if arg <= 0:
        return 0.0
    return max(0.0, -0.5 * math.log2(arg))


def sumrate_ub_theorem7(L: int, P: float) -> float:
    """Asymptotic ceiling on the expected sum-rate of any single-relay schedule."""
    if L < 3:
        raise BoundDomainError("sumrate_ub_theorem7 needs L >= 3")
    if P <= 0:
        raise InvalidInputError("power must be positive")
    emax = 2 * math.log(L) - math.log(math.log(L)) - math.log(math.pi) + EULER_GAMMA / 2
    return 0.5 * math.log2(1.0 + P * emax)


def outage_estimate(
    L: int, P: float, R: float, trials: int, rng: np.random.Generator, M: int = 1, k: int | None = None
) -> float:
    """Monte Carlo probability that the weakest of ``L - 1`` scheduled slots falls below ``R``.

    Each slot draws fresh channels for ``M`` relays.  The window is chosen on
    relay 0; every relay decodes the sign-matched all-ones vector on those
    users and the slot rate is the smallest of the ``M`` rates.
    """
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    if M < 1:
        raise InvalidInputError("relay count must be at least 1")
    k = choose_k(L) if k is None else k
    ones = np.ones(k, dtype=np.int64)
    outages = 0
    for _ in range(trials):
        worst = math.inf
        for _slot in range(L - 1):
            H = rng.standard_normal((M, L))
            slot = schedule_slot(H[0], k, P)
            rate = slot.rate
            users = list(slot.users)
            for m in range(1, M):
                hm = H[m, users]
                rate = min(rate, computation_rate(hm, sign_match(ones, hm), P))
            worst = min(worst, rate)
            if worst < R:
                break
        outages += worst < R
    return outages / trials
