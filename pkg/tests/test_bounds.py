import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import betainc

from cfsched.bounds import (
    normal_cdf,
    outage_estimate,
    p_interval,
    phi_a,
    pr_xi_lower,
    rate_lb_theorem5,
    reg_inc_beta,
    sumrate_ub_theorem7,
    u_delta,
    unit_pref_bound_beta,
    unit_pref_bound_exp,
)
from cfsched.errors import BoundDomainError, InvalidInputError


def test_reg_inc_beta_examples():
    assert reg_inc_beta(1.0, 2.0, 3.0) == 1.0
    assert reg_inc_beta(0.0, 2.0, 3.0) == 0.0
    assert reg_inc_beta(0.5, 0.5, 0.5) == pytest.approx(0.5, abs=1e-14)
    assert reg_inc_beta(0.5, 0.5, 1.0) == pytest.approx(math.sqrt(0.5), abs=1e-14)
    with pytest.raises(InvalidInputError):
        reg_inc_beta(1.5, 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        reg_inc_beta(0.5, 0.0, 1.0)


@given(st.floats(0, 1), st.floats(0.05, 200), st.floats(0.05, 200))
def test_reg_inc_beta_matches_scipy(x, a, b):
    assert reg_inc_beta(x, a, b) == pytest.approx(betainc(a, b, x), abs=1e-12)


# 1 - x must be exact in floating point, else the identity is off by rounding
@given(st.floats(0, 1).filter(lambda x: 1 - (1 - x) == x), st.floats(0.05, 60), st.floats(0.05, 60))
def test_reg_inc_beta_reflection(x, a, b):
    assert reg_inc_beta(x, a, b) + reg_inc_beta(1 - x, b, a) == pytest.approx(1.0, abs=1e-10)


def test_unit_pref_bounds_examples():
    assert unit_pref_bound_beta(2, 3) == pytest.approx(1 - math.sqrt(0.5), abs=1e-12)
    assert unit_pref_bound_exp(4, 10) == pytest.approx(0.0078125, rel=1e-14)
    assert unit_pref_bound_exp(2, 5) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(BoundDomainError):
        unit_pref_bound_exp(2, 3)
    with pytest.raises(InvalidInputError):
        unit_pref_bound_beta(1, 10)
    assert phi_a(2) == 0.5


def test_unit_pref_beta_bound_monotone_in_L():
    for n2 in (2, 3, 6):
        vals = [unit_pref_bound_beta(n2, L) for L in range(4, 101)]
        assert all(0 <= v <= 1 for v in vals)
        assert all(b < a for a, b in zip(vals, vals[1:]) if a > 1e-300)


def test_unit_pref_bound_matches_scipy_oracle():
    for n2 in (2, 3, 6):
        for L in (2, 4, 10, 40):
            assert unit_pref_bound_beta(n2, L) == pytest.approx(
                1 - betainc(0.5, (L - 1) / 2, 1 - 1 / n2), abs=1e-14
            )


def test_u_delta():
    u, d = u_delta(10_000)
    assert d == pytest.approx(0.10857, abs=5e-6)
    assert u == pytest.approx(1.6037, abs=5e-5)
    Ls = np.logspace(3, 7, 25)
    pairs = [u_delta(L) for L in Ls]
    assert all(b[0] > a[0] and b[1] < a[1] for a, b in zip(pairs, pairs[1:]))
    with pytest.raises(BoundDomainError):
        u_delta(150)


def test_p_interval():
    assert p_interval(0.0, math.inf) == 1.0
    assert p_interval(1.0, 1e-300) == pytest.approx(0.0, abs=1e-200)
    assert p_interval(0.5, 0.3) == pytest.approx(2 * (normal_cdf(0.8) - normal_cdf(0.5)), abs=1e-14)
    for L in np.logspace(3, 8, 30):
        u, d = u_delta(L)
        assert p_interval(u, d) >= 2 / math.sqrt(L)


def test_pr_xi_lower():
    assert pr_xi_lower(10, 1, 1.0) == pytest.approx(1.0)
    # (1 - e^{-5.625})^100 evaluated independently
    expect = (1 - math.exp(-(20 - 5) ** 2 / 40)) ** 100
    assert expect == pytest.approx(0.69676, abs=1e-5)
    assert pr_xi_lower(100, 6, 0.2) == pytest.approx(expect, rel=1e-12)
    with pytest.raises(BoundDomainError):
        pr_xi_lower(10, 6, 0.1)


def test_pr_xi_tends_to_one():
    vals = []
    for L in (1e5, 1e6, 1e7, 1e8):
        u, d = u_delta(L)
        vals.append(pr_xi_lower(int(L), math.ceil(math.log(L)) + 1, p_interval(u, d)))
    assert vals == sorted(vals) and vals[-1] > 0.99


def test_sumrate_ub():
    expect = 0.5 * math.log2(1 + 1000 * (2 * math.log(100) - math.log(math.log(100)) - math.log(math.pi) + 0.5772156649 / 2))
    assert sumrate_ub_theorem7(100, 1000) == pytest.approx(expect, rel=1e-9)
    assert sumrate_ub_theorem7(100, 1000) == pytest.approx(6.369, abs=1e-3)
    Ls = [10, 100, 1000, 10**5]
    assert np.all(np.diff([sumrate_ub_theorem7(L, 10) for L in Ls]) > 0)
    assert np.all(np.diff([sumrate_ub_theorem7(100, P) for P in (1, 10, 100)]) > 0)
    with pytest.raises(BoundDomainError):
        sumrate_ub_theorem7(2, 10)


def test_rate_lb_theorem5():
    vals = [rate_lb_theorem5(L, 1000) for L in (10**4, 10**5, 10**6, 10**7)]
    assert vals[2] > 0
    assert vals[2] < sumrate_ub_theorem7(10**6, 1000)
    positive = [v for v in vals if v > 0]
    assert positive == sorted(positive)
    for L in (10**4, 10**5, 10**6, 10**7):
        for P in (1, 10, 1000):
            lb = rate_lb_theorem5(L, P)
            assert lb >= 0 and (lb == 0 or lb <= sumrate_ub_theorem7(L, P))


def test_outage_extremes():
    rng = np.random.default_rng(1)
    assert outage_estimate(10, 1.0, 0.0, 20, rng) == 0.0
    assert outage_estimate(10, 1.0, math.inf, 20, rng) == 1.0
    assert 0.0 <= outage_estimate(10, 1.0, 0.5, 20, rng, M=2) <= 1.0
    with pytest.raises(InvalidInputError):
        outage_estimate(10, 1.0, 0.5, 0, rng)
