import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpcstab.channel import Channel
from ldpcstab.degseq import EULER_GAMMA, ValidationError, cycle_pair
from ldpcstab.universal import (LIMIT_F1_AT_EPS, beta_theta, bsc_matched, check_universality_violation,
                                choose_l, equibounded_check, error_prob_power, f, f_double_prime, f_prime,
                                poisson_f1_eps_envelope, xi_bound)

kinds = st.sampled_from(["poisson", "right_regular"])
Ns = st.sampled_from([2 ** 7, 2 ** 9, 2 ** 11])
epss = st.sampled_from([0.3, 0.5, 0.7])


def test_limit_constant():
    assert LIMIT_F1_AT_EPS == pytest.approx(1 - math.exp(-math.exp(-EULER_GAMMA)), abs=1e-15)


@given(Ns, epss)
def test_poisson_slope_at_zero(N, eps):
    assert f_prime("poisson", N, eps, 0.0) == pytest.approx(1.0, abs=1e-12)


@given(kinds, Ns, epss)
def test_curvature_vanishes_at_zero(kind, N, eps):
    assert abs(f_double_prime(kind, N, eps, 0.0)) < 1e-12


@given(kinds, Ns, epss)
def test_f_bounded_by_eps(kind, N, eps):
    x = np.linspace(0, 1, 65)
    vals = f(kind, N, eps, x)
    assert np.all(vals <= eps + 1e-12) and np.all(vals >= -1e-15)
    assert np.all(np.diff(vals) >= -1e-12)


@pytest.mark.parametrize("kind", ["poisson", "right_regular"])
def test_derivatives_match_finite_differences(kind):
    N, eps, h = 2 ** 9, 0.5, 1e-5
    for x in (0.1, 0.3, 0.6):
        fd1 = (f(kind, N, eps, x + h) - f(kind, N, eps, x - h)) / (2 * h)
        fd2 = (f_prime(kind, N, eps, x + h) - f_prime(kind, N, eps, x - h)) / (2 * h)
        assert f_prime(kind, N, eps, x) == pytest.approx(fd1, rel=1e-6, abs=1e-9)
        assert f_double_prime(kind, N, eps, x) == pytest.approx(fd2, rel=1e-5, abs=1e-7)


def test_poisson_envelope_contains_value():
    for k in (7, 9, 11, 15):
        N = 2 ** k
        lo, hi = poisson_f1_eps_envelope(N)
        assert lo <= f_prime("poisson", N, 0.5, 0.5) <= hi


def test_equibounded_poisson_within_bound():
    res = equibounded_check("poisson", 0.5, 0.25, 2 ** 11)
    assert res.verdict and len(res.sups) == len(res.bounds)


def test_equibounded_rejects_kappa():
    with pytest.raises(ValidationError):
        equibounded_check("poisson", 0.5, 0.6, 2 ** 9)


def test_xi_bound_oracle():
    # by hand at mu = 2, l = 1: beta = (1, 2 - 2/4), theta = (2/8, 4/8)
    beta, theta = beta_theta(2.0, 1)
    assert np.allclose(beta, [1.0, 1.5])
    assert np.allclose(theta, [0.25, 0.5])
    assert xi_bound(2.0, 1, 0.5) == pytest.approx(0.125)


def test_choose_l_cycle():
    # E(BEC(0.8)) mu = 0.4 * 2 < 1 at l = 1; l = 2 gives 0.32 * 4 > 1 and l = 3 gives 0.256 * 8 > 1
    assert choose_l(Channel("BEC", 0.8), cycle_pair().mu) == 2
    with pytest.raises(ValidationError):
        choose_l(Channel("BEC", 0.4), 2.0)


def test_error_prob_power_generic_route():
    c = Channel("BSC", 0.2)
    assert error_prob_power(c.density(), 3) == pytest.approx(error_prob_power(c, 3), abs=1e-12)


@given(st.floats(0.01, 0.99))
def test_matched_bsc_exceeds_eps(eps):
    c = bsc_matched(eps)
    assert c.bhattacharyya() > eps
    assert check_universality_violation("poisson", eps, c).violated
