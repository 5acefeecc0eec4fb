
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpcstab.degseq import (RR_L2_LIMITS, DegreePair, ValidationError, check_harmonic_bounds,
                             cycle_pair, edge_to_node, harmonic, heavy_tail_poisson, node_to_edge,
                             regular_pair, residual, residual_mu_lower_bound, right_regular,
                             rr_inverse_mu_bounds, rr_lambda_alpha, rr_lambda_bound_check)

Ns = st.sampled_from([2 ** 7, 2 ** 9, 2 ** 11, 2 ** 13])
epss = st.sampled_from([0.3, 0.5, 0.7])


def test_regular_basics():
    p = regular_pair(3, 6)
    assert p.design_rate == pytest.approx(0.5)
    assert p.lambda_prime0 == 0.0
    assert p.rho_prime1 == 5.0
    c = cycle_pair()
    assert c.mu == 2.0 and c.L2 == 1.0


def test_bad_distributions_rejected():
    with pytest.raises(ValidationError):
        DegreePair({2: 0.5}, {3: 1.0})
    with pytest.raises(ValidationError):
        DegreePair([0.5, 0.5], [0.0, 1.0])
    with pytest.raises(ValidationError):
        heavy_tail_poisson(2, 1.5)


def test_text_round_trip():
    p = right_regular(2 ** 7, 0.5)
    q = DegreePair.from_text(p.to_text())
    assert np.allclose(p.lam, q.lam, atol=0, rtol=1e-15)
    assert np.array_equal(p.rho, q.rho)


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8))
def test_node_edge_inverse(ws):
    lam = np.zeros(len(ws) + 2)
    lam[2:] = np.array(ws) / sum(ws)
    back = node_to_edge(edge_to_node(lam))
    assert np.allclose(back, lam, atol=1e-12)


@given(st.integers(2, 5000))
def test_harmonic_bounds(N):
    assert check_harmonic_bounds(N)


def test_harmonic_small():
    assert harmonic(1) == 1.0 and harmonic(3) == pytest.approx(11 / 6, abs=1e-15)


@given(Ns, epss)
def test_capacity_product_is_inverse_eps(N, eps):
    # eps λ'(0) ρ'(1) = 1 for both sequences
    for p in (heavy_tail_poisson(N, eps),):
        assert eps * p.mu == pytest.approx(1.0, abs=1e-12)
    p = right_regular(N, eps)
    assert p.mu * rr_lambda_alpha(N, eps) == pytest.approx(1.0, abs=1e-12)


@given(Ns, epss)
def test_rr_bounds(N, eps):
    lo, hi = rr_inverse_mu_bounds(N, eps)
    assert lo <= rr_lambda_alpha(N, eps) <= hi
    assert rr_lambda_bound_check(N, eps)


def test_rr_L2_limits_in_range():
    lo, hi = RR_L2_LIMITS
    assert lo == pytest.approx(0.4664, abs=1e-4) and hi == pytest.approx(0.5522, abs=1e-4)


def test_residual_zero_budget_keeps_pair():
    p = heavy_tail_poisson(2 ** 7, 0.5)
    r = residual(p)
    assert np.allclose(r.lam_hat, p.lam, atol=1e-12)
    assert r.lambda_prime0 == pytest.approx(p.lambda_prime0)


@given(st.floats(0.0, 0.05))
def test_residual_mu_above_lower_bound(e):
    p = cycle_pair()
    top = p.max_check_degree
    phi = np.zeros(3)
    psi = np.zeros(top + 1)
    m = min(e, 2 * p.L[2], top * p.R[top] * (1 - p.design_rate))
    phi[2] = psi[top] = m
    res = residual(p, phi, psi, e)
    assert res.mu >= residual_mu_lower_bound(p, e) - 1e-12


def test_residual_budget_enforced():
    p = cycle_pair()
    with pytest.raises(ValidationError):
        residual(p, {2: 0.1}, {3: 0.1}, eps=0.05)
    with pytest.raises(ValidationError):
        residual(p, {2: 0.1}, {3: 0.05}, eps=0.2)
