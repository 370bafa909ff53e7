import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import beliefgames as bg
from beliefgames.beliefs import Belief, BeliefDriftError, MixedAction, TransitionAtom


def test_marginal_type_independent(rng):
    row = np.array([0.3, 0.7])
    x = np.tile(row, (3, 1))
    for _ in range(20):
        p = rng.dirichlet(np.ones(3))
        assert np.allclose(bg.action_marginal(x, p), row, atol=1e-15)


def test_marginal_hand_case_and_monte_carlo(rng):
    p = np.array([0.5, 0.5])
    x = np.array([[1.0, 0.0], [0.5, 0.5]])
    marg = bg.action_marginal(x, p)
    assert marg[0] == pytest.approx(0.75, abs=1e-15)
    n = 10**6
    ks = rng.random(n) < 0.5  # True -> k2
    u = rng.random(n)
    plays_i1 = np.where(ks, u < 0.5, True)
    freq = plays_i1.mean()
    se = np.sqrt(0.75 * 0.25 / n)
    assert abs(freq - 0.75) < 3 * se


def test_marginal_dirac_prior():
    x = np.array([[0.2, 0.8], [0.6, 0.4]])
    assert np.allclose(bg.action_marginal(x, [0.0, 1.0]), x[1], atol=0)


def test_marginal_dim_mismatch():
    with pytest.raises(ValueError):
        bg.action_marginal(np.ones((2, 2)) / 2, np.ones(3) / 3)


def test_posterior_type_independent(rng):
    x = np.tile(np.array([0.3, 0.7]), (2, 1))
    p = np.array([0.4, 0.6])
    for i in range(2):
        assert np.allclose(bg.bayes_posterior(x, p, i), p, atol=1e-15)


def test_posterior_hand_case_and_monte_carlo(rng):
    p = np.array([0.5, 0.5])
    x = np.array([[1.0, 0.0], [0.5, 0.5]])
    post = bg.bayes_posterior(x, p, 0)
    assert post[0] == pytest.approx(2.0 / 3.0, abs=1e-12)
    n = 10**6
    k2 = rng.random(n) < 0.5
    plays_i1 = np.where(k2, rng.random(n) < 0.5, True)
    cond = (~k2[plays_i1]).mean()
    se = np.sqrt((2 / 3) * (1 / 3) / plays_i1.sum())
    assert abs(cond - 2 / 3) < 3 * se


def test_posterior_zero_probability_convention():
    p = np.array([0.5, 0.5])
    x = np.array([[1.0, 0.0], [1.0, 0.0]])
    assert np.allclose(bg.bayes_posterior(x, p, 1), p, atol=0)


def test_transition_type_independent_beliefs_fixed(rng):
    spec = bg.random_game(rng, n_k=2, n_l=2, n_omega=3)
    p = rng.dirichlet(np.ones(2))
    q = rng.dirichlet(np.ones(2))
    x = np.tile(rng.dirichlet(np.ones(spec.n_i)), (2, 1))
    y = np.tile(rng.dirichlet(np.ones(spec.n_j)), (2, 1))
    atoms = bg.belief_transition(spec, p, q, 0, x, y)
    for a in atoms:
        assert np.allclose(a.p, p, atol=1e-15)
        assert np.allclose(a.q, q, atol=1e-15)
    marg = np.zeros(spec.n_omega)
    for a in atoms:
        marg[a.omega] += a.prob
    expect = np.einsum("i,j,ijw->w", x[0], y[0], spec.rho[0])
    assert np.allclose(marg, expect, atol=1e-12)


def test_transition_single_type_reduces_to_kernel(rng):
    spec = bg.random_game(rng, n_k=1, n_l=1, n_omega=3)
    x = rng.dirichlet(np.ones(spec.n_i), size=1)
    y = rng.dirichlet(np.ones(spec.n_j), size=1)
    atoms = bg.belief_transition(spec, [1.0], [1.0], 0, x, y)
    marg = np.zeros(spec.n_omega)
    for a in atoms:
        marg[a.omega] += a.prob
    assert np.allclose(marg, np.einsum("i,j,ijw->w", x[0], y[0], spec.rho[0]), atol=1e-14)


def test_transition_martingale_conservation(rng):
    for _ in range(10**3):
        nk = int(rng.integers(1, 4))
        nl = int(rng.integers(1, 3))
        spec = bg.random_game(rng, n_k=nk, n_l=nl, n_omega=2, n_i=2, n_j=2)
        p = rng.dirichlet(np.ones(nk))
        q = rng.dirichlet(np.ones(nl))
        x = rng.dirichlet(np.ones(2), size=nk)
        y = rng.dirichlet(np.ones(2), size=nl)
        atoms = bg.belief_transition(spec, p, q, 0, x, y)
        total = sum(a.prob for a in atoms)
        assert abs(total - 1.0) < 1e-12
        mean_p = sum(a.prob * a.p for a in atoms)
        mean_q = sum(a.prob * a.q for a in atoms)
        assert np.abs(mean_p - p).max() < 1e-12
        assert np.abs(mean_q - q).max() < 1e-12


def test_payoff_constant_game():
    rho = np.ones((1, 2, 2, 1))
    g = np.full((2, 2, 1, 2, 2), 0.37)
    spec = bg.games.GameSpec(("a", "b"), ("c", "d"), ("w",), ("i1", "i2"), ("j1", "j2"), rho, g)
    x = np.array([[0.2, 0.8], [0.6, 0.4]])
    y = np.array([[0.9, 0.1], [0.5, 0.5]])
    val = bg.stage_payoff(spec, [0.3, 0.7], [0.4, 0.6], 0, x, y)
    assert val == pytest.approx(0.37, abs=1e-15)


def test_payoff_dirac_pure(rng):
    spec = bg.random_game(rng, n_k=2, n_l=2)
    x = np.zeros((2, 2))
    x[:, 1] = 1.0
    y = np.zeros((2, 2))
    y[:, 0] = 1.0
    val = bg.stage_payoff(spec, [0.0, 1.0], [1.0, 0.0], 0, x, y)
    assert val == pytest.approx(spec.g[1, 0, 0, 1, 0], abs=1e-15)


def test_payoff_monte_carlo(rng):
    spec = bg.random_game(rng, n_k=2, n_l=2, n_omega=1, n_i=2, n_j=2)
    p = np.array([0.3, 0.7])
    q = np.array([0.6, 0.4])
    x = rng.dirichlet(np.ones(2), size=2)
    y = rng.dirichlet(np.ones(2), size=2)
    exact = bg.stage_payoff(spec, p, q, 0, x, y)
    n = 10**6
    ks = rng.choice(2, size=n, p=p)
    ls = rng.choice(2, size=n, p=q)
    us = rng.random(n)
    vs = rng.random(n)
    i_draw = (us > x[ks, 0]).astype(int)
    j_draw = (vs > y[ls, 0]).astype(int)
    samples = spec.g[ks, ls, 0, i_draw, j_draw]
    se = samples.std(ddof=1) / np.sqrt(n)
    assert abs(samples.mean() - exact) < 3 * se


def test_in_frontier_cases():
    assert not bg.in_frontier(np.full(4, 0.25), 0.2)
    assert bg.in_frontier(np.array([0.0, 1.0]), 0.0)
    assert bg.in_frontier(np.array([0.3, 0.7]), 0.3)  # boundary inclusive


def test_belief_accessors():
    b = Belief(np.array([0.5, 0.0, 0.5]))
    assert list(b.support) == [0, 2]
    assert b.min_positive == 0.5
    assert b.inv_sup_norm == 2.0
    with pytest.raises(ValueError):
        Belief(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        MixedAction(np.array([[0.5, 0.6]]))


def test_posterior_permutation_equivariance(rng):
    nk, ni = 3, 3
    x = rng.dirichlet(np.ones(ni), size=nk)
    p = rng.dirichlet(np.ones(nk))
    perm_k = rng.permutation(nk)
    perm_i = rng.permutation(ni)
    xbar, posts = bg.posterior_table(x, p)
    xbar2, posts2 = bg.posterior_table(x[perm_k][:, perm_i], p[perm_k])
    assert np.allclose(xbar2, xbar[perm_i], atol=1e-15)
    assert np.allclose(posts2, posts[perm_i][:, perm_k], atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_martingale_conservation_property(seed):
    r = np.random.default_rng(seed)
    nk = int(r.integers(1, 5))
    ni = int(r.integers(1, 5))
    x = r.dirichlet(np.ones(ni), size=nk)
    p = r.dirichlet(np.ones(nk))
    xbar, posts = bg.posterior_table(x, p)
    assert np.abs(xbar @ posts - p).max() < 1e-12
