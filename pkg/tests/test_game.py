import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regretlab.errors import InvalidArgumentError
from regretlab.game import (
    Game,
    MixedAction,
    SimplexDist,
    empirical_distribution,
    loss_at,
    phi,
    restrict_actions,
    subdifferential,
    support_function,
    transform_losses,
)
from regretlab.games import experts_simple_game, quadratic_game, random_game

seeds = st.integers(0, 2**32 - 1)


def rand_game(seed, n_max=4, m_max=6):
    rng = np.random.default_rng(seed)
    return random_game(int(rng.integers(1, n_max + 1)), int(rng.integers(1, m_max + 1)), rng), rng


# -- types -------------------------------------------------------------------------


def test_simplex_validation():
    SimplexDist([0.25, 0.75])
    with pytest.raises(InvalidArgumentError):
        SimplexDist([0.5, 0.6])
    with pytest.raises(InvalidArgumentError):
        SimplexDist([-0.1, 1.1])
    with pytest.raises(InvalidArgumentError):
        MixedAction([0.2, 0.2])


def test_game_validation():
    with pytest.raises(InvalidArgumentError):
        Game(loss=[[np.inf, 0.0]])
    with pytest.raises(InvalidArgumentError):
        Game(loss=np.zeros((0, 2)))
    with pytest.raises(InvalidArgumentError):
        Game(loss=[[1.0, 2.0]], actions=("a",))
    with pytest.raises(InvalidArgumentError):
        Game(loss=[[1.0, 2.0]], action_coords=[[0.0], [1.0], [2.0]])
    with pytest.raises(InvalidArgumentError):
        Game(loss=[[1.0]], embedding_norm="taxicab")


def test_game_is_immutable():
    g = experts_simple_game(3)
    with pytest.raises(ValueError):
        g.loss[0, 0] = 5.0


# -- loss_at / empirical -------------------------------------------------------------


def test_loss_at_examples():
    q = quadratic_game()
    plus_one, f_one = 1, q.n_actions - 1
    assert loss_at(q, plus_one, f_one) == 0.0
    e = experts_simple_game(3)
    assert loss_at(e, 0, 0) == 1.0
    assert loss_at(e, 0, 1) == 0.0
    with pytest.raises(IndexError):
        loss_at(e, 3, 0)
    with pytest.raises(IndexError):
        loss_at(e, 0, -1)


def test_empirical_distribution_examples():
    g = experts_simple_game(2)
    np.testing.assert_allclose(empirical_distribution([0, 0, 1], g).weights, [2 / 3, 1 / 3])
    np.testing.assert_array_equal(empirical_distribution([0], g).weights, [1.0, 0.0])
    np.testing.assert_array_equal(empirical_distribution([0, 1, 0, 1], g).weights, [0.5, 0.5])
    with pytest.raises(InvalidArgumentError):
        empirical_distribution([], g)
    with pytest.raises(InvalidArgumentError):
        empirical_distribution([2], g)


# -- phi ------------------------------------------------------------------------------


def test_phi_examples():
    r = phi(experts_simple_game(3), [0.2, 0.3, 0.5])
    assert r.value == pytest.approx(0.2, abs=1e-15)
    assert r.argmin_indices == frozenset({0})
    q = quadratic_game()
    r = phi(q, [0.5, 0.5])
    assert r.value == pytest.approx(1.0, abs=1e-15)
    assert q.action_coords[r.selected, 0] == 0.0
    assert phi(q, [0.0, 1.0]).value == 0.0


def test_phi_exact_continuum_matches_grid_when_minimizer_on_grid():
    grid, exact = quadratic_game(), quadratic_game(exact=True)
    for p in ([0.5, 0.5], [0.25, 0.75], [1.0, 0.0], [0.625, 0.375]):
        assert phi(exact, p).value == pytest.approx(phi(grid, p).value, abs=1e-14)


def test_phi_exact_continuum_closed_form():
    g = quadratic_game(exact=True)
    for up in np.linspace(0, 1, 11):
        m = 2 * up - 1
        assert phi(g, [1 - up, up]).value == pytest.approx(1 - m * m, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_phi_point_mass_is_row_minimum(seed):
    g, rng = rand_game(seed)
    z = int(rng.integers(g.n_outcomes))
    p = np.zeros(g.n_outcomes)
    p[z] = 1.0
    assert phi(g, p).value == g.loss[z].min()


@settings(max_examples=200, deadline=None)
@given(seeds, st.floats(0, 1))
def test_phi_is_concave(seed, lam):
    g, rng = rand_game(seed)
    p, q = rng.dirichlet(np.ones(g.n_outcomes), size=2)
    mix = phi(g, lam * p + (1 - lam) * q).value
    assert mix >= lam * phi(g, p).value + (1 - lam) * phi(g, q).value - 1e-9


@settings(max_examples=100, deadline=None)
@given(seeds, st.floats(0, 1))
def test_phi_continuum_is_concave(seed, lam):
    g = quadratic_game(exact=True)
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(2), size=2)
    mix = phi(g, lam * p + (1 - lam) * q).value
    assert mix >= lam * phi(g, p).value + (1 - lam) * phi(g, q).value - 1e-12


# -- support function / subdifferential ------------------------------------------------


def test_support_function_examples():
    g = experts_simple_game(3)
    p = np.array([0.2, 0.3, 0.5])
    assert support_function(g, p) == pytest.approx(-phi(g, p).value, abs=1e-15)
    assert support_function(g, np.zeros(3)) == 0.0
    assert support_function(g, 2 * p) == pytest.approx(2 * support_function(g, p), abs=1e-15)
    with pytest.raises(InvalidArgumentError):
        support_function(g, [1.0, 0.0])


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_support_function_ordering_under_action_inclusion(seed):
    g, rng = rand_game(seed, m_max=8)
    keep = sorted(rng.choice(g.n_actions, size=int(rng.integers(1, g.n_actions + 1)), replace=False))
    small = restrict_actions(g, keep)
    x = rng.normal(size=g.n_outcomes)
    assert support_function(small, x) <= support_function(g, x) + 1e-12
    p = rng.dirichlet(np.ones(g.n_outcomes))
    assert phi(small, p).value >= phi(g, p).value - 1e-12


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_support_function_linear_transformation(seed):
    g, rng = rand_game(seed)
    n = g.n_outcomes
    A = rng.normal(size=(n, n)) + n * np.eye(n)
    y = rng.normal(size=n)
    assert support_function(transform_losses(g, A), y) == pytest.approx(support_function(g, A.T @ y), abs=1e-9)


def test_subdifferential_examples():
    e = experts_simple_game(2)
    sub = subdifferential(e, [0.5, 0.5])
    assert len(sub) == 2
    assert {tuple(v) for v in sub} == {(1.0, 0.0), (0.0, 1.0)}
    sub = subdifferential(e, [0.3, 0.7])
    assert [tuple(v) for v in sub] == [(1.0, 0.0)]
    q = quadratic_game()
    for up in (0.1, 0.37, 0.5, 0.9):
        assert len(subdifferential(q, [1 - up, up])) == 1


def test_tie_break_selects_lowest_index():
    e = experts_simple_game(4)
    assert phi(e, [0.25] * 4).selected == 0
    assert phi(e, [0.4, 0.2, 0.2, 0.2]).selected == 1


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_subgradient_inequality(seed):
    g, rng = rand_game(seed)
    p = rng.dirichlet(np.ones(g.n_outcomes))
    # a tied point as well, to exercise non-differentiable p
    p_tied = np.full(g.n_outcomes, 1.0 / g.n_outcomes)
    for base in (p, p_tied):
        for v in subdifferential(g, base):
            for q in rng.dirichlet(np.ones(g.n_outcomes), size=5):
                assert -phi(g, q).value >= -phi(g, base).value + (-v) @ (q - base) - 1e-9
