"""Bregman divergences of -Phi and the conditional/marginal regret decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import JointDistTree, enumerate_paths, p_regret_exact
from .errors import InvalidArgumentError, ResourceLimitError
from .game import DEFAULT_TIE_TOL, Game, SimplexDist, _as_weights, selected_action
from .games import DEFAULT_BUDGET, compositions, multinomial_pmf, n_compositions


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    # index of the action whose loss vector served as the subgradient;
    # None for continuum games where the minimizer is off the action grid
    subgradient_used: int | None


def subgradient_loss(game: Game, p, action: int | None = None, tie_tol: float = DEFAULT_TIE_TOL):
    """Loss vector used as the (negated) subgradient of -Phi at p, and its action index."""
    if action is not None:
        return game.loss[:, action], action
    if game.continuum:
        return game.minimizer_loss_vector(p), None
    f = selected_action(game, p, tie_tol)
    return game.loss[:, f], f


def bregman_divergence(game: Game, q, p, action: int | None = None, tie_tol: float = DEFAULT_TIE_TOL) -> DivergenceValue:
    """D(q, p) = <loss of the minimizer at p, q> - Phi(q).

    ``action`` overrides the tie-break rule; it must then minimize the
    expected loss at p for the result to be a Bregman divergence.
    """
    qw, pw = _as_weights(q), _as_weights(p)
    if qw.shape != pw.shape or qw.shape != (game.n_outcomes,):
        raise InvalidArgumentError("distributions must both have one weight per outcome")
    v, f = subgradient_loss(game, pw, action, tie_tol)
    return DivergenceValue(float(qw @ v - game.phi_batch(qw[None, :])[0]), f)


def divergence_rows(game: Game, Q: np.ndarray, p) -> np.ndarray:
    """D(q, p) for every row q of ``Q`` against a single p."""
    v, _ = subgradient_loss(game, p)
    return np.atleast_2d(Q) @ v - game.phi_batch(Q)


def divergence_pairs(game: Game, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
    """D(Q[i], P[i]) row by row."""
    Q, P = np.atleast_2d(Q), np.atleast_2d(P)
    uniq, inv = np.unique(P, axis=0, return_inverse=True)
    V = np.array([subgradient_loss(game, p)[0] for p in uniq])[inv.ravel()]
    return np.einsum("ij,ij->i", Q, V) - game.phi_batch(Q)


def _fsum_rows(weights: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Compensated sum of weights[i] * rows[i] per coordinate."""
    prod = weights[:, None] * rows
    return np.array([math.fsum(prod[:, j]) for j in range(rows.shape[1])])


def marginals(joint: JointDistTree, game: Game | None = None, budget: int = DEFAULT_BUDGET) -> list:
    """Per-round marginals p_t^m = E p_t(. | history)."""
    if game is not None and game.n_outcomes != joint.n_outcomes:
        raise InvalidArgumentError("joint and game disagree on the number of outcomes")
    paths = enumerate_paths(joint, budget)
    out = []
    for lv in paths.levels:
        m = np.clip(_fsum_rows(lv.probs, lv.conditionals), 0.0, None)
        out.append(SimplexDist(m / m.sum()))
    return out


def iid_regret_as_divergence(game: Game, p, T: int, budget: int = DEFAULT_BUDGET) -> tuple[float, float]:
    """(E D(Unif, p), Reg(p^T) / T) computed along two independent routes."""
    pw = _as_weights(p)
    need = n_compositions(T, game.n_outcomes)
    if need > budget:
        raise ResourceLimitError("iid divergence compositions", need, budget)
    counts = compositions(T, game.n_outcomes)
    probs = multinomial_pmf(counts, pw)
    div = float(np.sum(probs * divergence_rows(game, counts / T, pw)))
    reg = p_regret_exact(game, JointDistTree.iid(pw, T), budget).value / T
    return div, reg


@dataclass(frozen=True)
class DecompositionReport:
    delta0: float
    delta1: float
    delta2: float
    regret_over_T: float
    residual: float
    marginals: tuple = ()
    average_marginal: np.ndarray | None = None

    @property
    def recombined(self) -> float:
        return -self.delta0 - self.delta1 + self.delta2


def decomposition(game: Game, joint: JointDistTree, budget: int = DEFAULT_BUDGET) -> DecompositionReport:
    """Split Reg/T into marginal drift, conditional spread and empirical deviation terms.

    delta0: mean over rounds of D(marginal_t, average marginal).
    delta1: mean over rounds of E D(conditional_t, marginal_t).
    delta2: E D(empirical distribution, average marginal).
    """
    T = joint.T
    paths = enumerate_paths(joint, budget)
    margs = []
    d1_terms = []
    for lv in paths.levels:
        m = _fsum_rows(lv.probs, lv.conditionals)
        margs.append(m)
        d1_terms.append(math.fsum(lv.probs * divergence_rows(game, lv.conditionals, m)))
    M = np.array(margs)
    pbar = np.array([math.fsum(M[:, j]) for j in range(M.shape[1])]) / T
    delta0 = math.fsum(divergence_rows(game, M, pbar)) / T
    delta1 = math.fsum(d1_terms) / T
    delta2 = math.fsum(paths.leaf_probs * divergence_rows(game, paths.leaf_counts / T, pbar))
    reg = p_regret_exact(game, joint, budget).value / T
    residual = abs(reg - (-delta0 - delta1 + delta2))
    return DecompositionReport(delta0, delta1, delta2, reg, residual, tuple(M), pbar)
