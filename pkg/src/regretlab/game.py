"""Finite games, distributions over outcomes, the minimum-expected-loss functional
and the support-function view of the loss class.

A game is a dense loss matrix ``loss[z, f]`` over a finite outcome set and a
finite action set.  Continuous action sets are represented by grids; the
quadratic game may additionally declare an exact continuum minimizer so that
identities which only hold for the continuous action set can be checked to
round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError

DEFAULT_TIE_TOL = 1e-9
SIMPLEX_TOL = 1e-12

NORMS = ("euclidean", "sup", "abs-1d")


def _as_weights(p) -> np.ndarray:
    if isinstance(p, (SimplexDist, MixedAction)):
        return p.weights
    return np.asarray(p, dtype=float)


def _check_simplex(w: np.ndarray, what: str) -> None:
    if w.ndim != 1 or w.size == 0:
        raise InvalidArgumentError(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(w)):
        raise InvalidArgumentError(f"{what} has non-finite weights")
    if np.any(w < 0):
        raise InvalidArgumentError(f"{what} has negative weights: min={w.min()!r}")
    if abs(w.sum() - 1.0) > SIMPLEX_TOL * max(1, w.size):
        raise InvalidArgumentError(f"{what} weights sum to {w.sum()!r}, not 1")


@dataclass(frozen=True, eq=False)
class SimplexDist:
    """Probability vector over the outcomes of a game."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        _check_simplex(w, "SimplexDist")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "SimplexDist":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, z: int) -> "SimplexDist":
        w = np.zeros(n)
        w[z] = 1.0
        return cls(w)

    def __len__(self) -> int:
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


@dataclass(frozen=True, eq=False)
class MixedAction:
    """Probability vector over the actions of a game (randomized player move)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        _check_simplex(w, "MixedAction")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


@dataclass(frozen=True)
class PhiResult:
    value: float
    argmin_indices: frozenset[int]

    @property
    def selected(self) -> int:
        """Deterministic subgradient selection: lowest index among minimizers."""
        return min(self.argmin_indices)


@dataclass(frozen=True, eq=False)
class Game:
    """A finite online game with loss matrix ``loss[z, f]``.

    ``continuum="quadratic"`` marks a one-dimensional squared-loss game whose
    action set is really the interval spanned by the action grid.  The grid is
    still used wherever a finite action set is required (matrix-game solves,
    geometry); :meth:`phi_batch` and :meth:`minimizer_loss_vector` use the
    closed-form interval minimizer instead.
    """

    loss: np.ndarray
    outcomes: tuple = ()
    actions: tuple = ()
    outcome_coords: np.ndarray | None = None
    action_coords: np.ndarray | None = None
    embedding_norm: str | None = None
    name: str = "custom"
    continuum: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        L = np.array(self.loss, dtype=float)
        if L.ndim != 2 or L.shape[0] < 1 or L.shape[1] < 1:
            raise InvalidArgumentError("loss must be a non-empty 2-D matrix [outcome][action]")
        if not np.all(np.isfinite(L)):
            raise InvalidArgumentError("loss entries must be finite")
        L.setflags(write=False)
        object.__setattr__(self, "loss", L)
        n_z, n_f = L.shape
        outcomes = tuple(self.outcomes) or tuple(f"z{i}" for i in range(n_z))
        actions = tuple(self.actions) or tuple(f"f{j}" for j in range(n_f))
        if len(outcomes) != n_z or len(actions) != n_f:
            raise InvalidArgumentError(
                f"label counts ({len(outcomes)}, {len(actions)}) do not match loss shape {L.shape}"
            )
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "actions", actions)
        for attr, n in (("outcome_coords", n_z), ("action_coords", n_f)):
            c = getattr(self, attr)
            if c is None:
                continue
            c = np.array(c, dtype=float)
            if c.ndim == 1:
                c = c[:, None]
            if c.shape[0] != n:
                raise InvalidArgumentError(f"{attr} has {c.shape[0]} rows, expected {n}")
            c.setflags(write=False)
            object.__setattr__(self, attr, c)
        if self.embedding_norm is not None and self.embedding_norm not in NORMS:
            raise InvalidArgumentError(f"unknown embedding_norm {self.embedding_norm!r}")
        if self.continuum not in (None, "quadratic"):
            raise InvalidArgumentError(f"unknown continuum {self.continuum!r}")
        if self.continuum == "quadratic" and (
            self.outcome_coords is None or self.action_coords is None or self.outcome_coords.shape[1] != 1
        ):
            raise InvalidArgumentError("quadratic continuum needs 1-D outcome and action coordinates")

    @property
    def n_outcomes(self) -> int:
        return self.loss.shape[0]

    @property
    def n_actions(self) -> int:
        return self.loss.shape[1]

    # -- batched primitives used by the engines ---------------------------------

    def expected_losses(self, W) -> np.ndarray:
        """Expected loss of every action under each row of ``W``."""
        return np.asarray(W, dtype=float) @ self.loss

    def phi_batch(self, W) -> np.ndarray:
        """Minimum expected loss for each row of the weight matrix ``W``."""
        W = np.atleast_2d(np.asarray(W, dtype=float))
        if self.continuum == "quadratic":
            z = self.outcome_coords[:, 0]
            mean = W @ z
            var = W @ (z * z) - mean * mean
            lo, hi = self.action_coords[:, 0].min(), self.action_coords[:, 0].max()
            clipped = np.clip(mean, lo, hi)
            return np.maximum(var, 0.0) + (mean - clipped) ** 2
        return self.expected_losses(W).min(axis=1)

    def minimizer_loss_vector(self, p, tie_tol: float = DEFAULT_TIE_TOL) -> np.ndarray:
        """Loss vector of the selected minimizer at ``p`` (a subgradient of Phi)."""
        w = _as_weights(p)
        if self.continuum == "quadratic":
            z = self.outcome_coords[:, 0]
            lo, hi = self.action_coords[:, 0].min(), self.action_coords[:, 0].max()
            m = float(np.clip(w @ z, lo, hi))
            return (m - z) ** 2
        return self.loss[:, selected_action(self, w, tie_tol)]

    def minimizer_coords(self, p, tie_tol: float = DEFAULT_TIE_TOL) -> np.ndarray:
        if self.action_coords is None:
            raise InvalidArgumentError(f"game {self.name!r} has no action embedding")
        w = _as_weights(p)
        if self.continuum == "quadratic":
            lo, hi = self.action_coords[:, 0].min(), self.action_coords[:, 0].max()
            return np.array([np.clip(w @ self.outcome_coords[:, 0], lo, hi)])
        return self.action_coords[selected_action(self, w, tie_tol)]


# -- operations -------------------------------------------------------------------


def loss_at(game: Game, z: int, f: int) -> float:
    if not (0 <= z < game.n_outcomes and 0 <= f < game.n_actions):
        raise IndexError(f"index (z={z}, f={f}) out of range for loss shape {game.loss.shape}")
    return float(game.loss[z, f])


def check_history(history: Sequence[int], game: Game) -> tuple[int, ...]:
    h = tuple(int(z) for z in history)
    for z in h:
        if not 0 <= z < game.n_outcomes:
            raise InvalidArgumentError(f"history index {z} out of range [0, {game.n_outcomes})")
    return h


def counts_of(history: Iterable[int], n: int) -> np.ndarray:
    return np.bincount(np.asarray(list(history), dtype=int), minlength=n).astype(float)


def empirical_distribution(history: Sequence[int], game: Game) -> SimplexDist:
    h = check_history(history, game)
    if not h:
        raise InvalidArgumentError("empirical distribution of an empty history")
    return SimplexDist(counts_of(h, game.n_outcomes) / len(h))


def phi(game: Game, p, tie_tol: float = DEFAULT_TIE_TOL) -> PhiResult:
    """Minimum expected loss at ``p`` and the set of (near-)minimizing actions.

    For a continuum game the value is the exact interval minimum and the
    argmin set holds the grid actions nearest to the continuum minimizer.
    """
    w = _as_weights(p)
    if w.shape != (game.n_outcomes,):
        raise InvalidArgumentError(f"distribution has length {w.size}, game has {game.n_outcomes} outcomes")
    el = w @ game.loss
    if game.continuum == "quadratic":
        value = float(game.phi_batch(w[None, :])[0])
        m = game.minimizer_coords(w)[0]
        d = np.abs(game.action_coords[:, 0] - m)
        return PhiResult(value, frozenset(int(i) for i in np.flatnonzero(d <= d.min() + tie_tol)))
    best = el.min()
    return PhiResult(float(best), frozenset(int(i) for i in np.flatnonzero(el <= best + tie_tol)))


def selected_action(game: Game, p, tie_tol: float = DEFAULT_TIE_TOL) -> int:
    el = _as_weights(p) @ game.loss
    return int(np.flatnonzero(el <= el.min() + tie_tol)[0])


def support_function(game: Game, direction) -> float:
    """sigma_S(x) = max_f <-loss[:, f], x> for S the negated loss class."""
    x = np.asarray(direction, dtype=float)
    if x.shape != (game.n_outcomes,):
        raise InvalidArgumentError(f"direction has shape {x.shape}, expected ({game.n_outcomes},)")
    return float(np.max(-(x @ game.loss)))


def subdifferential(game: Game, p, tie_tol: float = DEFAULT_TIE_TOL) -> list[np.ndarray]:
    """Loss vectors of all minimizers at ``p``; a singleton iff Phi is differentiable there."""
    res = phi(game, p, tie_tol)
    if game.continuum == "quadratic":
        return [game.minimizer_loss_vector(p)]
    return [game.loss[:, f].copy() for f in sorted(res.argmin_indices)]


def restrict_actions(game: Game, keep: Sequence[int]) -> Game:
    keep = list(keep)
    return Game(
        loss=game.loss[:, keep],
        outcomes=game.outcomes,
        actions=tuple(game.actions[i] for i in keep),
        outcome_coords=game.outcome_coords,
        action_coords=None if game.action_coords is None else game.action_coords[keep],
        embedding_norm=game.embedding_norm,
        name=f"{game.name}[restricted]",
    )


def transform_losses(game: Game, A) -> Game:
    """Game whose loss vectors are ``A @ loss[:, f]`` (A square over outcomes)."""
    A = np.asarray(A, dtype=float)
    if A.shape != (game.n_outcomes, game.n_outcomes):
        raise InvalidArgumentError(f"transform must be {game.n_outcomes}x{game.n_outcomes}")
    return Game(loss=A @ game.loss, outcomes=game.outcomes, actions=game.actions, name=f"{game.name}[A]")


def l1(p, q) -> float:
    return float(np.abs(_as_weights(p) - _as_weights(q)).sum())


def vector_norm(x: np.ndarray, tag: str | None) -> np.ndarray:
    """Norm along the last axis for the embedding norm tags."""
    x = np.asarray(x, dtype=float)
    if tag in (None, "euclidean"):
        return np.linalg.norm(x, axis=-1)
    if tag == "sup":
        return np.abs(x).max(axis=-1)
    if tag == "abs-1d":
        if x.shape[-1] != 1:
            raise InvalidArgumentError("abs-1d norm needs one-dimensional coordinates")
        return np.abs(x[..., 0])
    raise InvalidArgumentError(f"unknown norm {tag!r}")


def random_simplex(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    """Uniform samples from the simplex (flat Dirichlet)."""
    return rng.dirichlet(np.ones(n), size=size)


def simplex_lattice(n: int, r: int) -> np.ndarray:
    """All points of the simplex with coordinates in {0, 1/r, ..., 1}."""
    pts = []

    def rec(prefix, remaining, k):
        if k == 1:
            pts.append(prefix + [remaining])
            return
        for i in range(remaining + 1):
            rec(prefix + [i], remaining - i, k - 1)

    rec([], r, n)
    return np.array(pts, dtype=float) / r
