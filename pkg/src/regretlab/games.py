"""Library games and adversary strategies.

Quadratic shrinkage game, the two experts games, the Euclidean ball game
(continuous vector strategies plus a discretized ``Game`` for the generic
engines), and the disjoint-interval example for absolute loss.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from . import mc
from .errors import InvalidArgumentError, ResourceLimitError
from .game import Game

DEFAULT_BUDGET = 10**7
QUADRATIC_GRID = 257


@dataclass(frozen=True)
class AdversaryStrategy:
    """Per-round conditional distributions ``conditional(history) -> weights``."""

    T: int
    n_outcomes: int
    conditional: Callable[[tuple], np.ndarray]
    kind: str = "dependent"
    name: str = "strategy"

    def __post_init__(self):
        if self.kind not in ("iid", "product", "dependent"):
            raise InvalidArgumentError(f"unknown strategy kind {self.kind!r}")
        if self.T < 1:
            raise InvalidArgumentError("horizon must be >= 1")

    @classmethod
    def iid(cls, p, T: int, name: str = "iid") -> "AdversaryStrategy":
        w = np.array(p, dtype=float)
        w.setflags(write=False)
        return cls(T, w.size, lambda h: w, "iid", name)

    @classmethod
    def product(cls, ps, name: str = "product") -> "AdversaryStrategy":
        ws = [np.array(p, dtype=float) for p in ps]
        for w in ws:
            w.setflags(write=False)
        return cls(len(ws), ws[0].size, lambda h: ws[len(h)], "product", name)


# -- quadratic game and the shrinkage adversary -----------------------------------


@dataclass(frozen=True)
class ShrinkageSchedule:
    T: int
    c: np.ndarray  # c[0] is c_1
    total: float


def c_sequence(T: int) -> ShrinkageSchedule:
    """c_T = 1/T and c_{t-1} = c_t + c_t**2, run backwards to t = 1."""
    if T < 1:
        raise InvalidArgumentError("T must be >= 1")
    c = np.empty(T)
    ct = 1.0 / T
    c[T - 1] = ct
    for t in range(T - 1, 0, -1):
        ct = ct + ct * ct
        c[t - 1] = ct
    return ShrinkageSchedule(T, c, math.fsum(c))


def quadratic_game(grid: int = QUADRATIC_GRID, exact: bool = False) -> Game:
    """Z = {-1, +1}, F = grid on [-1, 1], loss (f - z)**2.

    With ``exact=True`` the minimum expected loss is taken over the whole
    interval [-1, 1] rather than the grid.
    """
    if grid < 2:
        raise InvalidArgumentError("grid must have at least 2 points")
    z = np.array([-1.0, 1.0])
    f = np.linspace(-1.0, 1.0, grid)
    return Game(
        loss=(f[None, :] - z[:, None]) ** 2,
        outcomes=("-1", "+1"),
        actions=tuple(f"{v:.6g}" for v in f),
        outcome_coords=z,
        action_coords=f,
        embedding_norm="abs-1d",
        name="quadratic",
        continuum="quadratic" if exact else None,
        params={"grid": grid, "exact": exact},
    )


def signs(history) -> np.ndarray:
    """Outcome index 0/1 of the quadratic game as -1/+1."""
    return 2 * np.asarray(history, dtype=int) - 1


def quadratic_shrinkage_adversary(T: int) -> AdversaryStrategy:
    sched = c_sequence(T)

    def conditional(history: tuple) -> np.ndarray:
        t = len(history) + 1
        s = float(signs(history).sum()) if history else 0.0
        up = (1.0 + sched.c[t - 1] * s) / 2.0
        return np.array([1.0 - up, up])

    return AdversaryStrategy(T, 2, conditional, "dependent", "shrinkage")


def q_invariant_sequence(T: int, max_T: int = 20) -> np.ndarray:
    """Q_0..Q_T of the backward-induction invariant, by exact enumeration."""
    if T < 1:
        raise InvalidArgumentError("T must be >= 1")
    if T > max_T:
        raise ResourceLimitError("q_invariant_sequence enumeration", 2**T, 2**max_T)
    c = c_sequence(T).c
    tail = np.concatenate([np.cumsum(c[::-1])[::-1], [0.0]])  # tail[t] = c_{t+1}+..+c_T
    # level-by-level over prefixes: arrays indexed by the 2**t prefixes of length t
    prob = np.ones(1)
    partial = np.zeros(1)
    sq_innov = np.zeros(1)
    sq_z = np.zeros(1)
    Q = np.empty(T + 1)
    Q[0] = tail[0]
    for t in range(1, T + 1):
        mean = c[t - 1] * partial
        z = np.array([-1.0, 1.0])
        prob = (prob[:, None] * (1.0 + z[None, :] * mean[:, None]) / 2.0).ravel()
        sq_innov = (sq_innov[:, None] + (z[None, :] - mean[:, None]) ** 2).ravel()
        sq_z = (sq_z[:, None] + 1.0).ravel()
        partial = (partial[:, None] + z[None, :]).ravel()
        Q[t] = math.fsum(prob * (sq_innov + c[t - 1] * partial**2 - sq_z)) + tail[t]
    return Q


# -- experts games ---------------------------------------------------------------


def experts_simple_game(N: int, center: bool = False, interior: int = 0) -> Game:
    """Outcomes e_1..e_N, actions simplex vertices (plus optional interior points).

    ``center`` adds the barycenter; ``interior=r`` adds all interior points of the
    simplex lattice with resolution r.
    """
    if N < 2:
        raise InvalidArgumentError("experts game needs N >= 2")
    acts = [np.eye(N)[i] for i in range(N)]
    labels = [f"e{i + 1}" for i in range(N)]
    if interior:
        from .game import simplex_lattice

        for pt in simplex_lattice(N, interior):
            if pt.max() < 1.0:
                acts.append(pt)
                labels.append("(" + ",".join(f"{v:.4g}" for v in pt) + ")")
    if center and not any(np.allclose(a, 1.0 / N) for a in acts):
        acts.append(np.full(N, 1.0 / N))
        labels.append("center")
    F = np.array(acts)
    return Game(
        loss=np.eye(N) @ F.T,
        outcomes=tuple(f"e{i + 1}" for i in range(N)),
        actions=tuple(labels),
        outcome_coords=np.eye(N),
        action_coords=F,
        embedding_norm="euclidean",
        name="experts-simple",
        params={"N": N, "center": center, "interior": interior},
    )


def compositions(T: int, N: int) -> np.ndarray:
    """All count vectors (n_1..n_N) with sum T, one per row."""
    rows = []
    for bars in itertools.combinations(range(T + N - 1), N - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(T + N - 1 - prev - 1)
        rows.append(row)
    return np.array(rows, dtype=float)


def multinomial_pmf(counts: np.ndarray, p: np.ndarray) -> np.ndarray:
    counts = np.atleast_2d(counts)
    T = counts[0].sum()
    p = np.asarray(p, dtype=float)
    logp = np.log(np.where(p > 0, p, 1.0))
    terms = np.where(counts > 0, np.where(p > 0, counts * logp, -np.inf), 0.0)
    return np.exp(gammaln(T + 1) - gammaln(counts + 1).sum(axis=1) + terms.sum(axis=1))


def n_compositions(T: int, N: int) -> int:
    return math.comb(T + N - 1, N - 1)


def experts_simple_regret(
    N: int,
    T: int,
    mode: str = "exact",
    samples: int = 10**5,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> mc.Estimate:
    """Per-round regret E max_i [1/N - n_i/T] under i.i.d. uniform outcomes."""
    if N < 2 or T < 1:
        raise InvalidArgumentError("need N >= 2 and T >= 1")
    if mode == "exact":
        need = n_compositions(T, N)
        if need > budget:
            raise ResourceLimitError("experts_simple_regret compositions", need, budget)
        counts = compositions(T, N)
        prob = multinomial_pmf(counts, np.full(N, 1.0 / N))
        val = float(np.sum(prob * (1.0 / N - counts.min(axis=1) / T)))
        return mc.Estimate(val, 0.0, 0)
    if mode != "mc":
        raise InvalidArgumentError(f"unknown mode {mode!r}")

    def draw(rng, k):
        n = rng.multinomial(T, np.full(N, 1.0 / N), size=k)
        return 1.0 / N - n.min(axis=1) / T

    return mc.estimate(draw, samples, seed, f"experts_simple_regret/{N}/{T}")


def experts_general_game(N: int) -> Game:
    """Outcomes are all 0/1 loss vectors in {0,1}^N, actions the N experts."""
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if N > 10:
        raise ResourceLimitError("experts_general_game outcomes", 2**N, 2**10)
    Z = np.array(list(itertools.product((0.0, 1.0), repeat=N)))
    return Game(
        loss=Z,
        outcomes=tuple("".join(str(int(v)) for v in z) for z in Z),
        actions=tuple(f"e{i + 1}" for i in range(N)),
        outcome_coords=Z,
        action_coords=np.eye(N),
        embedding_norm="euclidean",
        name="experts-general",
        params={"N": N},
    )


def experts_general_lb(N: int, T: int, samples: int = 10**4, seed: int = 0) -> mc.Estimate:
    """E max_i [1/2 - (1/T) sum_t Z_{i,t}] with Z_{i,t} i.i.d. fair 0/1 losses."""
    if N < 1 or T < 1:
        raise InvalidArgumentError("need N >= 1 and T >= 1")

    def draw(rng, k):
        # per-expert totals are independent Binomial(T, 1/2)
        b = rng.binomial(T, 0.5, size=(k, N))
        return (0.5 - b / T).max(axis=1)

    return mc.estimate(draw, samples, seed, f"experts_general_lb/{N}/{T}")


# -- Euclidean ball game ---------------------------------------------------------


def ball_game(n_outcomes: int = 4, n_actions: int = 8) -> Game:
    """Discretized linear game on the unit disc: loss <f, z> for unit vectors f, z."""
    if n_outcomes < 2 or n_actions < 2:
        raise InvalidArgumentError("ball game needs at least 2 outcomes and 2 actions")
    az = 2 * np.pi * np.arange(n_outcomes) / n_outcomes
    af = 2 * np.pi * np.arange(n_actions) / n_actions
    Z = np.column_stack([np.cos(az), np.sin(az)])
    F = np.column_stack([np.cos(af), np.sin(af)])
    L = Z @ F.T
    L[np.abs(L) < 1e-15] = 0.0
    return Game(
        loss=L,
        outcome_coords=Z,
        action_coords=F,
        embedding_norm="euclidean",
        name="ball",
        params={"n_outcomes": n_outcomes, "n_actions": n_actions},
    )


@dataclass(frozen=True)
class BallTrace:
    points: np.ndarray  # (T, d) adversary moves
    norms: np.ndarray  # ||S_t|| for t = 1..T
    support: list = field(default_factory=list)  # per-round (u_t, -u_t)


def ball_orthogonal_strategy(d: int, T: int, seed: int = 0) -> BallTrace:
    """Fair sign times a unit vector orthogonal to the running sum."""
    if d < 2:
        raise InvalidArgumentError("orthogonal strategy needs d >= 2")
    if T < 1:
        raise InvalidArgumentError("T must be >= 1")
    rng = mc.substream(seed, f"ball_orthogonal/{d}/{T}")
    S = np.zeros(d)
    pts = np.empty((T, d))
    norms = np.empty(T)
    support = []
    for t in range(T):
        g = rng.standard_normal(d)
        ss = S @ S
        if ss > 0:
            g -= (g @ S) / ss * S
        u = g / np.linalg.norm(g)
        support.append((u, -u))
        z = u if rng.random() < 0.5 else -u
        S = S + z
        pts[t] = z
        norms[t] = np.linalg.norm(S)
    return BallTrace(pts, norms, support)


def _walk_abs_exact(T: int) -> float:
    k = np.arange(T + 1)
    logpmf = gammaln(T + 1) - gammaln(k + 1) - gammaln(T - k + 1) - T * math.log(2)
    return float(np.sum(np.exp(logpmf) * np.abs(2 * k - T)))


def ball_iid_two_point(T: int, samples: int = 10**5, seed: int = 0, exact_max_T: int = 30) -> mc.Estimate:
    """E|sum_t eps_t|: exact binomial sum for small T, Monte Carlo otherwise."""
    if T < 1:
        raise InvalidArgumentError("T must be >= 1")
    if T <= exact_max_T:
        return mc.Estimate(_walk_abs_exact(T), 0.0, 0)

    def draw(rng, k):
        return np.abs(2.0 * rng.binomial(T, 0.5, size=k) - T)

    return mc.estimate(draw, samples, seed, f"ball_iid_two_point/{T}")


def ball_symmetric_iid_check(d: int, T: int, samples: int = 10**5, seed: int = 0) -> mc.Estimate:
    """E||sum_t Z_t|| for Z_t i.i.d. uniform on the unit sphere in R^d."""
    if d < 1 or T < 1:
        raise InvalidArgumentError("need d >= 1 and T >= 1")

    def draw(rng, k):
        S = np.zeros((k, d))
        for _ in range(T):
            g = rng.standard_normal((k, d))
            S += g / np.linalg.norm(g, axis=1, keepdims=True)
        return np.linalg.norm(S, axis=1)

    return mc.estimate(draw, samples, seed, f"ball_symmetric_iid/{d}/{T}")


# -- disjoint-interval example ---------------------------------------------------


def disjoint_interval_game(grid: int = 64) -> Game:
    """Z = cell midpoints of a uniform grid on [0, 1], F = finer grid, loss |z - f|."""
    if grid < 1:
        raise InvalidArgumentError("grid must be >= 1")
    z = (np.arange(grid) + 0.5) / grid
    f = np.linspace(0.0, 1.0, 2 * grid + 1)
    return Game(
        loss=np.abs(z[:, None] - f[None, :]),
        outcomes=tuple(f"{v:.6g}" for v in z),
        actions=tuple(f"{v:.6g}" for v in f),
        outcome_coords=z,
        action_coords=f,
        embedding_norm="abs-1d",
        name="disjoint-interval",
        params={"grid": grid},
    )


def disjoint_interval_strategy(T: int, grid: int = 64) -> AdversaryStrategy:
    """Round t is uniform over the grid points in [(t-1)/T, t/T]."""
    if T < 1 or T > grid:
        raise InvalidArgumentError("need 1 <= T <= grid")
    z = (np.arange(grid) + 0.5) / grid
    rounds = []
    for t in range(1, T + 1):
        inside = (z >= (t - 1) / T) & (z <= t / T)
        w = inside / inside.sum()
        rounds.append(w)
    return AdversaryStrategy.product(rounds, name="disjoint-interval")


# -- registry --------------------------------------------------------------------


def random_game(n_outcomes: int, n_actions: int, rng: np.random.Generator) -> Game:
    return Game(loss=rng.uniform(0.0, 1.0, size=(n_outcomes, n_actions)), name="random")


BUILTINS = {
    "quadratic": (quadratic_game, {"grid": int, "exact": bool}),
    "experts-simple": (experts_simple_game, {"N": int, "center": bool, "interior": int}),
    "experts-general": (experts_general_game, {"N": int}),
    "ball": (ball_game, {"n_outcomes": int, "n_actions": int}),
    "disjoint-interval": (disjoint_interval_game, {"grid": int}),
}


def builtin(name: str, **params) -> Game:
    if name not in BUILTINS:
        raise InvalidArgumentError(f"unknown builtin game {name!r}; choose from {sorted(BUILTINS)}")
    fn, types = BUILTINS[name]
    kwargs = {}
    for k, v in params.items():
        if v is None:
            continue
        if k not in types:
            raise InvalidArgumentError(f"builtin {name!r} has no parameter {k!r}")
        kwargs[k] = types[k](v)
    return fn(**kwargs)
