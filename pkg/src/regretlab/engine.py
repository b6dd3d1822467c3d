"""Stochastic p-regret, the minimax value by backward induction, and searches
over adversary joint distributions.

Joint distributions over outcome sequences are stored as conditional trees
(history -> distribution of the next outcome).  Exact quantities are computed
by enumerating every reachable path; Monte Carlo quantities sample paths but
still evaluate the per-round minimum expected loss exactly from the
conditionals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from collections.abc import Mapping
from typing import Callable, Iterator

import numpy as np
from scipy.optimize import linprog

from . import mc
from .errors import InvalidArgumentError, ResourceLimitError
from .game import Game, MixedAction, simplex_lattice
from .games import DEFAULT_BUDGET, AdversaryStrategy, compositions, multinomial_pmf, n_compositions

LP_TOL = 1e-10


# -- joint distributions -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JointDistTree:
    """Conditionals ``nodes[history]`` for every reachable history shorter than T."""

    T: int
    n_outcomes: int
    nodes: dict
    kind: str = "dependent"

    def __post_init__(self):
        for h, w in self.nodes.items():
            if len(h) >= self.T:
                raise InvalidArgumentError(f"history {h} is not shorter than T={self.T}")
            if w.shape != (self.n_outcomes,) or np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-9:
                raise InvalidArgumentError(f"invalid conditional at history {h}: {w}")
        if () not in self.nodes:
            raise InvalidArgumentError("joint tree has no root conditional")

    def conditional(self, history) -> np.ndarray:
        try:
            return self.nodes[tuple(history)]
        except KeyError:
            raise InvalidArgumentError(f"history {tuple(history)} is not reachable in this joint") from None

    @classmethod
    def from_strategy(cls, strategy: AdversaryStrategy, budget: int = DEFAULT_BUDGET) -> "JointDistTree":
        nodes = {}
        frontier = [()]
        for t in range(strategy.T):
            nxt = []
            for h in frontier:
                w = np.clip(np.asarray(strategy.conditional(h), dtype=float), 0.0, None)
                w = w / w.sum()
                w.setflags(write=False)
                nodes[h] = w
                if t + 1 < strategy.T:
                    nxt.extend(h + (z,) for z in np.flatnonzero(w > 0))
            if len(nodes) + len(nxt) > budget:
                raise ResourceLimitError("joint tree nodes", len(nodes) + len(nxt), budget)
            frontier = nxt
        return cls(strategy.T, strategy.n_outcomes, nodes, strategy.kind)

    @classmethod
    def iid(cls, p, T: int) -> "JointDistTree":
        return cls.from_strategy(AdversaryStrategy.iid(p, T))

    @classmethod
    def product(cls, ps) -> "JointDistTree":
        return cls.from_strategy(AdversaryStrategy.product(ps))

    @classmethod
    def point_mass(cls, n: int, z: int, T: int) -> "JointDistTree":
        w = np.zeros(n)
        w[z] = 1.0
        return cls.iid(w, T)

    @classmethod
    def random(cls, n: int, T: int, rng: np.random.Generator, concentration: float = 1.0) -> "JointDistTree":
        nodes = {}
        for t in range(T):
            for h in itertools.product(range(n), repeat=t):
                nodes[h] = rng.dirichlet(np.full(n, concentration))
        return cls(T, n, nodes)

    def path_probabilities(self) -> dict:
        probs = {(): 1.0}
        for _ in range(self.T):
            nxt = {}
            for h, ph in probs.items():
                w = self.nodes[h]
                for z in np.flatnonzero(w > 0):
                    nxt[h + (int(z),)] = ph * w[z]
            probs = nxt
        return probs

    @classmethod
    def from_path_probabilities(cls, T: int, n: int, probs: dict) -> "JointDistTree":
        prefix = {}
        for leaf, pr in probs.items():
            if pr <= 0:
                continue
            for t in range(T + 1):
                prefix[leaf[:t]] = prefix.get(leaf[:t], 0.0) + pr
        nodes = {}
        for h, ph in prefix.items():
            if len(h) >= T:
                continue
            w = np.array([prefix.get(h + (z,), 0.0) for z in range(n)]) / ph
            nodes[h] = w / w.sum()
        return cls(T, n, nodes)

    def mixture(self, other: "JointDistTree", lam: float) -> "JointDistTree":
        """lam * self + (1 - lam) * other, mixed on full path probabilities."""
        if (self.T, self.n_outcomes) != (other.T, other.n_outcomes):
            raise InvalidArgumentError("mixture of joints with different shapes")
        a, b = self.path_probabilities(), other.path_probabilities()
        mixed = {k: lam * a.get(k, 0.0) + (1 - lam) * b.get(k, 0.0) for k in set(a) | set(b)}
        return JointDistTree.from_path_probabilities(self.T, self.n_outcomes, mixed)


@dataclass
class Level:
    histories: list
    probs: np.ndarray
    conditionals: np.ndarray
    counts: np.ndarray


@dataclass
class Paths:
    """Every reachable path of a joint tree, level by level."""

    T: int
    levels: list
    leaf_histories: list
    leaf_probs: np.ndarray
    leaf_counts: np.ndarray


def enumerate_paths(joint: JointDistTree, budget: int = DEFAULT_BUDGET) -> Paths:
    n = joint.n_outcomes
    hist = [()]
    probs = np.ones(1)
    counts = np.zeros((1, n))
    levels = []
    eye = np.eye(n)
    for _ in range(joint.T):
        C = np.array([joint.conditional(h) for h in hist])
        levels.append(Level(hist, probs, C, counts))
        P = probs[:, None] * C
        idx_h, idx_z = np.nonzero(P > 0)
        if idx_h.size > budget:
            raise ResourceLimitError("p-regret path enumeration", int(idx_h.size), budget)
        hist = [hist[i] + (int(z),) for i, z in zip(idx_h, idx_z)]
        probs = P[idx_h, idx_z]
        counts = counts[idx_h] + eye[idx_z]
    return Paths(joint.T, levels, hist, probs, counts)


def comparator_losses(game: Game, counts: np.ndarray) -> np.ndarray:
    """min_f sum_t loss(Z_t, f) for each row of outcome counts."""
    counts = np.atleast_2d(counts)
    if game.continuum:
        T = counts.sum(axis=1)
        return T * game.phi_batch(counts / T[:, None])
    return (counts @ game.loss).min(axis=1)


# -- p-regret ------------------------------------------------------------------


@dataclass(frozen=True)
class RegretReport:
    value: float
    mode: str
    stderr: float
    per_round_phi: tuple
    comparator: float
    metadata: dict = field(default_factory=dict)


def p_regret_exact(game: Game, joint: JointDistTree, budget: int = DEFAULT_BUDGET) -> RegretReport:
    """Exact p-regret by full path enumeration."""
    if joint.n_outcomes != game.n_outcomes:
        raise InvalidArgumentError("joint and game disagree on the number of outcomes")
    paths = enumerate_paths(joint, budget)
    per_round = tuple(float(np.sum(lv.probs * game.phi_batch(lv.conditionals))) for lv in paths.levels)
    comparator = float(np.sum(paths.leaf_probs * comparator_losses(game, paths.leaf_counts)))
    value = math.fsum(per_round) - comparator
    meta = {"game": game.name, "T": joint.T, "paths": len(paths.leaf_histories), **game.params}
    return RegretReport(value, "exact", 0.0, per_round, comparator, meta)


def p_regret_mc(game: Game, strategy: AdversaryStrategy, samples: int = 10**4, seed: int = 0) -> RegretReport:
    """Monte Carlo p-regret; conditional minimum expected losses are exact per path."""
    if samples < 2:
        raise InvalidArgumentError("p_regret_mc needs at least 2 samples")
    if strategy.n_outcomes != game.n_outcomes:
        raise InvalidArgumentError("strategy and game disagree on the number of outcomes")
    T, n = strategy.T, game.n_outcomes
    history_free = strategy.kind in ("iid", "product")
    eye = np.eye(n)

    def draw(rng, k):
        hist = [()] * k
        counts = np.zeros((k, n))
        phi_sum = np.zeros(k)
        for t in range(T):
            if history_free:
                w = np.asarray(strategy.conditional(tuple(range(t))), dtype=float)
                C = np.broadcast_to(w, (k, n))
            else:
                cache = {}
                rows = []
                for h in hist:
                    if h not in cache:
                        cache[h] = np.asarray(strategy.conditional(h), dtype=float)
                    rows.append(cache[h])
                C = np.array(rows)
            phi_sum += game.phi_batch(C)
            cdf = np.cumsum(C, axis=1)
            u = rng.random(k)[:, None] * cdf[:, -1:]
            z = np.minimum((u >= cdf).sum(axis=1), n - 1)
            counts += eye[z]
            if not history_free:
                hist = [h + (int(zi),) for h, zi in zip(hist, z)]
        return phi_sum - comparator_losses(game, counts)

    est = mc.estimate(draw, samples, seed, f"p_regret_mc/{game.name}/{strategy.name}/{T}")
    meta = {"game": game.name, "T": T, "seed": seed, "samples": samples, **game.params}
    return RegretReport(est.value, "mc", est.stderr, (), float("nan"), meta)


def iid_regret(game: Game, p, T: int, budget: int = DEFAULT_BUDGET) -> float:
    """Exact p-regret of the i.i.d. joint p x ... x p via multinomial counts."""
    p = np.asarray(p, dtype=float)
    need = n_compositions(T, game.n_outcomes)
    if need > budget:
        raise ResourceLimitError("iid_regret compositions", need, budget)
    counts = compositions(T, game.n_outcomes)
    prob = multinomial_pmf(counts, p)
    return float(T * game.phi_batch(p[None, :])[0] - np.sum(prob * comparator_losses(game, counts)))


def count_distribution(ps, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of the outcome-count vector under a product joint."""
    n = len(ps[0])
    states = np.zeros((1, n))
    probs = np.ones(1)
    eye = np.eye(n)
    for p in ps:
        p = np.asarray(p, dtype=float)
        nz = np.flatnonzero(p > 0)
        new_states = (states[:, None, :] + eye[nz][None, :, :]).reshape(-1, n)
        new_probs = (probs[:, None] * p[nz][None, :]).ravel()
        states, inv = np.unique(new_states, axis=0, return_inverse=True)
        probs = np.bincount(inv.ravel(), weights=new_probs, minlength=len(states))
        if len(states) > budget:
            raise ResourceLimitError("product count states", len(states), budget)
    return states, probs


def product_regret(game: Game, ps, budget: int = DEFAULT_BUDGET) -> float:
    """Exact p-regret of a product joint p_1 x ... x p_T."""
    ps = [np.asarray(p, dtype=float) for p in ps]
    states, probs = count_distribution(ps, budget)
    first = math.fsum(game.phi_batch(np.array(ps)))
    return float(first - np.sum(probs * comparator_losses(game, states)))


# -- matrix games ----------------------------------------------------------------


@dataclass(frozen=True)
class MatrixGameSolution:
    q: MixedAction
    value: float
    gap: float
    adversary: np.ndarray | None = None

    def __iter__(self):
        return iter((self.q, self.value, self.gap))


def _certify(payoff: np.ndarray, q: np.ndarray, p: np.ndarray | None):
    q = np.clip(q, 0.0, None)
    q = q / q.sum()
    upper = float((q @ payoff).max())
    if p is None:
        return q, upper, float("nan")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    lower = float((payoff @ p).min())
    return q, upper, max(upper - lower, 0.0)


def _solve_lp(payoff):
    m, n = payoff.shape
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([payoff.T, -np.ones((n, 1))])
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(n),
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
        options={"primal_feasibility_tolerance": LP_TOL, "dual_feasibility_tolerance": LP_TOL},
    )
    if res.status != 0:
        raise RuntimeError(f"matrix-game LP failed: {res.message}")
    p = -np.asarray(res.ineqlin.marginals)
    if p.sum() <= 0:
        p = None
    return res.x[:m], p


def _solve_exhaustive(payoff, max_pairs: int, tol: float = 1e-9):
    """Support enumeration over equal-size supports (exact for nondegenerate kernels)."""
    m, n = payoff.shape
    checked = 0
    for k in range(1, min(m, n) + 1):
        for C in itertools.combinations(range(n), k):
            for R in itertools.combinations(range(m), k):
                checked += 1
                if checked > max_pairs:
                    raise ResourceLimitError("exhaustive matrix-game supports", checked, max_pairs)
                A = payoff[np.ix_(R, C)]
                K = np.zeros((k + 1, k + 1))
                rhs = np.zeros(k + 1)
                rhs[-1] = 1.0
                try:
                    K[:k, :k], K[:k, k], K[k, :k] = A.T, -1.0, 1.0
                    qv = np.linalg.solve(K, rhs)
                    K[:k, :k] = A
                    pw = np.linalg.solve(K, rhs)
                except np.linalg.LinAlgError:
                    continue
                if qv[:k].min() < -tol or pw[:k].min() < -tol:
                    continue
                q = np.zeros(m)
                q[list(R)] = qv[:k]
                p = np.zeros(n)
                p[list(C)] = pw[:k]
                qn, upper, gap = _certify(payoff, q, p)
                if gap <= tol:
                    return q, p
    raise RuntimeError("support enumeration found no equilibrium")


def _solve_mw(payoff, iters: int):
    m, n = payoff.shape
    lo, hi = payoff.min(), payoff.max()
    span = (hi - lo) or 1.0
    eta = math.sqrt(8 * math.log(max(m, 2)) / iters)
    logw = np.zeros(m)
    q_sum = np.zeros(m)
    z_count = np.zeros(n)
    for _ in range(iters):
        w = np.exp(logw - logw.max())
        q = w / w.sum()
        q_sum += q
        z = int(np.argmax(q @ payoff))
        z_count[z] += 1
        logw -= eta * (payoff[:, z] - lo) / span
    return q_sum / iters, z_count / iters


def inner_matrix_game_solve(payoff, method: str = "lp", max_pairs: int = 10**6, mw_iters: int = 20000):
    """Solve min_q max_z (q^T payoff)_z for payoff of shape (actions, outcomes).

    ``value`` is the worst-case payoff guaranteed by the returned q and ``gap``
    the certified distance to the adversary's guaranteed payoff.
    """
    P = np.asarray(payoff, dtype=float)
    if P.ndim != 2 or P.size == 0:
        raise InvalidArgumentError("payoff must be a non-empty matrix")
    if method == "lp":
        q, p = _solve_lp(P)
    elif method == "exhaustive":
        q, p = _solve_exhaustive(P, max_pairs)
    elif method == "mw":
        q, p = _solve_mw(P, mw_iters)
    else:
        raise InvalidArgumentError(f"unknown inner solver {method!r}")
    q, value, gap = _certify(P, q, p)
    if p is not None:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return MatrixGameSolution(MixedAction(q), value, gap, p)


# -- minimax value ---------------------------------------------------------------


@dataclass(frozen=True)
class ValueNode:
    history: tuple
    continuation_value: float
    optimal_mixed_action: MixedAction
    worst_outcome_set: frozenset
    gap: float = 0.0


class ValueTree(Mapping):
    """History -> ValueNode view over node values memoized by outcome counts."""

    def __init__(self, memo: dict, n: int, T: int):
        self._memo = memo
        self._n = n
        self._T = T

    def __getitem__(self, history) -> ValueNode:
        h = tuple(int(z) for z in history)
        if len(h) >= self._T or any(not 0 <= z < self._n for z in h):
            raise KeyError(h)
        v, q, ws, gap = self._memo[tuple(np.bincount(np.array(h, dtype=int), minlength=self._n))]
        return ValueNode(h, v, q, ws, gap)

    def __iter__(self) -> Iterator[tuple]:
        for t in range(self._T):
            yield from itertools.product(range(self._n), repeat=t)

    def __len__(self) -> int:
        return sum(self._n**t for t in range(self._T))


@dataclass(frozen=True)
class MinimaxResult:
    value: float
    tree: ValueTree
    max_gap: float
    solver: str
    player: str

    def __iter__(self):
        return iter((self.value, self.tree))


def minimax_value(
    game: Game,
    T: int,
    inner_solver: str = "lp",
    budget: int = DEFAULT_BUDGET,
    player: str = "randomized",
    tie_tol: float = 1e-9,
) -> MinimaxResult:
    """Value of the T-round game by backward induction over outcome histories.

    V(h) = -min_f sum_t loss(z_t, f) at depth T and
    V(h) = min_q max_z [sum_f q_f loss(z, f) + V(h z)] above it.  Node values
    depend on the history only through its outcome counts, which are memoized;
    ``budget`` caps the number of distinct count vectors.
    """
    if game.continuum:
        raise InvalidArgumentError("minimax_value needs a finite action set; build the game without exact=True")
    if T < 1:
        raise InvalidArgumentError("T must be >= 1")
    if player not in ("randomized", "deterministic"):
        raise InvalidArgumentError(f"unknown player model {player!r}")
    n = game.n_outcomes
    nodes = math.comb(T + n, n)  # count vectors of total <= T
    if nodes > budget:
        raise ResourceLimitError("minimax_value count nodes", nodes, budget)
    L = game.loss
    memo: dict = {}
    for c in compositions(T, n).astype(int):
        memo[tuple(c)] = (-float((c @ L).min()), None, None, 0.0)
    for depth in range(T - 1, -1, -1):
        for c in compositions(depth, n).astype(int) if depth else [np.zeros(n, dtype=int)]:
            child = np.empty(n)
            for z in range(n):
                c[z] += 1
                child[z] = memo[tuple(c)][0]
                c[z] -= 1
            payoff = L.T + child[None, :]
            if player == "deterministic":
                worst = payoff.max(axis=1)
                f = int(np.argmin(worst))
                q = np.zeros(game.n_actions)
                q[f] = 1.0
                sol = MatrixGameSolution(MixedAction(q), float(worst[f]), 0.0)
            else:
                sol = inner_matrix_game_solve(payoff, inner_solver)
            ez = sol.q.weights @ payoff
            worst_set = frozenset(int(z) for z in np.flatnonzero(ez >= ez.max() - tie_tol))
            memo[tuple(c)] = (sol.value, sol.q, worst_set, sol.gap)
    root = memo[tuple([0] * n)]
    gaps = [v[3] for k, v in memo.items() if sum(k) < T]
    max_gap = max(gaps) if all(np.isfinite(gaps)) else math.inf
    return MinimaxResult(root[0], ValueTree(memo, n, T), max_gap, inner_solver, player)


# -- adversary-side search -------------------------------------------------------


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


class _Counter:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def take(self, k: int) -> bool:
        if self.used + k > self.cap:
            return False
        self.used += k
        return True


def _zoom_grid_max(g: Callable, n: int, tol: float, scale: float, counter: _Counter, start=None):
    """Maximize a concave function on the simplex by lattice search with zoom refinement."""
    r0 = {1: 1, 2: 64, 3: 24, 4: 12}.get(n, 4)
    pts = simplex_lattice(n, r0)
    if start is not None:
        pts = np.vstack([pts, start])
    if not counter.take(len(pts)):
        return None
    vals = g(pts)
    i = int(np.argmax(vals))
    best, best_val = pts[i], vals[i]
    if n == 1:
        return best
    refine, radius = (4, 8) if n <= 4 else (2, 2)
    offs = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n - 1)), dtype=float)
    h = 1.0 / r0
    while h * scale * n > tol:
        h /= refine
        # pattern search: recenter until the window stops improving, then shrink
        for _ in range(64):
            head = best[: n - 1][None, :] + offs * h
            last = 1.0 - head.sum(axis=1)
            cand = np.column_stack([head, last])
            cand = cand[(cand >= -1e-15).all(axis=1)]
            cand = np.clip(cand, 0.0, None)
            cand /= cand.sum(axis=1, keepdims=True)
            if not counter.take(len(cand)):
                return best
            vals = g(cand)
            i = int(np.argmax(vals))
            if vals[i] <= best_val:
                break
            best, best_val = cand[i], vals[i]
    return best


def _ascent_max(g: Callable, supergrad: Callable, n: int, tol: float, counter: _Counter, start=None):
    """Projected supergradient ascent with step halving on non-improvement."""
    p = np.full(n, 1.0 / n) if start is None else np.asarray(start, dtype=float)
    val = float(g(p[None, :])[0])
    step = 0.5
    while step > tol:
        if not counter.take(1):
            break
        d = supergrad(p)
        d = d - d.mean()
        nd = np.linalg.norm(d)
        if nd == 0:
            break
        cand = project_simplex(p + step * d / nd)
        cv = float(g(cand[None, :])[0])
        if cv > val:
            p, val = cand, cv
            step *= 1.5
        else:
            step /= 2
    return p


def _vertex_polish(g: Callable, pieces: np.ndarray, p: np.ndarray, counter: _Counter, window: float):
    """Refine a near-optimal point of p -> min_f p @ pieces[:, f] to an exact vertex.

    The maximizer of a concave piecewise-linear function on the simplex is a
    vertex of the arrangement cut out by equalities between nearly active
    pieces and vanishing coordinates; those vertices near ``p`` are enumerated.
    """
    n = p.size
    vals = p @ pieces
    order = np.argsort(vals, kind="stable")
    active = order[: max(2 * n + 2, int(np.count_nonzero(vals <= vals.min() + window)))][: 4 * n + 4]
    rows = [pieces[:, f] - pieces[:, g_] for f, g_ in itertools.combinations(active, 2)]
    rows += list(np.eye(n))
    best, best_val = p, float(g(p[None, :])[0])
    if len(rows) < n - 1:
        return best
    combos = list(itertools.combinations(range(len(rows)), n - 1))
    if not counter.take(len(combos)):
        return best
    cands = []
    for combo in combos:
        K = np.vstack([np.array([rows[i] for i in combo]), np.ones(n)])
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        try:
            x = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            continue
        if x.min() >= -1e-12 and np.isfinite(x).all():
            x = np.clip(x, 0.0, None)
            cands.append(x / x.sum())
    if cands:
        C = np.array(cands)
        v = g(C)
        i = int(np.argmax(v))
        if v[i] > best_val:
            best = C[i]
    return best


@dataclass(frozen=True)
class DualSearchResult:
    joint: JointDistTree
    value: float
    budget_exhausted: bool
    evaluations: int
    tolerance: float

    def __iter__(self):
        return iter((self.joint, self.value))


def dual_search(
    game: Game,
    T: int,
    optimizer: str = "grid",
    budget: int = 5 * 10**7,
    seed: int = 0,
    tol: float = 1e-7,
    init: JointDistTree | None = None,
    path_budget: int = DEFAULT_BUDGET,
) -> DualSearchResult:
    """Search joint distributions for a large p-regret (never uses the player's LP).

    Conditionals are chosen bottom-up: once every deeper node is fixed, the
    best conditional at history h maximizes the concave function
    p -> Phi(p) + sum_z p_z W(h z), where W is the continuation value of the
    deeper conditionals.  Each node problem is solved either by zooming
    lattice search (``grid``) or projected supergradient ascent with step
    halving (``coordinate-ascent``).  The returned value is the exact p-regret
    of the resulting joint.  ``budget`` caps objective evaluations.
    """
    if optimizer not in ("grid", "coordinate-ascent"):
        raise InvalidArgumentError(f"unknown optimizer {optimizer!r}")
    n = game.n_outcomes
    if n**T > path_budget:
        raise ResourceLimitError("dual_search histories", n**T, path_budget)
    counter = _Counter(budget)
    exhausted = False
    eye = np.eye(n, dtype=int)
    scale = float(np.ptp(game.loss)) * T + 1.0
    polish_window = 1e-6 * scale
    W: dict = {}
    cond: dict = {}
    rng = mc.substream(seed, "dual_search")

    for c in compositions(T, n).astype(int):
        W[tuple(c)] = -float(comparator_losses(game, c[None, :].astype(float))[0])

    for depth in range(T - 1, -1, -1):
        for c in compositions(depth, n).astype(int) if depth else [np.zeros(n, dtype=int)]:
            key = tuple(c)
            w_child = np.array([W[tuple(c + eye[z])] for z in range(n)])

            def g(P, w_child=w_child):
                return game.phi_batch(P) + P @ w_child

            start = None
            if init is not None:
                rep = tuple(itertools.chain.from_iterable([z] * int(k) for z, k in enumerate(c)))
                if rep in init.nodes:
                    start = init.nodes[rep]
            if exhausted:
                p = start if start is not None else np.full(n, 1.0 / n)
            elif optimizer == "grid":
                p = _zoom_grid_max(g, n, tol, scale, counter, start)
            else:
                x0 = start if start is not None else rng.dirichlet(np.ones(n))
                p = _ascent_max(
                    g, lambda p, w_child=w_child: game.minimizer_loss_vector(p) + w_child, n, tol, counter, x0
                )
            if p is None:
                exhausted = True
                p = start if start is not None else np.full(n, 1.0 / n)
            elif not game.continuum:
                pieces = game.loss + w_child[:, None]
                p = np.asarray(p, dtype=float)
                for _ in range(8):
                    q = _vertex_polish(g, pieces, p, counter, polish_window)
                    if q is p:
                        break
                    p = q
            p = np.clip(p, 0.0, None)
            p = p / p.sum()
            cond[key] = p
            W[key] = float(g(p[None, :])[0])
        if counter.used >= counter.cap:
            exhausted = True

    nodes = {}
    for t in range(T):
        for h in itertools.product(range(n), repeat=t):
            nodes[h] = cond[tuple(np.bincount(np.array(h, dtype=int), minlength=n))] if h else cond[tuple([0] * n)]
    joint = JointDistTree(T, n, nodes)
    value = p_regret_exact(game, joint, path_budget).value
    if init is not None:
        v0 = p_regret_exact(game, init, path_budget).value
        if v0 > value:
            joint, value = init, v0
    return DualSearchResult(joint, value, exhausted, counter.used, tol)


# -- hierarchy -------------------------------------------------------------------


@dataclass(frozen=True)
class HierarchyResult:
    iid: float
    indep: float
    joint: float
    minimax: float
    iid_p: np.ndarray
    product_ps: list
    joint_tree: JointDistTree

    def __iter__(self):
        return iter((self.iid, self.indep, self.joint, self.minimax))

    def rows(self):
        return [("iid", self.iid), ("indep", self.indep), ("joint", self.joint), ("minimax", self.minimax)]


def _maximize_on_simplex(f: Callable[[np.ndarray], float], n: int, rng, tol: float, extra=()) -> tuple:
    """Lattice-plus-zoom search for a (not necessarily concave) function of one distribution."""
    r0 = {1: 1, 2: 40, 3: 12, 4: 6}.get(n, 2)
    cands = list(simplex_lattice(n, r0)) + list(rng.dirichlet(np.ones(n), size=4)) + [np.asarray(e) for e in extra]
    vals = [f(p) for p in cands]
    i = int(np.argmax(vals))
    best, best_val = cands[i], vals[i]
    if n == 1:
        return best, best_val
    h = 1.0 / r0
    offs = np.array(list(itertools.product((-1, 0, 1), repeat=n - 1)), dtype=float)
    while h > tol:
        improved = True
        while improved:
            improved = False
            for o in offs:
                head = best[: n - 1] + o * h
                cand = np.append(head, 1.0 - head.sum())
                if cand.min() < -1e-15:
                    continue
                cand = np.clip(cand, 0.0, None)
                cand /= cand.sum()
                v = f(cand)
                if v > best_val + 1e-15:
                    best, best_val, improved = cand, v, True
        h /= 3
    return best, best_val


def hierarchy_eval(
    game: Game,
    T: int,
    budget: int = 5 * 10**7,
    seed: int = 0,
    tol: float = 1e-7,
    sweeps: int = 2,
) -> HierarchyResult:
    """Best p-regret found over i.i.d., product and arbitrary joints, and the minimax value."""
    n = game.n_outcomes
    rng = mc.substream(seed, "hierarchy_eval")
    search_tol = max(tol, 1e-5)
    p_iid, v_iid = _maximize_on_simplex(lambda p: iid_regret(game, p, T), n, rng, search_tol)
    ps = [p_iid.copy() for _ in range(T)]
    v_ind = product_regret(game, ps)
    for _ in range(sweeps):
        for t in range(T):

            def f(p, t=t):
                trial = list(ps)
                trial[t] = p
                return product_regret(game, trial)

            p_t, v = _maximize_on_simplex(f, n, rng, search_tol, extra=[ps[t]])
            if v > v_ind:
                ps[t], v_ind = p_t, v
    warm = JointDistTree.product(ps)
    ds = dual_search(game, T, "grid", budget, seed, tol, init=warm)
    mm = minimax_value(game, T)
    return HierarchyResult(v_iid, v_ind, ds.value, mm.value, p_iid, ps, ds.joint)
