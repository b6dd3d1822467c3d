"""Numerical checks of the regret upper bounds and the Gaussian lower-bound estimator."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import mc
from .divergence import divergence_pairs, divergence_rows
from .engine import JointDistTree, enumerate_paths, minimax_value, product_regret
from .errors import InvalidArgumentError, NotApplicableError
from .game import Game, _as_weights, phi, random_simplex, vector_norm
from .games import DEFAULT_BUDGET, compositions, multinomial_pmf, n_compositions

log = logging.getLogger(__name__)

EXACT_RADEMACHER_MAX_T = 20
PSD_TOL = 1e-10


@dataclass(frozen=True)
class ConstantEstimates:
    lipschitz_L: float
    strong_convexity_sigma: float
    alpha: float
    norm_tag: str
    midpoint_triples: int = 0

    @property
    def alpha_finite(self) -> bool:
        return math.isfinite(self.alpha)


@dataclass(frozen=True)
class BoundCheckResult:
    bound_value: float
    observed_value: float
    holds: bool
    witness: object = None
    tolerance: float = 0.0
    detail: dict = field(default_factory=dict)


def _require_coords(game: Game) -> np.ndarray:
    if game.action_coords is None:
        raise InvalidArgumentError(f"game {game.name!r} has no action embedding")
    return game.action_coords


def _lipschitz(game: Game, coords: np.ndarray, tag: str, chunk: int = 256) -> float:
    m = coords.shape[0]
    best = 0.0
    for s in range(0, m, chunk):
        d = vector_norm(coords[s : s + chunk, None, :] - coords[None, :, :], tag)
        mask = d > 0
        if not mask.any():
            continue
        diff = np.abs(game.loss[:, s : s + chunk, None] - game.loss[:, None, :])
        best = max(best, float((diff[:, mask] / d[mask]).max()))
    return best


def _midpoint_triples(coords: np.ndarray) -> np.ndarray:
    """Index triples (i, j, k) with coords[k] the midpoint of coords[i] and coords[j], i < j."""
    m, d = coords.shape
    if d == 1:
        x = coords[:, 0]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        span = float(np.ptp(xs)) or 1.0
        out = []
        for i in range(m):
            mids = (x[i] + x[i + 1 :]) / 2
            pos = np.clip(np.searchsorted(xs, mids), 0, m - 1)
            lo = np.clip(pos - 1, 0, m - 1)
            pick = np.where(np.abs(xs[pos] - mids) <= np.abs(xs[lo] - mids), pos, lo)
            hit = np.abs(xs[pick] - mids) <= 1e-12 * span
            js = np.arange(i + 1, m)[hit]
            out.extend((i, j, order[k]) for j, k in zip(js, pick[hit]))
        return np.array(out, dtype=int).reshape(-1, 3)
    keys = {tuple(np.round(c, 9)): k for k, c in enumerate(coords)}
    out = []
    for i, j in itertools.combinations(range(m), 2):
        k = keys.get(tuple(np.round((coords[i] + coords[j]) / 2, 9)))
        if k is not None:
            out.append((i, j, k))
    return np.array(out, dtype=int).reshape(-1, 3)


def estimate_constants(game: Game) -> ConstantEstimates:
    """Lipschitz constant L, midpoint strong-convexity modulus sigma, and alpha = 2 L^2 / sigma.

    sigma is the largest value with
    (loss(z, f) + loss(z, g)) / 2 - loss(z, (f + g) / 2) >= (sigma / 8) ||f - g||^2
    over all action triples whose midpoint is itself an action.
    """
    coords = _require_coords(game)
    tag = game.embedding_norm or "euclidean"
    L = _lipschitz(game, coords, tag)
    triples = _midpoint_triples(coords)
    sigma = 0.0
    if len(triples):
        i, j, k = triples.T
        dist2 = vector_norm(coords[i] - coords[j], tag) ** 2
        deficit = (game.loss[:, i] + game.loss[:, j]) / 2 - game.loss[:, k]
        ratio = float((deficit / dist2).min())
        sigma = max(8.0 * ratio, 0.0)
        if sigma < 1e-12:
            sigma = 0.0
    alpha = 2 * L * L / sigma if sigma > 0 else math.inf
    return ConstantEstimates(L, sigma, alpha, tag, len(triples))


def _sample_pairs(rng: np.random.Generator, n: int, pairs: int) -> tuple[np.ndarray, np.ndarray]:
    """Half independent pairs, half nearby pairs at log-uniform distances."""
    far = pairs // 2
    P = random_simplex(rng, n, pairs)
    Q = np.empty_like(P)
    Q[:far] = random_simplex(rng, n, far)
    near = pairs - far
    step = 10.0 ** rng.uniform(-6, 0, size=(near, 1))
    direction = random_simplex(rng, n, near) - P[far:]
    Q[far:] = P[far:] + step * direction
    return P, Q


def flatness_check(game: Game, alpha: float, pairs: int = 10**4, seed: int = 0, tol: float = 1e-9) -> BoundCheckResult:
    """Check D(q, p) <= alpha * ||p - q||_1^2 on sampled pairs of distributions."""
    if alpha < 0:
        raise InvalidArgumentError("alpha must be >= 0")
    rng = mc.substream(seed, f"flatness/{game.name}")
    P, Q = _sample_pairs(rng, game.n_outcomes, pairs)
    # pairs straddling the uniform point at distances 1e-1 .. 1e-12, so a kink there
    # is exposed for any finite alpha below roughly 1e11
    u = np.full(game.n_outcomes, 1.0 / game.n_outcomes)
    e = np.zeros(game.n_outcomes)
    e[0], e[-1] = 1.0, -1.0
    eps = (10.0 ** -np.arange(1, 13) / game.n_outcomes)[:, None]
    P = np.vstack([P, u - eps * e, u + eps * e])
    Q = np.vstack([Q, u + eps * e, u - eps * e])
    div = divergence_pairs(game, Q, P)
    l1sq = np.abs(P - Q).sum(axis=1) ** 2
    excess = div - alpha * l1sq
    i = int(np.argmax(excess))
    holds = bool(excess[i] <= tol)
    witness = None if holds else {"p": P[i], "q": Q[i], "divergence": float(div[i]), "alpha_l1_sq": float(alpha * l1sq[i])}
    return BoundCheckResult(alpha, float(excess[i]), holds, witness, tol, {"pairs": len(P)})


def grid_slack(game: Game) -> float:
    """Largest distance from an action to its nearest neighbour (0 for continuum games)."""
    if game.continuum:
        return 0.0
    coords = _require_coords(game)
    tag = game.embedding_norm or "euclidean"
    d = vector_norm(coords[:, None, :] - coords[None, :, :], tag)
    np.fill_diagonal(d, np.inf)
    return float(d.min(axis=1).max())


def stability_check(game: Game, pairs: int = 10**4, seed: int = 0, constants: ConstantEstimates | None = None) -> BoundCheckResult:
    """Check ||f_p - f_q|| <= (2L / sigma) ||p - q||_1 + one grid step on sampled pairs."""
    c = constants or estimate_constants(game)
    if c.strong_convexity_sigma <= 0:
        raise NotApplicableError(f"game {game.name!r} has sigma = 0; minimizers need not be stable")
    bound = 2 * c.lipschitz_L / c.strong_convexity_sigma
    slack = grid_slack(game)
    rng = mc.substream(seed, f"stability/{game.name}")
    P, Q = _sample_pairs(rng, game.n_outcomes, pairs)
    fp = np.array([game.minimizer_coords(p) for p in P])
    fq = np.array([game.minimizer_coords(q) for q in Q])
    move = vector_norm(fp - fq, c.norm_tag)
    dist = np.abs(P - Q).sum(axis=1)
    ratio = np.where(dist > 0, np.maximum(move - slack, 0.0) / np.where(dist > 0, dist, 1.0), 0.0)
    i = int(np.argmax(ratio))
    holds = bool(ratio[i] <= bound + 1e-9)
    witness = None if holds else {"p": P[i], "q": Q[i], "move": float(move[i]), "l1": float(dist[i])}
    return BoundCheckResult(bound, float(ratio[i]), holds, witness, slack)


def log_t_bound(alpha: float, T: int) -> float:
    """4 * alpha * ln T."""
    if T < 2:
        raise InvalidArgumentError("log_t_bound needs T >= 2")
    if alpha < 0:
        raise InvalidArgumentError("alpha must be >= 0")
    if alpha == 0:
        return 0.0
    return 4.0 * alpha * math.log(T)


# -- Rademacher averages -----------------------------------------------------------


def _sign_matrix(T: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop)[:, None]
    return 1.0 - 2.0 * ((idx >> np.arange(T)[None, :]) & 1)


def rademacher_average(game: Game, sample, eps_draws: int = 10**4, seed: int = 0, chunk: int = 1 << 14) -> mc.Estimate:
    """(1/sqrt T) E_eps sup_f |sum_t eps_t loss(Z_t, f)|; exact over all sign vectors when T <= 20."""
    z = np.asarray(sample, dtype=int)
    T = z.size
    if T < 1:
        raise InvalidArgumentError("sample must be nonempty")
    if z.min() < 0 or z.max() >= game.n_outcomes:
        raise InvalidArgumentError("sample outcome index out of range")
    rows = game.loss[z]  # (T, actions)
    if T <= EXACT_RADEMACHER_MAX_T:
        total = 2**T
        parts = []
        for s in range(0, total, chunk):
            E = _sign_matrix(T, s, min(total, s + chunk))
            parts.append(np.abs(E @ rows).max(axis=1).sum())
        return mc.Estimate(math.fsum(parts) / total / math.sqrt(T), 0.0, total)

    def draw(rng, k):
        E = rng.choice((-1.0, 1.0), size=(k, T))
        return np.abs(E @ rows).max(axis=1) / math.sqrt(T)

    return mc.estimate(draw, eps_draws, seed, f"rademacher/{game.name}/{T}")


def rademacher_sup(game: Game, T: int, search_budget: int = 10**5, seed: int = 0, eps_draws: int = 10**4, restarts: int = 8):
    """Largest Rademacher average over outcome sequences of length T.

    The average depends on the sequence only through its outcome counts, so
    count vectors are enumerated when they fit in ``search_budget``; otherwise
    random restarts with greedy single-position replacement give a lower
    estimate of the supremum.
    """
    n = game.n_outcomes
    if n_compositions(T, n) <= search_budget:
        best, best_seq = None, None
        for c in compositions(T, n).astype(int):
            seq = np.repeat(np.arange(n), c)
            est = rademacher_average(game, seq, eps_draws, seed)
            if best is None or est.value > best.value:
                best, best_seq = est, seq
        return best, best_seq, "exhaustive"
    rng = mc.substream(seed, f"rademacher_sup/{game.name}/{T}")
    evals = 0
    best, best_seq = None, None
    for _ in range(restarts):
        seq = rng.integers(0, n, size=T)
        cur = rademacher_average(game, seq, eps_draws, seed)
        improved = True
        while improved and evals < search_budget:
            improved = False
            for t in range(T):
                for z in range(n):
                    if z == seq[t] or evals >= search_budget:
                        continue
                    trial = seq.copy()
                    trial[t] = z
                    est = rademacher_average(game, trial, eps_draws, seed)
                    evals += 1
                    if est.value > cur.value:
                        seq, cur, improved = trial, est, True
        if best is None or cur.value > best.value:
            best, best_seq = cur, seq
    return best, best_seq, "search"


def rademacher_upper_bound(
    game: Game,
    T: int,
    search_budget: int = 10**5,
    seed: int = 0,
    eps_draws: int = 10**4,
    value: float | None = None,
) -> BoundCheckResult:
    """Check minimax value <= 2 sqrt(T) sup_Z Rad + 4 stderr."""
    rad, seq, how = rademacher_sup(game, T, search_budget, seed, eps_draws)
    if value is None:
        value = minimax_value(game, T).value
    bound = 2 * math.sqrt(T) * rad.value
    tol = 4 * 2 * math.sqrt(T) * rad.stderr
    holds = bool(value <= bound + tol + 1e-9)
    return BoundCheckResult(
        bound, value, holds, None if holds else tuple(int(z) for z in seq), tol,
        {"rademacher": rad.value, "stderr": rad.stderr, "sequence": tuple(int(z) for z in seq), "search": how},
    )


@dataclass(frozen=True)
class BallSandwich:
    product_regret: float
    minimax: float
    upper: float
    rademacher: float
    sequence: tuple

    @property
    def within_factor_two(self) -> bool:
        return self.product_regret - 1e-9 <= self.minimax <= self.upper + 1e-9 and self.upper <= 2 * self.product_regret + 1e-9


def ball_sandwich(game: Game, T: int, seed: int = 0) -> BallSandwich:
    """Linear game on a symmetric ball: product of two-point sign distributions vs the Rademacher upper bound.

    With z* maximizing the Rademacher average, the product of
    (delta_{z*_t} + delta_{-z*_t}) / 2 has regret sqrt(T) Rad(z*), half the
    upper bound 2 sqrt(T) Rad(z*).
    """
    if game.outcome_coords is None:
        raise InvalidArgumentError("ball_sandwich needs outcome coordinates")
    Z = game.outcome_coords
    opposite = []
    for z in Z:
        k = np.flatnonzero(np.abs(Z + z).sum(axis=1) < 1e-9)
        if k.size == 0:
            raise NotApplicableError("outcome set is not symmetric under negation")
        opposite.append(int(k[0]))
    rad, seq, _ = rademacher_sup(game, T, seed=seed)
    ps = []
    for z in seq:
        w = np.zeros(game.n_outcomes)
        w[z] += 0.5
        w[opposite[z]] += 0.5
        ps.append(w)
    lower = product_regret(game, ps)
    mm = minimax_value(game, T).value
    return BallSandwich(lower, mm, 2 * math.sqrt(T) * rad.value, rad.value, tuple(int(z) for z in seq))


# -- Gaussian lower bound ----------------------------------------------------------


@dataclass(frozen=True)
class GaussianLowerBound:
    covariance: np.ndarray
    expected_sup: float
    stderr: float
    scale: float  # expected_sup / sqrt(T)
    fluctuation: float | None  # E sup_{f in argmin set} [E_p loss - empirical mean], exact
    regret_over_T: float | None  # Reg(p^T) / T, exact
    repaired: bool
    indices: tuple


def centered_covariance(game: Game, p, Q, f_star: int) -> np.ndarray:
    """Covariance under p of loss(Z, f) - loss(Z, f_star) over f in Q."""
    w = _as_weights(p)
    D = game.loss[:, list(Q)] - game.loss[:, [f_star]]
    mean = w @ D
    C = (D * w[:, None]).T @ D - np.outer(mean, mean)
    return (C + C.T) / 2


def psd_factor(C: np.ndarray) -> tuple[np.ndarray, bool]:
    """Factor R with R @ R.T == C after clipping negative eigenvalues."""
    vals, vecs = np.linalg.eigh(C)
    repaired = bool(vals.min() < -PSD_TOL)
    if repaired:
        log.warning("covariance not PSD (min eigenvalue %.3g); clipping", vals.min())
    return vecs * np.sqrt(np.clip(vals, 0.0, None)), repaired


def expected_sup_gaussian(C: np.ndarray, samples: int = 10**5, seed: int = 0, name: str = "gaussian") -> tuple[mc.Estimate, bool]:
    """E max_i G_i for G ~ N(0, C) with antithetic pairs."""
    R, repaired = psd_factor(np.asarray(C, dtype=float))
    k = R.shape[0]

    def draw(rng, m):
        X = rng.standard_normal((m, k)) @ R.T
        return (X.max(axis=1) + (-X).max(axis=1)) / 2

    return mc.estimate(draw, max(2, samples // 2), seed, name), repaired


def expected_max_std_normals(N: int) -> float:
    """E max of N independent standard normals by quadrature."""
    from scipy import integrate, stats

    f = lambda x: x * N * stats.norm.pdf(x) * stats.norm.cdf(x) ** (N - 1)
    val, _ = integrate.quad(f, -12, 12, limit=200)
    return float(val)


def gaussian_lb_estimate(
    game: Game,
    p,
    Q,
    T: int,
    samples: int = 10**5,
    seed: int = 0,
    f_star: int | None = None,
    budget: int = DEFAULT_BUDGET,
    tie_tol: float = 1e-9,
) -> GaussianLowerBound:
    """Gaussian-process scale for the square-root regret lower bound at a non-differentiable point."""
    w = _as_weights(p)
    res = phi(game, w, tie_tol)
    argmin = sorted(res.argmin_indices)
    if len(argmin) < 2:
        raise NotApplicableError(f"Phi is differentiable at p (single minimizer {argmin[0]}); no exposed face")
    Q = sorted(set(int(q) for q in Q))
    if not set(Q) <= set(argmin):
        raise InvalidArgumentError(f"Q={Q} is not inside the minimizer set {argmin}")
    f_star = Q[0] if f_star is None else int(f_star)
    if f_star not in Q:
        raise InvalidArgumentError("f_star must belong to Q")
    C = centered_covariance(game, w, Q, f_star)
    est, repaired = expected_sup_gaussian(C, samples, seed, f"gaussian_lb/{game.name}/{tuple(Q)}")
    fluct = reg = None
    if n_compositions(T, game.n_outcomes) <= budget:
        counts = compositions(T, game.n_outcomes)
        probs = multinomial_pmf(counts, w)
        emp = counts @ game.loss[:, argmin] / T
        fluct = float(np.sum(probs * (res.value - emp).max(axis=1)))
        reg = float(T * res.value - np.sum(probs * (counts @ game.loss).min(axis=1))) / T
    return GaussianLowerBound(C, est.value, est.stderr, est.value / math.sqrt(T), fluct, reg, repaired, tuple(Q))


@dataclass(frozen=True)
class SlepianComparison:
    independent_sup: float  # E max X, X_i iid N(0, 2/N)
    correlated_sup: float  # E max Y, covariance (N-1)/N^2 diagonal and -1/N^2 off it
    independent_stderr: float
    correlated_stderr: float
    exact_correlated: float  # E max of N standard normals / sqrt(N)

    @property
    def holds(self) -> bool:
        slack = 3 * (self.independent_stderr / 2 + self.correlated_stderr)
        return self.independent_sup / 2 <= self.correlated_sup + slack


def experts_covariance(N: int) -> np.ndarray:
    return np.full((N, N), -1.0 / N**2) + np.eye(N) / N


def slepian_comparison(N: int, samples: int = 10**5, seed: int = 0) -> SlepianComparison:
    Y, _ = expected_sup_gaussian(experts_covariance(N), samples, seed, f"slepian/Y/{N}")
    X, _ = expected_sup_gaussian(np.eye(N) * 2.0 / N, samples, seed, f"slepian/X/{N}")
    return SlepianComparison(X.value, Y.value, X.stderr, Y.stderr, expected_max_std_normals(N) / math.sqrt(N))


# -- recursive bound -------------------------------------------------------------


def recursive_upper_bound_terms(game: Game, joint: JointDistTree, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, float]:
    """Per-round t * E D(Unif_t, Ubar_t), Ubar_t = ((t-1) Unif_{t-1} + p_t(.|history)) / t."""
    paths = enumerate_paths(joint, budget)
    n = joint.n_outcomes
    eye = np.eye(n)
    terms = []
    for t0, lv in enumerate(paths.levels):
        t = t0 + 1
        acc = []
        for prob, cond, cnt in zip(lv.probs, lv.conditionals, lv.counts):
            ubar = (cnt + cond) / t
            zs = np.flatnonzero(cond > 0)
            U = (cnt[None, :] + eye[zs]) / t
            acc.append(prob * float(cond[zs] @ divergence_rows(game, U, ubar)))
        terms.append(t * math.fsum(acc))
    terms = np.array(terms)
    return terms, math.fsum(terms)
