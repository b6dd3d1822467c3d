"""Acceptance criteria 1-12, each at its stated tolerance and runtime budget.

Run with pytest (a PASS/FAIL summary is printed at the end of the session) or
directly as ``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from regretlab.bounds import (
    centered_covariance,
    flatness_check,
    gaussian_lb_estimate,
    log_t_bound,
    rademacher_upper_bound,
    slepian_comparison,
)
from regretlab.divergence import decomposition
from regretlab.engine import JointDistTree, dual_search, hierarchy_eval, minimax_value, p_regret_exact, p_regret_mc
from regretlab.game import phi
from regretlab.games import (
    ball_iid_two_point,
    ball_orthogonal_strategy,
    ball_symmetric_iid_check,
    builtin,
    c_sequence,
    disjoint_interval_game,
    disjoint_interval_strategy,
    experts_general_lb,
    experts_simple_game,
    experts_simple_regret,
    q_invariant_sequence,
    quadratic_game,
    quadratic_shrinkage_adversary,
    random_game,
)

# built-in games at desk scale: the shapes exercised by the hierarchy and Rademacher criteria
BUILTIN_GAMES = [
    ("quadratic", {}),
    ("experts-simple", {"N": 2}),
    ("experts-simple", {"N": 3}),
    ("experts-general", {"N": 2}),
    ("ball", {}),
    ("disjoint-interval", {"grid": 4}),
]


def criterion_1():
    g = quadratic_game(exact=True)
    worst = 0.0
    for T in range(1, 13):
        joint = JointDistTree.from_strategy(quadratic_shrinkage_adversary(T))
        worst = max(worst, abs(p_regret_exact(g, joint).value - c_sequence(T).total))
    return worst <= 1e-9, f"max |Reg - sum c| = {worst:.2e} over T=1..12"


def criterion_2():
    deficits = []
    for T in (10**3, 10**4, 10**5, 10**6):
        deficits.append(abs(c_sequence(T).total - (math.log(T) - math.log(math.log(T)))))
    ok = all(a > b for a, b in zip(deficits, deficits[1:])) and deficits[-1] < 0.5
    return ok, "deficits " + ", ".join(f"{d:.5f}" for d in deficits)


def criterion_3():
    worst = 0.0
    for T in range(1, 11):
        Q = q_invariant_sequence(T)
        worst = max(worst, float(np.max(np.abs(Q - Q[0]))))
    return worst <= 1e-9, f"max |Q_t - Q_0| = {worst:.2e} over T=1..10"


def criterion_4():
    tol = 1e-7
    eps = 10 * tol
    games_ = [experts_simple_game(2), random_game(3, 5, np.random.default_rng(2024))]
    worst_gap, ok = 0.0, True
    for g in games_:
        for T in (1, 2, 3):
            mm = minimax_value(g, T).value
            ds = dual_search(g, T, tol=tol, seed=T).value
            ok &= mm - eps <= ds <= mm + 1e-12
            worst_gap = max(worst_gap, mm - ds)
    return ok, f"worst minimax - dual = {worst_gap:.2e} (eps {eps:.0e})"


def criterion_5():
    rng = np.random.default_rng(5)
    worst = math.inf
    for _ in range(200):
        g = random_game(int(rng.integers(1, 5)), int(rng.integers(1, 6)), rng)
        p = rng.dirichlet(np.ones(g.n_outcomes))
        worst = min(worst, p_regret_exact(g, JointDistTree.iid(p, int(rng.integers(1, 5)))).value)
    ok = worst >= -1e-9
    for name, params in BUILTIN_GAMES:
        g = builtin(name, **params)
        for T in (1, 2, 3):
            vals = list(hierarchy_eval(g, T))
            ok &= vals[0] >= -1e-9 and all(a <= b + 1e-6 for a, b in zip(vals, vals[1:]))
    return ok, f"min iid regret {worst:.2e}; hierarchy ordered on {len(BUILTIN_GAMES)} built-ins, T=1..3"


def criterion_6():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        g = random_game(int(rng.integers(1, 4)), int(rng.integers(1, 6)), rng)
        worst = max(worst, decomposition(g, JointDistTree.random(g.n_outcomes, int(rng.integers(1, 5)), rng)).residual)
    g = random_game(3, 4, rng)
    iid = decomposition(g, JointDistTree.iid([0.2, 0.3, 0.5], 4))
    prod = decomposition(g, JointDistTree.product(rng.dirichlet(np.ones(3), size=4)))
    ok = worst <= 1e-9 and abs(iid.delta0) <= 1e-12 and abs(iid.delta1) <= 1e-12
    ok &= abs(prod.delta1) <= 1e-12 and prod.delta0 >= 0
    return ok, f"max residual {worst:.2e}; iid d0={iid.delta0:.1e} d1={iid.delta1:.1e}; product d1={prod.delta1:.1e}"


def criterion_7():
    fl = flatness_check(quadratic_game(exact=True), 16.0, pairs=10**4, seed=0)
    g = quadratic_game()
    slack = min(log_t_bound(16, T) - minimax_value(g, T).value for T in range(2, 7))
    return fl.holds and slack >= 0, f"flatness excess {fl.observed_value:.2e}; min(64 ln T - value) = {slack:.3f}"


def criterion_8():
    ok, worst = True, math.inf
    for name, params in BUILTIN_GAMES:
        g = builtin(name, **params)
        for T in (1, 2, 3, 4):
            r = rademacher_upper_bound(g, T, seed=T)
            ok &= r.holds
            worst = min(worst, r.bound_value + r.tolerance - r.observed_value)
    return ok, f"min slack (bound - value) = {worst:.3f}"


def criterion_9():
    T = 100
    dev = max(float(np.max(np.abs(ball_orthogonal_strategy(d, T, seed=d).norms ** 2 - np.arange(1, T + 1)))) for d in (2, 5))
    walk = ball_iid_two_point(10**4, samples=10**5, seed=0)
    ratio = walk.value / 100
    sph = ball_symmetric_iid_check(3, T, samples=20000, seed=0)
    ok = dev <= 1e-7 and 0.79 <= ratio <= 0.81 and sph.value >= math.sqrt(T / 2) - 3 * sph.stderr
    return ok, f"max_t |S_t^2 - t| = {dev:.1e}; walk ratio {ratio:.4f}; sphere {sph.value:.3f} vs {math.sqrt(T / 2):.3f}"


def criterion_10():
    exact = experts_simple_regret(2, 2).value
    flat = max(abs(phi(experts_simple_game(N), np.full(N, 1.0 / N)).value - 1.0 / N) for N in range(2, 11))
    T = 10**4
    ratio = experts_general_lb(128, T, samples=10**4, seed=0).value / math.sqrt(math.log(128) / (2 * T))
    ok = exact == 0.25 and flat <= 1e-15 and 0.8 <= ratio <= 1.2
    return ok, f"Reg/T(N=2,T=2) = {exact}; max |Phi(u) - 1/N| = {flat:.1e}; N=128 ratio {ratio:.3f}"


def criterion_11():
    g = disjoint_interval_game(64)
    vals = [p_regret_exact(g, JointDistTree.from_strategy(disjoint_interval_strategy(4, 64))).value]
    ok = vals[0] < 0
    for T in (8, 16):
        est = p_regret_mc(g, disjoint_interval_strategy(T, 64), samples=20000, seed=T)
        ok &= est.value + 4 * est.stderr < 0
        vals.append(est.value)
    return ok, "Reg at T=4,8,16: " + ", ".join(f"{v:.4f}" for v in vals)


def criterion_12():
    ok = True
    for N in (2, 3, 5, 8):
        g = experts_simple_game(N)
        u = np.full(N, 1.0 / N)
        L = g.loss
        raw = (L * u[:, None]).T @ L - np.outer(u @ L, u @ L)
        ok &= np.allclose(np.diag(raw), (N - 1) / N**2, atol=1e-15)
        ok &= np.allclose(raw[~np.eye(N, dtype=bool)], -1.0 / N**2, atol=1e-15)
        C = centered_covariance(g, u, range(N), 0)
        ok &= np.linalg.eigvalsh(C).min() >= -1e-10
    sl = [slepian_comparison(N, samples=10**5, seed=0) for N in (2, 4, 8, 16)]
    ok &= all(s.holds for s in sl)
    worst = 0.0
    for N, T in ((2, 6), (3, 5), (4, 4)):
        r = gaussian_lb_estimate(experts_simple_game(N), np.full(N, 1.0 / N), range(N), T, samples=2000)
        exact = p_regret_exact(experts_simple_game(N), JointDistTree.iid(np.full(N, 1.0 / N), T)).value / T
        worst = max(worst, abs(r.fluctuation - exact))
    ok &= worst <= 1e-9
    return ok, f"covariances exact; Slepian holds N=2..16; equality chain gap {worst:.1e}"


CRITERIA = {
    1: (criterion_1, 10),
    2: (criterion_2, 5),
    3: (criterion_3, 5),
    4: (criterion_4, 60),
    5: (criterion_5, 60),
    6: (criterion_6, 30),
    7: (criterion_7, 120),
    8: (criterion_8, 120),
    9: (criterion_9, 60),
    10: (criterion_10, 60),
    11: (criterion_11, 30),
    12: (criterion_12, 60),
}


def evaluate(k):
    fn, limit = CRITERIA[k]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    passed = bool(ok) and elapsed < limit
    line = f"criterion {k}: {'PASS' if passed else 'FAIL'} ({elapsed:.2f}s / {limit}s) {detail}"
    return passed, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, acceptance_log):
    passed, line = evaluate(k)
    print(line)
    acceptance_log.append(line)
    assert passed, line


if __name__ == "__main__":
    import sys

    results = [evaluate(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
