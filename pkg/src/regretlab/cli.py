"""Command-line interface: ``regretlab <command> [options]``.

Exit codes: 0 success, 2 invalid configuration, 3 resource limit exceeded,
4 failed bound check under ``--assert``, 5 I/O error.  Failures print one
line ``regretlab: error=<kind> reason=<text>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import bounds, divergence, engine, games
from .errors import InvalidArgumentError, NotApplicableError, ResourceLimitError
from .game import Game
from .report import Row, emit_report, write_plot_data

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_BOUND, EXIT_IO = 0, 2, 3, 4, 5
COMMANDS = ("value", "regret", "decompose", "bounds", "demo", "hierarchy", "report")
DEMOS = ("quadratic", "c-sequence", "experts", "ball", "disjoint-interval")
STRATEGIES = ("auto", "shrinkage", "iid-uniform", "disjoint-interval")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    game_path: str | None = None
    demo: str | None = None
    T: int = 4
    seed: int = 0
    samples: int = 10**4
    budget: int = games.DEFAULT_BUDGET
    out: str | None = None
    plot_dir: str | None = None
    fmt: str = "table"
    check: bool = False
    N: int | None = None
    d: int | None = None
    grid: int | None = None
    strategy: str = "auto"
    inner_solver: str = "lp"
    player: str = "randomized"
    params: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command == "demo":
            if self.demo not in DEMOS:
                raise ConfigError(f"demo needs one of {DEMOS}")
        elif (self.builtin is None) == (self.game_path is None):
            raise ConfigError("give exactly one of --builtin or --game")
        if self.T < 1:
            raise ConfigError("--T must be >= 1")
        if self.samples < 2 or self.budget < 1:
            raise ConfigError("--samples must be >= 2 and --budget positive")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"--strategy must be one of {STRATEGIES}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message.replace("\n", " "))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="regretlab", description="Minimax regret of finite online games.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("demo", nargs="?", help="demo name for the demo command")
    p.add_argument("--builtin", choices=sorted(games.BUILTINS))
    p.add_argument("--game", dest="game_path", help="JSON or YAML game file")
    p.add_argument("--T", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--budget", type=int, default=games.DEFAULT_BUDGET)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--plot-dir", help="directory for plot-data files (report command)")
    p.add_argument("--format", dest="fmt", choices=("table", "csv", "both"), default="table")
    p.add_argument("--assert", dest="check", action="store_true", help="exit 4 when a bound check fails")
    p.add_argument("--N", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--strategy", default="auto")
    p.add_argument("--inner-solver", choices=("lp", "exhaustive", "mw"), default="lp")
    p.add_argument("--player", choices=("randomized", "deterministic"), default="randomized")
    return p


# -- game loading ------------------------------------------------------------------


def _labels_and_coords(entries, what: str):
    labels, coords = [], []
    for i, e in enumerate(entries):
        if isinstance(e, dict):
            labels.append(str(e.get("label", f"{what}{i}")))
            coords.append(e.get("coords"))
        elif isinstance(e, (int, float)) and not isinstance(e, bool):
            labels.append(f"{e:g}")
            coords.append([float(e)])
        elif isinstance(e, (list, tuple)):
            labels.append(str(tuple(e)))
            coords.append([float(v) for v in e])
        else:
            labels.append(str(e))
            coords.append(None)
    if all(c is None for c in coords):
        return tuple(labels), None
    if any(c is None for c in coords):
        raise InvalidArgumentError(f"either all or none of the {what}s need coordinates")
    dims = {len(np.atleast_1d(c)) for c in coords}
    if len(dims) != 1:
        raise InvalidArgumentError(f"{what} coordinates have mixed dimensions {sorted(dims)}")
    return tuple(labels), np.array(coords, dtype=float).reshape(len(coords), -1)


def load_game_file(path: str) -> Game:
    text = Path(path).read_text()
    try:
        doc = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as ex:
        raise InvalidArgumentError(f"cannot parse game file {path}: {ex}".replace("\n", " ")) from None
    if not isinstance(doc, dict):
        raise InvalidArgumentError("game file must hold a mapping")
    if "builtin" in doc:
        return games.builtin(doc["builtin"], **(doc.get("params") or {}))
    missing = {"outcomes", "actions", "loss"} - set(doc)
    if missing:
        raise InvalidArgumentError(f"game file lacks fields {sorted(missing)}")
    outcomes, zc = _labels_and_coords(doc["outcomes"], "outcome")
    actions, fc = _labels_and_coords(doc["actions"], "action")
    return Game(
        loss=np.array(doc["loss"], dtype=float),
        outcomes=outcomes,
        actions=actions,
        outcome_coords=zc,
        action_coords=fc,
        embedding_norm=doc.get("embedding_norm"),
        name=str(doc.get("name", Path(path).stem)),
    )


def resolve_game(cfg: RunConfig) -> Game:
    if cfg.game_path:
        return load_game_file(cfg.game_path)
    params = dict(cfg.params)
    if cfg.builtin in ("experts-simple", "experts-general") and cfg.N is not None:
        params["N"] = cfg.N
    if cfg.builtin in ("quadratic", "disjoint-interval") and cfg.grid is not None:
        params["grid"] = cfg.grid
    if cfg.builtin == "ball":
        if cfg.d is not None and cfg.d != 2:
            raise InvalidArgumentError("the discretized ball game is two-dimensional; use demo ball for --d")
        if cfg.N is not None:
            params["n_outcomes"] = cfg.N
    if cfg.builtin in ("experts-simple", "experts-general") and "N" not in params:
        params["N"] = 2
    if cfg.builtin == "disjoint-interval" and "grid" not in params:
        params["grid"] = 4
    return games.builtin(cfg.builtin, **params)


def resolve_strategy(game: Game, cfg: RunConfig) -> games.AdversaryStrategy:
    choice = cfg.strategy
    if choice == "auto":
        choice = {"quadratic": "shrinkage", "disjoint-interval": "disjoint-interval"}.get(game.name, "iid-uniform")
    if choice == "shrinkage":
        if game.name != "quadratic":
            raise InvalidArgumentError("the shrinkage strategy needs the quadratic game")
        return games.quadratic_shrinkage_adversary(cfg.T)
    if choice == "disjoint-interval":
        if game.name != "disjoint-interval":
            raise InvalidArgumentError("the disjoint-interval strategy needs the disjoint-interval game")
        return games.disjoint_interval_strategy(cfg.T, game.params["grid"])
    return games.AdversaryStrategy.iid(np.full(game.n_outcomes, 1.0 / game.n_outcomes), cfg.T, "iid-uniform")


# -- commands ----------------------------------------------------------------------


def _value(game, cfg):
    res = engine.minimax_value(game, cfg.T, cfg.inner_solver, cfg.budget, cfg.player)
    q = "minimax" if cfg.player == "randomized" else "minimax-deterministic"
    rows = [Row(game.name, cfg.T, q, res.value, 0.0, None, None, cfg.seed)]
    if cfg.inner_solver == "mw":
        rows.append(Row(game.name, cfg.T, "solver-gap", res.max_gap, None, None, None, cfg.seed))
    return rows, True


def _regret(game, cfg):
    strat = resolve_strategy(game, cfg)
    try:
        joint = engine.JointDistTree.from_strategy(strat, cfg.budget)
        rep = engine.p_regret_exact(game, joint, cfg.budget)
    except ResourceLimitError:
        rep = engine.p_regret_mc(game, strat, cfg.samples, cfg.seed)
    rows = [Row(game.name, cfg.T, f"p-regret[{strat.name},{rep.mode}]", rep.value, rep.stderr, None, None, cfg.seed)]
    if strat.name == "shrinkage":
        rows.append(Row(game.name, cfg.T, "sum-c", games.c_sequence(cfg.T).total, 0.0, None, None, cfg.seed))
    return rows, True


def _decompose(game, cfg):
    joint = engine.JointDistTree.from_strategy(resolve_strategy(game, cfg), cfg.budget)
    d = divergence.decomposition(game, joint, cfg.budget)
    rows = [
        Row(game.name, cfg.T, name, val, 0.0, None, None, cfg.seed)
        for name, val in (
            ("delta0", d.delta0),
            ("delta1", d.delta1),
            ("delta2", d.delta2),
            ("regret/T", d.regret_over_T),
            ("-delta0-delta1+delta2", d.recombined),
        )
    ]
    rows.append(Row(game.name, cfg.T, "residual", d.residual, None, 1e-9, d.residual <= 1e-9, cfg.seed))
    return rows, d.residual <= 1e-9


def _bounds(game, cfg):
    rows, ok = [], True
    mm = engine.minimax_value(game, cfg.T, cfg.inner_solver, cfg.budget)
    rows.append(Row(game.name, cfg.T, "minimax", mm.value, 0.0, None, None, cfg.seed))
    if game.action_coords is not None:
        c = bounds.estimate_constants(game)
        rows += [
            Row(game.name, None, "lipschitz-L", c.lipschitz_L, None, None, None, cfg.seed),
            Row(game.name, None, "sigma", c.strong_convexity_sigma, None, None, None, cfg.seed),
            Row(game.name, None, "alpha", c.alpha, None, None, None, cfg.seed),
        ]
        if c.alpha_finite:
            flat_game = games.quadratic_game(game.params["grid"], exact=True) if game.name == "quadratic" else game
            fl = bounds.flatness_check(flat_game, c.alpha, cfg.samples, cfg.seed)
            rows.append(Row(flat_game.name, None, "flatness-excess", fl.observed_value, None, 0.0, fl.holds, cfg.seed))
            if cfg.T >= 2:
                b = bounds.log_t_bound(c.alpha, cfg.T)
                holds = mm.value <= b + 1e-6
                ok &= holds and fl.holds
                rows.append(Row(game.name, cfg.T, "log-T-bound", mm.value, 0.0, b, holds, cfg.seed))
    rb = bounds.rademacher_upper_bound(game, cfg.T, seed=cfg.seed, eps_draws=cfg.samples, value=mm.value)
    ok &= rb.holds
    rows.append(Row(game.name, cfg.T, "rademacher-sup", rb.detail["rademacher"], rb.detail["stderr"], None, None, cfg.seed))
    rows.append(Row(game.name, cfg.T, "rademacher-bound", mm.value, 0.0, rb.bound_value + rb.tolerance, rb.holds, cfg.seed))
    return rows, ok


def _hierarchy(game, cfg):
    h = engine.hierarchy_eval(game, cfg.T, budget=5 * 10**7, seed=cfg.seed)
    rows = [Row(game.name, cfg.T, name, val, 0.0, None, None, cfg.seed) for name, val in h.rows()]
    vals = list(h)
    # ordering is reported through the exit status under --assert
    ordered = vals[0] >= -1e-9 and all(a <= b + 1e-6 for a, b in zip(vals, vals[1:]))
    return rows, ordered


def _demo(cfg):
    T, seed, rows, ok = cfg.T, cfg.seed, [], True
    if cfg.demo == "quadratic":
        g = games.quadratic_game(cfg.grid or games.QUADRATIC_GRID, exact=True)
        total = games.c_sequence(T).total
        joint = engine.JointDistTree.from_strategy(games.quadratic_shrinkage_adversary(T), cfg.budget)
        reg = engine.p_regret_exact(g, joint, cfg.budget).value
        diff = abs(reg - total)
        ok = diff <= 1e-9
        rows = [
            Row("quadratic", T, "sum-c", total, 0.0, None, None, seed),
            Row("quadratic", T, "p-regret[shrinkage,exact]", reg, 0.0, None, None, seed),
            Row("quadratic", T, "abs-difference", diff, None, 1e-9, ok, seed),
        ]
    elif cfg.demo == "c-sequence":
        for e in range(2, 7):
            n = 10**e
            total = games.c_sequence(n).total
            ref = math.log(n) - math.log(math.log(n))
            rows.append(Row("quadratic", n, "sum-c", total, 0.0, None, None, seed))
            rows.append(Row("quadratic", n, "log T - log log T", ref, 0.0, None, None, seed))
    elif cfg.demo == "experts":
        N = cfg.N or 2
        g = games.experts_simple_game(N)
        try:
            est = games.experts_simple_regret(N, T, "exact", budget=cfg.budget)
        except ResourceLimitError:
            est = games.experts_simple_regret(N, T, "mc", samples=cfg.samples, seed=seed)
        rows.append(Row(g.name, T, "per-round-regret", est.value, est.stderr, None, None, seed))
        gen = games.experts_general_lb(N, T, cfg.samples, seed)
        ref = math.sqrt(math.log(N) / (2 * T)) if N > 1 else 0.0
        rows.append(Row("experts-general", T, "per-round-lower-bound", gen.value, gen.stderr, None, None, seed))
        rows.append(Row("experts-general", T, "sqrt(log N/(2T))", ref, 0.0, None, None, seed))
    elif cfg.demo == "ball":
        d = cfg.d or 2
        if d >= 2:
            tr = games.ball_orthogonal_strategy(d, T, seed)
            dev = float(np.max(np.abs(tr.norms**2 - np.arange(1, T + 1))))
            rows.append(Row("ball", T, "orthogonal-max|S_t^2-t|", dev, None, 1e-7, dev <= 1e-7, seed))
            ok &= dev <= 1e-7
        walk = games.ball_iid_two_point(T, cfg.samples, seed)
        rows.append(Row("ball", T, "two-point E|sum|", walk.value, walk.stderr, None, None, seed))
        rows.append(Row("ball", T, "sqrt(2T/pi)", math.sqrt(2 * T / math.pi), 0.0, None, None, seed))
        sph = games.ball_symmetric_iid_check(d, T, cfg.samples, seed)
        holds = sph.value >= math.sqrt(T / 2) - 3 * sph.stderr
        ok &= holds
        rows.append(Row("ball", T, "sphere-iid E||sum||", sph.value, sph.stderr, math.sqrt(T / 2), holds, seed))
    elif cfg.demo == "disjoint-interval":
        grid = cfg.grid or 64
        g = games.disjoint_interval_game(grid)
        strat = games.disjoint_interval_strategy(T, grid)
        rep = engine.p_regret_mc(g, strat, cfg.samples, seed)
        rows.append(Row(g.name, T, "p-regret[product,mc]", rep.value, rep.stderr, 0.0, rep.value < 0, seed))
    return rows, ok


def _report(game, cfg):
    """Minimax value over T = 1..T with its bounds, plus plot-data files."""
    rows, ok = [], True
    series = []
    for T in range(1, cfg.T + 1):
        v = engine.minimax_value(game, T, cfg.inner_solver, cfg.budget).value
        rows.append(Row(game.name, T, "minimax", v, 0.0, None, None, cfg.seed))
        series.append((T, v))
    if cfg.plot_dir:
        d = Path(cfg.plot_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_plot_data(d / f"{game.name}-minimax.dat", f"{game.name} minimax value vs T", series)
        if game.name == "quadratic":
            pts = []
            for e in range(2, 7):
                n = 10**e
                pts.append((math.log(n) - math.log(math.log(n)), games.c_sequence(n).total))
            write_plot_data(d / "c-sequence.dat", "sum c_t vs log T - log log T, T = 1e2..1e6", pts)
    return rows, ok


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    cfg.validate()
    if cfg.command == "demo":
        rows, ok = _demo(cfg)
    else:
        game = resolve_game(cfg)
        handler = {
            "value": _value,
            "regret": _regret,
            "decompose": _decompose,
            "bounds": _bounds,
            "hierarchy": _hierarchy,
            "report": _report,
        }[cfg.command]
        rows, ok = handler(game, cfg)
    emit_report(rows, cfg.fmt, cfg.out, stdout)
    if cfg.check and not ok:
        raise _BoundFailure(f"{cfg.command}: a bound check failed")
    return EXIT_OK


class _BoundFailure(Exception):
    pass


def _fail(kind: str, code: int, msg) -> int:
    text = " ".join(str(msg).split())
    print(f"regretlab: error={kind} reason={text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig(**vars(ns))
        return run(cfg)
    except (ConfigError, InvalidArgumentError, NotApplicableError) as ex:
        return _fail("invalid-config", EXIT_CONFIG, ex)
    except ResourceLimitError as ex:
        return _fail("resource-limit", EXIT_RESOURCE, ex)
    except _BoundFailure as ex:
        return _fail("bound-failed", EXIT_BOUND, ex)
    except OSError as ex:
        return _fail("io", EXIT_IO, ex)


if __name__ == "__main__":
    sys.exit(main())
