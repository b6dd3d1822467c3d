"""Minimax value by backward induction next to the adversary-only dual search, for small games."""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from regretlab.engine import dual_search, minimax_value
from regretlab.game import Game
from regretlab.games import experts_simple_game, quadratic_game, random_game
from regretlab.report import Row, emit_report


@dataclass
class DualityConfig:
    max_T: int = 3
    random_games: int = 3
    seed: int = 0
    optimizer: str = "grid"
    out: Path | None = None


def main(cfg: DualityConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    games = [experts_simple_game(2), experts_simple_game(3), quadratic_game(grid=17)]
    games += [Game(loss=random_game(3, 5, rng).loss, name=f"random-{i}") for i in range(cfg.random_games)]
    rows = []
    for g in games:
        for T in range(1, cfg.max_T + 1):
            mm = minimax_value(g, T).value
            ds = dual_search(g, T, cfg.optimizer, seed=cfg.seed)
            rows.append(Row(g.name, T, "minimax", mm))
            rows.append(Row(g.name, T, f"dual[{cfg.optimizer}]", ds.value, None, mm, ds.value <= mm + 1e-12, cfg.seed))
    emit_report(rows, "table" if cfg.out is None else "both", cfg.out)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-T", type=int, default=3)
    ap.add_argument("--random-games", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--optimizer", choices=("grid", "coordinate-ascent"), default="grid")
    ap.add_argument("--out", type=Path)
    a = ap.parse_args()
    main(DualityConfig(a.max_T, a.random_games, a.seed, a.optimizer, a.out))
