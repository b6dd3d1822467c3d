"""Regret of the disjoint-interval product adversary: negative and linear in T."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from regretlab.engine import JointDistTree, p_regret_exact, p_regret_mc
from regretlab.games import disjoint_interval_game, disjoint_interval_strategy
from regretlab.report import Row, emit_report, write_plot_data


@dataclass
class IntervalConfig:
    grid: int = 64
    Ts: tuple = (1, 2, 4, 8, 16, 32)
    samples: int = 20000
    seed: int = 0
    out_dir: Path = Path("out")


def main(cfg: IntervalConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    g = disjoint_interval_game(cfg.grid)
    rows, pts = [], []
    for T in cfg.Ts:
        strat = disjoint_interval_strategy(T, cfg.grid)
        if T <= 4:
            rep = p_regret_exact(g, JointDistTree.from_strategy(strat))
        else:
            rep = p_regret_mc(g, strat, cfg.samples, cfg.seed)
        pts.append((T, rep.value))
        rows.append(Row(g.name, T, f"p-regret[{rep.mode}]", rep.value, rep.stderr, 0.0, rep.value < 0, cfg.seed))
        if T % 2 == 0 and cfg.grid % T == 0:
            rows.append(Row(g.name, T, "closed form (1 - T)/4", (1 - T) / 4))
    write_plot_data(cfg.out_dir / "disjoint-interval.dat", "regret vs T, disjoint-interval adversary", pts)
    emit_report(rows, "both", cfg.out_dir / "disjoint_interval.csv")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--T", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32])
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    a = ap.parse_args()
    main(IntervalConfig(a.grid, tuple(a.T), a.samples, a.seed, a.out_dir))
