"""Ball-game adversaries: the orthogonal strategy, the two-point walk and the uniform-sphere i.i.d. walk."""

import argparse
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from regretlab.games import ball_iid_two_point, ball_orthogonal_strategy, ball_symmetric_iid_check
from regretlab.report import Row, emit_report, write_plot_data


@dataclass
class BallConfig:
    T: int = 100
    walk_T_max_exponent: int = 4
    samples: int = 10**5
    seed: int = 0
    out_dir: Path = Path("out")


def main(cfg: BallConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for d in (2, 3, 5, 10):
        tr = ball_orthogonal_strategy(d, cfg.T, cfg.seed)
        dev = float(np.max(np.abs(tr.norms**2 - np.arange(1, cfg.T + 1))))
        rows.append(Row("ball", cfg.T, f"d={d} orthogonal max|S_t^2 - t|", dev))
    walk_pts = []
    for e in range(1, cfg.walk_T_max_exponent + 1):
        T = 10**e
        w = ball_iid_two_point(T, cfg.samples, cfg.seed)
        walk_pts.append((T, w.value / math.sqrt(T)))
        rows.append(Row("ball", T, "two-point E|sum|/sqrt T", w.value / math.sqrt(T), w.stderr / math.sqrt(T), math.sqrt(2 / math.pi)))
    for d in (1, 2, 3, 10, 50):
        s = ball_symmetric_iid_check(d, cfg.T, cfg.samples // 10, cfg.seed)
        ok = s.value >= math.sqrt(cfg.T / 2) - 3 * s.stderr
        rows.append(Row("ball", cfg.T, f"d={d} sphere E||sum||", s.value, s.stderr, math.sqrt(cfg.T / 2), ok, cfg.seed))
    write_plot_data(cfg.out_dir / "two-point-walk.dat", "E|sum eps|/sqrt T vs T", walk_pts)
    emit_report(rows, "both", cfg.out_dir / "ball_walks.csv")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=int, default=100)
    ap.add_argument("--walk-T-max-exponent", type=int, default=4)
    ap.add_argument("--samples", type=int, default=10**5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    a = ap.parse_args()
    main(BallConfig(a.T, a.walk_T_max_exponent, a.samples, a.seed, a.out_dir))
