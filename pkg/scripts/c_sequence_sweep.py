"""Sweep the shrinkage schedule: sum of c_t against log T - log log T, and the exact regret at small T."""

import argparse
import math
from dataclasses import dataclass
from pathlib import Path

from regretlab.engine import JointDistTree, p_regret_exact
from regretlab.games import c_sequence, quadratic_game, quadratic_shrinkage_adversary
from regretlab.report import Row, emit_report, write_plot_data


@dataclass
class SweepConfig:
    max_exponent: int = 6
    exact_up_to: int = 12
    out_dir: Path = Path("out")


def main(cfg: SweepConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows, pts = [], []
    for e in range(2, cfg.max_exponent + 1):
        T = 10**e
        total = c_sequence(T).total
        ref = math.log(T) - math.log(math.log(T))
        pts.append((ref, total))
        rows.append(Row("quadratic", T, "sum-c", total))
        rows.append(Row("quadratic", T, "deficit", abs(total - ref)))
    g = quadratic_game(exact=True)
    for T in range(1, cfg.exact_up_to + 1):
        reg = p_regret_exact(g, JointDistTree.from_strategy(quadratic_shrinkage_adversary(T))).value
        rows.append(Row("quadratic", T, "exact-minus-sum-c", reg - c_sequence(T).total))
    write_plot_data(cfg.out_dir / "c-sequence.dat", "sum c_t vs log T - log log T", pts)
    emit_report(rows, "both", cfg.out_dir / "c_sequence.csv")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exponent", type=int, default=6)
    ap.add_argument("--exact-up-to", type=int, default=12)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    a = ap.parse_args()
    main(SweepConfig(a.max_exponent, a.exact_up_to, a.out_dir))
