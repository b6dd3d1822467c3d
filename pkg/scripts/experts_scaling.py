"""Per-round regret of the experts games against sqrt(log N / T) as N grows."""

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path

from regretlab.games import experts_general_lb, experts_simple_regret
from regretlab.report import Row, emit_report, write_plot_data


@dataclass
class ScalingConfig:
    T: int = 10**4
    Ns: list = field(default_factory=lambda: [2, 4, 8, 16, 32, 64, 128])
    samples: int = 10**4
    seed: int = 0
    out_dir: Path = Path("out")


def main(cfg: ScalingConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows, simple_pts, general_pts = [], [], []
    for N in cfg.Ns:
        s = experts_simple_regret(N, cfg.T, "mc", samples=cfg.samples, seed=cfg.seed)
        s_ratio = s.value / math.sqrt(math.log(N) / (N * cfg.T))
        gen = experts_general_lb(N, cfg.T, cfg.samples, cfg.seed)
        g_ratio = gen.value / math.sqrt(math.log(N) / (2 * cfg.T))
        rows.append(Row("experts-simple", cfg.T, f"N={N} regret/T", s.value, s.stderr, None, None, cfg.seed))
        rows.append(Row("experts-simple", cfg.T, f"N={N} ratio to sqrt(log N/(N T))", s_ratio, None, None, None, cfg.seed))
        rows.append(Row("experts-general", cfg.T, f"N={N} lower bound", gen.value, gen.stderr, None, None, cfg.seed))
        rows.append(Row("experts-general", cfg.T, f"N={N} ratio to sqrt(log N/(2T))", g_ratio, None, None, None, cfg.seed))
        simple_pts.append((N, s_ratio))
        general_pts.append((N, g_ratio))
    write_plot_data(cfg.out_dir / "experts-simple-ratio.dat", "experts-simple ratio vs N", simple_pts)
    write_plot_data(cfg.out_dir / "experts-general-ratio.dat", "experts-general ratio vs N", general_pts)
    emit_report(rows, "both", cfg.out_dir / "experts_scaling.csv")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=int, default=10**4)
    ap.add_argument("--N", type=int, nargs="+", default=[2, 4, 8, 16, 32, 64, 128])
    ap.add_argument("--samples", type=int, default=10**4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    a = ap.parse_args()
    main(ScalingConfig(a.T, a.N, a.samples, a.seed, a.out_dir))
