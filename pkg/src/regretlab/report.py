"""Result rows, human tables, CSV output and plot-data files."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

log = logging.getLogger(__name__)

CSV_COLUMNS = ("game", "T", "quantity", "value", "stderr", "bound", "holds", "seed")


@dataclass(frozen=True)
class Row:
    game: str
    T: int | None
    quantity: str
    value: float
    stderr: float | None = None
    bound: float | None = None
    holds: bool | None = None
    seed: int | None = None


def _num(x, fmt: str) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, fmt)


def _cells(row: Row, fmt: str) -> list[str]:
    return [
        row.game,
        _num(row.T, fmt),
        row.quantity,
        _num(row.value, fmt),
        _num(row.stderr, fmt),
        _num(row.bound, fmt),
        _num(row.holds, fmt),
        _num(row.seed, fmt),
    ]


def format_table(rows: Sequence[Row]) -> str:
    body = [list(CSV_COLUMNS)] + [_cells(r, ".12g") for r in rows]
    widths = [max(len(line[i]) for line in body) for i in range(len(CSV_COLUMNS))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in body) + "\n"


def format_csv(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(_cells(r, ".17g"))
    return buf.getvalue()


def emit_report(rows: Sequence[Row], fmt: str = "table", out: str | Path | None = None, stream: TextIO | None = None) -> bool:
    """Write rows as a table, CSV or both.  Returns False (and writes nothing) when empty.

    The table goes to ``stream``; CSV goes to ``out`` when given, else to ``stream``.
    """
    import sys

    stream = stream or sys.stdout
    if fmt not in ("table", "csv", "both"):
        raise ValueError(f"unknown format {fmt!r}")
    if not rows:
        log.warning("no results to report; nothing written")
        return False
    if fmt in ("table", "both"):
        stream.write(format_table(rows))
    if fmt in ("csv", "both"):
        text = format_csv(rows)
        if out is not None:
            Path(out).write_text(text)
        else:
            if fmt == "both":
                stream.write("\n")
            stream.write(text)
    elif out is not None:
        Path(out).write_text(format_csv(rows))
    return True


def write_plot_data(path: str | Path, series: str, points: Iterable[tuple[float, float]]) -> None:
    """Two whitespace-separated columns (x y) under a ``# series`` header line."""
    lines = [f"# {series}"]
    lines += [f"{format(float(x), '.17g')} {format(float(y), '.17g')}" for x, y in points]
    Path(path).write_text("\n".join(lines) + "\n")
