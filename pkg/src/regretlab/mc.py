"""Seeded, order-independent Monte Carlo plumbing.

Every estimator draws from substreams keyed by ``(seed, name, index)``; samples
are produced in fixed-size chunks so the result depends on neither the worker
count nor the scheduling order.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

CHUNK = 4096


def substream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    digest = hashlib.sha256(f"{name}".encode()).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence([seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF, *words, index])
    return np.random.Generator(np.random.PCG64(ss))


def worker_count() -> int:
    env = os.environ.get("REGRETLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int

    def __iter__(self):
        return iter((self.value, self.stderr))


def mean_and_stderr(x: np.ndarray) -> Estimate:
    x = np.asarray(x, dtype=float)
    n = x.size
    if n and np.all(x == x[0]):
        return Estimate(float(x[0]), 0.0, n)
    # np.sum is pairwise and deterministic for a fixed array layout.
    mean = float(np.sum(x) / n)
    if n < 2:
        return Estimate(mean, 0.0, n)
    var = float(np.sum((x - mean) ** 2) / (n - 1))
    return Estimate(mean, math.sqrt(var / n), n)


def run_chunks(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    name: str,
    workers: int | None = None,
) -> np.ndarray:
    """Call ``draw(rng, k)`` on fixed chunks and concatenate in chunk order."""
    if samples < 1:
        raise ValueError("samples must be positive")
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)

    def one(i: int) -> np.ndarray:
        return np.asarray(draw(substream(seed, name, i), sizes[i]), dtype=float)

    workers = workers or worker_count()
    if workers == 1 or len(sizes) == 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    return np.concatenate(parts)


def estimate(draw, samples: int, seed: int, name: str, workers: int | None = None) -> Estimate:
    return mean_and_stderr(run_chunks(draw, samples, seed, name, workers))
