"""Randomized self-check: reduction-based Betti numbers against the dense oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .complex import FilteredComplex, build_filtered_complex
from .ingest import BinaryMask
from .levelset import arrival_time_field
from .persistence import betti_at, brute_force_betti, compute_persistence
from .synthetic import random_mask


@dataclass(frozen=True)
class Mismatch:
    instance: int
    t: float
    dim: int
    expected: int
    got: int
    mask: BinaryMask
    speed: float

    def dump(self) -> str:
        rows = ["".join("#" if c else "." for c in row) for row in self.mask.cells]
        return (f"instance {self.instance}: speed={self.speed:g} t={self.t!r} dim={self.dim} "
                f"oracle={self.expected} diagram={self.got}\n" + "\n".join(rows))


def sample_thresholds(rng: np.random.Generator, complex_: FilteredComplex, k: int) -> np.ndarray:
    values = np.unique(np.concatenate(complex_.values))
    return rng.choice(values, size=k, replace=len(values) < k)


def random_instances(seed: int, n: int, max_side: int = 20):
    """Deterministic stream of (mask, speed) pairs for a given seed."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        h, w = (int(x) for x in rng.integers(1, max_side + 1, size=2))
        density = float(rng.uniform(0.02, 0.6))
        speed = float(rng.choice([0.5, 1.0, 2.0]))
        yield random_mask(rng, h, w, density), speed, rng


def check_instances(
    seed: int,
    n_instances: int = 50,
    n_thresholds: int = 10,
    max_side: int = 20,
    on_mismatch: Callable[[Mismatch], None] | None = None,
) -> list[Mismatch]:
    """Compare diagram Betti numbers with the oracle on random masks."""
    failures = []
    for i, (mask, speed, rng) in enumerate(random_instances(seed, n_instances, max_side)):
        complex_ = build_filtered_complex(arrival_time_field(mask, speed))
        diagram = compute_persistence(complex_)
        for t in sample_thresholds(rng, complex_, n_thresholds).tolist():
            for dim in (0, 1):
                want = brute_force_betti(complex_, t, dim)
                got = betti_at(diagram, t, dim)
                if want != got:
                    m = Mismatch(i, t, dim, want, got, mask, speed)
                    failures.append(m)
                    if on_mismatch:
                        on_mismatch(m)
    return failures
