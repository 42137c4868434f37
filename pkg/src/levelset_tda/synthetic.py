"""Synthetic street maps and masks used by the test suite and ``validate``."""

from __future__ import annotations

import numpy as np

from .ingest import BinaryMask


def grid_city(n_blocks: int, block: int, street: int = 1) -> BinaryMask:
    """``n_blocks x n_blocks`` square blocks of side ``block`` separated by streets.

    The outer border is a street too, so every block is enclosed.
    """
    size = n_blocks * (block + street) + street
    cells = np.zeros((size, size), dtype=bool)
    for k in range(n_blocks + 1):
        a = k * (block + street)
        cells[a:a + street, :] = True
        cells[:, a:a + street] = True
    return BinaryMask(cells)


def dead_end_block(height: int = 16, width: int = 16, depth: int | None = None) -> BinaryMask:
    """One walled block with a dead-end street entering from the top middle.

    ``depth`` defaults to half the block height.
    """
    depth = height // 2 if depth is None else depth
    cells = np.zeros((height + 2, width + 2), dtype=bool)
    cells[0, :] = cells[-1, :] = True
    cells[:, 0] = cells[:, -1] = True
    mid = (width + 1) // 2
    cells[1:1 + depth, mid] = True
    return BinaryMask(cells)


def random_mask(rng: np.random.Generator, height: int, width: int, density: float = 0.3) -> BinaryMask:
    """Random mask with at least one foreground cell."""
    cells = rng.random((height, width)) < density
    if not cells.any():
        cells[rng.integers(height), rng.integers(width)] = True
    return BinaryMask(cells)


def street_map(size: int, rng: np.random.Generator) -> BinaryMask:
    """Irregular street grid with dead ends and a ring road."""
    cells = np.zeros((size, size), dtype=bool)
    x = 0
    while x < size:
        cells[:, x] = True
        x += int(rng.integers(5, max(6, size // 12)))
    y = 0
    while y < size:
        cells[y, :] = True
        y += int(rng.integers(5, max(6, size // 12)))
    for _ in range(size // 3):
        r, c = rng.integers(0, size, 2)
        cells[r, c:c + int(rng.integers(5, 40))] = True
    rr, cc = np.indices((size, size))
    d = np.hypot(rr - size / 2, cc - size / 2)
    cells[(d > 0.3 * size) & (d < 0.3 * size + 1.5)] = True
    return BinaryMask(cells)
