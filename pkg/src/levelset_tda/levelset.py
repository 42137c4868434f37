"""Arrival time of an outward-moving front.

For a front that starts on the boundary of the initial manifold and moves
outward at constant speed v, the first time it reaches a point x is
dist(x, M0) / v.  We therefore compute the arrival-time field with an exact
Euclidean distance transform instead of time-stepping the level-set PDE.

Distances are measured between cell centers in units of one cell side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError, EmptyManifoldError, InputError
from .ingest import BinaryMask


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Per-vertex arrival time of the front; one vertex per mask cell."""

    values: np.ndarray
    speed: float = 1.0

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or min(values.shape) < 1:
            raise InputError(f"field must be a nonempty 2D grid, got shape {values.shape}")
        if not np.all(np.isfinite(values)) or values.min() < 0:
            raise DomainError("field values must be finite and nonnegative")
        if values.min() != 0:
            raise DomainError("field has no zero vertex (empty initial manifold)")
        if not self.speed > 0:
            raise InputError(f"speed must be positive, got {self.speed}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "speed", float(self.speed))

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width


@numba.njit(cache=True)
def _column_pass(cells):
    # squared distance to the nearest foreground cell in the same column, -1 if none
    h, w = cells.shape
    g = np.full((h, w), -1, dtype=np.int64)
    for c in range(w):
        last = -1
        for r in range(h):
            if cells[r, c]:
                last = r
            if last >= 0:
                g[r, c] = (r - last) * (r - last)
        last = -1
        for r in range(h - 1, -1, -1):
            if cells[r, c]:
                last = r
            if last >= 0:
                d = (last - r) * (last - r)
                if g[r, c] < 0 or d < g[r, c]:
                    g[r, c] = d
    return g


@numba.njit(cache=True)
def _row_pass(g):
    # lower envelope of parabolas (q - x)^2 + g[q] over the finite sites of each row
    h, w = g.shape
    out = np.empty((h, w), dtype=np.int64)
    v = np.empty(w, dtype=np.int64)
    z = np.empty(w + 1, dtype=np.float64)
    for r in range(h):
        k = -1
        for q in range(w):
            gq = g[r, q]
            if gq < 0:
                continue
            if k < 0:
                k = 0
                v[0] = q
                z[0] = -np.inf
                z[1] = np.inf
                continue
            p = v[k]
            s = ((gq + q * q) - (g[r, p] + p * p)) / (2.0 * (q - p))
            # z[0] = -inf stops the loop at k = 0
            while s <= z[k]:
                k -= 1
                p = v[k]
                s = ((gq + q * q) - (g[r, p] + p * p)) / (2.0 * (q - p))
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        j = 0
        for x in range(w):
            while z[j + 1] < x:
                j += 1
            p = v[j]
            out[r, x] = (x - p) * (x - p) + g[r, p]
    return out


def squared_distance_transform(cells: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance from each cell to the nearest True cell.

    Two separable passes (columns, then a lower envelope of parabolas along
    rows); integer arithmetic throughout, so results are exact.
    """
    cells = np.ascontiguousarray(cells, dtype=np.bool_)
    if not cells.any():
        raise EmptyManifoldError()
    return _row_pass(_column_pass(cells))


def arrival_time_field(mask: BinaryMask, speed: float = 1.0) -> ScalarField:
    if not speed > 0:
        raise InputError(f"speed must be positive, got {speed}")
    if mask.count() == 0:
        raise EmptyManifoldError()
    d2 = squared_distance_transform(mask.cells)
    return ScalarField(np.sqrt(d2.astype(np.float64)) / speed, speed)


def sublevel_manifold(field: ScalarField, t: float) -> BinaryMask:
    """Closed sublevel set {f <= t}: the manifold grown for time t."""
    if not t >= 0:
        raise InputError(f"time must be nonnegative, got {t}")
    return BinaryMask(field.values <= t)
