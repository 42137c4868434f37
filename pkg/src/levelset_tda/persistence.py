"""0D and 1D persistent homology of a filtered complex over GF(2).

The pairing comes from the standard column reduction of the ordered
boundary matrix, run with clearing: triangle columns are reduced first and
every edge that becomes a pivot there is skipped in the edge pass, since its
column is known to reduce to zero.  Columns are sparse sorted index arrays
and the kernel is compiled with numba.

:func:`brute_force_betti` is an independent check that computes Betti
numbers of a single sublevel complex by dense elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple

import numba
import numpy as np
from numba.typed import List as TypedList

from .complex import FilteredComplex
from .errors import ContractViolation, InputError

INF = math.inf


class PersistencePair(NamedTuple):
    dimension: int
    birth: float
    death: float

    @property
    def essential(self) -> bool:
        return math.isinf(self.death)

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    pairs: tuple[PersistencePair, ...]
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        pairs = tuple(sorted(PersistencePair(int(d), float(b), float(x)) for d, b, x in self.pairs))
        for p in pairs:
            if p.dimension not in (0, 1):
                raise InputError(f"unsupported homology dimension {p.dimension}")
            if not p.birth >= 0 or math.isinf(p.birth):
                raise InputError(f"birth must be finite and nonnegative: {p}")
            if not p.death > p.birth:
                raise InputError(f"death must exceed birth: {p}")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def in_dimension(self, dim: int) -> list[PersistencePair]:
        return [p for p in self.pairs if p.dimension == dim]

    def finite(self, dim: int | None = None) -> list[PersistencePair]:
        return [p for p in self.pairs if not p.essential and (dim is None or p.dimension == dim)]

    def essential(self, dim: int | None = None) -> list[PersistencePair]:
        return [p for p in self.pairs if p.essential and (dim is None or p.dimension == dim)]


# --------------------------------------------------------------------------
# reduction kernel


@numba.njit(cache=True)
def _add_columns(a, b):
    # symmetric difference of two sorted index arrays (GF(2) column sum)
    out = np.empty(len(a) + len(b), dtype=np.int64)
    i = j = k = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            out[k] = a[i]
            i += 1
            k += 1
        elif a[i] > b[j]:
            out[k] = b[j]
            j += 1
            k += 1
        else:
            i += 1
            j += 1
    while i < len(a):
        out[k] = a[i]
        i += 1
        k += 1
    while j < len(b):
        out[k] = b[j]
        j += 1
        k += 1
    return out[:k]


@numba.njit(cache=True)
def _reduce_pass(rows, skip, n_total, store):
    """Reduce the columns of one dimension in filtration order.

    rows[i] are the sorted global positions of column i's faces; columns are
    visited in the order given.  Returns the pivot row of each column, -1
    when it reduces to zero.
    """
    n = rows.shape[0]
    low = np.full(n, -1, dtype=np.int64)
    owner = np.full(n_total, -1, dtype=np.int64)  # pivot row -> slot in store
    for i in range(n):
        if skip[i]:
            continue
        col = rows[i].copy()
        while len(col) > 0:
            slot = owner[col[-1]]
            if slot < 0:
                break
            col = _add_columns(col, store[slot])
        if len(col) > 0:
            owner[col[-1]] = len(store)
            store.append(col)
            low[i] = col[-1]
    return low


def _empty_store():
    return TypedList.empty_list(numba.types.int64[::1])


def reduce_boundary(complex_: FilteredComplex) -> tuple[np.ndarray, np.ndarray]:
    """Pivot rows of the reduced boundary matrix.

    Returns ``(edge_low, triangle_low)``: for each edge the global position of
    the vertex it is paired with, and for each triangle the global position of
    the edge it is paired with; -1 where the column reduced to zero (or was
    cleared).
    """
    pos_v, pos_e, _ = complex_.positions
    _, order_e, order_t = complex_.within_dim_order
    n_total = len(complex_)

    tri_rows = np.sort(pos_e[complex_.triangle_faces], axis=1)[order_t]
    tri_low_sorted = _reduce_pass(
        np.ascontiguousarray(tri_rows), np.zeros(len(order_t), dtype=np.bool_),
        n_total, _empty_store(),
    )
    tri_low = np.full(len(order_t), -1, dtype=np.int64)
    tri_low[order_t] = tri_low_sorted

    # clearing: an edge that is the pivot of a triangle column is a cycle
    cleared = np.zeros(n_total, dtype=np.bool_)
    cleared[tri_low_sorted[tri_low_sorted >= 0]] = True
    edge_rows = np.sort(pos_v[complex_.edge_faces], axis=1)[order_e]
    edge_low_sorted = _reduce_pass(
        np.ascontiguousarray(edge_rows), cleared[pos_e[order_e]],
        n_total, _empty_store(),
    )
    edge_low = np.full(len(order_e), -1, dtype=np.int64)
    edge_low[order_e] = edge_low_sorted
    return edge_low, tri_low


def compute_persistence(
    complex_: FilteredComplex,
    *,
    truncate_essential: bool = False,
    metadata: dict[str, Any] | None = None,
) -> PersistenceDiagram:
    """Persistence diagram (dimensions 0 and 1) of a filtered complex.

    Pairs whose birth and death values coincide are dropped.  Unpaired
    classes get an infinite death, or with ``truncate_essential`` the largest
    filtration value (kept infinite if that would not exceed the birth).
    """
    vv, ev, tv = complex_.values
    edge_low, tri_low = reduce_boundary(complex_)

    pos_v, pos_e, _ = complex_.positions
    value_at = np.empty(len(complex_), dtype=np.float64)
    dim_at = np.empty(len(complex_), dtype=np.int8)
    for d, (pos, vals) in enumerate(zip(complex_.positions, complex_.values)):
        value_at[pos] = vals
        dim_at[pos] = d

    if np.any(dim_at[edge_low[edge_low >= 0]] != 0) or np.any(dim_at[tri_low[tri_low >= 0]] != 1):
        raise ContractViolation("pivot of wrong dimension; boundary matrix is malformed")

    pairs: list[tuple[int, float, float]] = []
    for d, low, death_vals in ((0, edge_low, ev), (1, tri_low, tv)):
        has = low >= 0
        births = value_at[low[has]]
        deaths = death_vals[has]
        if np.any(deaths < births):
            raise ContractViolation("death precedes birth; filtration is not monotone")
        keep = deaths > births
        pairs.extend((d, b, x) for b, x in zip(births[keep].tolist(), deaths[keep].tolist()))

    # essential: positive simplices never used as a pivot
    paired = np.zeros(len(complex_), dtype=np.bool_)
    paired[edge_low[edge_low >= 0]] = True
    paired[tri_low[tri_low >= 0]] = True
    vertex_positive = ~paired[pos_v]
    edge_positive = (edge_low < 0) & ~paired[pos_e]
    top = complex_.max_value() if len(complex_) else 0.0
    for d, mask, vals in ((0, vertex_positive, vv), (1, edge_positive, ev)):
        for b in vals[mask].tolist():
            death = top if truncate_essential and top > b else INF
            pairs.append((d, b, death))

    meta = {"n_simplices": len(complex_)}
    if complex_.shape is not None:
        meta["grid_height"], meta["grid_width"] = complex_.shape
    meta.update(metadata or {})
    return PersistenceDiagram(tuple(pairs), meta)


def betti_at(diagram: PersistenceDiagram | Iterable[PersistencePair], t: float, dim: int) -> int:
    """Number of classes of dimension ``dim`` alive at time t (birth <= t < death)."""
    if t < 0:
        raise InputError(f"time must be nonnegative, got {t}")
    return sum(1 for p in diagram if p.dimension == dim and p.birth <= t < p.death)


# --------------------------------------------------------------------------
# oracle

BRUTE_FORCE_CAP = 20_000


def gf2_rank(columns: Iterable[int]) -> int:
    """Rank over GF(2) of a set of columns given as integer bitmasks."""
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            top = col.bit_length() - 1
            other = pivots.get(top)
            if other is None:
                pivots[top] = col
                rank += 1
                break
            col ^= other
    return rank


def brute_force_betti(complex_: FilteredComplex, t: float, dim: int) -> int:
    """Betti number of the sublevel complex {value <= t} by dense elimination.

    Independent of the reduction: it rebuilds the boundary maps of the
    subcomplex from vertex tuples and takes GF(2) ranks.
    """
    if dim not in (0, 1):
        raise InputError(f"dimension must be 0 or 1, got {dim}")
    in_v, in_e, in_t = complex_.sublevel(t)
    verts = complex_.vertices[in_v].tolist()
    edges = [tuple(e) for e in complex_.edges[in_e].tolist()]
    tris = [tuple(x) for x in complex_.triangles[in_t].tolist()]
    size = len(verts) + len(edges) + len(tris)
    if size > BRUTE_FORCE_CAP:
        raise InputError(f"sublevel complex has {size} simplices; oracle is capped at {BRUTE_FORCE_CAP}")

    v_index = {v: i for i, v in enumerate(verts)}
    e_index = {e: i for i, e in enumerate(edges)}
    try:
        d1 = [(1 << v_index[a]) | (1 << v_index[b]) for a, b in edges]
        d2 = [(1 << e_index[(a, b)]) | (1 << e_index[(a, c)]) | (1 << e_index[(b, c)])
              for a, b, c in tris]
    except KeyError as exc:
        raise ContractViolation(f"sublevel complex not closed under faces: {exc}") from exc
    rank1 = gf2_rank(d1)
    if dim == 0:
        return len(verts) - rank1
    return len(edges) - rank1 - gf2_rank(d2)
