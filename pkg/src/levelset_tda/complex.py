"""Filtered simplicial complex on a triangulated grid.

Vertices sit at cell centers, vertex id ``row * width + col``.  Every unit
square between four neighbouring vertices is split by the diagonal running
from its lower-left to its upper-right corner (row 0 is the top row, so that
is the edge ``(r+1, c) -- (r, c+1)``).

Simplices are stored as numpy arrays per dimension; the total filtration
order is (value, dimension, lexicographic vertex tuple), which places every
face before its cofaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractViolation, InputError
from .levelset import ScalarField


@dataclass(frozen=True, order=True)
class Simplex:
    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        vs = tuple(int(v) for v in self.vertices)
        if not 1 <= len(vs) <= 3:
            raise InputError(f"only simplices of dimension 0..2 are supported, got {vs}")
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise InputError(f"simplex vertex ids must be strictly increasing, got {vs}")
        object.__setattr__(self, "vertices", vs)

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1


def boundary(simplex: Simplex) -> list[Simplex]:
    """Faces of codimension one (GF(2) coefficients, so no signs)."""
    vs = simplex.vertices
    if len(vs) == 1:
        return []
    if len(vs) == 2:
        return [Simplex((vs[0],)), Simplex((vs[1],))]
    a, b, c = vs
    return [Simplex((a, b)), Simplex((a, c)), Simplex((b, c))]


@dataclass(frozen=True)
class GridTriangulation:
    """Index arrays for the triangulated ``height x width`` vertex grid.

    ``triangle_edges`` gives, per triangle, the row indices into ``edges`` of
    its three edges (ordered like :func:`boundary`).
    """

    width: int
    height: int
    edges: np.ndarray
    triangles: np.ndarray
    triangle_edges: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.width * self.height


def grid_triangulation(width: int, height: int) -> GridTriangulation:
    if width < 1 or height < 1:
        raise InputError(f"grid must be at least 1x1, got {width}x{height}")
    w, h = width, height
    ids = np.arange(w * h, dtype=np.int64).reshape(h, w)

    horiz = np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], axis=1)
    vert = np.stack([ids[:-1, :].ravel(), ids[1:, :].ravel()], axis=1)
    tl = ids[:-1, :-1].ravel()  # top-left corner of each unit square
    diag = np.stack([tl + 1, tl + w], axis=1)
    edges = np.concatenate([horiz, vert, diag])

    n_h, n_v = len(horiz), len(vert)
    cell_r, cell_c = np.divmod(np.arange(len(tl)), max(w - 1, 1))
    h_idx = lambda r, c: r * (w - 1) + c  # noqa: E731
    v_idx = lambda r, c: n_h + r * w + c  # noqa: E731
    d_idx = n_h + n_v + np.arange(len(tl))

    upper = np.stack([tl, tl + 1, tl + w], axis=1)
    upper_edges = np.stack([h_idx(cell_r, cell_c), v_idx(cell_r, cell_c), d_idx], axis=1)
    lower = np.stack([tl + 1, tl + w, tl + w + 1], axis=1)
    lower_edges = np.stack([d_idx, v_idx(cell_r, cell_c + 1), h_idx(cell_r + 1, cell_c)], axis=1)

    triangles = np.concatenate([upper, lower]).reshape(-1, 3)
    tri_edges = np.concatenate([upper_edges, lower_edges]).reshape(-1, 3)
    return GridTriangulation(w, h, edges.reshape(-1, 2), triangles, tri_edges.astype(np.int64))


def triangulate_grid(width: int, height: int) -> list[Simplex]:
    """All simplices of the triangulated grid as :class:`Simplex` objects.

    Meant for small grids; the pipeline works on :func:`grid_triangulation`.
    """
    grid = grid_triangulation(width, height)
    out = [Simplex((v,)) for v in range(grid.n_vertices)]
    out += [Simplex(tuple(e)) for e in grid.edges.tolist()]
    out += [Simplex(tuple(t)) for t in grid.triangles.tolist()]
    return out


def _locate(keys: np.ndarray, sorted_keys: np.ndarray, sorter: np.ndarray, what: str) -> np.ndarray:
    if len(keys) == 0:
        return np.empty(0, dtype=np.int64)
    if len(sorted_keys) == 0:
        raise ContractViolation(f"complex is not closed under faces: missing {what}")
    idx = np.minimum(np.searchsorted(sorted_keys, keys), len(sorted_keys) - 1)
    if not np.array_equal(sorted_keys[idx], keys):
        raise ContractViolation(f"complex is not closed under faces: missing {what}")
    return sorter[idx]


def _row_keys(rows: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(rows.astype(np.int64)).view([("", np.int64)] * rows.shape[1]).ravel()


class FilteredComplex:
    """Simplices of dimension 0..2 with filtration values and a total order.

    Construction checks closure under faces, strictly increasing vertex ids
    and face monotonicity, raising :class:`ContractViolation` otherwise.
    """

    def __init__(
        self,
        vertices: np.ndarray,
        edges: np.ndarray,
        triangles: np.ndarray,
        vertex_values: np.ndarray,
        edge_values: np.ndarray,
        triangle_values: np.ndarray,
        *,
        edge_faces: np.ndarray | None = None,
        triangle_faces: np.ndarray | None = None,
        shape: tuple[int, int] | None = None,
    ) -> None:
        self.vertices = np.asarray(vertices, dtype=np.int64).reshape(-1)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        self.values = tuple(
            np.asarray(v, dtype=np.float64).reshape(-1)
            for v in (vertex_values, edge_values, triangle_values)
        )
        self.shape = shape
        for arr, vals, name in zip((self.vertices, self.edges, self.triangles), self.values,
                                   ("vertex", "edge", "triangle")):
            if len(arr) != len(vals):
                raise ContractViolation(f"{name} value count does not match {name} count")
            if not np.all(np.isfinite(vals)):
                raise ContractViolation(f"non-finite {name} filtration value")
        for arr in (self.edges, self.triangles):
            if len(arr) and np.any(np.diff(arr, axis=1) <= 0):
                raise ContractViolation("simplex vertex ids must be strictly increasing")

        self.edge_faces = self._faces_of_edges() if edge_faces is None else np.asarray(edge_faces)
        self.triangle_faces = (
            self._faces_of_triangles() if triangle_faces is None else np.asarray(triangle_faces)
        )
        vv, ev, tv = self.values
        if len(self.edges) and np.any(ev < vv[self.edge_faces].max(axis=1)):
            raise ContractViolation("face monotonicity violated: edge below one of its vertices")
        if len(self.triangles) and np.any(tv < ev[self.triangle_faces].max(axis=1)):
            raise ContractViolation("face monotonicity violated: triangle below one of its edges")
        for vals in (vv, ev, tv):
            vals.flags.writeable = False

    # -- construction helpers -------------------------------------------------

    def _faces_of_edges(self) -> np.ndarray:
        if len(np.unique(self.vertices)) != len(self.vertices):
            raise ContractViolation("duplicate vertex")
        sorter = np.argsort(self.vertices, kind="stable")
        return _locate(self.edges, self.vertices[sorter], sorter, "vertex").reshape(-1, 2)

    def _faces_of_triangles(self) -> np.ndarray:
        if len(self.triangles) == 0:
            return np.empty((0, 3), dtype=np.int64)
        keys = _row_keys(self.edges)
        sorter = np.argsort(keys, kind="stable")
        sorted_keys = keys[sorter]
        if len(sorted_keys) > 1 and np.any(sorted_keys[1:] == sorted_keys[:-1]):
            raise ContractViolation("duplicate edge")
        t = self.triangles
        faces = np.stack([t[:, [0, 1]], t[:, [0, 2]], t[:, [1, 2]]], axis=1)
        found = _locate(_row_keys(faces.reshape(-1, 2)), sorted_keys, sorter, "edge")
        return found.reshape(-1, 3)

    @classmethod
    def from_simplices(cls, values: Mapping[Sequence[int], float] | Iterable[tuple[Sequence[int], float]]
                       ) -> FilteredComplex:
        """Build from ``{vertex_tuple: value}`` pairs, for small hand-made complexes."""
        items = values.items() if isinstance(values, Mapping) else values
        by_dim: list[list] = [[], [], []]
        for verts, val in items:
            s = Simplex(tuple(verts))
            by_dim[s.dimension].append((s.vertices, float(val)))
        arrays = []
        for d, entries in enumerate(by_dim):
            verts = np.array([v for v, _ in entries], dtype=np.int64).reshape(-1, d + 1)
            vals = np.array([x for _, x in entries], dtype=np.float64)
            arrays.append((verts, vals))
        return cls(arrays[0][0].ravel(), arrays[1][0], arrays[2][0],
                   arrays[0][1], arrays[1][1], arrays[2][1])

    # -- order ------------------------------------------------------------------

    @cached_property
    def _order(self) -> tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
        vv, ev, tv = self.values
        within = (
            np.lexsort((self.vertices, vv)),
            np.lexsort((self.edges[:, 1], self.edges[:, 0], ev)),
            np.lexsort((self.triangles[:, 2], self.triangles[:, 1], self.triangles[:, 0], tv)),
        )
        sorted_vals = np.concatenate([vals[w] for vals, w in zip(self.values, within)])
        # stable sort on value keeps dimension-major, lexicographic order among ties
        merged = np.argsort(sorted_vals, kind="stable")
        rank = np.empty(len(merged), dtype=np.int64)
        rank[merged] = np.arange(len(merged), dtype=np.int64)
        positions = []
        offset = 0
        for w in within:
            pos = np.empty(len(w), dtype=np.int64)
            pos[w] = rank[offset:offset + len(w)]
            positions.append(pos)
            offset += len(w)
        return tuple(within), tuple(positions)

    @property
    def within_dim_order(self) -> tuple[np.ndarray, ...]:
        """Per dimension, indices of simplices listed in filtration order."""
        return self._order[0]

    @property
    def positions(self) -> tuple[np.ndarray, ...]:
        """Per dimension, the global position of each simplex in the total order."""
        return self._order[1]

    # -- queries ------------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.vertices) + len(self.edges) + len(self.triangles)

    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.triangles)

    def max_value(self) -> float:
        return float(max(v.max() for v in self.values if len(v)))

    def simplex_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.vertices.reshape(-1, 1), self.edges, self.triangles

    def simplices(self) -> list[tuple[Simplex, float]]:
        """All simplices with their values, in filtration order (small complexes)."""
        dims = np.concatenate([np.full(len(p), d) for d, p in enumerate(self.positions)])
        idx = np.concatenate([np.arange(len(p)) for p in self.positions])
        pos = np.concatenate(self.positions)
        arrays = self.simplex_arrays()
        out = []
        for k in np.argsort(pos):
            d, i = int(dims[k]), int(idx[k])
            out.append((Simplex(tuple(arrays[d][i].tolist())), float(self.values[d][i])))
        return out

    def sublevel(self, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Boolean membership per dimension of the subcomplex {value <= t}."""
        return tuple(vals <= t for vals in self.values)


def build_filtered_complex(field: ScalarField) -> FilteredComplex:
    """Lower-star filtration: each simplex takes the largest value of its vertices."""
    grid = grid_triangulation(field.width, field.height)
    vv = np.asarray(field.values, dtype=np.float64).ravel()
    ev = np.maximum(vv[grid.edges[:, 0]], vv[grid.edges[:, 1]])
    tv = np.maximum(np.maximum(vv[grid.triangles[:, 0]], vv[grid.triangles[:, 1]]),
                    vv[grid.triangles[:, 2]])
    return FilteredComplex(
        np.arange(grid.n_vertices, dtype=np.int64), grid.edges, grid.triangles, vv, ev, tv,
        edge_faces=grid.edges, triangle_faces=grid.triangle_edges,
        shape=(field.height, field.width),
    )
