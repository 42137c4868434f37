"""Turn external spatial data into binary masks of the initial manifold.

Two sources are supported: grayscale (or colour) street-map images, and
GeoJSON region maps whose features carry a numeric attribute that is
thresholded to select the regions making up the manifold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Literal, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import EmptyManifoldError, InputError

Polarity = Literal["dark-is-foreground", "light-is-foreground"]
Direction = Literal["below", "at-or-above"]

POLARITIES: tuple[str, ...] = ("dark-is-foreground", "light-is-foreground")
DIRECTIONS: tuple[str, ...] = ("below", "at-or-above")


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Rectangular grid of cells; ``True`` marks a point of the manifold.

    Cells are addressed ``cells[row, col]`` with row 0 at the top.
    """

    cells: np.ndarray

    def __post_init__(self) -> None:
        cells = np.array(self.cells, dtype=bool, copy=True)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise InputError(f"mask must be a nonempty 2D grid, got shape {cells.shape}")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @property
    def height(self) -> int:
        return int(self.cells.shape[0])

    @property
    def width(self) -> int:
        return int(self.cells.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def count(self) -> int:
        return int(self.cells.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self) -> int:
        return hash((self.shape, np.packbits(self.cells).tobytes()))

    def to_image(self, polarity: Polarity = "dark-is-foreground") -> np.ndarray:
        """Encode as an 8-bit image using only luminances 0 and 255."""
        fg, bg = (0, 255) if polarity == "dark-is-foreground" else (255, 0)
        return np.where(self.cells, fg, bg).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class Region:
    """One polygonal region with a scalar attribute.

    ``rings`` holds every ring of the region (outer shells and holes, across
    all parts of a multipolygon); containment uses the even-odd rule.
    """

    id: str
    rings: tuple[np.ndarray, ...]
    value: float

    def __post_init__(self) -> None:
        if not self.rings:
            raise InputError(f"region {self.id!r} has no rings")
        rings = []
        for ring in self.rings:
            arr = np.array(ring, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise InputError(f"region {self.id!r}: ring must be a list of (x, y) points")
            if len(arr) < 4:
                raise InputError(f"region {self.id!r}: ring needs at least 4 vertices, got {len(arr)}")
            if not np.array_equal(arr[0], arr[-1]):
                raise InputError(f"region {self.id!r}: ring is not closed")
            if not np.all(np.isfinite(arr)):
                raise InputError(f"region {self.id!r}: non-finite coordinate")
            if ring_area(arr) == 0.0:
                raise InputError(f"region {self.id!r}: degenerate ring with zero area")
            arr.flags.writeable = False
            rings.append(arr)
        object.__setattr__(self, "rings", tuple(rings))
        value = float(self.value)
        if not math.isfinite(value) or value < 0:
            raise InputError(f"region {self.id!r}: value must be a nonnegative real, got {self.value!r}")
        object.__setattr__(self, "value", value)

    def bounds(self) -> tuple[float, float, float, float]:
        pts = np.concatenate(self.rings)
        return (float(pts[:, 0].min()), float(pts[:, 1].min()),
                float(pts[:, 0].max()), float(pts[:, 1].max()))


@dataclass(frozen=True)
class RegionMap:
    regions: tuple[Region, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "regions", tuple(self.regions))

    def __len__(self) -> int:
        return len(self.regions)

    def bounds(self) -> tuple[float, float, float, float]:
        if not self.regions:
            raise InputError("region map is empty")
        b = np.array([r.bounds() for r in self.regions])
        return (float(b[:, 0].min()), float(b[:, 1].min()),
                float(b[:, 2].max()), float(b[:, 3].max()))


def ring_area(ring: np.ndarray) -> float:
    """Absolute shoelace area of a closed ring."""
    x, y = ring[:, 0], ring[:, 1]
    return abs(float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1]))) / 2.0


def satisfies(value: float, threshold: float, direction: Direction) -> bool:
    if direction == "below":
        return value < threshold
    if direction == "at-or-above":
        return value >= threshold
    raise InputError(f"unknown direction {direction!r}; expected one of {DIRECTIONS}")


# --------------------------------------------------------------------------
# images


def luma(rgb: np.ndarray) -> np.ndarray:
    """Integer luma 0.299R + 0.587G + 0.114B, rounded half up."""
    rgb = rgb.astype(np.int64)
    y = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    return ((y + 500) // 1000).astype(np.uint8)


def read_image(path: str | Path) -> np.ndarray:
    """Read a PNG or binary PGM file as an 8-bit grayscale array."""
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode == "L":
                return np.asarray(img, dtype=np.uint8).copy()
            if mode == "1":
                return np.asarray(img.convert("L"), dtype=np.uint8).copy()
            if mode == "LA":
                return np.asarray(img, dtype=np.uint8)[..., 0].copy()
            if mode in ("P", "PA", "RGBA", "RGBX", "CMYK", "YCbCr"):
                img = img.convert("RGB")
                mode = "RGB"
            if mode == "RGB":
                return luma(np.asarray(img, dtype=np.uint8))
    except (FileNotFoundError, IsADirectoryError, UnidentifiedImageError, OSError) as exc:
        raise InputError(f"cannot read image {str(path)!r}: {exc}") from exc
    raise InputError(f"unsupported image mode {mode!r} in {str(path)!r}; expected 8-bit data")


def write_image(path: str | Path, image: np.ndarray) -> None:
    """Write an 8-bit grayscale array; format follows the suffix (.png, .pgm)."""
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="L").save(path)


def load_mask_from_image(
    image: np.ndarray,
    luminance_threshold: int = 128,
    polarity: Polarity = "dark-is-foreground",
) -> BinaryMask:
    """Threshold a grayscale raster into a mask.

    With ``dark-is-foreground`` a pixel belongs to the manifold when its
    luminance is strictly below the threshold; with ``light-is-foreground``
    when it is at or above it.
    """
    img = np.asarray(image)
    if img.ndim != 2 or img.size == 0:
        raise InputError(f"image must be a nonempty 2D grayscale raster, got shape {img.shape}")
    if not 0 <= int(luminance_threshold) <= 255:
        raise InputError(f"luminance threshold must be in [0, 255], got {luminance_threshold}")
    if polarity == "dark-is-foreground":
        cells = img < luminance_threshold
    elif polarity == "light-is-foreground":
        cells = img >= luminance_threshold
    else:
        raise InputError(f"unknown polarity {polarity!r}; expected one of {POLARITIES}")
    if not cells.any():
        raise EmptyManifoldError("no pixel passes the luminance threshold")
    return BinaryMask(cells)


def pad_mask(mask: BinaryMask, margin: int) -> BinaryMask:
    if margin < 0:
        raise InputError(f"margin must be nonnegative, got {margin}")
    if margin == 0:
        return mask
    return BinaryMask(np.pad(mask.cells, margin, constant_values=False))


# --------------------------------------------------------------------------
# region maps


def _rings_of(geometry: dict[str, Any], fid: str) -> list[list]:
    gtype = geometry.get("type") if isinstance(geometry, dict) else None
    coords = geometry.get("coordinates") if isinstance(geometry, dict) else None
    if gtype == "Polygon":
        return list(coords)
    if gtype == "MultiPolygon":
        return [ring for poly in coords for ring in poly]
    raise InputError(f"feature {fid!r}: unsupported geometry type {gtype!r}")


def regions_from_geojson(data: dict[str, Any], attribute: str) -> RegionMap:
    if not isinstance(data, dict) or data.get("type") != "FeatureCollection":
        raise InputError("GeoJSON input must be a FeatureCollection")
    features = data.get("features")
    if not isinstance(features, list) or not features:
        raise InputError("FeatureCollection has no features")
    regions = []
    for i, feat in enumerate(features):
        props = feat.get("properties") or {}
        fid = feat.get("id", props.get("id", i))
        fid = str(fid)
        if attribute not in props:
            raise InputError(f"feature {fid!r} is missing attribute {attribute!r}")
        value = props[attribute]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InputError(f"feature {fid!r}: attribute {attribute!r} is not numeric ({value!r})")
        rings = _rings_of(feat.get("geometry"), fid)
        regions.append(Region(fid, tuple(np.asarray(r, dtype=float)[:, :2] for r in rings), value))
    return RegionMap(tuple(regions))


def read_geojson(path: str | Path, attribute: str) -> RegionMap:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read GeoJSON {str(path)!r}: {exc}") from exc
    try:
        return regions_from_geojson(data, attribute)
    except (TypeError, IndexError, AttributeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed GeoJSON {str(path)!r}: {exc}") from exc


@dataclass(frozen=True)
class GridFrame:
    """Placement of a cell grid in map coordinates (north up, row 0 at top)."""

    xmin: float
    ymax: float
    resolution: float
    width: int
    height: int

    def centers_x(self) -> np.ndarray:
        return self.xmin + (np.arange(self.width) + 0.5) / self.resolution

    def centers_y(self) -> np.ndarray:
        return self.ymax - (np.arange(self.height) + 0.5) / self.resolution


def grid_frame(region_map: RegionMap, resolution: float) -> GridFrame:
    if not resolution > 0:
        raise InputError(f"resolution must be positive, got {resolution}")
    xmin, ymin, xmax, ymax = region_map.bounds()
    # tolerance keeps 3 units * 10 cells/unit at 30 cells despite float noise
    width = max(1, math.ceil((xmax - xmin) * resolution - 1e-9))
    height = max(1, math.ceil((ymax - ymin) * resolution - 1e-9))
    return GridFrame(xmin, ymax, float(resolution), width, height)


def even_odd_fill(rings: Iterable[np.ndarray], frame: GridFrame) -> np.ndarray:
    """Scanline even-odd fill: which cell centers lie inside the rings."""
    xs = frame.centers_x()
    ys = frame.centers_y()
    segs = np.concatenate([np.stack([r[:-1], r[1:]], axis=1) for r in rings])
    x0, y0 = segs[:, 0, 0], segs[:, 0, 1]
    x1, y1 = segs[:, 1, 0], segs[:, 1, 1]
    out = np.zeros((frame.height, frame.width), dtype=bool)
    for row, y in enumerate(ys):
        hit = (y0 > y) != (y1 > y)
        if not hit.any():
            continue
        t = (y - y0[hit]) / (y1[hit] - y0[hit])
        cross = np.sort(x0[hit] + t * (x1[hit] - x0[hit]))
        n_right = len(cross) - np.searchsorted(cross, xs, side="right")
        out[row] = (n_right % 2) == 1
    return out


def rasterize_regions(
    region_map: RegionMap,
    threshold: float,
    direction: Direction,
    resolution: float,
) -> BinaryMask:
    """Rasterize the union of regions whose value satisfies the predicate.

    A cell is foreground when its center lies inside a selected region. The
    grid covers the bounding box of *all* regions, expanded to whole cells.
    """
    if not region_map.regions:
        raise InputError("region map is empty")
    frame = grid_frame(region_map, resolution)
    cells = np.zeros((frame.height, frame.width), dtype=bool)
    selected = [r for r in region_map.regions if satisfies(r.value, threshold, direction)]
    if not selected:
        raise EmptyManifoldError(f"no region has value {direction} {threshold:g}")
    for region in selected:
        cells |= even_odd_fill(region.rings, frame)
    if not cells.any():
        raise EmptyManifoldError("selected regions cover no cell center; increase resolution")
    return BinaryMask(cells)


def excluded_regions(region_map: RegionMap, threshold: float, direction: Direction) -> list[str]:
    return [r.id for r in region_map.regions if not satisfies(r.value, threshold, direction)]


def square_region(rid: str, x: float, y: float, value: float, side: float = 1.0) -> Region:
    """Axis-aligned square with lower-left corner (x, y); handy for fixtures."""
    ring = np.array([[x, y], [x + side, y], [x + side, y + side], [x, y + side], [x, y]])
    return Region(rid, (ring,), value)


def region_grid(values: Sequence[Sequence[float]], side: float = 1.0) -> RegionMap:
    """Grid of square regions; ``values[i][j]`` is row i counted from the top."""
    n_rows = len(values)
    regions = []
    for i, row in enumerate(values):
        for j, v in enumerate(row):
            regions.append(square_region(f"r{i}c{j}", j * side, (n_rows - 1 - i) * side, v, side))
    return RegionMap(tuple(regions))
