"""Persistence diagram serialization, SVG plots and death-time band counts."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Sequence
from xml.sax.saxutils import escape

from .errors import InputError
from .persistence import PersistenceDiagram, PersistencePair

CSV_HEADER = ("dimension", "birth", "death")
DEFAULT_BANDS = (10.0, 20.0)
DEFAULT_COLORS = {0: "#ff69b4", 1: "#1f5fbf"}  # pink for 0D, blue for 1D


def format_number(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def parse_number(text: str) -> float:
    text = text.strip()
    if text == "inf":
        return math.inf
    try:
        value = float(text)
    except ValueError as exc:
        raise InputError(f"not a number: {text!r}") from exc
    if math.isnan(value):
        raise InputError("NaN is not a valid diagram coordinate")
    return value


def export_csv(diagram: PersistenceDiagram) -> bytes:
    lines = [",".join(CSV_HEADER)]
    lines += [f"{p.dimension},{format_number(p.birth)},{format_number(p.death)}" for p in diagram.pairs]
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_csv(data: bytes | str) -> PersistenceDiagram:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise InputError(f"CSV header must be {','.join(CSV_HEADER)}")
    pairs = []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise InputError(f"line {n}: expected 3 fields, got {len(row)}")
        try:
            dim = int(row[0])
        except ValueError as exc:
            raise InputError(f"line {n}: bad dimension {row[0]!r}") from exc
        pairs.append(PersistencePair(dim, parse_number(row[1]), parse_number(row[2])))
    return PersistenceDiagram(tuple(pairs))


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return format_number(value)
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def export_json(diagram: PersistenceDiagram) -> bytes:
    payload = {
        "metadata": _json_safe(diagram.metadata),
        "pairs": [
            {"dim": p.dimension, "birth": p.birth, "death": "inf" if p.essential else p.death}
            for p in diagram.pairs
        ],
    }
    return (json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n").encode("utf-8")


def parse_json(data: bytes | str) -> PersistenceDiagram:
    try:
        payload = json.loads(data)
        pairs = []
        for item in payload["pairs"]:
            death = item["death"]
            death = math.inf if death == "inf" else float(death)
            pairs.append(PersistencePair(int(item["dim"]), float(item["birth"]), death))
        metadata = payload.get("metadata", {})
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed diagram JSON: {exc}") from exc
    return PersistenceDiagram(tuple(pairs), metadata)


def export_diagram(diagram: PersistenceDiagram, format: str = "csv") -> bytes:
    if format == "csv":
        return export_csv(diagram)
    if format == "json":
        return export_json(diagram)
    raise InputError(f"unknown diagram format {format!r}")


def parse_diagram(data: bytes | str, format: str = "csv") -> PersistenceDiagram:
    if format == "csv":
        return parse_csv(data)
    if format == "json":
        return parse_json(data)
    raise InputError(f"unknown diagram format {format!r}")


# --------------------------------------------------------------------------
# plotting


@dataclass(frozen=True)
class PlotFrame:
    """Maps diagram coordinates (birth, death) onto the SVG canvas."""

    width: float
    height: float
    lo: float
    hi: float
    margin: float = 48.0

    def to_canvas(self, birth: float, death: float) -> tuple[float, float]:
        span = self.hi - self.lo
        x = self.margin + (birth - self.lo) / span * (self.width - 2 * self.margin)
        y = self.height - self.margin - (death - self.lo) / span * (self.height - 2 * self.margin)
        return x, y

    @property
    def essential_y(self) -> float:
        return self.margin / 2


def plot_frame(diagram: PersistenceDiagram, width: float, height: float) -> PlotFrame:
    coords = [p.birth for p in diagram.pairs] + [p.death for p in diagram.pairs if not p.essential]
    lo, hi = min(coords + [0.0]), max(coords + [0.0])
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return PlotFrame(float(width), float(height), lo - pad, hi + pad)


def _f(x: float) -> str:
    return f"{x:.3f}"


def render_diagram(
    diagram: PersistenceDiagram,
    size: tuple[float, float] = (480, 480),
    colors: dict[int, str] | None = None,
    title: str | None = None,
) -> str:
    """SVG scatter plot of a diagram.

    Finite pairs are circles (0D pink, 1D blue by default) above the identity
    line; essential classes are triangles in a strip along the top margin.
    """
    width, height = size
    if width <= 0 or height <= 0:
        raise InputError(f"canvas size must be positive, got {size}")
    palette = {**DEFAULT_COLORS, **(colors or {})}
    frame = plot_frame(diagram, width, height)
    x0, y0 = frame.to_canvas(frame.lo, frame.lo)
    x1, y1 = frame.to_canvas(frame.hi, frame.hi)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="white"/>',
        f'<line class="axis" x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y0)}" stroke="black"/>',
        f'<line class="axis" x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0)}" y2="{_f(y1)}" stroke="black"/>',
        f'<line class="diagonal" x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}" '
        f'stroke="gray" stroke-dasharray="4 3"/>',
        f'<text class="label" x="{_f(width / 2)}" y="{_f(height - 12)}" text-anchor="middle">birth</text>',
        f'<text class="label" x="14" y="{_f(height / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_f(height / 2)})">death</text>',
    ]
    for value in (frame.lo, frame.hi):
        tx, _ = frame.to_canvas(value, frame.lo)
        _, ty = frame.to_canvas(frame.lo, value)
        label = f"{value:.3g}"
        out.append(f'<text class="tick" x="{_f(tx)}" y="{_f(y0 + 16)}" text-anchor="middle">{label}</text>')
        out.append(f'<text class="tick" x="{_f(x0 - 6)}" y="{_f(ty + 4)}" text-anchor="end">{label}</text>')
    if diagram.essential():
        out.append(f'<text class="tick" x="{_f(x0 - 6)}" y="{_f(frame.essential_y + 4)}" '
                   f'text-anchor="end">inf</text>')
    if title:
        out.append(f'<text class="title" x="{_f(width / 2)}" y="16" text-anchor="middle">'
                   f'{escape(title)}</text>')

    for p in diagram.pairs:
        color = palette.get(p.dimension, "black")
        if p.essential:
            cx, _ = frame.to_canvas(p.birth, frame.lo)
            cy = frame.essential_y
            pts = f"{_f(cx)},{_f(cy - 5)} {_f(cx - 5)},{_f(cy + 4)} {_f(cx + 5)},{_f(cy + 4)}"
            out.append(f'<polygon class="essential dim{p.dimension}" points="{pts}" fill="{color}" '
                       f'data-birth="{format_number(p.birth)}"/>')
        else:
            cx, cy = frame.to_canvas(p.birth, p.death)
            out.append(f'<circle class="pair dim{p.dimension}" cx="{_f(cx)}" cy="{_f(cy)}" r="3.5" '
                       f'fill="{color}" fill-opacity="0.8" data-birth="{format_number(p.birth)}" '
                       f'data-death="{format_number(p.death)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# band summary


@dataclass(frozen=True)
class BandSummary:
    """Counts of finite pairs per death-time band, split by dimension.

    Band k covers deaths in ``[bounds[k-1], bounds[k])`` with implicit
    ``bounds[-1] = 0`` and a last band reaching to infinity.
    """

    bounds: tuple[float, ...]
    counts: dict[int, tuple[int, ...]]

    @property
    def bands(self) -> list[tuple[float, dict[int, int]]]:
        uppers = list(self.bounds) + [math.inf]
        return [(u, {d: c[k] for d, c in self.counts.items()}) for k, u in enumerate(uppers)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "bounds": list(self.bounds),
            "bands": [
                {"upper": format_number(u) if math.isinf(u) else u,
                 "counts": {str(d): n for d, n in c.items()}}
                for u, c in self.bands
            ],
        }


def band_summary(diagram: PersistenceDiagram, bounds: Sequence[float] = DEFAULT_BANDS) -> BandSummary:
    bounds = tuple(float(b) for b in bounds)
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])) or any(math.isnan(b) for b in bounds):
        raise InputError(f"band bounds must be strictly increasing, got {list(bounds)}")
    counts = {}
    for dim in (0, 1):
        per = [0] * (len(bounds) + 1)
        for p in diagram.finite(dim):
            k = sum(1 for b in bounds if p.death >= b)
            per[k] += 1
        counts[dim] = tuple(per)
    return BandSummary(bounds, counts)
