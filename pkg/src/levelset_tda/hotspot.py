"""Hotspot reports for thresholded region maps.

Regions whose value fails the threshold predicate are cut out of the initial
manifold.  A cluster of such regions that is surrounded by qualifying
regions shows up as a 1D class born at time 0; classes born later come from
the shape of the map.  Neither correspondence is one-to-one, and the report
says so.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .ingest import Direction, RegionMap, excluded_regions, pad_mask, rasterize_regions
from .persistence import PersistenceDiagram
from .pipeline import mask_persistence

CAVEATS = (
    "Candidate hotspots only: classes born at time 0 do not map one-to-one onto hotspots.",
    "A class born at time 0 may be a hole in the map itself (e.g. a region missing from "
    "the data) rather than a cluster of high-value regions.",
    "A cluster of excluded regions touching the edge of the map does not enclose a hole, "
    "so it may produce no class at all, or only a later-born one.",
    "Classes born after time 0 usually reflect region geometry (narrow necks pinching "
    "shut), not case counts.",
)


@dataclass(frozen=True)
class HotspotReport:
    threshold: float
    direction: str
    born_at_zero_1d: tuple[tuple[float, float], ...]
    late_born_1d: tuple[tuple[float, float], ...]
    excluded_region_ids: tuple[str, ...]
    caveats: tuple[str, ...] = field(default=CAVEATS)

    @property
    def n_born_at_zero(self) -> int:
        return len(self.born_at_zero_1d)

    @property
    def n_late_born(self) -> int:
        return len(self.late_born_1d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "threshold": self.threshold,
            "direction": self.direction,
            "born_at_zero_1d": {"count": self.n_born_at_zero,
                                "pairs": [list(p) for p in self.born_at_zero_1d]},
            "late_born_1d": {"count": self.n_late_born,
                             "pairs": [list(p) for p in self.late_born_1d]},
            "excluded_region_ids": list(self.excluded_region_ids),
            "caveats": list(self.caveats),
        }

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")

    def summary_table(self) -> str:
        rows = [
            ("threshold", f"{self.direction} {self.threshold:g}"),
            ("excluded regions", str(len(self.excluded_region_ids))),
            ("1D classes born at 0 (candidate hotspots)", str(self.n_born_at_zero)),
            ("1D classes born later", str(self.n_late_born)),
        ]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        if self.born_at_zero_1d:
            lines.append("candidate hotspot sizes (death time):")
            lines += [f"  {d:.4g}" for _, d in self.born_at_zero_1d]
        lines.append("caveats:")
        lines += [f"  - {c}" for c in self.caveats]
        return "\n".join(lines)


def classify_hotspots(diagram: PersistenceDiagram, region_map: RegionMap, threshold: float,
                      direction: Direction) -> HotspotReport:
    finite_1d = diagram.finite(1)
    return HotspotReport(
        threshold=float(threshold),
        direction=direction,
        born_at_zero_1d=tuple((p.birth, p.death) for p in finite_1d if p.birth == 0),
        late_born_1d=tuple((p.birth, p.death) for p in finite_1d if p.birth > 0),
        excluded_region_ids=tuple(excluded_regions(region_map, threshold, direction)),
    )


def analyze_hotspots(
    region_map: RegionMap,
    threshold: float,
    direction: Direction,
    resolution: float,
    speed: float = 1.0,
    pad: int = 0,
    *,
    truncate_essential: bool = False,
) -> tuple[PersistenceDiagram, HotspotReport]:
    """Rasterize, grow, and compute persistence for a thresholded region map."""
    mask = pad_mask(rasterize_regions(region_map, threshold, direction, resolution), pad)
    diagram = mask_persistence(
        mask, speed, truncate_essential=truncate_essential,
        metadata={"source": "region map", "threshold": float(threshold), "direction": direction,
                  "resolution": float(resolution), "pad": int(pad)},
    )
    return diagram, classify_hotspots(diagram, region_map, threshold, direction)
