"""Mask-to-diagram pipeline shared by the CLI and the hotspot analysis."""

from __future__ import annotations

from typing import Any

from .complex import build_filtered_complex
from .ingest import BinaryMask
from .levelset import arrival_time_field
from .persistence import PersistenceDiagram, compute_persistence


def mask_persistence(
    mask: BinaryMask,
    speed: float = 1.0,
    *,
    truncate_essential: bool = False,
    metadata: dict[str, Any] | None = None,
) -> PersistenceDiagram:
    """Grow ``mask`` at ``speed`` and return the persistence diagram of the filtration."""
    field = arrival_time_field(mask, speed)
    meta = {"speed": float(speed)}
    meta.update(metadata or {})
    return compute_persistence(build_filtered_complex(field), truncate_essential=truncate_essential,
                               metadata=meta)
