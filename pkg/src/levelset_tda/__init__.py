"""Persistent homology of 2D spatial data through level-set filtrations.

Pipeline: mask (image or thresholded region map) -> arrival-time field of
the outward-growing front -> lower-star filtration on a triangulated grid ->
persistence diagram -> exports, plots, band counts and hotspot reports.
"""

from .complex import FilteredComplex, Simplex, boundary, build_filtered_complex, triangulate_grid
from .diagram_io import (BandSummary, band_summary, export_diagram, parse_diagram,
                         render_diagram)
from .errors import ContractViolation, DomainError, EmptyManifoldError, InputError, LevelSetError
from .hotspot import HotspotReport, analyze_hotspots
from .ingest import (BinaryMask, Region, RegionMap, load_mask_from_image, pad_mask,
                     rasterize_regions, read_geojson, read_image)
from .levelset import ScalarField, arrival_time_field, sublevel_manifold
from .persistence import (PersistenceDiagram, PersistencePair, betti_at, brute_force_betti,
                          compute_persistence)
from .pipeline import mask_persistence

__all__ = [
    "BandSummary", "BinaryMask", "ContractViolation", "DomainError", "EmptyManifoldError",
    "FilteredComplex", "HotspotReport", "InputError", "LevelSetError", "PersistenceDiagram",
    "PersistencePair", "Region", "RegionMap", "ScalarField", "Simplex", "analyze_hotspots",
    "arrival_time_field", "band_summary", "betti_at", "boundary", "brute_force_betti",
    "build_filtered_complex", "compute_persistence", "export_diagram", "load_mask_from_image",
    "mask_persistence", "pad_mask", "parse_diagram", "rasterize_regions", "read_geojson",
    "read_image", "render_diagram", "sublevel_manifold", "triangulate_grid",
]
