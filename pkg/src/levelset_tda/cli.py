"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 empty initial
manifold.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import diagram_io
from .errors import EmptyManifoldError, InputError
from .hotspot import analyze_hotspots
from .ingest import (DIRECTIONS, POLARITIES, load_mask_from_image, pad_mask, read_geojson,
                     read_image, write_image)
from .levelset import arrival_time_field
from .persistence import PersistenceDiagram
from .pipeline import mask_persistence
from .validate import check_instances

log = logging.getLogger("levelset_tda")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_EMPTY = 3


def _bands(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad band list {text!r}") from exc


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--speed", type=_positive, default=1.0, help="front speed (default 1)")
    p.add_argument("--pad", type=_nonnegative_int, default=0, help="background margin in cells")
    p.add_argument("--bands", type=_bands, default=diagram_io.DEFAULT_BANDS,
                   help="comma-separated death-time band bounds (default 10,20)")
    p.add_argument("--plot", action="store_true", help="also write an SVG persistence diagram")
    p.add_argument("--truncate-essential", action="store_true",
                   help="report essential classes as dying at the last filtration value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levelset-tda",
        description="Persistent homology of 2D spatial data via level-set filtrations.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    img = sub.add_parser("image", help="street-map image to persistence diagram")
    _common(img)
    img.add_argument("--threshold", type=int, default=128, help="luminance threshold 0-255")
    img.add_argument("--polarity", choices=POLARITIES, default="dark-is-foreground")
    img.add_argument("--dump-field", action="store_true",
                     help="write the arrival-time field as a PGM heatmap")

    geo = sub.add_parser("geo", help="GeoJSON region map to hotspot report")
    _common(geo)
    geo.add_argument("--attribute", required=True, help="numeric feature property to threshold")
    geo.add_argument("--threshold", type=float, required=True)
    geo.add_argument("--direction", choices=DIRECTIONS, default="below")
    geo.add_argument("--resolution", type=_positive, required=True, help="cells per map unit")

    val = sub.add_parser("validate", help="check the reduction against the dense oracle")
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--instances", type=int, default=50)
    val.add_argument("--thresholds", type=int, default=10)
    val.add_argument("--max-side", type=int, default=20)
    return parser


def _write_diagram(diagram: PersistenceDiagram, out_dir: Path, stem: str, args) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {
        "csv": out_dir / f"{stem}_diagram.csv",
        "json": out_dir / f"{stem}_diagram.json",
        "bands": out_dir / f"{stem}_bands.json",
    }
    written["csv"].write_bytes(diagram_io.export_csv(diagram))
    written["json"].write_bytes(diagram_io.export_json(diagram))
    summary = diagram_io.band_summary(diagram, args.bands)
    written["bands"].write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n",
                                encoding="utf-8")
    if args.plot:
        written["svg"] = out_dir / f"{stem}_diagram.svg"
        written["svg"].write_text(diagram_io.render_diagram(diagram, title=stem), encoding="utf-8")
    print(_band_table(summary))
    return written


def _band_table(summary: diagram_io.BandSummary) -> str:
    lines = ["death band        0D    1D"]
    lower = 0.0
    for upper, counts in summary.bands:
        label = f"[{lower:g}, {upper:g})"
        lines.append(f"{label:<16}{counts[0]:>4}  {counts[1]:>4}")
        lower = upper
    return "\n".join(lines)


def run_image(args) -> int:
    image = read_image(args.input)
    mask = pad_mask(load_mask_from_image(image, args.threshold, args.polarity), args.pad)
    stem = args.input.stem
    started = time.perf_counter()
    diagram = mask_persistence(
        mask, args.speed, truncate_essential=args.truncate_essential,
        metadata={"source": args.input.name, "luminance_threshold": args.threshold,
                  "polarity": args.polarity, "pad": args.pad},
    )
    log.info("computed %d pairs in %.2fs", len(diagram), time.perf_counter() - started)
    _write_diagram(diagram, args.out_dir, stem, args)
    if args.dump_field:
        field = arrival_time_field(mask, args.speed).values
        top = field.max() or 1.0
        write_image(args.out_dir / f"{stem}_field.pgm", np.round(field / top * 255))
    return EXIT_OK


def run_geo(args) -> int:
    region_map = read_geojson(args.input, args.attribute)
    diagram, report = analyze_hotspots(region_map, args.threshold, args.direction, args.resolution,
                                       args.speed, args.pad,
                                       truncate_essential=args.truncate_essential)
    stem = args.input.stem
    _write_diagram(diagram, args.out_dir, stem, args)
    (args.out_dir / f"{stem}_hotspots.json").write_bytes(report.to_json())
    print(report.summary_table())
    return EXIT_OK


def run_validate(args) -> int:
    seed = args.seed if args.seed is not None else int(np.random.SeedSequence().entropy % 2**32)
    print(f"validate: seed={seed} instances={args.instances} thresholds={args.thresholds}")
    failures = check_instances(seed, args.instances, args.thresholds, args.max_side,
                               on_mismatch=lambda m: print(m.dump(), file=sys.stderr))
    if failures:
        print(f"FAIL: {len(failures)} mismatches (seed={seed})")
        return EXIT_VALIDATION
    print(f"ok: all checks passed (seed={seed})")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handlers = {"image": run_image, "geo": run_geo, "validate": run_validate}
    try:
        return handlers[args.command](args)
    except EmptyManifoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
