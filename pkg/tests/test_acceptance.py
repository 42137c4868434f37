"""Exit criteria.  A one-line PASS/FAIL per criterion is printed in the
terminal summary (see conftest.py)."""

from __future__ import annotations

import resource
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from levelset_tda.complex import Simplex, boundary, triangulate_grid
from levelset_tda.diagram_io import export_diagram, parse_diagram
from levelset_tda.hotspot import analyze_hotspots
from levelset_tda.ingest import BinaryMask, rasterize_regions, region_grid, write_image
from levelset_tda.levelset import arrival_time_field, sublevel_manifold
from levelset_tda.persistence import brute_force_betti, compute_persistence
from levelset_tda.synthetic import dead_end_block, grid_city, street_map
from levelset_tda.validate import check_instances

from conftest import complex_of, oracle_sweep

# Frozen from oracle sweeps (brute_force_betti over every filtration value).
GRID_CITY_DEATH = {6: 3.0, 10: 5.0, 16: 8.0}
DEAD_END_PAIRS = [(0.0, 5.0), (4.0, 5.0)]

TIME_LIMIT_ORACLE = 60.0
TIME_LIMIT_SCALE = 120.0
MEMORY_LIMIT_MB = 2560


def test_criterion_1_oracle_equivalence():
    started = time.perf_counter()
    failures = check_instances(seed=1729, n_instances=50, n_thresholds=10, max_side=20)
    elapsed = time.perf_counter() - started
    assert failures == [], failures[0].dump()
    assert elapsed < TIME_LIMIT_ORACLE


@pytest.mark.parametrize("s", [6, 10, 16])
def test_criterion_2_grid_city(s):
    n = 4
    # pin the frozen death with the oracle; s=16 at n=4 exceeds the oracle cap,
    # and blocks are separated by streets, so a 2x2 city has the same sweep
    oracle_n = n if s < 16 else 2
    assert oracle_sweep(complex_of(grid_city(oracle_n, s)), 1) == [(0.0, oracle_n ** 2),
                                                                   (GRID_CITY_DEATH[s], 0)]
    D = compute_persistence(complex_of(grid_city(n, s)))
    ones = D.finite(1)
    assert len(ones) == n * n
    assert D.essential(1) == []
    assert all(p.birth == 0 for p in ones)
    assert all(p.death == GRID_CITY_DEATH[s] for p in ones)
    assert all(abs(p.death - s / 2) <= 1.0 for p in ones)


def test_criterion_3_pinching():
    K = complex_of(dead_end_block())
    assert oracle_sweep(K, 1) == [(0.0, 1), (4.0, 2), (5.0, 0)]
    D = compute_persistence(K)
    pairs = [(p.birth, p.death) for p in D.finite(1)]
    assert pairs == DEAD_END_PAIRS
    assert any(b > 0 for b, _ in pairs)


FIXTURES = {
    "center": [[100, 100, 100], [100, 900, 100], [100, 100, 100]],
    "all_below": [[100, 100, 100], [100, 200, 100], [100, 100, 100]],
    "edge": [[100, 900, 100], [100, 100, 100], [100, 100, 100]],
}


def test_criterion_4_hotspots():
    counts = []
    for name in ("center", "all_below", "edge"):
        rmap = region_grid(FIXTURES[name])
        _, report = analyze_hotspots(rmap, 750, "below", 10)
        m0 = rasterize_regions(rmap, 750, "below", 10)
        assert report.n_born_at_zero == brute_force_betti(complex_of(m0), 0.0, 1)
        counts.append(report.n_born_at_zero)
    assert counts == [1, 0, 0]


def _nearest_site(cells):
    sites = np.argwhere(cells)
    rr, cc = np.indices(cells.shape)
    best = np.full(cells.shape, np.inf)
    for r, c in sites:
        best = np.minimum(best, np.hypot(rr - r, cc - c))
    return best


def test_criterion_5_levelset_exactness():
    rng = np.random.default_rng(64)
    for k in range(20):
        cells = rng.random((64, 64)) < rng.uniform(0.001, 0.2)
        if not cells.any():
            cells[rng.integers(64), rng.integers(64)] = True
        mask = BinaryMask(cells)
        f1 = arrival_time_field(mask, 1.0).values
        assert np.max(np.abs(f1 - _nearest_site(cells))) <= 1e-9
        for v in (0.5, 1.0, 2.0):
            assert np.array_equal(arrival_time_field(mask, v).values, f1 / v)


def test_criterion_6_invariants():
    rng = np.random.default_rng(6)
    for s in triangulate_grid(5, 4):
        if s.dimension == 2:
            mult = Counter(v for e in boundary(s) for v in boundary(e))
            assert all(n % 2 == 0 for n in mult.values())
    for _ in range(30):
        h, w = (int(x) for x in rng.integers(1, 30, size=2))
        cells = rng.random((h, w)) < rng.uniform(0.01, 0.5)
        if not cells.any():
            cells[0, 0] = True
        field = arrival_time_field(BinaryMask(cells))
        K = complex_of(cells)
        vv, ev, tv = K.values
        assert np.all(ev >= vv[K.edge_faces].max(axis=1))
        if len(tv):
            assert np.all(tv >= ev[K.triangle_faces].max(axis=1))
        ts = np.sort(rng.choice(np.unique(field.values), size=5))
        grown = [sublevel_manifold(field, float(t)).cells for t in ts]
        assert all(not np.any(a & ~b) for a, b in zip(grown, grown[1:]))
        D = compute_persistence(K)
        assert len(D.essential(0)) == 1 and D.essential(1) == []
        assert all(p.death > p.birth for p in D.pairs)
        for fmt in ("csv", "json"):
            data = export_diagram(D, fmt)
            back = parse_diagram(data, fmt)
            assert back.pairs == D.pairs and export_diagram(back, fmt) == data
    assert Simplex((0, 1, 2)).dimension == 2


@pytest.mark.slow
def test_criterion_7_scale(tmp_path):
    mask = street_map(1000, np.random.default_rng(7))
    write_image(tmp_path / "streets.png", mask.to_image())
    started = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "levelset_tda", "image", str(tmp_path / "streets.png"),
         "--out-dir", str(tmp_path / "out"), "--plot"],
        capture_output=True, text=True,
    )
    elapsed = time.perf_counter() - started
    peak_mb = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss / 1024
    print(f"scale: {elapsed:.1f}s, peak RSS {peak_mb:.0f} MB")
    assert proc.returncode == 0, proc.stderr
    D = parse_diagram((tmp_path / "out" / "streets_diagram.csv").read_bytes())
    assert len(D.essential(0)) == 1 and len(D.finite(1)) > 100
    assert elapsed < TIME_LIMIT_SCALE
    assert peak_mb < MEMORY_LIMIT_MB
