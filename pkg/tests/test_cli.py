from __future__ import annotations

import json

import numpy as np
import pytest

from levelset_tda import cli
from levelset_tda.diagram_io import parse_csv
from levelset_tda.ingest import write_image
from levelset_tda.persistence import brute_force_betti
from levelset_tda.synthetic import grid_city

from conftest import complex_of


def _square(fid, x, y, cases):
    ring = [[x, y], [x + 1, y], [x + 1, y + 1], [x, y + 1], [x, y]]
    return {"type": "Feature", "id": fid, "properties": {"cases": cases},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


def _geo(tmp_path, grid, name="map.geojson"):
    n = len(grid)
    feats = [_square(f"r{i}c{j}", j, n - 1 - i, v) for i, row in enumerate(grid) for j, v in enumerate(row)]
    path = tmp_path / name
    path.write_text(json.dumps({"type": "FeatureCollection", "features": feats}))
    return path


def test_image_grid_city(tmp_path, capsys):
    img = grid_city(2, 6).to_image()
    write_image(tmp_path / "city.png", img)
    code = cli.main(["image", str(tmp_path / "city.png"), "--out-dir", str(tmp_path / "out"), "--plot"])
    assert code == 0
    D = parse_csv((tmp_path / "out" / "city_diagram.csv").read_bytes())
    oracle = brute_force_betti(complex_of(grid_city(2, 6)), 0.0, 1)
    assert len(D.finite(1)) == oracle == 4
    assert (tmp_path / "out" / "city_diagram.svg").exists()
    bands = json.loads((tmp_path / "out" / "city_bands.json").read_text())
    assert bands["bands"][0]["counts"]["1"] == 4
    assert "death band" in capsys.readouterr().out


def test_image_all_white_exit_3(tmp_path):
    write_image(tmp_path / "w.png", np.full((4, 4), 255))
    assert cli.main(["image", str(tmp_path / "w.png"), "--out-dir", str(tmp_path)]) == 3


def test_image_all_black(tmp_path):
    write_image(tmp_path / "b.png", np.zeros((4, 4)))
    assert cli.main(["image", str(tmp_path / "b.png"), "--out-dir", str(tmp_path)]) == 0
    body = (tmp_path / "b_diagram.csv").read_text().splitlines()[1:]
    assert body == ["0,0,inf"]


def test_image_missing_file_exit_2(tmp_path):
    assert cli.main(["image", str(tmp_path / "none.png"), "--out-dir", str(tmp_path)]) == 2


def test_image_dump_field(tmp_path):
    write_image(tmp_path / "c.pgm", grid_city(1, 4).to_image())
    assert cli.main(["image", str(tmp_path / "c.pgm"), "--out-dir", str(tmp_path), "--dump-field"]) == 0
    assert (tmp_path / "c_field.pgm").exists()


def test_image_artifacts_deterministic(tmp_path):
    write_image(tmp_path / "x.png", grid_city(2, 5).to_image())
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["image", str(tmp_path / "x.png"), "--out-dir", str(out), "--speed", "0.5"]) == 0
        outs.append([(out / f"x_diagram.{ext}").read_bytes() for ext in ("csv", "json")])
    assert outs[0] == outs[1]


def test_geo_center_hotspot(tmp_path, capsys):
    path = _geo(tmp_path, [[100, 100, 100], [100, 900, 100], [100, 100, 100]])
    code = cli.main(["geo", str(path), "--attribute", "cases", "--threshold", "750",
                     "--resolution", "10", "--out-dir", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "map_hotspots.json").read_text())
    assert report["born_at_zero_1d"]["count"] == 1
    assert report["excluded_region_ids"] == ["r1c1"]
    assert "candidate" in capsys.readouterr().out.lower()


def test_geo_all_hot_exit_3(tmp_path):
    path = _geo(tmp_path, [[800, 900], [1000, 750]])
    assert cli.main(["geo", str(path), "--attribute", "cases", "--threshold", "750",
                     "--resolution", "4", "--out-dir", str(tmp_path)]) == 3


def test_geo_at_or_above_complement(tmp_path):
    grid = [[900, 900, 900], [900, 100, 900], [900, 900, 900]]
    path = _geo(tmp_path, grid)
    code = cli.main(["geo", str(path), "--attribute", "cases", "--threshold", "750",
                     "--direction", "at-or-above", "--resolution", "5", "--out-dir", str(tmp_path)])
    assert code == 0
    from levelset_tda.ingest import rasterize_regions, region_grid

    mask = rasterize_regions(region_grid(grid), 750, "at-or-above", 5)
    report = json.loads((tmp_path / "map_hotspots.json").read_text())
    assert report["born_at_zero_1d"]["count"] == brute_force_betti(complex_of(mask), 0.0, 1) == 1


def test_geo_missing_attribute_exit_2(tmp_path, capsys):
    path = _geo(tmp_path, [[1, 2]])
    data = json.loads(path.read_text())
    del data["features"][1]["properties"]["cases"]
    path.write_text(json.dumps(data))
    code = cli.main(["geo", str(path), "--attribute", "cases", "--threshold", "5",
                     "--resolution", "2", "--out-dir", str(tmp_path)])
    assert code == 2
    assert "r0c1" in capsys.readouterr().err


def test_bad_bands_exit_2(tmp_path):
    write_image(tmp_path / "b.png", np.zeros((2, 2)))
    assert cli.main(["image", str(tmp_path / "b.png"), "--out-dir", str(tmp_path), "--bands", "20,10"]) == 2


def test_validate_passes_and_is_deterministic(capsys):
    assert cli.main(["validate", "--seed", "11", "--instances", "8"]) == 0
    first = capsys.readouterr().out
    assert "seed=11" in first
    assert cli.main(["validate", "--seed", "11", "--instances", "8"]) == 0
    assert capsys.readouterr().out == first


def test_same_seed_same_instances():
    from levelset_tda.validate import random_instances

    a = [(m, s) for m, s, _ in random_instances(5, 6)]
    b = [(m, s) for m, s, _ in random_instances(5, 6)]
    assert a == b


def test_validate_detects_broken_reduction(monkeypatch, capsys):
    from levelset_tda import validate
    from levelset_tda.persistence import PersistenceDiagram, compute_persistence

    def broken(K, **kw):
        D = compute_persistence(K, **kw)
        return PersistenceDiagram(tuple(p for p in D.pairs if p.dimension == 0), D.metadata)

    monkeypatch.setattr(validate, "compute_persistence", broken)
    assert cli.main(["validate", "--seed", "3", "--instances", "20"]) == 1
    captured = capsys.readouterr()
    assert "FAIL" in captured.out and "seed=3" in captured.out
    assert "instance" in captured.err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["image", "x.png", "--speed", "0"])
    assert exc.value.code == 2
