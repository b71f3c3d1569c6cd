import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from chordgeo.cli import main
from chordgeo.geometry import HPolytope, body_to_json, unit_ball_volume
from chordgeo.chord_measure import chord_measure_polytope
from chordgeo.report import Report


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ball_file(tmp_path):
    p = tmp_path / "ball.json"
    p.write_text(json.dumps({"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0}))
    return str(p)


@pytest.fixture
def cube_file(tmp_path):
    cube = HPolytope(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))
    p = tmp_path / "cube.json"
    p.write_text(json.dumps(body_to_json(cube)))
    return str(p)


def _strip_time(payload: str) -> dict:
    doc = json.loads(payload)
    doc.pop("wall_time_ms")
    return doc


def test_chord_ball_closed(runner, ball_file):
    out = runner.invoke(main, ["chord", ball_file, "--q", "1"])
    assert out.exit_code == 0
    doc = json.loads(out.output)
    assert doc["results"]["value"] == pytest.approx(4.0 * math.pi / 3.0, rel=1e-9)
    assert doc["command"] == "chord"


def test_chord_line_mc_deterministic(runner, ball_file):
    args = ["chord", ball_file, "--q", "1.5", "--method", "line_mc", "--samples", "20000", "--seed", "3"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == b.exit_code == 0
    assert _strip_time(a.output) == _strip_time(b.output)


def test_chord_bad_file_exit_1(runner, tmp_path):
    missing = str(tmp_path / "nope.json")
    out = runner.invoke(main, ["chord", missing])
    assert out.exit_code == 1


def test_dualv_center(runner, ball_file):
    out = runner.invoke(main, ["dualv", ball_file, "--z", "0,0,0", "--q", "2"])
    assert out.exit_code == 0
    doc = json.loads(out.output)
    assert doc["results"]["value"] == pytest.approx(unit_ball_volume(3), rel=1e-6)


def test_dualv_dimension_mismatch(runner, ball_file):
    out = runner.invoke(main, ["dualv", ball_file, "--z", "0,0"])
    assert out.exit_code == 1


def test_measure_roundtrip_to_solver(runner, cube_file, tmp_path):
    out = runner.invoke(main, ["measure", cube_file, "--q", "1"])
    assert out.exit_code == 0
    doc = json.loads(out.output)
    masses = [a["mass"] for a in doc["results"]["measure"]["atoms"]]
    assert masses == pytest.approx([4.0] * 6)

    mfile = tmp_path / "mu.json"
    mfile.write_text(json.dumps(doc["results"]["measure"]))
    sout = runner.invoke(main, ["solve", str(mfile), "--problem", "chord", "--q", "1"])
    assert sout.exit_code == 0
    sdoc = json.loads(sout.output)
    assert sdoc["checks"][0]["pass"] is True
    assert sdoc["results"]["residual"] <= 1e-2


def test_measure_flag_conflict(runner, cube_file):
    out = runner.invoke(main, ["measure", cube_file, "--cone", "--lp", "0.5"])
    assert out.exit_code == 1


def test_solve_invalid_data_exit_1(runner, tmp_path):
    mu = {
        "dim": 3,
        "atoms": [
            {"u": [1.0, 0.0, 0.0], "mass": 1.0},
            {"u": [0.0, 1.0, 0.0], "mass": 1.0},
            {"u": [0.0, 0.0, 1.0], "mass": 1.0},
        ],
    }
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(mu))
    out = runner.invoke(main, ["solve", str(f), "--problem", "chord", "--q", "1"])
    assert out.exit_code == 1


def test_sharpness_exit_codes(runner):
    ok = runner.invoke(main, ["sharpness", "--n", "3", "--k", "1", "--q", "3", "--jmax", "16"])
    assert ok.exit_code == 0
    doc = json.loads(ok.output)
    assert doc["checks"][0]["pass"] is True
    # j stops far too early for the ratio to approach the limit: check fails
    bad = runner.invoke(main, ["sharpness", "--n", "3", "--k", "1", "--q", "3", "--jmax", "1"])
    assert bad.exit_code == 2


def test_csv_output(runner, ball_file, tmp_path):
    csv_path = tmp_path / "out.csv"
    out = runner.invoke(main, ["chord", ball_file, "--q", "1", "--csv", str(csv_path)])
    assert out.exit_code == 0
    assert csv_path.exists()


def test_config_file_defaults(runner, cube_file, tmp_path):
    cfgf = tmp_path / "cfg.json"
    # polytope at q = 2 has no closed form: forcing the closed method fails
    cfgf.write_text(json.dumps({"q": 2.0, "method": "closed"}))
    out = runner.invoke(main, ["chord", cube_file, "--config", str(cfgf)])
    assert out.exit_code == 1
    cfgf.write_text(json.dumps({"q": 0.0, "method": "closed"}))
    out = runner.invoke(main, ["chord", cube_file, "--config", str(cfgf)])
    assert out.exit_code == 0
    doc = json.loads(out.output)
    assert doc["inputs"]["q"] == 0.0
    # explicit flag beats the config default
    out2 = runner.invoke(main, ["chord", cube_file, "--config", str(cfgf), "--q", "1"])
    assert json.loads(out2.output)["inputs"]["q"] == 1.0


def test_report_roundtrip_parse(runner, ball_file):
    out = runner.invoke(main, ["chord", ball_file, "--q", "1"])
    rep = Report.loads(out.output)
    assert rep.command == "chord"
    assert rep.version
