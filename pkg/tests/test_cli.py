import csv
import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from frameport import schemas
from frameport.cli import InputError, RunConfig, main
from frameport.measure import from_dict
from frameport.ot import coupling_from_dict


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "half": write(tmp_path, "half.json", {"dim": 2, "atoms": [[1, 0], [0, 1]], "weights": [0.5, 0.5]}),
        "frame": write(tmp_path, "frame.json", {"dim": 2, "atoms": [[2, 0.5], [-0.3, 1], [1, 1]],
                                                "weights": [0.2, 0.5, 0.3]}),
        "diag14": write(tmp_path, "s.json", {"dim": 2, "rows": [[1, 0], [0, 4]]}),
        "diag91": write(tmp_path, "t.json", {"dim": 2, "rows": [[9, 0], [0, 1]]}),
        "coupling": write(tmp_path, "g.json", {"dim": 1, "pairs": [{"x": [2.0], "y": [0.5], "mass": 1.0}]}),
        "h": write(tmp_path, "h.json", {"dim": 2, "h": [[0.1, 0], [0, 0.2], [-0.1, 0.3]]}),
        "big": write(tmp_path, "big.json", {"dim": 4, "atoms": [[1, 0, 0, 0], [0, 1, 0, 0]],
                                            "weights": [0.5, 0.5]}),
    }


def run(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def test_frame_report_example(files):
    code, text = run(["frame-report", "--input", files["half"]])
    assert code == 0
    report = json.loads(text)
    assert report["result"]["A"] == 0.5 and report["result"]["B"] == 0.5
    assert report["result"]["tight"] is True
    jsonschema.validate(report, schemas.REPORT)


def test_distance_example(files):
    code, text = run(["distance", "--input", files["diag14"], "--input", files["diag91"]])
    report = json.loads(text)
    assert code == 0
    assert abs(report["result"]["bures_squared"] - 5) <= 1e-14
    assert report["provenance"]["bures_squared"] == "gelbrich"


def test_distance_measures_use_oracle(files):
    code, text = run(["distance", "--input", files["half"], "--input", files["frame"]])
    report = json.loads(text)
    assert report["provenance"]["oracle_w2_squared"] == "oracle"
    assert report["result"]["oracle_w2_squared"] >= report["result"]["bures_squared"] - 1e-8


def test_delta_dual_example():
    code, text = run(["delta-dual", "--a", "1", "--lam", "2"])
    assert code == 0
    result = json.loads(text)["result"]
    assert result["measure"] == {"dim": 1, "atoms": [[0.0], [2.0]], "weights": [0.5, 0.5]}
    assert result["certificate"]["valid"] is True
    assert result["mean"] == 1 and result["second_moment"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["frame-report", "--input", "{frame}", "--p", "3", "--grid", "500"],
        ["ellipsoid", "--input", "{frame}"],
        ["distance", "--input", "{diag14}", "--input", "{frame}"],
        ["closest-fiber", "--input", "{frame}", "--input", "{diag91}"],
        ["closest-tight", "--input", "{frame}"],
        ["closest-tight", "--input", "{frame}", "--input", "{diag14}"],
        ["geodesic", "--input", "{frame}", "--input", "{diag91}", "--t", "0.25"],
        ["dual-check", "--input", "{coupling}"],
        ["dual-check", "--input", "{coupling}", "--tol", "1e-6"],
        ["dual-construct", "--input", "{frame}"],
        ["dual-construct", "--input", "{frame}", "--input", "{h}"],
        ["dual-construct", "--input", "{frame}", "--seed", "7"],
        ["delta-dual", "--a", "2", "--lam", "1"],
        ["pfp", "--input", "{half}"],
        ["pfp", "--input", "{half}", "--p", "1.5", "--grid", "300"],
        ["oracle-ot", "--input", "{half}", "--input", "{frame}", "--p", "1"],
    ],
)
def test_every_command_validates_and_is_deterministic(files, argv):
    argv = [a.format(**files) for a in argv]
    code, first = run(argv)
    assert code == 0, first
    report = json.loads(first)
    jsonschema.validate(report, schemas.REPORT)
    assert report["command"] == argv[0]
    for entry in report["inputs"]:
        assert len(entry["sha256"]) == 64
    assert "frame_tol" in report["tolerances"] and "grid" in report["parameters"]
    assert run(argv)[1] == first


def test_dual_construct_certificate(files):
    for extra in ([], ["--input", files["h"]], ["--seed", "3"]):
        code, text = run(["dual-construct", "--input", files["frame"]] + extra)
        cert = json.loads(text)["result"]["certificate"]
        assert cert["valid"] and cert["product_min"] >= 1 - 1e-7


def test_dual_check_reports_distance(files):
    code, text = run(["dual-check", "--input", files["coupling"]])
    result = json.loads(text)["result"]
    assert result["certificate"]["valid"]
    assert abs(result["dual_distance"]["cost_margin"]) <= 1e-12


def test_closest_fiber_oracle_agrees(files):
    code, text = run(["closest-fiber", "--input", files["frame"], "--input", files["diag91"]])
    result = json.loads(text)["result"]
    assert abs(result["oracle_distance"] - result["distance"]) <= 1e-7


def test_csv_output(files):
    code, text = run(["frame-report", "--input", files["half"], "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 2
    record = dict(zip(*rows))
    assert float(record["result.A"]) == 0.5
    # matrices are flattened row-major
    keys = [k for k in rows[0] if k.startswith("result.frame_operator")]
    assert keys == ["result.frame_operator[0][0]", "result.frame_operator[0][1]",
                    "result.frame_operator[1][0]", "result.frame_operator[1][1]"]


def test_env_tolerance(files, monkeypatch):
    monkeypatch.setenv("FRAMEPORT_TOL", "1e-3")
    _, text = run(["frame-report", "--input", files["half"]])
    assert json.loads(text)["tolerances"]["frame_tol"] == 1e-3
    _, text = run(["frame-report", "--input", files["half"], "--tol", "1e-5"])
    assert json.loads(text)["tolerances"]["frame_tol"] == 1e-5
    monkeypatch.setenv("FRAMEPORT_TOL", "-1")
    assert run(["frame-report", "--input", files["half"]])[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["frame-report", "--input", "{missing}"],
        ["frame-report", "--input", "{garbage}"],
        ["frame-report", "--input", "{badweights}"],
        ["frame-report", "--input", "{diag14}"],
        ["frame-report"],
        ["frame-report", "--input", "{half}", "--p", "0.5"],
        ["frame-report", "--input", "{half}", "--tol", "0"],
        ["distance", "--input", "{diag14}"],
        ["delta-dual", "--a", "2", "--lam", "0.1"],
        ["geodesic", "--input", "{half}", "--input", "{diag14}", "--t", "2"],
        ["closest-fiber", "--input", "{half}", "--input", "{neg}"],
        ["not-a-command"],
    ],
)
def test_validation_errors(files, tmp_path, argv):
    files = dict(files)
    files["missing"] = str(tmp_path / "nope.json")
    files["garbage"] = str(tmp_path / "garbage.json")
    (tmp_path / "garbage.json").write_text("{not json")
    files["badweights"] = write(tmp_path, "bw.json", {"dim": 1, "atoms": [[0], [1]], "weights": [0.3, 0.3]})
    files["neg"] = write(tmp_path, "neg.json", {"dim": 2, "rows": [[1, 0], [0, -1]]})
    code, text = run([a.format(**files) for a in argv])
    assert code == 2
    err = json.loads(text)
    jsonschema.validate(err, schemas.ERROR)
    assert err["error"]["code"] == 2


def test_unsupported(files):
    code, text = run(["frame-report", "--input", files["big"], "--p", "3"])
    assert code == 3
    jsonschema.validate(json.loads(text), schemas.ERROR)
    assert run(["frame-report", "--input", files["big"]])[0] == 0


def test_run_config_invariants():
    with pytest.raises(InputError):
        RunConfig(command="pfp", p=0.9)
    with pytest.raises(InputError):
        RunConfig(command="pfp", tol=-1.0)
    with pytest.raises(InputError):
        RunConfig(command="everything")


def test_module_entry_point_byte_identical(files):
    cmd = [sys.executable, "-m", "frameport", "closest-tight", "--input", files["frame"]]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.returncode == 0
    c = subprocess.run([sys.executable, "-m", "frameport", "pfp", "--input", files["big"], "--p", "3"],
                       capture_output=True)
    assert c.returncode == 3


def test_input_schemas_round_trip(files):
    for key, kind in (("half", "measure"), ("diag14", "matrix"), ("coupling", "coupling"), ("h", "h-table")):
        with open(files[key]) as fh:
            obj = json.load(fh)
        assert schemas.detect_kind(obj) == kind
        jsonschema.validate(obj, schemas.INPUT_KINDS[kind])
    with open(files["frame"]) as fh:
        mu = from_dict(json.load(fh))
    jsonschema.validate(mu.to_dict(), schemas.MEASURE)
    with open(files["coupling"]) as fh:
        g = coupling_from_dict(json.load(fh))
    jsonschema.validate(g.to_dict(), schemas.COUPLING)
    np.testing.assert_array_equal(coupling_from_dict(g.to_dict()).right, g.right)
