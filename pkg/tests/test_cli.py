import io
import json

import pytest

from sparsecert.cli import run


def write(tmp_path, doc, name="prob.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


UNIT = {"kind": "closed", "a": "0", "b": "1"}


@pytest.mark.parametrize("gamma", ["0.5", "2"])
def test_decompose_constant(tmp_path, gamma):
    doc = {"version": 1, "task": "decompose",
           "polynomial": {"exponents": ["0", gamma], "coefficients": ["1", "0"]},
           "interval": UNIT}
    code, out, _ = call(["decompose", "--input", write(tmp_path, doc), "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["f_star"]["coefficients"] == pytest.approx([0, 1], abs=1e-10)
    assert rep["f_upper"]["coefficients"] == pytest.approx([1, -1], abs=1e-10)
    assert rep["verification"]["residual"] <= 1e-8


def test_et_counterexample_exit_code(tmp_path):
    doc = {"version": 1, "family": {"kind": "powers", "exponents": [0, 1, 3]},
           "interval": UNIT, "mode": "et"}
    code, out, _ = call(["check-tsystem", "--input", write(tmp_path, doc)])
    assert code == 1
    assert json.loads(out)["witness"] == [0.0, 0.0, 0.0]


def test_malformed_json(tmp_path):
    code, out, err = call(["decompose", "--input", write(tmp_path, '{"version": 1,')])
    assert code == 2 and out == ""
    assert json.loads(err)["code"] == "UsageError"


def test_wrong_version_and_missing_file(tmp_path):
    code, _, err = call(["hankel", "--input", write(tmp_path, {"version": 2})])
    assert code == 2
    code, _, err = call(["hankel", "--input", str(tmp_path / "nope.json")])
    assert code == 2 and "code" in json.loads(err)


def test_unknown_subcommand(tmp_path):
    code, _, err = call(["explode", "--input", "x"])
    assert code == 2


def test_library_input_error_maps_to_2(tmp_path):
    doc = {"version": 1, "polynomial": {"exponents": [1, 0], "coefficients": [1, 1]},
           "interval": UNIT}
    code, _, err = call(["decompose", "--input", write(tmp_path, doc)])
    assert code == 2
    assert json.loads(err)["code"] == "ShapeError"


def test_not_positive_reports_witness(tmp_path):
    doc = {"version": 1, "polynomial": {"exponents": [0, 1], "coefficients": ["-0.5", "1"]},
           "interval": UNIT}
    code, out, _ = call(["decompose", "--input", write(tmp_path, doc)])
    assert code == 1
    assert json.loads(out)["status"] == "not-positive"


def test_moment_check_infeasible_csv(tmp_path):
    doc = {"version": 1, "sequence": {"exponents": [0, 1], "values": ["1", "2"]}, "interval": UNIT}
    code, out, _ = call(["moment-check", "--input", write(tmp_path, doc), "--format", "csv"])
    assert code == 1
    lines = out.strip().splitlines()
    assert lines[0] == "kind,min_value,key,value"
    assert lines[1].startswith("infeasible,")


def test_recover_and_signed(tmp_path):
    doc = {"version": 1, "sequence": {"exponents": [0, 1, 2, 3],
                                      "values": [1, 0.5, 0.3125, 0.21875]}, "interval": UNIT}
    code, out, _ = call(["recover-atoms", "--input", write(tmp_path, doc)])
    assert code == 0
    rep = json.loads(out)
    assert rep["atoms"] == pytest.approx([0.25, 0.75], abs=1e-6)
    doc = {"version": 1, "sequence": {"exponents": [0, 1], "values": [1, 5]}, "points": [0, 1]}
    code, out, _ = call(["signed-repr", "--input", write(tmp_path, doc, "s.json"), "--format", "csv"])
    assert code == 0
    assert out.splitlines()[1:] == ["0.0,-4.0", "1.0,5.0"]


def test_hankel_report(tmp_path):
    doc = {"version": 1, "sequence": {"exponents": [0, 1, 2], "values": [1, 0, 1]}}
    code, out, _ = call(["hankel", "--input", write(tmp_path, doc)])
    checks = json.loads(out)["checks"]
    assert code == 0
    assert checks["hamburger"]["passed"] and not checks["stieltjes"]["passed"]


def test_emit_samples(tmp_path):
    doc = {"version": 1, "polynomial": {"exponents": [0, 1, 2], "coefficients": [1, 0, 1]},
           "interval": UNIT}
    target = tmp_path / "samples.csv"
    code, out, _ = call(["decompose", "--input", write(tmp_path, doc), "--emit-samples", "11",
                         "--samples-path", str(target)])
    assert code == 0
    rows = target.read_text().splitlines()
    assert rows[0] == "x,f,f_star,f_upper" and len(rows) == 12


def test_reports_are_byte_identical(tmp_path):
    doc = {"version": 1, "polynomial": {"exponents": [0, 0.6, 1.7, 2.3],
                                        "coefficients": [1, -0.4, 0.2, 1]},
           "interval": {"kind": "closed", "a": 0, "b": 2}, "seed": 7}
    path = write(tmp_path, doc)
    assert call(["decompose", "--input", path])[1] == call(["decompose", "--input", path])[1]


def test_task_mismatch(tmp_path):
    doc = {"version": 1, "task": "hankel", "sequence": {"exponents": [0], "values": [1]}}
    code, _, _ = call(["decompose", "--input", write(tmp_path, doc)])
    assert code == 2


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SPARSECERT_THREADS", "2")
    doc = {"version": 1, "sequence": {"exponents": [0, 1, 2, 3, 4],
                                      "values": [1, 0.5, 0.3, 0.2, 0.15]}, "interval": UNIT}
    path = write(tmp_path, doc)
    a = call(["moment-check", "--input", path])
    monkeypatch.setenv("SPARSECERT_THREADS", "1")
    b = call(["moment-check", "--input", path])
    assert a == b
