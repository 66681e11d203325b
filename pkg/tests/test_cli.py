import csv
import io
import json
import subprocess
import sys

import pytest

from motskit import __version__
from motskit.cli import main
from motskit.report import clean, csv_text, json_text, write_atomic


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


def test_catalog_lists_five(tmp_path):
    code, out = run(["catalog"], tmp_path)
    assert code == 0
    assert len(json.loads(out.read_text())["families"]) == 5


def test_catalog_ads_expectations(tmp_path):
    code, out = run(["catalog", "--name", "ads_schwarzschild"], tmp_path)
    fam = json.loads(out.read_text())["families"][0]
    vals = {e["quantity"]: e["value"] for e in fam["expectations"]}
    assert vals["scalar_curvature"] == -6.0 and vals["boundary_mean_curvature"] == 2.0


def test_catalog_unknown(tmp_path, capsys):
    code, _ = run(["catalog", "--name", "nope"], tmp_path)
    assert code == 2
    assert "UnknownFamily" in capsys.readouterr().err


def test_verify_warped_passes(tmp_path):
    code, out = run(["verify", "--metric", "warped:eps=1", "--data", "KminusEpsG", "--grid", "16"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 0 and rep["verdict"] == "pass"
    split = next(c for c in rep["checks"] if c["name"] == "splitting")
    assert split["pass"] and split["report"]["verdict"]
    assert rep["version"] == __version__ and rep["config"]["tol"] == 1e-6
    for c in rep["checks"]:
        assert set(c) >= {"name", "value", "expected", "tol", "provenance", "pass"}


def test_verify_kottler_fails_with_reason(tmp_path):
    code, out = run(["verify", "--metric", "kottler:n=3,m=0.5", "--data", "KminusEpsG", "--grid", "8"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 3
    assert rep["reason"] == "interior slices outer trapped"


def test_verify_ads_dec(tmp_path):
    code, out = run(["verify", "--metric", "ads_schwarzschild:n=3,m=0.5", "--check", "dec"], tmp_path)
    rep = json.loads(out.read_text())
    assert code == 0
    assert abs(rep["checks"][0]["value"]) < 1e-12


def test_verify_numerical_error(tmp_path):
    code, out = run(["verify", "--metric", "warped:eps=1,T=0.5", "--check", "splitting", "--grid", "8"], tmp_path)
    assert code == 4
    assert json.loads(out.read_text())["verdict"] == "error"


@pytest.mark.parametrize("args", [
    ["verify", "--metric", "warped:eps=1", "--grid", "4"],
    ["verify", "--metric", "warped:eps=1", "--tol", "0"],
    ["verify", "--metric", "warped:eps=1", "--check", "bogus"],
    ["verify", "--metric", "warped:eps=1", "--eps", "0.5"],
    ["verify", "--metric", "ads_schwarzschild", "--check", "stability"],
])
def test_config_errors(args, tmp_path):
    assert run(args, tmp_path)[0] == 2


def test_verify_csv(tmp_path):
    code, out = run(["verify", "--metric", "ads_schwarzschild", "--check", "dec", "--format", "csv"], tmp_path,
                    "out.csv")
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["name", "value", "expected", "tol", "pass", "provenance"]
    assert rows[1][0] == "dec_margin"


def test_profile_theta_kottler(tmp_path):
    code, out = run(["profile", "--kind", "theta", "--metric", "kottler:n=3,m=0.5", "--data", "KminusEpsG",
                     "--range", "1.01,3", "--samples", "50"], tmp_path, "t.csv")
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert code == 0 and rows[0][0] == "r [L]"
    theta = [float(r[1]) for r in rows[1:]]
    assert len(theta) == 50 and max(theta) < 0
    assert all(b > a for a, b in zip(theta, theta[1:]))


def test_profile_xi(tmp_path):
    code, out = run(["profile", "--kind", "xi", "--range", "0,3", "--samples", "4"], tmp_path, "x.csv")
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[2][1] == repr(2.718281828459045)


def test_profile_spectrum(tmp_path):
    code, out = run(["profile", "--kind", "spectrum", "--metric", "warped:eps=0", "--data", "K0",
                     "--samples", "3"], tmp_path, "s.csv")
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert abs(float(rows[1][1])) < 1e-8


def test_profile_needs_metric(tmp_path):
    assert run(["profile", "--kind", "theta"], tmp_path)[0] == 2


def test_json_cleaning_and_csv():
    import numpy as np
    assert clean({"a": np.float64(1.5), "b": np.array([1, 2]), "c": float("nan"), "d": np.bool_(True)}) == \
        {"a": 1.5, "b": [1, 2], "c": "nan", "d": True}
    assert json_text({"x": 1}).endswith("\n")
    assert csv_text(["a"], [[0.1]]) == "a\n0.1\n"


def test_write_atomic_replaces(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("old")
    write_atomic(p, "new")
    assert p.read_text() == "new"
    assert [q.name for q in tmp_path.iterdir()] == ["f.txt"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "c.json"
    res = subprocess.run([sys.executable, "-m", "motskit.cli", "catalog", "--out", str(out)], capture_output=True)
    assert res.returncode == 0 and out.exists()
