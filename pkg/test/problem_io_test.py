import json

import openpyxl
import pandas as pd
import pytest

from fracsubspace import catalog
from fracsubspace.errors import SchemaError
from fracsubspace.examples import example_ids, problem_spec
from fracsubspace.problem_reader import problem_from_dict, read_problem
from fracsubspace.problem_writer import problem_to_dict, write_problem, write_samples
from fracsubspace.spec import SCHEMA_VERSION


def test_catalog_survives_json():
    for eid in example_ids():
        original = problem_spec(eid)
        raw = json.loads(json.dumps(problem_to_dict(original)))
        restored, warnings_list = problem_from_dict(raw)
        assert warnings_list == []
        assert restored == original, eid


def test_written_problem_verifies(tmp_path):
    path = tmp_path / "mixed.json"
    spec, _ = catalog.build("mixed", {"alpha1": "0.9"})
    write_problem(spec, str(path))
    loaded, _ = read_problem(str(path))
    assert loaded.params["alpha1"].value == spec.params["alpha1"].value
    report = catalog.verify(loaded, stages=("invariance", "psi_match", "residual"))
    assert report.passed


def test_fractions_are_written_exactly():
    raw = problem_to_dict(problem_spec("burgers-coupled"))
    assert raw["schema_version"] == SCHEMA_VERSION
    assert raw["params"]["alpha"]["value"] == "3/10"
    assert raw["params"]["alpha"]["exclude"] == ["1/2"]
    assert "classical" not in raw


@pytest.mark.parametrize("version,ok,warns", [
    ("1.0", True, False),
    ("1.7", True, True),
    ("", True, True),
    ("2.0", False, False),
    ("one", False, False),
])
def test_schema_version(version, ok, warns):
    raw = problem_to_dict(problem_spec("population"))
    raw["schema_version"] = version
    if not ok:
        with pytest.raises(SchemaError):
            problem_from_dict(raw)
        return
    _, warnings_list = problem_from_dict(raw)
    assert bool(warnings_list) is warns


def test_reader_reports_structure_errors(tmp_path):
    raw = problem_to_dict(problem_spec("population"))
    del raw["N"]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(SchemaError, match="broken.json: problem misses fields \\['N'\\]"):
        read_problem(str(path))

    raw = problem_to_dict(problem_spec("population"))
    raw["time_kind"] = "grunwald"
    with pytest.raises(SchemaError, match="time_kind"):
        problem_from_dict(raw)

    raw = problem_to_dict(problem_spec("population"))
    raw["grid"]["t"] = [0, 1]
    with pytest.raises(SchemaError, match="low, high, count"):
        problem_from_dict(raw)


def test_reader_warns_without_primary_subspace():
    raw = problem_to_dict(problem_spec("population"))
    raw["subspaces"] = {"other": raw["subspaces"]["default"]}
    _, warnings_list = problem_from_dict(raw)
    assert any("'default'" in w for w in warnings_list)


def test_reader_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError, match="invalid JSON"):
        read_problem(str(bad))
    with pytest.raises(SchemaError):
        read_problem(str(tmp_path / "missing.json"))


def test_csv_samples(tmp_path):
    frame = pd.DataFrame({"t": [0.1, 0.2], "x": [1.0, 1.0], "f": [1 / 3, 2 / 3]})
    path = tmp_path / "out.csv"
    write_samples(frame, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,f"
    assert lines[1].split(",")[2] == "0.33333333333333331"
    assert pd.read_csv(path)["f"].tolist() == frame["f"].tolist()


def test_xlsx_samples(tmp_path):
    frame = pd.DataFrame({"t": [0.1, 0.2], "f": [1.5, 2.5]})
    path = tmp_path / "out.xlsx"
    write_samples(frame, str(path), "xlsx")
    ws = openpyxl.load_workbook(path).active
    rows = list(ws.iter_rows(values_only=True))
    assert rows == [("t", "f"), (0.1, 1.5), (0.2, 2.5)]
    assert ws["A1"].font.bold
    assert ws.freeze_panes == "A2"


def test_sample_format_errors():
    frame = pd.DataFrame({"t": [0.0]})
    with pytest.raises(SchemaError):
        write_samples(frame, "-", "parquet")
    with pytest.raises(SchemaError):
        write_samples(frame, "-", "xlsx")
