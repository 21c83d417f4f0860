import os
import sys

# --------------------------------------
# ADD PROJECT ROOT TO PYTHON PATH
# --------------------------------------
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.abspath(os.path.join(BASE_DIR, ".."))

if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import csv
import json

import numpy as np
import pandas as pd
import pytest

from core.errors import SpecValidation
from reports.export import canonical_json, export_csv, export_json
from reports.operations import OPERATIONS, Operation
from reports.registry import ExperimentSpec, load_index, load_record, run, run_many
from reports.run_logger import CSV_HEADER, log_path, log_run
from reports.suites import SuiteReport, SuiteRow, suite


# ======================================
# EXPORT
# ======================================

def test_export_json_meta_block_and_numpy_values(tmp_path):
    path = export_json({"value": np.float64(1.5), "grid": np.arange(3)}, str(tmp_path / "a" / "out.json"), "claim X")
    with open(path, encoding="utf-8") as f:
        document = json.load(f)

    assert document["meta"]["engine"] == "singularity-engine"
    assert document["meta"]["claim"] == "claim X"
    assert document["value"] == 1.5
    assert document["grid"] == [0, 1, 2]


def test_export_csv_writes_sidecar(tmp_path):
    frame = pd.DataFrame({"delta": [0.1, 0.05], "mass": [1.0, 2.0]})
    paths = export_csv(frame, str(tmp_path / "sweep.csv"), "trace sweep", q=1.25)

    assert paths[0].endswith("sweep.csv")
    assert paths[1].endswith("sweep.meta.json")
    assert list(pd.read_csv(paths[0]).columns) == ["delta", "mass"]
    with open(paths[1], encoding="utf-8") as f:
        sidecar = json.load(f)
    assert sidecar["columns"] == ["delta", "mass"]
    assert sidecar["q"] == 1.25


def test_canonical_json_is_key_order_independent():
    assert canonical_json({"b": 1, "a": [1, 2]}) == canonical_json({"a": [1, 2], "b": 1})


# ======================================
# RUN LOGGER
# ======================================

def test_log_run_appends_rows_under_header(out_dir):
    for name in ("first", "second"):
        log_run({"timestamp": "t", "runName": name, "target": "exponents", "specHash": "h",
                 "status": "ok", "wallSeconds": 0.1234567891, "summaryHash": "s"}, out_dir)

    with open(log_path(out_dir), newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))

    assert rows[0] == CSV_HEADER
    assert [row[1] for row in rows[1:]] == ["first", "second"]
    assert rows[1][5] == "0.123457"


# ======================================
# SPEC VALIDATION
# ======================================

def test_spec_from_json_rejects_unknown_and_missing_keys():
    with pytest.raises(SpecValidation):
        ExperimentSpec.from_json({"name": "a", "target": "exponents", "colour": "red"})
    with pytest.raises(SpecValidation):
        ExperimentSpec.from_json({"name": "a"})
    with pytest.raises(SpecValidation):
        ExperimentSpec.from_json(["not", "an", "object"])


@pytest.mark.parametrize(
    "name,target,params,seed",
    [
        ("bad name", "exponents", {"N": 2, "q": 1.25}, 0),
        ("ok", "no_such_target", {}, 0),
        ("ok", "exponents", {"N": 2, "q": 1.25}, -1),
        ("ok", "exponents", {"N": 2, "q": 1.25}, True),
        ("ok", "exponents", {"N": 4, "q": 1.25}, 0),
        ("ok", "exponents", {"N": 2, "q": 2.5}, 0),
        ("ok", "capacity", {"N": 2, "q": 1.5, "family": "volume"}, 0),
    ],
)
def test_spec_validation_errors(name, target, params, seed, out_dir):
    spec = ExperimentSpec(name, target, params, out_dir, seed)
    with pytest.raises(SpecValidation):
        spec.validate()
    with pytest.raises(SpecValidation):
        run(spec)
    assert load_index(out_dir) == {}


def test_spec_hash_ignores_name_and_out_dir():
    a = ExperimentSpec("a", "exponents", {"N": 2, "q": 1.25}, "x", 3)
    b = ExperimentSpec("b", "exponents", {"q": 1.25, "N": 2}, "y", 3)
    c = ExperimentSpec("a", "exponents", {"N": 2, "q": 1.25}, "x", 4)
    assert a.spec_hash == b.spec_hash
    assert a.spec_hash != c.spec_hash


# ======================================
# REGISTRY
# ======================================

def test_run_registers_record_and_artifacts(out_dir):
    record = run(ExperimentSpec("exp-1", "exponents", {"N": 2, "q": 1.25}, out_dir))

    assert record.ok
    assert record.summary["beta"] == pytest.approx(3.0)
    assert record.summary["radial_constant"] == pytest.approx(27.0)
    assert all(os.path.exists(path) for path in record.artifacts)

    index = load_index(out_dir)
    assert index["exp-1"]["summary_hash"] == record.summary_hash
    assert load_record("exp-1", out_dir).to_json() == record.to_json()
    assert os.path.exists(log_path(out_dir))


def test_repeat_run_reproduces_and_keeps_first_record(out_dir):
    spec = ExperimentSpec("cap", "capacity", {"N": 2, "q": 1.5}, out_dir)
    first = run(spec)
    second = run(spec)

    assert first.summary["point_capacity_zero"] is True
    assert second.summary_hash == first.summary_hash
    assert "reproduced registered summary" in second.message
    assert load_record("cap", out_dir).started_at == first.started_at


def test_capacity_run_at_the_upper_end(out_dir):
    record = run(ExperimentSpec("cap-q2", "capacity", {"N": 2, "q": 2.0}, out_dir))
    assert record.ok
    assert record.summary["alpha"] == 0.0
    assert record.summary["point_capacity_zero"] is True


def test_same_name_with_different_spec_is_rejected(out_dir):
    run(ExperimentSpec("cap", "capacity", {"N": 2, "q": 1.5}, out_dir))
    with pytest.raises(SpecValidation):
        run(ExperimentSpec("cap", "capacity", {"N": 2, "q": 1.4}, out_dir))


def test_downstream_failure_is_recorded(out_dir, monkeypatch):
    def explode(resolved, ctx):
        raise RuntimeError("boom")

    broken = Operation("exponents", OPERATIONS["exponents"].validate, explode, "claim")
    monkeypatch.setitem(OPERATIONS, "exponents", broken)

    record = run(ExperimentSpec("broken", "exponents", {"N": 2, "q": 1.25}, out_dir))
    assert record.status == "error"
    assert record.summary == {}
    assert "RuntimeError: boom" in record.message
    assert load_index(out_dir)["broken"]["status"] == "error"


def test_missing_record_raises(out_dir):
    with pytest.raises(FileNotFoundError):
        load_record("nothing", out_dir)


def test_run_many_validates_before_running(out_dir):
    good = ExperimentSpec("eig", "eigen_check", {"N": 2, "n": 400}, out_dir)
    clash = ExperimentSpec("eig", "eigen_check", {"N": 3, "n": 400}, out_dir)
    with pytest.raises(SpecValidation):
        run_many([good, clash])
    assert load_index(out_dir) == {}

    records = run_many([good, ExperimentSpec("cap", "capacity", {"N": 3, "q": 1.4, "family": "interior"}, out_dir)], 2)
    assert [record.name for record in records] == ["eig", "cap"]
    assert all(record.ok for record in records)
    assert records[0].summary["deviation"] < 1e-5
    assert records[1].summary["point_capacity_zero"] is False


# ======================================
# SUITES
# ======================================

def test_constants_suite_passes():
    report = suite("constants", quick=True)
    assert report.passed, report.table()
    assert {row.criterion for row in report.rows} == {1, 2, 11}


def test_unknown_suite_raises():
    with pytest.raises(ValueError):
        suite("bogus")


def test_suite_report_table_and_failures():
    report = SuiteReport("demo", [SuiteRow(1, "ok", 0.0, "< 1", True), SuiteRow(2, "bad", 5.0, "< 1", False)])
    assert not report.passed
    assert [row.check for row in report.failures] == ["bad"]
    assert "PASS" in report.table() and "FAIL" in report.table()
    assert report.to_json()["rows"][1]["value"] == 5.0
    assert not SuiteReport("empty").passed
