#!/usr/bin/env python
# -*- coding: utf-8 -*-
import csv
import io
import json
import os

import numpy as np
from rich.console import Console

from ultranorm.cli import assoc_grid, run_cli
from ultranorm.reports import CheckRecord, Status, VerificationReport

__author__ = "ultranorm developers"
__license__ = "mit"


configs = os.path.join(os.path.dirname(__file__), "..", "configs")
gevrey1 = os.path.join(configs, "gevrey1.json")
constant_weight = os.path.join(configs, "constant_weight.json")


def quiet():
    return Console(file=io.StringIO(), width=200)


def write_config(tmpdir, config):
    path = tmpdir.join("config.json")
    path.write(json.dumps(config.to_dict()))
    return str(path)


def read_rows(path):
    with open(path, newline='') as table_file:
        return list(csv.DictReader(table_file))


def test_assoc_grid():
    t = assoc_grid()
    assert t[0] == 0.0
    assert {1.0, 2.0} <= set(t)
    assert np.all(np.diff(t) > 0)


def test_assoc(tmpdir):
    out = str(tmpdir.join("out"))
    assert run_cli(["assoc", "--config", gevrey1, "--out", out,
                    "--plot"], quiet()) == 0
    rows = {float(row["t"]): row for row in
            read_rows(os.path.join(out, "assoc.csv"))}
    assert abs(float(rows[1.0]["M(t)"])) <= 1e-12
    assert abs(float(rows[2.0]["M(t)"]) - np.log(2)) <= 1e-12
    assert float(rows[0.0]["A(t)"]) == 0.0
    assert os.path.exists(os.path.join(out, "assoc.svg"))


def test_assoc_to_console():
    console = quiet()
    assert run_cli(["assoc", "--config", gevrey1], console) == 0
    lines = console.file.getvalue().splitlines()
    assert lines[0].startswith("t,M(t),")
    assert len(lines) == len(assoc_grid()) + 1


def test_check_seq(tmpdir):
    out = str(tmpdir.join("out"))
    assert run_cli(["check-seq", "--out", out], quiet()) == 0
    with open(os.path.join(out, "check-seq.json")) as report_file:
        report = VerificationReport.from_json(report_file.read())
    assert report["m1[M]"].passed
    assert report["log_growth[A]"].passed


def write_sequences(tmpdir, M):
    path = tmpdir.join("sequences.json")
    path.write(json.dumps({"sequences": {"M": M, "A": {"gevrey": 1.0}}}))
    return str(path)


def test_check_seq_short_table(tmpdir):
    out = str(tmpdir.join("out"))
    path = write_sequences(tmpdir, {"table": [1, 1, 2, 6, 24]})
    assert run_cli(["check-seq", "--config", path, "--out", out],
                   quiet()) == 3
    with open(os.path.join(out, "check-seq.json")) as report_file:
        report = VerificationReport.from_json(report_file.read())
    assert report["m1[M]"].passed
    assert report["m1[M]"].grid == {"P": 4}
    decay = report["m2prime_decay[M,d=1]"]
    assert decay.status is Status.INCONCLUSIVE
    assert "not localized" in decay.provenance[0]
    assert report["log_growth[M]"].provenance == ["only 5 values stored"]
    assert report["m1[A]"].passed


def test_check_seq_constant(tmpdir):
    out = str(tmpdir.join("out"))
    path = write_sequences(tmpdir, {"expr": "constant"})
    assert run_cli(["check-seq", "--config", path, "--out", out],
                   quiet()) == 3
    with open(os.path.join(out, "check-seq.json")) as report_file:
        report = VerificationReport.from_json(report_file.read())
    assert report["m2prime_decay[M,d=1]"].status is Status.INCONCLUSIVE
    assert report["m2prime_decay[A,d=1]"].passed


def test_sequence_errors_have_exit_codes(tmpdir):
    # M(t) is infinite past t = 1 for a constant sequence
    constant = write_sequences(tmpdir, {"expr": "constant"})
    assert run_cli(["assoc", "--config", constant], quiet()) == 3
    short = write_sequences(tmpdir, {"table": [1, 1, 2, 6, 24]})
    assert run_cli(["regularize", "--config", short], quiet()) == 0


def test_regularize():
    assert run_cli(["regularize"], quiet()) == 0


def test_weights(tmpdir):
    out = str(tmpdir.join("out"))
    assert run_cli(["weights", "--config", constant_weight, "--out", out,
                    "--plot"], quiet()) == 0
    assert os.path.exists(os.path.join(out, "mollified.svg"))


def test_stft(tmpdir, small_config):
    out = str(tmpdir.join("out"))
    path = write_config(tmpdir, small_config)
    assert run_cli(["stft", "--config", path, "--out", out, "--plot"],
                   quiet()) == 0
    rows = read_rows(os.path.join(out, "stft.csv"))
    assert len(rows) == 192 * 192
    assert set(rows[0]) == {"x0", "xi0", "re", "im"}
    assert os.path.exists(os.path.join(out, "stft.svg"))
    with open(os.path.join(out, "stft-report.json")) as report_file:
        report = VerificationReport.from_json(report_file.read())
    assert report["isometry[0]"].passed


def test_verify_writes_csv(tmpdir, small_config):
    data = small_config.to_dict()
    data["suite"] = "lemma_algebraic_equality"
    tmpdir.join("lemma.json").write(json.dumps(data))
    out = str(tmpdir.join("out"))
    assert run_cli(["verify", "--config", str(tmpdir.join("lemma.json")),
                    "--out", out, "--format", "csv", "--threads", "2"],
                   quiet()) == 0
    rows = read_rows(os.path.join(out, "report.csv"))
    assert len(rows) == 5
    assert all(row["status"] == "pass" for row in rows)
    assert [row["name"] for row in rows[:2]] == [
        "lemma_algebraic_equality/admissibility",
        "lemma_algebraic_equality/vbar"]


def test_report_rerender(tmpdir):
    path = str(tmpdir.join("report.json"))
    records = [CheckRecord("a[1]", "first", Status.PASS),
               CheckRecord("b", "second", Status.INCONCLUSIVE)]
    VerificationReport.create(records).write_json(path)
    console = quiet()
    assert run_cli(["report", path], console) == 3
    # bracketed names are printed as they are
    assert "a[1]" in console.file.getvalue()


def test_usage_errors(tmpdir):
    assert run_cli([], quiet()) == 2
    assert run_cli(["frobnicate"], quiet()) == 2
    assert run_cli(["assoc", "--config", str(tmpdir.join("missing.json"))],
                   quiet()) == 2
    assert run_cli(["assoc", "--tol", "bogus=1"], quiet()) == 2
    assert run_cli(["assoc", "--tol", "isometry"], quiet()) == 2
    assert run_cli(["report", str(tmpdir.join("missing.json"))],
                   quiet()) == 2
    bad = tmpdir.join("bad.json")
    bad.write(json.dumps({"dimension": 1, "colour": "red"}))
    assert run_cli(["assoc", "--config", str(bad)], quiet()) == 2
    stale = tmpdir.join("stale.json")
    stale.write(json.dumps({"schema": "other/0", "records": []}))
    assert run_cli(["report", str(stale)], quiet()) == 2


def test_version():
    assert run_cli(["--version"], quiet()) == 0
