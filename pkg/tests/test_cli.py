import csv
import json
import sys

import pytest

from synthqa.cli import main
from synthqa.schema import CATEGORICAL, NUMERICAL, Schema, save_schema
from synthqa.table import TableData, write_csv

from conftest import random_schema, random_table


@pytest.fixture
def workspace(tmp_path, rng):
    schema = Schema.of([
        ("color", CATEGORICAL), ("shape", CATEGORICAL),
        ("size", NUMERICAL), ("weight", NUMERICAL),
    ])
    real = random_table(rng, schema, 200, missing_rate=0.05,
                        level_pool={"color": ["r", "g", "b"],
                                    "shape": ["o", "x"]})
    synth = random_table(rng, schema, 150, missing_rate=0.05,
                         level_pool={"color": ["r", "g", "b"],
                                     "shape": ["o", "x"]})
    paths = {
        "schema": tmp_path / "schema.json",
        "real": tmp_path / "real.csv",
        "synth": tmp_path / "synth.csv",
        "dir": tmp_path,
    }
    save_schema(schema, paths["schema"])
    write_csv(real, paths["real"])
    write_csv(synth, paths["synth"])
    return paths


def run(*argv):
    return main([str(a) for a in argv])


def test_evaluate_writes_report_and_svgs(workspace):
    out = workspace["dir"] / "report.json"
    figs = workspace["dir"] / "figs"
    code = run("evaluate", "--real", workspace["real"], "--synth",
               workspace["synth"], "--schema", workspace["schema"],
               "--out", out, "--plots", figs,
               "--dataset-id", "toy", "--model-id", "m")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["dataset_id"] == "toy"
    assert set(doc["plots"]) == {"scatter1", "scatter2", "qq"}
    names = sorted(p.name for p in figs.iterdir())
    assert names == ["toy_m_qq.svg", "toy_m_scatter1.svg",
                     "toy_m_scatter2.svg"]


def test_evaluate_byte_identical_across_runs(workspace):
    outs = []
    for i in range(2):
        out = workspace["dir"] / f"rep{i}.json"
        figs = workspace["dir"] / f"figs{i}"
        assert run("evaluate", "--real", workspace["real"], "--synth",
                   workspace["synth"], "--schema", workspace["schema"],
                   "--out", out, "--plots", figs) == 0
        outs.append((out.read_bytes(),
                     sorted((p.name, p.read_bytes())
                            for p in figs.iterdir())))
    assert outs[0] == outs[1]


def test_plot_from_report_alone(workspace):
    out = workspace["dir"] / "report.json"
    run("evaluate", "--real", workspace["real"], "--synth",
        workspace["synth"], "--schema", workspace["schema"], "--out", out)
    figs = workspace["dir"] / "standalone"
    assert run("plot", "--report", out, "--out-dir", figs) == 0
    assert len(list(figs.iterdir())) == 3


def test_evaluate_threads_flag_identical(workspace, monkeypatch):
    docs = []
    for threads in ("1", "3"):
        out = workspace["dir"] / f"t{threads}.json"
        assert run("evaluate", "--real", workspace["real"], "--synth",
                   workspace["synth"], "--schema", workspace["schema"],
                   "--out", out, "--threads", threads) == 0
        docs.append(out.read_bytes())
    assert docs[0] == docs[1]
    # env fallback
    monkeypatch.setenv("SYNTHQA_THREADS", "2")
    out = workspace["dir"] / "tenv.json"
    assert run("evaluate", "--real", workspace["real"], "--synth",
               workspace["synth"], "--schema", workspace["schema"],
               "--out", out) == 0
    assert out.read_bytes() == docs[0]


def test_exit_code_2_on_bad_input(workspace, capsys):
    code = run("evaluate", "--real", workspace["dir"] / "nope.csv",
               "--synth", workspace["synth"], "--schema",
               workspace["schema"], "--out", workspace["dir"] / "x.json")
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_exit_code_2_on_bad_schema(workspace, tmp_path):
    bad = tmp_path / "bad_schema.json"
    bad.write_text("{not json")
    code = run("evaluate", "--real", workspace["real"], "--synth",
               workspace["synth"], "--schema", bad,
               "--out", tmp_path / "x.json")
    assert code == 2


def test_validate_command(tmp_path):
    schema = Schema.of([
        ("ICDGM10", CATEGORICAL), ("ICDGM10DREI", CATEGORICAL),
        ("SEX", CATEGORICAL), ("ALTGRP", CATEGORICAL),
    ])
    save_schema(schema, tmp_path / "schema.json")
    real = TableData.from_columns(schema, {
        "ICDGM10": ["C50.1", "C61.9"],
        "ICDGM10DREI": ["C50", "C61"],
        "SEX": ["2", "1"],
        "ALTGRP": ["a45b49", "a70b74"],
    })
    synth = TableData.from_columns(schema, {
        "ICDGM10": ["C61.9", "C50.1"],
        "ICDGM10DREI": ["C61", "D05"],
        "SEX": ["2", "2"],
        "ALTGRP": ["a70b74", "a45b49"],
    })
    write_csv(real, tmp_path / "real.csv")
    write_csv(synth, tmp_path / "synth.csv")
    from synthqa.domain import shipped_rules_path

    out = tmp_path / "violations.json"
    code = run("validate", "--data", tmp_path / "synth.csv", "--schema",
               tmp_path / "schema.json", "--rules", shipped_rules_path(),
               "--fit-ranges-from", tmp_path / "real.csv", "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    affected = {r["rule_id"]: r["n_rows_affected"] for r in doc["rules"]}
    assert affected["exclusion(SEX,ICDGM10DREI)"] == 1
    assert affected["prefix(ICDGM10,ICDGM10DREI)"] == 1
    assert (tmp_path / "violations.csv").exists()


def test_refsynth_roundtrip_through_contract(workspace, tmp_path):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"method": "bootstrap", "seed": 3}))
    wd = tmp_path / "model"
    assert run("refsynth", "train", "--real", workspace["real"], "--schema",
               workspace["schema"], "--params", params, "--workdir", wd) == 0
    assert (wd / "model.json").exists()
    out = tmp_path / "gen.csv"
    assert run("refsynth", "synth", "--workdir", wd, "--n", "50",
               "--out", out) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 51


def test_refsynth_missing_args_exit_2(tmp_path, capsys):
    assert run("refsynth", "train", "--workdir", tmp_path) == 2
    err = capsys.readouterr().err
    assert "--real" in err


def test_tune_command_end_to_end(workspace, tmp_path, capsys):
    space = tmp_path / "space.json"
    space.write_text(json.dumps({"parameters": [
        {"type": "float", "name": "corrupt", "low": 0.0, "high": 0.8},
        {"type": "categorical", "name": "method",
         "choices": ["independent", "bootstrap"]},
        {"type": "int", "name": "seed", "low": 0, "high": 999},
    ]}))
    wd = tmp_path / "tuning"
    code = run("tune", "--space", space, "--command",
               f"{sys.executable} -m synthqa refsynth",
               "--real", workspace["real"], "--schema", workspace["schema"],
               "--workdir", wd, "--budget", "4", "--seed", "1",
               "--n-synth", "100")
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    study = doc["studies"][0]
    assert study["n_completed"] == 4
    assert (wd / "journal.jsonl").exists()
    # trial artifacts survive
    assert (wd / "trials" / "trial_00000" / "params.json").exists()


def test_tune_strata_make_separate_studies(workspace, tmp_path, capsys):
    space = tmp_path / "space.json"
    space.write_text(json.dumps({
        "parameters": [
            {"type": "float", "name": "corrupt", "low": 0.0, "high": 0.5},
            {"type": "categorical", "name": "method",
             "choices": ["independent", "bootstrap"]},
            {"type": "int", "name": "seed", "low": 0, "high": 99},
        ],
        "strata": [
            {"name": "ind", "overrides": {"method": "independent"}},
            {"name": "boot", "overrides": {"method": "bootstrap"}},
        ],
    }))
    wd = tmp_path / "tuning"
    code = run("tune", "--space", space, "--command",
               f"{sys.executable} -m synthqa refsynth",
               "--real", workspace["real"], "--schema", workspace["schema"],
               "--workdir", wd, "--budget", "2", "--seed", "0",
               "--n-synth", "80")
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert [s["stratum"] for s in doc["studies"]] == ["ind", "boot"]
    for s in doc["studies"]:
        for t in s["best"]:
            assert t["params"]["method"] == (
                "independent" if s["stratum"] == "ind" else "bootstrap")


def test_rank_command(workspace, tmp_path):
    reports = []
    for i, method in enumerate(["independent", "bootstrap"]):
        gen = tmp_path / f"g{i}.csv"
        run("refsynth", "sample", "--real", workspace["real"], "--schema",
            workspace["schema"], "--method", method, "--n", "120",
            "--seed", str(i), "--out", gen)
        rep = tmp_path / f"r{i}.json"
        run("evaluate", "--real", workspace["real"], "--synth", gen,
            "--schema", workspace["schema"], "--out", rep,
            "--dataset-id", "toy", "--model-id", method, "--no-plot-data")
        reports.append(rep)
    out = tmp_path / "rank.csv"
    code = run("rank", "--reports", *reports, "--out", out)
    assert code == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0][:3] == ["dataset", "rank", "model"]
    assert len(rows) == 3
