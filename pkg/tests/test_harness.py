import json

import pytest
from click.testing import CliRunner

from entrolab.harness import KINDS, SUITES, ExperimentConfig, ReportRow, run_suite
from entrolab.harness.cli import main
from entrolab.harness.report import COLUMNS, write_csv, write_meta


def test_every_kind_has_a_suite():
    assert set(KINDS) == set(SUITES)


def test_report_row_line_and_cells():
    row = ReportRow(
        experiment_id="demo-0",
        seed=3,
        metric="gap",
        measured=0.125,
        bound=1.0,
        passed=True,
        n=4,
        ell_or_l=7,
    )
    cells = row.cells()
    assert len(cells) == len(COLUMNS)
    assert cells[0] == "demo-0"
    assert cells[-1] == "1"
    assert row.line().startswith("[PASS] demo-0 gap ")
    bad = ReportRow("demo-1", 3, "gap", 2.0, 1.0, False)
    assert bad.line().startswith("[FAIL]")


def test_csv_and_meta_written(tmp_path):
    rows = [ReportRow("a", 1, "x", 1.0, 2.0, True), ReportRow("b", 1, "y", 3.0, 2.0, False)]
    path = tmp_path / "out.csv"
    write_csv(rows, path)
    write_meta(path, {"suite": "demo"})
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(COLUMNS)
    assert len(text.splitlines()) == 3
    assert text.endswith("\n")
    meta = json.loads((tmp_path / "out.meta.json").read_text())
    assert meta["suite"] == "demo"
    assert "written_at" in meta
    # timestamps live in the sidecar only, never in the CSV
    assert "written_at" not in text


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nonsense", seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="decoder", seed=-1)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="decoder", seed=1, trials=10**9)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="threshold", seed=1, delta=0.3)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"kind": "decoder", "seed": 1, "bogus": 2})


def test_config_from_file_single_and_list(tmp_path):
    single = tmp_path / "one.json"
    single.write_text(json.dumps({"kind": "gprops", "seed": 4}))
    cfgs = ExperimentConfig.from_file(single)
    assert len(cfgs) == 1 and cfgs[0].kind == "gprops"
    many = tmp_path / "many.json"
    many.write_text(json.dumps([{"kind": "gprops", "seed": 4}, {"kind": "decoder", "seed": 5}]))
    assert [c.kind for c in ExperimentConfig.from_file(many)] == ["gprops", "decoder"]


def test_same_seed_reproduces_csv_bytes(tmp_path):
    cfg = ExperimentConfig(kind="predictor", seed=101, instances=3, mc_trials=5000)
    rows1, _ = run_suite(cfg)
    rows2, _ = run_suite(cfg)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(rows1, p1)
    write_csv(rows2, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_different_seed_changes_csv(tmp_path):
    rows1, _ = run_suite(ExperimentConfig(kind="predictor", seed=101, instances=3, mc_trials=5000))
    rows2, _ = run_suite(ExperimentConfig(kind="predictor", seed=102, instances=3, mc_trials=5000))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(rows1, p1)
    write_csv(rows2, p2)
    assert p1.read_bytes() != p2.read_bytes()


def test_cli_gprops_smoke(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["gprops", "--seed", "2", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "[PASS]" in result.output
    assert (tmp_path / "gprops-2.csv").exists()
    assert (tmp_path / "gprops-2.meta.json").exists()


def test_cli_decoder_smoke_with_plots(tmp_path):
    runner = CliRunner()
    result = runner.invoke(
        main, ["decode", "--seed", "3", "--trials", "8", "--out", str(tmp_path), "--plots"]
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "decoder-3.png").exists()


def test_cli_batch_run(tmp_path):
    cfg_file = tmp_path / "batch.json"
    cfg_file.write_text(
        json.dumps(
            [
                {"kind": "gprops", "seed": 6, "out": str(tmp_path)},
                {"kind": "threshold", "seed": 6, "runs": 25, "samples": 2000, "out": str(tmp_path)},
            ]
        )
    )
    runner = CliRunner()
    result = runner.invoke(main, ["experiment", "run", str(cfg_file)])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "gprops-6.csv").exists()
    assert (tmp_path / "threshold-6.csv").exists()


def test_cli_kinds_lists_all():
    runner = CliRunner()
    result = runner.invoke(main, ["kinds"])
    assert result.exit_code == 0
    assert set(result.output.split()) == set(KINDS)


def test_suite_rows_carry_seed_and_valid_columns():
    cfg = ExperimentConfig(kind="gprops", seed=77)
    rows, meta = run_suite(cfg)
    assert rows and all(r.seed == 77 for r in rows)
    assert meta["suite"] == "gprops"
    for r in rows:
        assert len(r.cells()) == len(COLUMNS)
