import json

import pytest

from helpers import FIXTURES
from threefactor.cli import analyze_economy, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_case_study_text(capsys):
    code, out, _ = run(capsys, "case-study")
    assert code == 0
    assert "P1" in out and "P2" in out


def test_case_study_structured_is_byte_identical(capsys):
    _, first, _ = run(capsys, "case-study", "--format", "structured")
    _, second, _ = run(capsys, "case-study", "--format", "structured")
    assert first == second
    doc = json.loads(first)
    assert doc["subregions"] == ["P1", "P2"]


def test_case_study_premise_failure(tmp_path, capsys):
    cfg = tmp_path / "cfg.ini"
    cfg.write_text("[overrides]\nP = -3\n")
    code, _, err = run(capsys, "case-study", "--config", str(cfg))
    assert code == 2
    assert "terms_of_trade_rise" in err


def test_missing_dataset_is_data_error(tmp_path, capsys):
    code, _, _ = run(capsys, "data", "--dataset-dir", str(tmp_path / "nothing"))
    assert code == 3


def test_data_structured(capsys):
    code, out, _ = run(capsys, "data", "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["source_comparison"]["difference_in_net"] == 70262


def test_analyze_golden(capsys):
    code, out, _ = run(capsys, "analyze", str(FIXTURES / "golden_gl.ini"), "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["ratio_vector"]["quadrant"] == 4
    assert doc["subregion"] == "P2"


def test_analyze_reports_subregion():
    a = analyze_economy((FIXTURES / "golden_gl.ini").read_text())
    text = json.dumps(a, default=str)
    assert "P2" in text


def test_validate_small(capsys):
    code, out, _ = run(capsys, "validate", "--seed", "5", "--n", "5", "--shocks", "2")
    assert code == 0
    assert "overall: PASS" in out


def test_validate_n_zero_is_usage_error(capsys):
    code, _, _ = run(capsys, "validate", "--n", "0")
    assert code == 2


def test_validate_unsatisfiable(capsys):
    code, _, err = run(capsys, "validate", "--n", "1", "--constraints", "quadrant-iv,substitutes-only")
    assert code == 4
    assert "substitutes_only=True" in err


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_export_plot(tmp_path, capsys):
    code, _, _ = run(capsys, "export-plot", "--out", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["cotton_yield.csv", "land_in_rice.csv", "rice_yield.csv", "terms_of_trade.csv", "wage_in_rice.csv"]
    header = (tmp_path / "rice_yield.csv").read_text().splitlines()[0]
    assert header == "year_label,value,moving_average_3"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, _, _ = run(capsys, "case-study", "--format", "structured", "--out", str(target))
    assert code == 0
    assert json.loads(target.read_text())["quadrant_iv"] is True
