import json

import pytest
from click.testing import CliRunner

from vbdss.cli import main
from vbdss.kb import default_kb_path


@pytest.fixture()
def runner():
    return CliRunner()


def test_load_prints_report(runner):
    result = runner.invoke(main, ["load"])
    assert result.exit_code == 0
    assert "rules: 32" in result.output


def test_load_bad_kb_exits_3(runner, tmp_path):
    (tmp_path / "kb").mkdir()
    result = runner.invoke(main, ["load", "--kb", str(tmp_path / "kb")])
    assert result.exit_code == 3
    assert "error [kb_load_error]" in result.output


def test_infer_fixture(runner):
    facts = default_kb_path() / "fixtures" / "patient1.ttl"
    result = runner.invoke(main, ["infer", "--facts", str(facts)])
    assert result.exit_code == 0
    assert ":has_SymptomOf_JE" in result.output
    assert "t2r3" in result.output


def test_infer_json(runner):
    facts = default_kb_path() / "fixtures" / "rk.ttl"
    result = runner.invoke(main, ["infer", "--facts", str(facts), "--json"])
    assert result.exit_code == 0
    body = json.loads(result.output)
    assert any("has_Symptom_Of_Kalaazar" in d["triple"] for d in body["derived"])


def test_metrics_fields(runner):
    result = runner.invoke(main, ["metrics", "--json"])
    assert result.exit_code == 0
    body = json.loads(result.output)
    for key in ("relationship_richness", "attribute_richness", "class_richness",
                "average_population", "score_rk", "score_bk"):
        assert key in body


def test_query_single_dataset(runner, tmp_path):
    q = tmp_path / "q.rq"
    q.write_text("SELECT ?p WHERE { ?p a :patient }")
    data = default_kb_path() / "fixtures" / "patient1.ttl"
    result = runner.invoke(main, ["query", "--q", str(q), "--data", str(data)])
    assert result.exit_code == 0
    assert "1 rows" in result.output


def test_query_combined_timing_rows(runner, tmp_path):
    q = tmp_path / "q.rq"
    q.write_text("SELECT ?p WHERE { ?p a :patient }")
    d1 = default_kb_path() / "fixtures" / "patient1.ttl"
    d2 = default_kb_path() / "fixtures" / "rk.ttl"
    result = runner.invoke(main, ["query", "--q", str(q), "--data", str(d1), "--data", str(d2), "--combined"])
    assert result.exit_code == 0
    assert "combined:" in result.output
    assert "sum of separate medians" in result.output


def test_query_syntax_error_exits_4(runner, tmp_path):
    q = tmp_path / "q.rq"
    q.write_text("SELECT ?p WHERE {")
    result = runner.invoke(main, ["query", "--q", str(q)])
    assert result.exit_code == 4


def test_extract_notes_to_turtle(runner, tmp_path):
    note = tmp_path / "note.txt"
    note.write_text("Patient reports feaver with chills and headache.")
    out = tmp_path / "facts.ttl"
    result = runner.invoke(main, ["extract", "--in", str(note), "--patient", ":p9", "--out", str(out)])
    assert result.exit_code == 0
    assert "(corrected)" in result.output
    text = out.read_text()
    assert ":has_Fever_WithChills" in text and ":p9" in text


def test_extract_unknown_input_exits_3(runner, tmp_path):
    result = runner.invoke(main, ["extract", "--in", str(tmp_path / "missing.txt"), "--patient", ":p9"])
    assert result.exit_code == 3


def test_case_workflow_commands(runner, tmp_path):
    store = str(tmp_path / "store")
    assert runner.invoke(main, ["case", "create", "rk", "--store", store,
                                "--demo", "has_Age=31:integer"]).exit_code == 0
    for symptom in ("has_Anaemia", "has_Dry_Skin", "has_Recurrent_Fever", "has_Weakness", "has_Weight_Loss"):
        assert runner.invoke(main, ["case", "assert", "rk", symptom, "true", "--store", store]).exit_code == 0
    result = runner.invoke(main, ["case", "infer", "rk", "--store", store])
    assert result.exit_code == 0
    body = json.loads(result.output)
    assert [d["disease"].rsplit("#", 1)[-1] for d in body["suspected"]] == ["Kala_azar"]
    shown = runner.invoke(main, ["case", "show", "rk", "--store", store])
    assert shown.exit_code == 0
    assert "case_created" in shown.output
    listed = runner.invoke(main, ["case", "list", "--store", store])
    assert listed.output.strip() == "rk"


def test_case_explain_shows_rule_and_bindings(runner, tmp_path):
    store = str(tmp_path / "store")
    runner.invoke(main, ["case", "create", "rk", "--store", store])
    for symptom in ("has_Anaemia", "has_Dry_Skin", "has_Recurrent_Fever", "has_Weakness", "has_Weight_Loss"):
        runner.invoke(main, ["case", "assert", "rk", symptom, "true", "--store", store])
    result = runner.invoke(main, ["case", "explain", "rk", "has_Symptom_Of_Kalaazar", "true", "--store", store])
    assert result.exit_code == 0
    assert "rule t2r6" in result.output
    assert "?p =" in result.output
    # asserted facts are not explainable
    result = runner.invoke(main, ["case", "explain", "rk", "has_Anaemia", "true", "--store", store])
    assert result.exit_code == 4
    assert "asserted" in result.output


def test_case_assert_unknown_predicate_exits_4(runner, tmp_path):
    store = str(tmp_path / "store")
    runner.invoke(main, ["case", "create", "c1", "--store", store])
    result = runner.invoke(main, ["case", "assert", "c1", "has_Fevr", "true", "--store", store])
    assert result.exit_code == 4
    assert "did you mean" in result.output


def test_bench_runs_on_shipped_datasets(runner, tmp_path):
    out = tmp_path / "report.tsv"
    result = runner.invoke(main, ["bench", "--reps", "5", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "combined" in result.output
    text = out.read_text()
    assert text.startswith("query\tdataset\tmedian_seconds")
    assert "sum_of_separate" in text


def test_backend_command(runner):
    result = runner.invoke(main, ["backend"])
    assert result.exit_code == 0
    assert result.output.strip() in ("pure", "native")


def test_usage_error_exits_2(runner):
    assert runner.invoke(main, ["infer"]).exit_code == 2
