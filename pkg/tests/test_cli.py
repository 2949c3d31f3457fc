"""Command-line interface, exercised in-process via main(argv)."""

import json
import os

import pytest

from eabss.cli import main
from eabss.service import BUILTIN_SCRIPT


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# usage errors


def test_no_command_is_usage_error(capsys):
    code, _, _ = run(capsys)
    assert code == 2


def test_unknown_command_is_usage_error(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2


def test_replay_without_fixtures_is_usage_error(capsys):
    code, _, err = run(capsys, "run", "--script", BUILTIN_SCRIPT,
                       "--backend", "replay")
    assert code == 2
    assert "fixtures" in err


def test_live_without_endpoint_is_usage_error(capsys):
    code, _, _ = run(capsys, "run", "--script", BUILTIN_SCRIPT,
                     "--backend", "live")
    assert code == 2


def test_no_credential_flag_exists(capsys):
    # the API key must come from the environment, never argv
    code, _, err = run(capsys, "run", "--script", BUILTIN_SCRIPT,
                       "--api-key", "oops")
    assert code == 2
    from eabss.cli import build_parser
    text = build_parser().format_help().lower()
    assert "api-key" not in text and "credential" not in text


def test_missing_script_file_is_failure(capsys):
    code, _, _ = run(capsys, "run", "--script", "/no/such/file.txt")
    assert code == 1


# ---------------------------------------------------------------------------
# run / record / replay


def test_run_scripted_records_and_reports(capsys, tmp_path):
    record = tmp_path / "run.jsonl"
    report = tmp_path / "report.md"
    code, out, err = run(capsys, "run", "--script", BUILTIN_SCRIPT,
                         "--record", str(record), "--report", str(report))
    assert code == 0
    assert record.exists() and len(record.read_text().splitlines()) == 38
    md = report.read_text()
    assert md.count("```mermaid") == 7
    assert "## Conclusion" in md
    assert "report written" in err


def test_run_prints_report_to_stdout_by_default(capsys):
    code, out, _ = run(capsys, "run", "--script", BUILTIN_SCRIPT,
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1


def test_replay_verifies_recorded_fixture(capsys, tmp_path, museum_fixture_path):
    code, out, _ = run(capsys, "replay", "--script", BUILTIN_SCRIPT,
                       "--fixtures", museum_fixture_path)
    assert code == 0
    summary = json.loads(out)
    assert summary["status"] == "complete"
    assert summary["turns"] == 76


def test_replay_wrong_fixture_fails(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"index": 0, "request_hash": "x", "reply": "hello"}\n')
    code, _, err = run(capsys, "replay", "--script", BUILTIN_SCRIPT,
                       "--fixtures", str(bad))
    assert code == 1


def test_run_writes_event_log(capsys, tmp_path):
    log = tmp_path / "events.jsonl"
    code, _, _ = run(capsys, "run", "--script", BUILTIN_SCRIPT,
                     "--log", str(log), "--report", str(tmp_path / "r.md"))
    assert code == 0
    events = [json.loads(l) for l in log.read_text().splitlines()]
    assert events[-1] == {"event": "status_change", "status": "complete"}


def test_resume_from_event_log(capsys, tmp_path):
    log = tmp_path / "events.jsonl"
    run(capsys, "run", "--script", BUILTIN_SCRIPT, "--log", str(log),
        "--report", str(tmp_path / "first.md"))
    report = tmp_path / "second.md"
    code, _, err = run(capsys, "resume", "--script", BUILTIN_SCRIPT,
                       "--resume-log", str(log), "--report", str(report))
    assert code == 0
    assert report.read_text() == (tmp_path / "first.md").read_text()


# ---------------------------------------------------------------------------
# bind


def test_bind_rewrites_slots(capsys, tmp_path):
    case = tmp_path / "case.toml"
    case.write_text(
        'topic = "A hospital ward under time pressure"\n'
        'research_design = "Descriptive"\n'
        'domain = "Health Care"\n'
        'specialisation = "Patient Flow"\n')
    out_path = tmp_path / "bound.txt"
    code, _, _ = run(capsys, "bind", "--script", BUILTIN_SCRIPT,
                     "--case", str(case), "--out", str(out_path))
    assert code == 0
    text = out_path.read_text()
    assert "A hospital ward under time pressure" in text
    assert 'Memorise "Descriptive" as {key-researchDesign}' in text


# ---------------------------------------------------------------------------
# validate-diagram


def test_validate_diagram_clean(capsys, tmp_path):
    f = tmp_path / "d.mmd"
    f.write_text("graph LR\nA((V)) -->|sees| U([Look])\n")
    code, out, _ = run(capsys, "validate-diagram", "--kind", "usecase", str(f))
    assert code == 0
    assert json.loads(out) == []


def test_validate_diagram_broken_exits_1(capsys, tmp_path):
    f = tmp_path / "d.mmd"
    f.write_text("graph TD\nA((V))\nU([Look])\n")
    code, out, _ = run(capsys, "validate-diagram", "--kind", "usecase", str(f))
    assert code == 1
    diags = json.loads(out)
    assert {d["rule"] for d in diags} >= {"uc-header", "uc-actor-unlinked"}
    assert all({"rule", "line", "message", "severity", "auto_fixable"} == set(d)
               for d in diags)


def test_validate_diagram_with_repair(capsys, tmp_path):
    f = tmp_path / "d.mmd"
    f.write_text("graph TD\nA((V)) -->|sees| U([Look])\n")
    fixed = tmp_path / "fixed.mmd"
    code, out, err = run(capsys, "validate-diagram", "--kind", "usecase",
                         "--repair", str(fixed), str(f))
    assert code == 0
    assert fixed.read_text().startswith("graph LR")
    assert "applied 1 repairs" in err


# ---------------------------------------------------------------------------
# export


def test_export_json_to_markdown(capsys, tmp_path):
    json_path = tmp_path / "report.json"
    run(capsys, "run", "--script", BUILTIN_SCRIPT, "--format", "json",
        "--report", str(json_path))
    out_path = tmp_path / "report.md"
    code, _, _ = run(capsys, "export", "--format", "md",
                     "--out", str(out_path), str(json_path))
    assert code == 0
    assert "## Conclusion" in out_path.read_text()
