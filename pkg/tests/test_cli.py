import json

import pytest

from cdfan import __version__
from cdfan.cli import (EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, EXIT_RETRIES, RunConfig, emit_report,
                       run_command)
from cdfan.poset import cube_fan, serialize


def run(capsys, *argv) -> tuple[int, dict]:
    code = run_command(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else {}


def test_gen_writes_poset(tmp_path, capsys):
    path = tmp_path / "cube3.json"
    assert run_command(["gen", "--family", "cube", "--dim", "3", "-o", str(path)]) == EXIT_OK
    assert len(json.loads(path.read_text())["elements"]) == 27
    assert capsys.readouterr().out == ""


def test_cd_index_both_methods(tmp_path, capsys):
    path = tmp_path / "cube3.json"
    serialize(cube_fan(3), path)
    code, rep = run(capsys, "cd-index", str(path), "--method", "both", "--seed", "42")
    assert code == EXIT_OK and rep["agree"]
    assert rep["flag"] == rep["lefschetz"]
    assert rep["cd_string"] == "c^3 + 4cd + 6dc"
    assert rep["config"]["seed"] == 42 and rep["version"] == __version__


def test_bad_poset_exits_1(tmp_path, capsys):
    p = cube_fan(3)
    path = tmp_path / "bad.json"
    serialize(p.without(p.by_rank[2][0]), path)
    code, rep = run(capsys, "cd-index", str(path))
    assert code == EXIT_INVALID
    assert rep["validation"]["diamond"]["ok"] is False


def test_missing_file_exits_1(capsys):
    code, rep = run(capsys, "lefschetz", "no/such/file.json")
    assert code == EXIT_INVALID and rep["error"] == "FileNotFoundError"


def test_retries_exhausted_exits_2(capsys):
    code, rep = run(capsys, "lefschetz", "polygon:4", "--entry-bound", "0", "--retries", "2")
    assert code == EXIT_RETRIES and rep["error"] == "ExhaustedRetries"
    assert len(rep["failures"]) == 2


def test_empty_lab(capsys):
    code, rep = run(capsys, "lab", "polygon:4", "--trials", "0")
    assert code == EXIT_OK and rep["trials"] == 0


def test_verify(capsys):
    code, rep = run(capsys, "verify", "polygon:5", "--seed", "3")
    assert code == EXIT_OK and rep["ok"]


def test_debug_tsv(tmp_path, capsys):
    tsv = tmp_path / "root.tsv"
    code, rep = run(capsys, "lefschetz", "polygon:3", "--debug-tsv", str(tsv))
    assert code == EXIT_OK and rep["certificate_identity"]
    rows = tsv.read_text().strip().splitlines()
    assert len(rows) == 6 and all(len(r.split("\t")) == 6 for r in rows)


def test_identical_argv_is_byte_identical(capsys):
    outs = []
    for _ in range(2):
        run_command(["cd-index", "simplex:3", "--mode", "multiplication", "--seed", "5"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_emit_report_sorted(tmp_path):
    path = tmp_path / "r.json"
    text = emit_report({"b": 1, "a": 2}, str(path), RunConfig(seed=4))
    assert text == path.read_text()
    assert list(json.loads(text)) == ["a", "b", "config", "version"]


def test_version_flag(capsys):
    with pytest.raises(SystemExit):
        run_command(["--version"])
    assert __version__ in capsys.readouterr().out


def test_internal_codes_are_distinct():
    assert len({EXIT_OK, EXIT_INVALID, EXIT_RETRIES, EXIT_INTERNAL}) == 4
