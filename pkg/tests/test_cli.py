import subprocess
import sys

import pytest

from zipperlogic.cli import main
from zipperlogic.combinators import compile_term
from zipperlogic.iso import isomorphic
from zipperlogic.knots import parse_diagram
from zipperlogic.terms import parse_term
from zipperlogic.zgformat import parse_zg


def test_compile_to_file(tmp_path, capsys):
    out = tmp_path / "skk.zg"
    assert main(["compile", "S K K", "-o", str(out)]) == 0
    assert isomorphic(parse_zg(out.read_text()), compile_term(parse_term("S K K")))
    assert "11 nodes" in capsys.readouterr().err


def test_compile_to_stdout(capsys):
    assert main(["compile", "I"]) == 0
    assert parse_zg(capsys.readouterr().out)


def test_reduce_with_trace(tmp_path, capsys):
    out, log = tmp_path / "nf.zg", tmp_path / "trace.log"
    assert main(["reduce", "I I", "-o", str(out), "--trace", str(log)]) == 0
    assert isomorphic(parse_zg(out.read_text()), compile_term(parse_term("I")))
    lines = log.read_text().splitlines()
    assert lines[0].startswith("start: ") and lines[-1] == "status: normal-form loops: 0"
    assert [ln.split()[2] for ln in lines[1:-1]] == ["click", "zip"]
    err = capsys.readouterr().err
    assert "normal-form after 2 steps" in err and "readback: I" in err


def test_reduce_zg_file_with_priority(tmp_path, capsys):
    src = tmp_path / "redex.zg"
    src.write_text("ZM 1 body fun var\nZP 1 fun arg result\n")
    assert main(["reduce", str(src), "--priority", "click,zip"]) == 0
    g = parse_zg(capsys.readouterr().out)
    assert len(g) == 0 and len(g.arrows) == 2


def test_reduce_step_limit_still_exits_zero(capsys):
    assert main(["reduce", "S I I (S I I)", "--max-steps", "5"]) == 0
    assert "step-limit after 5 steps" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["compile", "S ("],
        ["reduce", "missing.zg"],
        ["reduce", "I", "--priority", "bogus"],
        ["reduce", "I", "--priority", "zip", "--discipline", "combinator"],
        ["reduce", "I", "--max-steps", "0"],
        ["knots", "K"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_zg_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.zg"
    bad.write_text("ZM 1 a b\n")
    assert main(["dot", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_argparse_rejects_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2


def test_verify_death(capsys):
    assert main(["verify", "death", "-v"]) == 0
    out = capsys.readouterr().out
    assert "PASS kill I: 1 loops" in out and out.rstrip().splitlines()[-1].startswith("PASS death")


def test_verify_failure_exits_1(monkeypatch, capsys):
    from zipperlogic import verify

    def broken(seed=0):
        res = verify.SuiteResult("beta")
        res.add("forced", False, "planted failure")
        return res

    monkeypatch.setitem(verify.SUITES, "beta", broken)
    assert main(["verify", "beta"]) == 1
    assert "FAIL forced: planted failure" in capsys.readouterr().out


def test_fuzz(capsys):
    assert main(["fuzz", "--count", "10", "--seed", "3"]) == 0
    assert "PASS fuzz (10/10" in capsys.readouterr().out


def test_dot(capsys):
    assert main(["dot", "K"]) == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_knots_text_and_dot(tmp_path, capsys):
    src = tmp_path / "redex.zg"
    src.write_text("ZM 1 body fun var\nZP 1 fun arg result\n")
    assert main(["knots", str(src)]) == 0
    d = parse_diagram(capsys.readouterr().out)
    assert len(d.crossings) == 2 and d.virtual_count == 1
    assert main(["knots", str(src), "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("digraph")
    assert main(["knots", "K", "--lenient"]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "zipperlogic", "compile", "K"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.startswith("ZM")
