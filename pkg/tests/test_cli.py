import io
import json
import subprocess
import sys

import pytest

from kdistrict.cli import run

LOLLIPOP = "5 5\n0 1\n0 2\n1 2\n2 3\n3 4\n"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p

    return write


def test_validate(files):
    g = files("g.txt", LOLLIPOP)
    code, out, _ = call("validate", g, files("ok.txt", "2\n0 1 2\n3 4\n"))
    assert code == 0 and out.startswith("valid=true n=5 k=2")
    code, out, err = call("validate", g, files("bad.txt", "2\n0 3\n1 2 4\n"))
    assert code == 1 and "problem=DisconnectedDistrict" in out and err.startswith("error=InvalidMap")


def test_switches_and_apply(files):
    g = files("g.txt", LOLLIPOP)
    m = files("m.txt", "2\n0 1 2\n3 4\n")
    code, out, _ = call("switches", g, m)
    assert code == 0 and out.splitlines()[0] == "count=3"
    code, out, _ = call("apply", g, m, files("p.txt", "1\n1 2 3\n"))
    assert code == 0 and out.splitlines()[-1].startswith("steps=1 final=")


def test_plan_and_verify(files, tmp_path):
    g = files("g.txt", LOLLIPOP)
    a, b = files("a.txt", "2\n0 1 2\n3 4\n"), files("b.txt", "2\n0\n1 2 3 4\n")
    out_plan = tmp_path / "plan.txt"
    code, out, _ = call("plan", g, a, b, "--out", out_plan)
    assert code == 0 and "length=" in out
    side = json.loads((tmp_path / "plan.txt.json").read_text())
    assert side["length"] <= side["bound"] == 4 * 2 * 5
    code, out, _ = call("verify", g, a, out_plan, b)
    assert code == 0 and out.startswith(f"ok: {side['length']} steps")
    code, out, _ = call("verify", g, a, files("bad.txt", "1\n0 1 3\n"), b)
    assert code == 1 and out.startswith("fail:")


def test_plan_reports_unreachable(files):
    g = files("g.txt", "5 4\n0 1\n0 2\n0 3\n3 4\n")
    code, out, _ = call("plan", g, files("a.txt", "3\n1\n2\n0 3 4\n"), files("b.txt", "3\n0 1 2\n3\n4\n"))
    assert code == 1 and out.startswith("status=Unreachable")


def test_connected_message(files):
    star = files("s.txt", "5 4\n0 1\n0 2\n0 3\n0 4\n")
    code, out, _ = call("connected", star, 2)
    assert code == 0 and out.splitlines()[0] == "disconnected: k+M = 5 < n+2 = 7"
    code, _, err = call("connected", star, 9)
    assert code == 2 and err.startswith("error=KOutOfRange")


def test_oracle_and_contract(files):
    g = files("g.txt", LOLLIPOP)
    a, b = files("a.txt", "2\n0 1 2\n3 4\n"), files("b.txt", "2\n0\n1 2 3 4\n")
    code, out, _ = call("--json", "oracle", g, 2, "--pair", a, b, "--diameter")
    body = json.loads(out)
    assert code == 0 and body["connected"] is True and body["distance"] >= 1
    code, out, _ = call("contract", g, a, 0, 0)
    assert code == 0 and out.startswith("length=")


def test_gen_and_audit(tmp_path, files):
    cnf = files("f.cnf", "p cnf 3 2\n1 2 3 0\n-1 -2 3 0\n")
    bundle = tmp_path / "sp"
    code, out, _ = call("gen", "sp", "--cnf", cnf, "--witness", "--tau", "TFF", "--out", bundle)
    assert code == 0 and "witness=28" in out
    code, out, _ = call("verify", bundle / "graph.txt", bundle / "mapA.txt", bundle / "witness.plan",
                        bundle / "mapB.txt")
    assert out.startswith("ok: 28 steps")
    code, out, _ = call("audit", bundle)
    assert code == 0 and "component=clause_travelers count=8" in out
    code, _, err = call("gen", "sp", "--cnf", cnf, "--witness", "--tau", "TT", "--out", bundle)
    assert code == 2 and "error=UsageError" in err


@pytest.mark.parametrize("argv,code,err", [
    (["gen", "spiral", "r=2", "q=1", "l=1", "--out", "x"], 2, "error=BadParams"),
    (["gen", "path", "n=abc", "k=2", "--out", "x"], 2, "error=UsageError"),
    (["frobnicate"], 2, ""),
    (["validate", "/nonexistent/g", "/nonexistent/m"], 2, "error=UsageError"),
])
def test_exit_codes(argv, code, err, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    got, _, stderr = call(*argv)
    assert got == code and err in stderr


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kdistrict.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "gen" in proc.stdout
