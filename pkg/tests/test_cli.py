import math
import os
import subprocess
import sys

import pytest

from apspec.cli import main

import oracles

FIB = "a -> ab\nb -> a\n"
F2 = "a -> baa\nb -> ba\n"


@pytest.fixture
def subst(tmp_path):
    def write(text, name="s.txt"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_fibonacci(capsys, subst):
    code, out, _ = run(capsys, "analyze", subst(FIB), "--depth", "6")
    assert code == 0
    assert "substitution matrix M[i,j] = |sigma(j)|_i: [[1, 1], [1, 0]]" in out
    assert "PF eigenvalue: 1.618033989" in out
    assert "s0 = 1.000" in out
    assert "p = [2, 3, 4, 5, 6, 7]" in out


def test_analyze_with_rho(capsys, subst):
    code, out, _ = run(capsys, "analyze", subst(F2), "--depth", "4", "--rho", "0.5")
    assert code == 0
    line = next(x for x in out.splitlines() if "self-similar, rho" in x)
    got = float(line.split("(self-similar")[0].split("=")[-1])
    assert got == pytest.approx(2 * math.log(oracles.TAU) / math.log(2), abs=1e-9)
    assert "#H_n = (1·τ)*(1 + 1·τ)^n + (1 - 1·τ)*(2 - 1·τ)^n" in out


def test_zeta_counts(capsys, subst):
    code, out, _ = run(capsys, "zeta", subst(F2), "--rho", "0.5")
    assert code == 0
    assert "#H_n (n = 1..8): [4, 11, 29, 76, 199, 521, 1364, 3571]" in out
    assert run(capsys, "zeta", subst(F2))[0] == 2


def test_empty_and_malformed_input(capsys, subst):
    assert run(capsys, "analyze", subst(""))[0] == 2
    assert run(capsys, "analyze", subst("a -> \n"))[0] == 2
    assert run(capsys, "analyze", subst("a => b\n"))[0] == 2


def test_non_primitive(capsys, subst):
    code, _, err = run(capsys, "analyze", subst("a -> ab\nb -> b\n"))
    assert code == 3 and err


def test_bad_options(capsys, subst):
    path = subst(FIB)
    assert run(capsys, "analyze", path, "--rho", "1.5")[0] == 2
    assert run(capsys, "analyze", path, "--plot")[0] == 2


def test_threads_variable(capsys, subst, monkeypatch):
    monkeypatch.setenv("APSPEC_THREADS", "zero")
    assert run(capsys, "analyze", subst(FIB), "--depth", "3")[0] == 2
    monkeypatch.setenv("APSPEC_THREADS", "4")
    assert run(capsys, "analyze", subst(FIB), "--depth", "3")[0] == 0


def test_sturmian_order_verdicts(capsys):
    code, out, _ = run(capsys, "sturmian", "1", "1", "1", "1", "1", "1", "--order")
    assert code == 0 and "ORDER: equivalent" in out
    code, out, _ = run(capsys, "sturmian", "1", "2", "4", "8", "16", "32", "--order")
    assert code == 0 and "ORDER: diverging" in out


def test_distance(capsys, subst):
    code, out, _ = run(capsys, "distance", subst(FIB), "abaab", "baaba", "--depth", "5")
    assert code == 0 and "d_inf" in out


def test_khom_realize_verify(capsys, subst, tmp_path):
    target = tmp_path / "t.tsv"
    target.write_text("ε\t0\na\t1\nb\t-1\naa\t0\nab\t1\nba\t-1\n", encoding="utf-8")
    code, out, _ = run(capsys, "khom", subst(FIB), "--depth", "2", "--realize", str(target),
                       "--verify", "--out", str(tmp_path / "o"))
    assert code == 0 and "ROUNDTRIP OK" in out
    assert (tmp_path / "o" / "realization.tsv").exists()
    target.write_text("ε\t1\na\t1\nb\t0\naa\t0\nab\t1\nba\t0\n", encoding="utf-8")
    assert run(capsys, "khom", subst(FIB), "--depth", "2", "--realize", str(target))[0] == 2


def test_pisot_coupling_note(capsys, subst):
    code, out, _ = run(capsys, "pisot", subst(FIB))
    assert code == 0
    assert "coupling" in out and "pure point" in out


@pytest.mark.parametrize("cmd", [["analyze"], ["laplacian", "--depth", "5"], ["order", "--order-depth", "16"]])
def test_output_is_deterministic(capsys, subst, tmp_path, cmd):
    path = subst(FIB)
    outs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        code, out, _ = run(capsys, cmd[0], path, *cmd[1:], "--out", str(d), "--choice", "weighted", "--seed", "3")
        assert code == 0
        outs.append((out, {p.name: p.read_bytes() for p in sorted(d.iterdir())}))
    assert outs[0] == outs[1]


def test_plot_writes_identical_pngs(capsys, subst, tmp_path):
    pytest.importorskip("matplotlib")
    path = subst(FIB)
    runs = []
    for i in range(2):
        d = tmp_path / f"p{i}"
        assert run(capsys, "laplacian", path, "--depth", "5", "--out", str(d), "--plot")[0] == 0
        pngs = {p.name: p.read_bytes() for p in d.glob("*.png")}
        assert pngs and all(b.startswith(b"\x89PNG") for b in pngs.values())
        runs.append(pngs)
    assert runs[0] == runs[1]


def test_module_entry_point(subst):
    env = dict(os.environ, PYTHONIOENCODING="utf-8")
    res = subprocess.run([sys.executable, "-m", "apspec", "analyze", subst(FIB), "--depth", "3"],
                         capture_output=True, text=True, env=env, timeout=120)
    assert res.returncode == 0 and "primitive: yes" in res.stdout
