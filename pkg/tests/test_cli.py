"""CLI behaviour and byte-for-byte golden outputs.

Regenerate the golden files with ``python tests/test_cli.py --regen`` after an
intentional output change.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from freqmap.cli import run
from freqmap.compass import compass_matrix
from freqmap.io import read_matrix_csv

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"
FIXTURES = ("mallows05.soc", "tree5.json", "id10.csv", "un10.csv")

# name -> (argv, files written by the command)
CASES = {
    "matrix_uniform": (["matrix", "--model", "mallows", "--m", "10", "--normphi", "1", "--out", "u.csv"], ["u.csv"]),
    "matrix_tree_rational": (
        ["--precision", "rational", "matrix", "--model", "gs-tree", "--m", "5", "--tree", "tree5.json", "--out", "t.csv"],
        ["t.csv"],
    ),
    "matrix_phi_conitzer": (
        ["matrix", "--model", "phi-conitzer", "--m", "6", "--phi", "1/3", "--precision", "rational", "--out", "pc.csv"],
        ["pc.csv"],
    ),
    "matrix_mixture": (
        ["matrix", "--model", "mallows-mixture", "--m", "7", "--normphi", "0.3", "--p", "0.75", "--out", "mx.csv"],
        ["mx.csv"],
    ),
    "distance_compass": (["distance", "--a", "id10.csv", "--b", "un10.csv"], []),
    "distance_raw": (["distance", "--a", "mallows05.soc", "--b", "un10.csv", "--raw"], []),
    "sample": (
        ["sample", "--model", "mallows", "--m", "10", "--normphi", "0.5", "--n", "100", "--seed", "7", "--out", "s.soc"],
        ["s.soc"],
    ),
    "fit": (
        ["fit", "--election", "mallows05.soc", "--families", "mallows,phi-conitzer,phi-walsh,mallows-mixture",
         "--grid-step", "0.01"],
        [],
    ),
    "map": (["map", "--m", "4", "--out", "layout.csv", "--svg", "map.svg", "--ratios", "ratios.csv"],
            ["layout.csv", "map.svg", "ratios.csv"]),
    "variance": (["--seed", "1", "variance", "--model", "ic", "--m", "5", "--n", "20", "--trials", "30"], []),
    "kemeny": (["kemeny", "--election", "mallows05.soc"], []),
}


def _run_case(name, workdir: Path, capsys) -> tuple[int, str]:
    argv, _ = CASES[name]
    for f in FIXTURES:
        shutil.copy(DATA / f, workdir / f)
    code = run(argv)
    return code, capsys.readouterr().out


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code, out = _run_case(name, tmp_path, capsys)
    assert code == 0
    assert out == (GOLDEN / f"{name}.stdout").read_text()
    for f in CASES[name][1]:
        assert (tmp_path / f).read_bytes() == (GOLDEN / f"{name}.{f}").read_bytes(), f


def test_uniform_matrix_file(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    _run_case("matrix_uniform", tmp_path, capsys)
    assert np.array_equal(read_matrix_csv(tmp_path / "u.csv"), compass_matrix("UN", 10))


def test_distance_id_un(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    _, out = _run_case("distance_compass", tmp_path, capsys)
    assert json.loads(out)["normalized"] == 1.0


def test_fit_reports_mallows_first(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    for f in FIXTURES:
        shutil.copy(DATA / f, tmp_path / f)
    assert run(["fit", "--election", "mallows05.soc", "--families", "mallows,phi-conitzer,phi-walsh"]) == 0
    rows = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert rows[0]["family"] == "mallows"
    assert abs(rows[0]["norm_phi"] - 0.5) <= 0.07
    assert [r["distance"] for r in rows] == sorted(r["distance"] for r in rows)


def test_threads_do_not_change_output(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["--threads", "3", "map", "--m", "4", "--out", "l3.csv"]) == 0
    out3 = capsys.readouterr().out.replace("l3.csv", "layout.csv")
    assert (tmp_path / "l3.csv").read_bytes() == (GOLDEN / "map.layout.csv").read_bytes()
    assert out3 == (GOLDEN / "map.stdout").read_text()


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["matrix", "--model", "mallows", "--m", "5", "--out", "x.csv"], "--phi"),
        (["matrix", "--model", "mallows", "--m", "5", "--phi", "abc", "--out", "x.csv"], "--phi"),
        (["matrix", "--model", "gs-tree", "--m", "5", "--out", "x.csv"], "--tree"),
        (["matrix", "--model", "conitzer", "--m", "5", "--p", "0.2", "--out", "x.csv"], "--p"),
        (["fit", "--election", "e.soc", "--families", "walsh"], "--families"),
        (["matrix", "--model", "zzz", "--m", "5", "--out", "x.csv"], "--model"),
        (["map", "--out", "x.csv"], "--m"),
    ],
)
def test_usage_errors_exit_2(argv, flag, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "e.soc").write_text("1: 1,2\n")
    with pytest.raises(SystemExit) as info:
        run(argv)
    assert info.value.code == 2
    assert flag in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["matrix", "--model", "mallows", "--m", "5", "--phi", "2", "--out", "x.csv"], "--phi"),
        (["distance", "--a", "missing.csv", "--b", "missing.csv"], "--a"),
        (["kemeny", "--election", "bad.soc"], "--election"),
        (["map", "--m", "5", "--out", "x.csv"], "even m"),
        (["matrix", "--model", "balanced", "--m", "6", "--out", "x.csv"], "--m"),
        (["matrix", "--model", "ic", "--m", "6", "--precision", "rational", "--out", "/nonexistent/dir/x.csv"], "x.csv"),
    ],
)
def test_domain_errors_exit_1(argv, flag, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "bad.soc").write_text("# DATA TYPE: soc\n2: 1,{2,3}\n")
    assert run(argv) == 1
    assert flag in capsys.readouterr().err


def test_help_and_version():
    for cmd in ("matrix", "distance", "sample", "fit", "map", "variance", "kemeny"):
        out = subprocess.run([sys.executable, "-m", "freqmap", cmd, "--help"], capture_output=True, text=True)
        assert out.returncode == 0 and "usage:" in out.stdout
    out = subprocess.run([sys.executable, "-m", "freqmap", "--version"], capture_output=True, text=True)
    assert out.stdout.startswith("freqmap ")


def _regenerate():  # pragma: no cover - maintenance entry point
    import contextlib
    import io
    import os
    import tempfile

    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, (argv, files) in CASES.items():
        with tempfile.TemporaryDirectory() as tmp:
            for f in FIXTURES:
                shutil.copy(DATA / f, Path(tmp) / f)
            cwd = os.getcwd()
            os.chdir(tmp)
            buf = io.StringIO()
            try:
                with contextlib.redirect_stdout(buf):
                    assert run(argv) == 0
            finally:
                os.chdir(cwd)
            (GOLDEN / f"{name}.stdout").write_text(buf.getvalue())
            for f in files:
                shutil.copy(Path(tmp) / f, GOLDEN / f"{name}.{f}")
        print("wrote", name)


if __name__ == "__main__":  # pragma: no cover
    if "--regen" in sys.argv:
        _regenerate()
