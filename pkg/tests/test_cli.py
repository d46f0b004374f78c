import subprocess
import sys

import numpy as np
import pytest

from levelcs.cli import main
from levelcs.linalg import read_csv, write_csv


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_guarantee_cosamp(capsys):
    code, out, _ = run(["guarantee", "--theorem", "cosamp", "--delta", "0"], capsys)
    assert code == 0
    fields = dict(line.split(" ", 1) for line in out.splitlines())
    assert f"{float(fields['threshold']):.3f}" == "0.478"
    assert float(fields["rho"]) == 0
    assert fields["condition_met"] == "true"


def test_guarantee_iht_and_qcbp(capsys):
    code, out, _ = run(["guarantee", "--theorem", "iht", "--delta", "0.3"], capsys)
    assert code == 0 and "rho 0.519615242271" in out
    code, out, _ = run(["guarantee", "--theorem", "qcbp", "--delta", "0.3",
                        "--structure", "10/3", "--weights", "unit"], capsys)
    assert code == 0 and "threshold 0.414213562373" in out
    assert "condition_met true" in out
    code, _, _ = run(["guarantee", "--theorem", "qcbp", "--delta", "0.3"], capsys)
    assert code == 1
    code, _, _ = run(["guarantee", "--theorem", "iht", "--delta", "1.5"], capsys)
    assert code == 2


def test_ricl_identity(tmp_path, capsys):
    write_csv(tmp_path / "id3.csv", np.eye(3))
    code, out, _ = run(["ricl", "--matrix", str(tmp_path / "id3.csv"), "--structure", "3/2"],
                       capsys)
    assert code == 0
    assert out.splitlines()[0] == "0.000000000000"
    assert out.splitlines()[1].startswith("support ")


def test_ricl_cap_is_runtime_error(tmp_path, capsys):
    write_csv(tmp_path / "a.csv", np.ones((2, 30)))
    code, _, err = run(["ricl", "--matrix", str(tmp_path / "a.csv"), "--structure", "30/10",
                        "--cap", "10"], capsys)
    assert code == 2 and "exceeds cap" in err


def test_missing_structure_is_usage_error(tmp_path, capsys):
    write_csv(tmp_path / "id3.csv", np.eye(3))
    code, _, err = run(["ricl", "--matrix", str(tmp_path / "id3.csv")], capsys)
    assert code == 1 and "usage" in err


def test_unknown_command_and_flag(capsys):
    assert run(["frobnicate"], capsys)[0] == 1
    assert run(["guarantee", "--bogus"], capsys)[0] == 1
    assert run([], capsys)[0] == 1


def test_bad_structure_is_usage_error(tmp_path, capsys):
    write_csv(tmp_path / "id3.csv", np.eye(3))
    code, _, _ = run(["ricl", "--matrix", str(tmp_path / "id3.csv"), "--structure", "2,1/1,1"],
                     capsys)
    assert code == 1


def test_missing_file_is_runtime_error(tmp_path, capsys):
    code, _, _ = run(["ricl", "--matrix", str(tmp_path / "nope.csv"), "--structure", "3/1"],
                     capsys)
    assert code == 2


@pytest.mark.parametrize("alg", ["iht", "niht", "cosamp", "omp"])
def test_solve_identity(tmp_path, capsys, alg):
    x = np.array([0, 2.0, 0, -1.5, 0, 0.7])
    write_csv(tmp_path / "A.csv", np.eye(6))
    write_csv(tmp_path / "y.csv", x)
    code, _, _ = run(["solve", "--matrix", str(tmp_path / "A.csv"),
                      "--measurements", str(tmp_path / "y.csv"), "--structure", "3,6/1,2",
                      "--algorithm", alg, "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 0
    assert np.allclose(read_csv(tmp_path / "x.csv"), x, atol=1e-12)


def test_solve_stdout(tmp_path, capsys):
    write_csv(tmp_path / "A.csv", 2 * np.eye(4))
    write_csv(tmp_path / "y.csv", np.array([0, 4.0, 0, 0]))
    code, out, err = run(["solve", "--matrix", str(tmp_path / "A.csv"),
                          "--measurements", str(tmp_path / "y.csv"), "--structure", "4/1",
                          "--algorithm", "cosamp"], capsys)
    assert code == 0
    assert [float(v) for v in out.split()] == pytest.approx([0, 2, 0, 0])
    assert "stop_reason=Converged" in err


def test_phase_line_identity(tmp_path, capsys):
    code, out, _ = run(["phase-line", "--algorithm", "omp", "--N", "16", "--m", "16",
                        "--trials", "2", "--structure", "8,16/2,1", "--identity"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# seed=0"
    assert lines[-1].startswith("16,3,2,2,1.0000,")


def test_phase_line_flag_errors(capsys):
    base = ["phase-line", "--algorithm", "omp", "--N", "16", "--structure", "16/2"]
    assert run(base, capsys)[0] == 1  # no --m
    assert run(base + ["--m", "8", "--m-range", "4:4:8"], capsys)[0] == 1
    assert run(base + ["--m-range", "8:0:4"], capsys)[0] == 1
    assert run(base + ["--m", "32"], capsys)[0] == 1


def test_phase_line_solver_structure(tmp_path, capsys):
    args = ["phase-line", "--algorithm", "cosamp", "--N", "32", "--m-range", "16:8:24",
            "--trials", "3", "--structure", "16,32/3,1"]
    code, out4, _ = run(args, capsys)
    code1, out1, _ = run(args + ["--solver-structure", "one-level"], capsys)
    assert code == code1 == 0
    assert "solver_structure=32/4" in out1
    assert len(out4.splitlines()) == len(out1.splitlines()) == 5


def test_phase_grid_svg(tmp_path, capsys):
    svg = tmp_path / "g.svg"
    code, out, _ = run(["phase-grid", "--algorithm", "cosamp", "--N", "32", "--m", "16,32",
                        "--s", "2,3,4", "--rule", "alternating", "--trials", "2",
                        "--svg", str(svg), "--dump-trials", str(tmp_path / "t.csv")], capsys)
    assert code == 0
    text = svg.read_text()
    assert text.count('class="cell"') == 4
    assert text.count('class="cell skipped"') == 2
    assert len(out.splitlines()) == 3 + 4
    assert "rule=N/4,N/2,3*N/4,N;s/2,0,s/2,0" in out


def test_phase_grid_all_infeasible(capsys):
    code, _, _ = run(["phase-grid", "--algorithm", "omp", "--N", "32", "--m", "16",
                      "--s", "3", "--rule", "alternating", "--trials", "1"], capsys)
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "levelcs.cli", "guarantee", "--theorem",
                           "iht", "--delta", "0"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "threshold 0.57735026919" in proc.stdout
