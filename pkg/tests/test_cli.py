import json
import math
from pathlib import Path

import pytest

from slt.cli import load_problem, main, worker_count
from slt.errors import ConfigError

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / "problems"

C0_TOML = """\
p1 = 1.0
p2 = 1.0
alpha = 0.0
beta = 0.0
q_left = "0"
q_right = "0"
t_matrix = [[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]]
grid_steps = 512
"""


@pytest.fixture
def c0_file(tmp_path):
    path = tmp_path / "c0.toml"
    path.write_text(C0_TOML)
    return str(path)


class TestLoadProblem:
    def test_fixture_file(self, c0_file):
        P = load_problem(c0_file)
        assert P.tmatrix.delta12 == 1.0
        assert P.tmatrix.delta34 == 1.0
        assert P.grid_steps == 512

    def test_repo_fixture_files(self):
        for name in ("c0", "c1", "c2"):
            P = load_problem(str(PROBLEMS_DIR / f"{name}.toml"))
            assert P.grid_steps == 2048

    def test_degenerate_matrix_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text(C0_TOML.replace(
            "[[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]]",
            "[[1.0, 0.0, -1.0, 0.0], [1.0, 0.0, -1.0, 0.0]]"))
        with pytest.raises(ConfigError, match="Delta12 = 0"):
            load_problem(str(path))

    def test_missing_field(self, tmp_path):
        path = tmp_path / "partial.toml"
        path.write_text("\n".join(line for line in C0_TOML.splitlines()
                                  if not line.startswith("p1")))
        with pytest.raises(ConfigError, match="missing field 'p1'"):
            load_problem(str(path))

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("p1 = 1.0\np2 = = 2\n")
        with pytest.raises(ConfigError, match="line 2"):
            load_problem(str(path))

    def test_unknown_field(self, tmp_path):
        path = tmp_path / "extra.toml"
        path.write_text(C0_TOML + "surprise = 3\n")
        with pytest.raises(ConfigError, match="unknown field 'surprise'"):
            load_problem(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_problem(str(tmp_path / "nope.toml"))

    def test_bad_expression(self, tmp_path):
        path = tmp_path / "expr.toml"
        path.write_text(C0_TOML.replace('q_left = "0"', 'q_left = "2+"'))
        with pytest.raises(ConfigError, match="bad potential expression"):
            load_problem(str(path))


class TestSubcommands:
    def test_spectrum_csv(self, c0_file, capsys):
        rc = main(["spectrum", "--problem", c0_file, "--count", "4"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,lambda,s,norm_constant"
        lams = [float(line.split(",")[1]) for line in lines[1:]]
        assert lams == pytest.approx([0.25, 1.0, 2.25, 4.0], abs=1e-6)

    def test_spectrum_json(self, c0_file, capsys):
        rc = main(["spectrum", "--problem", c0_file, "--count", "2",
                   "--format", "json"])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert data["shift"] == 0.0
        assert len(data["eigenvalues"]) == 2
        assert data["eigenvalues"][0]["lambda"] == pytest.approx(0.25, abs=1e-6)

    def test_eigenfunction_samples(self, c0_file, capsys):
        rc = main(["eigenfunction", "--problem", c0_file, "--index", "0",
                   "--samples", "8"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("# n=0 lambda=0.25")
        assert lines[1] == "x,phi"
        assert len(lines) == 10

    def test_green_csv(self, c0_file, capsys):
        rc = main(["green", "--problem", c0_file, "--lambda", "0.0",
                   "--samples", "4"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1] == "x,xi,G"
        assert len(lines) == 2 + 16

    def test_resolvent_quadrature(self, c0_file, capsys):
        rc = main(["resolvent", "--problem", c0_file, "--lambda", "0.0",
                   "--f", "1"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1] == "x,u"
        assert lines[-1].startswith("# max_residual=")
        # spot check the closed form (pi^2 - x^2)/2 at the left endpoint's neighbour
        x, u = (float(v) for v in lines[3].split(","))
        assert u == pytest.approx((math.pi ** 2 - x ** 2) / 2.0, abs=1e-4)

    def test_resolvent_at_eigenvalue_fails(self, c0_file, capsys):
        rc = main(["resolvent", "--problem", c0_file, "--lambda", "0.25",
                   "--f", "1"])
        captured = capsys.readouterr()
        assert rc == 1
        assert "within tolerance of an eigenvalue" in captured.err

    def test_resolvent_series_method(self, c0_file, capsys):
        rc = main(["resolvent", "--problem", c0_file, "--lambda", "10.3",
                   "--f", "sin(x+pi)", "--method", "series", "--terms", "4"])
        assert rc == 0
        assert "method=series" in capsys.readouterr().out

    def test_expand_with_parseval_and_reconstruct(self, c0_file, capsys):
        rc = main(["expand", "--problem", c0_file, "--f", "sin(x+pi)",
                   "--terms", "3", "--parseval", "--reconstruct", "5"])
        assert rc == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0] == "n,c_n"
        assert any(line.startswith("# norm2=") and "parseval_gap=" in line
                   for line in lines)
        assert "x,f,S_N" in lines

    def test_output_file(self, c0_file, tmp_path, capsys):
        target = tmp_path / "out.csv"
        rc = main(["green", "--problem", c0_file, "--lambda", "0.0",
                   "--samples", "2", "--output", str(target)])
        assert rc == 0
        assert capsys.readouterr().out == ""
        assert target.read_text().splitlines()[1] == "x,xi,G"

    def test_byte_identical_reruns(self, c0_file, capsys):
        args = ["green", "--problem", c0_file, "--lambda", "3.3", "--samples", "6"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_grid_override(self, c0_file, capsys):
        rc = main(["spectrum", "--problem", c0_file, "--count", "1",
                   "--grid", "256"])
        assert rc == 0
        lam = float(capsys.readouterr().out.strip().splitlines()[1].split(",")[1])
        assert lam == pytest.approx(0.25, abs=1e-5)


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_missing_required_flag(self, capsys):
        assert main(["spectrum", "--count", "4"]) == 2

    def test_nonpositive_count(self, c0_file, capsys):
        assert main(["spectrum", "--problem", c0_file, "--count", "0"]) == 2

    def test_odd_grid(self, c0_file, capsys):
        assert main(["spectrum", "--problem", c0_file, "--count", "1",
                     "--grid", "101"]) == 2

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.toml"
        path.write_text("p1 = 1.0\n")
        assert main(["spectrum", "--problem", str(path), "--count", "1"]) == 2


class TestVerify:
    def test_worker_count_env(self, monkeypatch):
        monkeypatch.setenv("SLT_THREADS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("SLT_THREADS", "zero")
        with pytest.raises(ConfigError):
            worker_count()
        monkeypatch.delenv("SLT_THREADS")
        assert worker_count() >= 1

    def test_verify_c0(self, capsys, monkeypatch):
        monkeypatch.setenv("SLT_THREADS", "1")
        rc = main(["verify", "--fixture", "c0"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.strip().splitlines()
        assert all(line.startswith("PASS") for line in lines[:-1])
        assert lines[-1] == "all checks passed"
