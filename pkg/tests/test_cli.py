import numpy as np
import pytest

from besselwave.cli import main, parse_config, parse_field_spec
from besselwave.errors import ConfigError
from besselwave.fields import (GaussianField, PlaneWaveField, PolynomialField,
                               SineProductField)

GOOD_CONFIG = """\
problem.n = 3
problem.m = 1
problem.gamma = 0.5
problem.lambda = 1.0
data.phi0 = planewave:k=0.6 -0.5 0.6244997998398398
grid.x = 0.3 -0.2 0.45; 0.0 0.1 0.2
grid.t = 0.5 1.0
quadrature.radial_order = 32
quadrature.sphere_order = 16
"""


class TestParseFieldSpec:
    def test_planewave(self):
        f = parse_field_spec("planewave:k=1 0 0,phase=0.2,amplitude=2", 3)
        assert isinstance(f, PlaneWaveField)
        assert f.eval(np.zeros((1, 3)))[0] == pytest.approx(2 * np.cos(0.2))

    def test_sineproduct(self):
        f = parse_field_spec("sineproduct:k=1 2", 2)
        assert isinstance(f, SineProductField)

    def test_gaussian(self):
        f = parse_field_spec("gaussian:width=0.5,center=0 0 0", 3)
        assert isinstance(f, GaussianField)

    def test_polynomial(self):
        f = parse_field_spec("polynomial:c(2 0)=1,c(0 2)=1", 2)
        assert isinstance(f, PolynomialField)
        assert f.eval(np.array([[1.0, 2.0]]))[0] == pytest.approx(5.0)

    def test_zero(self):
        f = parse_field_spec("zero:", 3)
        assert f.eval(np.zeros((1, 3)))[0] == 0.0

    def test_errors(self):
        with pytest.raises(ConfigError):
            parse_field_spec("vortex:k=1 0 0", 3)
        with pytest.raises(ConfigError):
            parse_field_spec("planewave:phase=0.2", 3)  # k missing
        with pytest.raises(ConfigError):
            parse_field_spec("planewave:k=1 0 0,spin=2", 3)
        with pytest.raises(ConfigError):
            parse_field_spec("planewave:k", 3)


class TestParseConfig:
    def test_good(self):
        cfg = parse_config(GOOD_CONFIG)
        assert cfg.spec.n == 3
        assert cfg.spec.m == 1
        assert len(cfg.grid_x) == 2
        assert cfg.grid_t == [0.5, 1.0]
        assert cfg.rules.radial_order == 32

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config(GOOD_CONFIG + "problem.zeta = 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError):
            parse_config(GOOD_CONFIG + "problem.n = 4\n")

    def test_missing_data(self):
        bad = GOOD_CONFIG.replace("data.phi0 = planewave:"
                                  "k=0.6 -0.5 0.6244997998398398\n", "")
        with pytest.raises(ConfigError):
            parse_config(bad)

    def test_bad_vector(self):
        with pytest.raises(ConfigError):
            parse_config(GOOD_CONFIG.replace("grid.t = 0.5 1.0",
                                             "grid.t = 0.5 one"))

    def test_wrong_point_dimension(self):
        with pytest.raises(ConfigError):
            parse_config(GOOD_CONFIG.replace("grid.x = 0.3 -0.2 0.45; 0.0 0.1 0.2",
                                             "grid.x = 0.3 -0.2"))

    def test_psi_window(self):
        text = GOOD_CONFIG.replace("problem.gamma = 0.5",
                                   "problem.gamma = 0.1")
        text = text.replace("data.phi0", "data.psi0")
        text += "problem.family = psi\n"
        with pytest.raises(ConfigError):
            parse_config(text)  # alpha = 0.6 >= 1/2

    def test_negative_time(self):
        with pytest.raises(ConfigError):
            parse_config(GOOD_CONFIG.replace("grid.t = 0.5 1.0",
                                             "grid.t = 0.5 -1.0"))

    def test_not_key_value(self):
        with pytest.raises(ConfigError):
            parse_config("problem.n: 3\n")


class TestSolveCommand:
    def write_config(self, tmp_path, text=GOOD_CONFIG):
        p = tmp_path / "run.cfg"
        p.write_text(text)
        return str(p)

    def test_solve_csv(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out = tmp_path / "sol.csv"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x1,x2,x3,t,u"
        assert len(lines) == 1 + 2 * 2  # 2 times x 2 points, t-major
        # t-major ordering: first two rows share t = 0.5
        assert lines[1].split(",")[3] == "0.5"
        assert lines[2].split(",")[3] == "0.5"
        assert lines[3].split(",")[3] == "1"

    def test_reruns_byte_identical(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["solve", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["solve", "--config", cfg, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_threads_deterministic(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["solve", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["solve", "--config", cfg, "--threads", "4",
                     "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_empty_time_grid(self, tmp_path):
        cfg = self.write_config(tmp_path,
                                GOOD_CONFIG.replace("grid.t = 0.5 1.0",
                                                    "grid.t ="))
        out = tmp_path / "sol.csv"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        assert out.read_text() == "x1,x2,x3,t,u\n"

    def test_invalid_config_exit_1(self, tmp_path):
        cfg = self.write_config(tmp_path, GOOD_CONFIG + "problem.zeta = 1\n")
        assert main(["solve", "--config", cfg]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 1
        assert main(["solve"]) == 1


class TestOperatorsCommand:
    def test_runs_and_prints_constants(self, capsys):
        assert main(["operators"]) == 0
        out = capsys.readouterr().out
        assert "3/4" in out  # a(2, 0)
        assert "[3, 1]" in out  # radial reduction constants, p = 2


class TestVerifyCommand:
    def test_good_problem_exit_0(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(GOOD_CONFIG + "verify.fd_step = 2e-3\n")
        assert main(["verify", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "two_path_gap" in out

    def test_corrupted_solution_exit_3(self, tmp_path, capsys, monkeypatch):
        # skew the direct-path constant so the two paths disagree
        import besselwave.solver as solver_mod
        real_gamma = solver_mod.gamma
        monkeypatch.setattr(solver_mod, "gamma",
                            lambda x: 1.01 * real_gamma(x))
        cfg = tmp_path / "run.cfg"
        cfg.write_text(GOOD_CONFIG + "verify.fd_step = 2e-3\n")
        assert main(["verify", "--config", str(cfg)]) == 3
        assert "FAIL" in capsys.readouterr().out


class TestConvergenceCommand:
    def test_exit_0(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(GOOD_CONFIG + "convergence.orders = 16 24 32\n")
        assert main(["convergence", "--config", str(cfg)]) == 0
        assert "successive max differences" in capsys.readouterr().out
