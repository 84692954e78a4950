import json
import subprocess
import sys

import pytest

from nlslab import cli
from nlslab.config import ConfigError, ExperimentConfig, parse_config, validate
from nlslab.experiments import worker_count
from nlslab.grid import make_grid
from nlslab.initial_data import gaussian
from nlslab.io import write_snapshot

DISPERSIVE = """\
# cheap free-flow check
grid.n = 32
grid.half_width = 8
data.recipe = gaussian
data.width = 1.0
report.kind = dispersive
report.times = 0.25, 0.5
"""


class TestParse:
    def test_defaults(self):
        assert parse_config("") == ExperimentConfig()

    def test_values(self):
        cfg = parse_config(DISPERSIVE + "data.center = 0, 0.5, -1\nsolver.dealias = no\n")
        assert cfg.grid.n == 32 and cfg.grid.half_width == 8.0
        assert cfg.report.times == (0.25, 0.5)
        assert cfg.data.center == (0.0, 0.5, -1.0)
        assert cfg.solver.dealias is False

    def test_comments_and_blank_lines(self):
        assert parse_config("\n  # nothing\ngrid.n = 48 # trailing\n").grid.n == 48

    @pytest.mark.parametrize(
        "text,line,fragment",
        [
            ("grid.n = 32\ngrid.m = 3\n", 2, "unknown key 'grid.m'"),
            ("grid.n = 32\n\ngrid.n = 48\n", 3, "duplicate key 'grid.n' (first set on line 1)"),
            ("solver.dt = fast\n", 1, "invalid value for solver.dt"),
            ("solver.dt = inf\n", 1, "must be finite"),
            ("data.recipe = sech\n", 1, "expected one of"),
            ("report.times = 1,,2\n", 1, "comma-separated"),
            ("grid.n\n", 1, "expected 'section.key = value'"),
            ("data.window = maybe\n", 1, "true or false"),
        ],
    )
    def test_errors_name_the_line(self, text, line, fragment):
        with pytest.raises(ConfigError) as exc:
            parse_config(text, "x.cfg")
        assert f"x.cfg:{line}:" in str(exc.value)
        assert fragment in str(exc.value)

    @pytest.mark.parametrize(
        "text,key",
        [
            ("solver.t_end = 0.1\nsolver.dt = 0.2\n", "solver.dt"),
            ("grid.n = 30\n", "grid.n"),
            ("grid.half_width = -1\n", "grid.half_width"),
            ("sweep.lambda = 1, 3\n", "sweep.lambda"),
            ("sweep.n = 32, 34\n", "sweep.n"),
            ("sweep.dt = 0.1, 5\n", "sweep.dt"),
            ("data.center = 0, 0\n", "data.center"),
            ("data.recipe = dyadic_superposition\n", "data.scales"),
            ("data.recipe = dyadic_superposition\ndata.scales = 1, 2\ndata.weights = 1\n", "data.weights"),
            ("run.workers = 0\n", "run.workers"),
            ("report.strides = 2, 0\n", "report.strides"),
            ("solver.sample_stride = 0\n", "solver.sample_stride"),
        ],
    )
    def test_cross_field_errors(self, text, key):
        with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
            parse_config(text, "x.cfg")

    def test_dt_error_points_at_its_line(self):
        with pytest.raises(ConfigError, match=r"x\.cfg:2: solver\.dt"):
            parse_config("solver.t_end = 0.1\nsolver.dt = 0.2\n", "x.cfg")

    def test_validate_programmatic(self):
        bad = ExperimentConfig().with_changes(solver={"dt": 2.0, "t_end": 1.0})
        with pytest.raises(ConfigError):
            validate(bad)

    def test_not_utf8(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_bytes(b"grid.n = 32 \xff\n")
        assert cli.main(["run", str(p)]) == 1


class TestWorkers:
    def test_env(self, monkeypatch):
        cfg = ExperimentConfig(workers=3)
        monkeypatch.delenv("NLSLAB_WORKERS", raising=False)
        assert worker_count(cfg) == 3
        monkeypatch.setenv("NLSLAB_WORKERS", "2")
        assert worker_count(cfg) == 2
        monkeypatch.setenv("NLSLAB_WORKERS", "two")
        with pytest.raises(ValueError):
            worker_count(cfg)
        monkeypatch.setenv("NLSLAB_WORKERS", "0")
        with pytest.raises(ValueError):
            worker_count(cfg)


class TestCli:
    def _cfg(self, tmp_path, text=DISPERSIVE):
        p = tmp_path / "run.cfg"
        p.write_text(text)
        return p

    def test_run_dispersive(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli.main(["run", str(self._cfg(tmp_path)), "--out", str(out)]) == 0
        assert capsys.readouterr().out.startswith("dispersive: PASS")
        report = json.loads((out / "report.json").read_text())
        assert report["status"] == "pass" and report["config"]["grid"]["n"] == 32
        assert (out / "dispersive.csv").read_text().count("\n") == 3

    def test_rerun_is_bit_identical(self, tmp_path):
        cfg = self._cfg(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        cli.main(["run", str(cfg), "--out", str(a)])
        cli.main(["run", str(cfg), "--out", str(b)])
        for name in ("report.json", "dispersive.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_output_dir_from_config(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfg = self._cfg(tmp_path, DISPERSIVE + "output.dir = results/d\n")
        assert cli.main(["run", str(cfg)]) == 0
        assert (tmp_path / "results" / "d" / "report.json").exists()

    def test_failure_exit_code(self, tmp_path):
        # a tolerance of -1 cannot be met, so the property fails rather than errors
        cfg = self._cfg(tmp_path, DISPERSIVE + "report.dispersive_tol = -1\n")
        assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_config_error(self, tmp_path, capsys):
        cfg = self._cfg(tmp_path, "solver.dt = 2\n")
        assert cli.main(["run", str(cfg)]) == 1
        assert "nlslab: error:" in capsys.readouterr().err
        assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 1

    def test_zero_data_decay_is_vacuous(self, tmp_path):
        cfg = self._cfg(tmp_path, "grid.n = 16\ndata.amplitude = 0\nreport.kind = decay\nsolver.t_end = 0.1\n")
        out = tmp_path / "o"
        assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
        assert json.loads((out / "report.json").read_text())["status"] == "pass"

    def test_snapshots_and_info(self, tmp_path, capsys):
        out = tmp_path / "o"
        cfg = self._cfg(tmp_path, DISPERSIVE + "report.snapshots = true\n")
        assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
        capsys.readouterr()
        assert cli.main(["info", str(out / "initial.nlsf")]) == 0
        text = capsys.readouterr().out
        assert "n           32" in text and "complete" in text

    def test_info_errors(self, tmp_path, capsys):
        p = tmp_path / "bad.nlsf"
        p.write_bytes(b"JUNK" + bytes(40))
        assert cli.main(["info", str(p)]) == 1
        assert "magic" in capsys.readouterr().err

    def test_info_truncated_reports_expected_size(self, tmp_path, capsys):
        p = tmp_path / "f.nlsf"
        write_snapshot(p, gaussian(make_grid(3, 16, 8.0), 1.0, 1.5))
        p.write_bytes(p.read_bytes()[:-16])
        assert cli.main(["info", str(p)]) == 0
        assert "expected" in capsys.readouterr().out

    def test_suite(self, tmp_path, capsys):
        out = tmp_path / "s"
        assert cli.main(["suite", "--out", str(out)]) == 0
        assert capsys.readouterr().out.startswith("property-suite: PASS")
        lines = (out / "suite.csv").read_text().splitlines()
        assert lines[0] == "invariant,value,relation,threshold,passed"
        assert all(line.endswith(",true") for line in lines[1:])

    def test_sweep_needs_axis(self, tmp_path):
        assert cli.main(["sweep", str(self._cfg(tmp_path)), "--out", str(tmp_path / "o")]) == 1
        assert cli.main(["sweep", str(self._cfg(tmp_path)), "--workers", "0"]) == 1

    def test_console_script(self):
        r = subprocess.run([sys.executable, "-m", "nlslab.cli", "--version"], capture_output=True, text=True)
        assert r.returncode == 0 and r.stdout.startswith("nlslab ")
