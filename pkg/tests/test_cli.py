import numpy as np
import pytest

from navsim.cli import main
from navsim.config import ConfigError, bundled_config_path, load_config


def write_config(path, duration=2.0, extra="", output=""):
    path.write_text(
        f"""
[scenario]
kind = const_east
lat_deg = 30.0
duration_s = {duration}
dt_s = 0.02

[run]
vel_alg = derived
pos_alg = derived

[compare]
algorithms = derived, tn, sv1, sv2
{extra}
{output}
"""
    )
    return path


class TestConfigLoading:
    def test_bundled_configs_parse(self):
        for name in ("scenario_a.ini", "scenario_b.ini"):
            cfg = load_config(bundled_config_path(name))
            assert cfg.scenario.dt == 0.02
            assert cfg.compare_algorithms == ("derived", "tn", "sv1", "sv2")

    def test_bundled_scenario_a_parameters(self):
        cfg = load_config(bundled_config_path("scenario_a.ini"))
        assert cfg.scenario.ve0 == 500.0
        assert cfg.scenario.lat0 == pytest.approx(np.deg2rad(30.0))
        assert cfg.scenario.duration == 3600.0

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/path.ini")

    def test_unknown_key_rejected(self, tmp_path):
        p = write_config(tmp_path / "c.ini", extra="\n[scenario2]\nfoo = 1\n")
        with pytest.raises(ConfigError):
            load_config(p)

    def test_unknown_scenario_key_rejected(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[scenario]\nkind = const_east\nlat_deg = 30\nduration_s = 1\n"
                     "dt_s = 0.02\nbogus = 1\n")
        with pytest.raises(ConfigError):
            load_config(p)

    def test_bad_kind_rejected(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[scenario]\nkind = circular\nlat_deg = 30\nduration_s = 1\ndt_s = 0.02\n")
        with pytest.raises(ConfigError):
            load_config(p)

    def test_overrides(self, tmp_path):
        p = write_config(tmp_path / "c.ini")
        cfg = load_config(p, dt_override=0.04, duration_override=4.0)
        assert cfg.scenario.dt == 0.04
        assert cfg.scenario.duration == 4.0

    def test_earth_section(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text(
            "[scenario]\nkind = const_east\nlat_deg = 30\nduration_s = 1\ndt_s = 0.02\n"
            "[earth]\nomega_e = 0.0\ngravity = 9.8\n"
        )
        cfg = load_config(p)
        assert cfg.scenario.model.omega_e == 0.0
        assert cfg.scenario.model.constant_gravity == 9.8


class TestRunCommand:
    def test_missing_config_exits_2(self, capsys):
        assert main(["run", "--config", "/no/such/file.ini"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_run_writes_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        out = tmp_path / "errors.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "t_s,verr_n_mps,verr_u_mps,verr_e_mps,"
            "perr_n_m,perr_u_m,perr_e_m,perr_horiz_m"
        )
        assert len(lines) == 1 + 101  # header + duration/dt + 1 records

    def test_dt_override_row_count(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        out = tmp_path / "errors.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--dt", "0.04"]) == 0
        assert len(out.read_text().splitlines()) == 1 + 51

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        main(["run", "--config", str(cfg), "--out", str(out1)])
        main(["run", "--config", str(cfg), "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_csv_lf_endings_and_precision(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        out = tmp_path / "errors.csv"
        main(["run", "--config", str(cfg), "--out", str(out)])
        raw = out.read_bytes()
        assert b"\r" not in raw
        # time column round-trips exactly (17 significant digits where the
        # value needs them)
        lines = raw.decode().splitlines()
        assert lines[3].split(",")[0] == "0.040000000000000001"
        for i, line in enumerate(lines[1:4]):
            assert float(line.split(",")[0]) == i * 0.02

    def test_plot_writes_svg(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        out = tmp_path / "errors.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--plot"]) == 0
        svg = tmp_path / "errors.svg"
        assert svg.is_file()
        assert b"<svg" in svg.read_bytes()[:500]


class TestCompareCommand:
    def test_compare_ranking_table(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.ini", duration=5.0)
        out = tmp_path / "rank.csv"
        assert main(["compare", "--config", str(cfg), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("rank,algorithm,")
        assert len(lines) == 5
        assert lines[1].split(",")[1] == "derived"

    def test_empty_algorithms_exits_2(self, tmp_path, capsys):
        p = tmp_path / "c.ini"
        p.write_text(
            "[scenario]\nkind = const_east\nlat_deg = 30\nduration_s = 1\ndt_s = 0.02\n"
            "[compare]\nalgorithms =\n"
        )
        assert main(["compare", "--config", str(p)]) == 2

    def test_compare_plot(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        out = tmp_path / "rank.csv"
        assert main(["compare", "--config", str(cfg), "--out", str(out), "--plot"]) == 0
        assert (tmp_path / "rank.svg").is_file()


class TestFullScenarioRun:
    def test_bundled_scenario_a_row_count(self, tmp_path):
        # full one-hour run: duration/dt + 1 records plus the header
        out = tmp_path / "full.csv"
        code = main(
            ["run", "--config", str(bundled_config_path("scenario_a.ini")),
             "--out", str(out)]
        )
        assert code == 0
        assert len(out.read_text().splitlines()) == 1 + 180_001

    def test_polar_singularity_exits_3(self, tmp_path, capsys):
        p = tmp_path / "polar.ini"
        p.write_text(
            "[scenario]\nkind = const_east\nlat_deg = 89.9999999\n"
            "duration_s = 1\ndt_s = 0.02\n"
        )
        assert main(["run", "--config", str(p), "--out", str(tmp_path / "x.csv")]) == 3
        assert "epoch" in capsys.readouterr().err


class TestOracleCheckCommand:
    def test_all_rows_pass(self, capsys):
        assert main(["oracle-check"]) == 0
        out = capsys.readouterr().out
        assert "all oracle rows pass" in out
        assert "FAIL" not in out


class TestResidualsCommand:
    def test_scenario_a_values(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.ini", duration=2.0)
        assert main(["residuals", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        w_line = [l for l in out.splitlines() if "omega_in" in l][0]
        value = float(w_line.split()[-2])
        assert value == pytest.approx(1.6e-4, rel=0.05)
        f_line = [l for l in out.splitlines() if "ramp-force" in l][0]
        assert float(f_line.split()[-2]) == pytest.approx(0.0014, rel=0.10)

    def test_scenario_b_values(self, tmp_path, capsys):
        p = tmp_path / "b.ini"
        p.write_text(
            "[scenario]\nkind = sine_east\nlat_deg = 30\nduration_s = 7200\ndt_s = 0.02\n"
            "a_mps2 = 10.0\nomega_rad_s = 0.06283185307179587\n"
        )
        assert main(["residuals", "--config", str(p)]) == 0
        out = capsys.readouterr().out
        w_line = [l for l in out.splitlines() if "omega_in" in l][0]
        assert float(w_line.split()[-2]) == pytest.approx(2.2e-4, rel=0.05)
        f_line = [l for l in out.splitlines() if "ramp-force" in l][0]
        assert float(f_line.split()[-2]) == pytest.approx(0.63, rel=0.05)
