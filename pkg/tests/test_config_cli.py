import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from viscoflow.config import (ConfigError, ScenarioConfig, apply_overrides,
                              default_tolerances, format_config, material_law,
                              parse_config)

MINIMAL = """
[scenario]
system = bulk
geometry = spherical

[material]
A = 0.5

[grid]
n_cells = 128
x_max = 3.0

[run]
t_end = 0.2
"""


class TestParse:
    def test_minimal_config_gets_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.system == "bulk"
        assert cfg.gamma == 2.0
        assert cfg.cfl == 0.4
        assert cfg.tolerances == default_tolerances()

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config("# leading comment\n" + MINIMAL + "\n# trailing\n")
        assert cfg.n_cells == 128

    def test_gamma_at_most_one_rejected(self):
        with pytest.raises(ConfigError, match="gamma must exceed 1"):
            parse_config(MINIMAL + "\n[material]\ngamma = 1.0\n".replace("[material]\n", "")
                         if False else MINIMAL.replace("A = 0.5", "A = 0.5\ngamma = 1.0"))

    def test_shear_spherical_rejected(self):
        with pytest.raises(ConfigError, match="unsupported combination"):
            parse_config(MINIMAL.replace("system = bulk", "system = shear"))

    def test_all_errors_reported_with_line_numbers(self):
        bad = "\n".join([
            "[scenario]",
            "system = plasma",          # line 2: bad value
            "mystery = 1",              # line 3: unknown key
            "[grid]",
            "n_cells = lots",           # line 5: bad type
            "[nonsense]",               # line 6: unknown section
        ])
        with pytest.raises(ConfigError) as err:
            parse_config(bad)
        messages = err.value.errors
        lines = [ln for ln, _ in messages]
        assert 3 in lines and 5 in lines and 6 in lines
        assert any("system must be" in msg for _, msg in messages)
        assert len(messages) >= 4

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(MINIMAL + "\n[grid]\nn_cells = 64\nn_cells = 32\n"
                         if False else MINIMAL.replace("n_cells = 128",
                                                       "n_cells = 128\nn_cells = 64"))

    def test_front_containment_checked_at_parse_time(self):
        with pytest.raises(ConfigError, match="front not contained"):
            parse_config(MINIMAL.replace("t_end = 0.2", "t_end = 5.0"))

    def test_round_trip(self):
        cfg = parse_config(MINIMAL)
        assert parse_config(format_config(cfg)) == cfg

    def test_round_trip_with_custom_values(self):
        text = MINIMAL + "\n[profile]\nb_from_f0 = 31.5\n\n[tolerances]\ngrad_factor = 10.0\n"
        cfg = parse_config(text)
        assert cfg.b_from_f0 == 31.5
        assert cfg.tolerances["grad_factor"] == 10.0
        assert parse_config(format_config(cfg)) == cfg

    def test_snapshot_times_parsed(self):
        cfg = parse_config(MINIMAL + "\n[run]\nsnapshot_times = 0.0, 0.1\n"
                           if False else
                           MINIMAL.replace("t_end = 0.2",
                                           "t_end = 0.2\nsnapshot_times = 0.0, 0.1"))
        assert cfg.snapshot_times == (0.0, 0.1)

    def test_unknown_tolerance_rejected(self):
        with pytest.raises(ConfigError, match="unknown tolerance"):
            parse_config(MINIMAL + "\n[tolerances]\nmade_up = 3\n")

    def test_powerlaw_material(self):
        cfg = parse_config(MINIMAL.replace("A = 0.5", "A = 0.5\nzeta = powerlaw:2.0,1.0"))
        law = material_law(cfg)
        assert not law.has_constant_transport
        assert law.zeta(3.0) == pytest.approx(6.0)


class TestOverrides:
    def test_override_value(self):
        cfg = parse_config(MINIMAL)
        cfg2 = apply_overrides(cfg, ["grid.n_cells=256", "tolerances.grad_factor=10"])
        assert cfg2.n_cells == 256
        assert cfg2.tolerances["grad_factor"] == 10.0
        assert cfg.n_cells == 128  # original untouched

    def test_override_bad_target(self):
        cfg = parse_config(MINIMAL)
        with pytest.raises(ConfigError, match="unknown override"):
            apply_overrides(cfg, ["grid.shape=round"])

    def test_override_revalidates(self):
        cfg = parse_config(MINIMAL)
        with pytest.raises(ConfigError, match="gamma"):
            apply_overrides(cfg, ["material.gamma=0.5"])


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "viscoflow", *args],
                          capture_output=True, text=True)


@pytest.fixture
def config_path(tmp_path: Path) -> Path:
    path = tmp_path / "scenario.cfg"
    path.write_text(MINIMAL, encoding="utf-8")
    return path


class TestCli:
    def test_help(self):
        cp = run_cli("--help")
        assert cp.returncode == 0
        assert "speeds" in cp.stdout and "blowup-cert" in cp.stdout

    def test_speeds_table(self, config_path):
        cp = run_cli("speeds", "--config", str(config_path))
        assert cp.returncode == 0, cp.stderr
        assert "FOSH" in cp.stdout
        assert "1.41421356237" in cp.stdout  # +- sqrt(2) at unit coefficients

    def test_speeds_csv(self, config_path, tmp_path):
        out = tmp_path / "out"
        cp = run_cli("speeds", "--config", str(config_path), "--out", str(out))
        assert cp.returncode == 0, cp.stderr
        lines = (out / "speeds.csv").read_text().strip().splitlines()
        assert lines[0] == "speed,multiplicity"
        assert len(lines) == 4  # -c_v, 0 (x3), +c_v
        assert (out / "run_record.txt").exists()

    def test_stability_output(self, config_path):
        cp = run_cli("stability", "--config", str(config_path), "--k", "1.0")
        assert cp.returncode == 0, cp.stderr
        assert "Delta_1 = 1.0" in cp.stdout
        assert "stable" in cp.stdout

    def test_dispersion_sweep(self, config_path):
        cp = run_cli("dispersion", "--config", str(config_path), "--sweep", "0.5:2:4")
        assert cp.returncode == 0, cp.stderr
        lines = cp.stdout.strip().splitlines()
        assert lines[0].startswith("k,re_omega_1,im_omega_1")
        assert len(lines) == 5

    def test_dispersion_bad_sweep_is_config_error(self, config_path):
        cp = run_cli("dispersion", "--config", str(config_path), "--sweep", "nope")
        assert cp.returncode == 2

    def test_blowup_cert(self, config_path):
        cp = run_cli("blowup-cert", "--config", str(config_path),
                     "--override", "profile.b_from_f0=30.0", "--override",
                     "grid.n_cells=256")
        assert cp.returncode == 0, cp.stderr
        assert "momentum threshold" in cp.stdout
        assert "certificate satisfied   = True" in cp.stdout

    def test_blowup_cert_refusal_is_config_error(self, config_path):
        cp = run_cli("blowup-cert", "--config", str(config_path),
                     "--override", "material.zeta=powerlaw:1.0,1.0")
        assert cp.returncode == 2
        assert "refused" in cp.stderr

    def test_simulate_ok_and_outputs(self, config_path, tmp_path):
        out = tmp_path / "run"
        cp = run_cli("simulate", "--config", str(config_path), "--out", str(out),
                     "--override", "run.snapshot_times=0.0,0.1")
        assert cp.returncode == 0, cp.stderr
        series = (out / "series.csv").read_text().splitlines()
        assert series[0] == "t,dt,F,dM,G,max_grad_u,max_grad_rho"
        assert len(series) > 10
        snaps = sorted(out.glob("snapshot_*.csv"))
        assert len(snaps) == 2
        header = snaps[0].read_text().splitlines()[0]
        assert header == "t,cell_center,rho,u,Pi"
        record = (out / "run_record.txt").read_text()
        assert "status     = ok" in record
        assert "[scenario]" in record  # resolved config echo

    def test_simulate_deterministic_output(self, config_path, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            cp = run_cli("simulate", "--config", str(config_path), "--out", str(out),
                         "--override", "profile.a=0.001")
            assert cp.returncode == 0, cp.stderr
            outs.append((out / "series.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_simulate_breakdown_exit_code(self, config_path, tmp_path):
        # small fast blast: certificate-satisfying data at low resolution
        cp = run_cli("simulate", "--config", str(config_path),
                     "--override", "material.A=1.0",
                     "--override", "grid.n_cells=256",
                     "--override", "grid.x_max=2.0",
                     "--override", "run.t_end=0.05",
                     "--override", "profile.b_from_f0=31.92",
                     "--override", "tolerances.grad_factor=10")
        assert cp.returncode == 3, cp.stdout + cp.stderr
        assert "breakdown" in cp.stdout

    def test_bad_config_exit_code(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[scenario]\nsystem = vortex\n", encoding="utf-8")
        cp = run_cli("speeds", "--config", str(path))
        assert cp.returncode == 2
        assert "system must be" in cp.stderr

    def test_missing_config_exit_code(self):
        cp = run_cli("speeds", "--config", "/nonexistent/nope.cfg")
        assert cp.returncode == 2

    def test_shear_stability_factors(self, config_path):
        cp = run_cli("stability", "--config", str(config_path),
                     "--override", "scenario.system=shear",
                     "--override", "scenario.geometry=planar",
                     "--override", "grid.x_min=-3.0")
        assert cp.returncode == 0, cp.stderr
        assert "relaxation factor" in cp.stdout
        assert "acoustic factor" in cp.stdout
        assert "overall verdict: stable" in cp.stdout
