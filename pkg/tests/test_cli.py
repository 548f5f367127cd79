import json

import numpy as np
import pytest

from cli.dependencies import ConfigError, resolve_config
from cli.main import main
from config.logging_utils import log_error, log_progress, log_success
from config.settings import settings
from services.evans_service import ZeroOnContour
from services.output_service import output_service


def read_table(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


class TestConfig:
    def test_preset_resolves(self):
        config = resolve_config(preset="ks")
        assert config.model == "ks"
        assert config.ks.beta == 2.0
        assert config.name == "ks"

    def test_file_overrides_preset(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("output_points = 5\n\n[ks]\nalpha = 1.0\nbeta = 3.0\nc = 2.0\ndelta = 1.0\n")
        config = resolve_config(str(path), "ks")
        assert config.output_points == 5
        assert config.ks.beta == 3.0

    def test_hash_ignores_output_routing(self):
        a = resolve_config(preset="ks")
        b = resolve_config(preset="ks", out="elsewhere.csv", fmt="json")
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != resolve_config(preset="ks-origin").config_hash()

    def test_missing_source(self):
        with pytest.raises(ConfigError):
            resolve_config()

    def test_fkpp_needs_parameters(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"model": "fkpp"}))
        with pytest.raises(ConfigError, match="fkpp"):
            resolve_config(str(path))


class TestOutput:
    def test_table_header_and_precision(self):
        config = resolve_config(preset="ks")
        text = output_service.format_table(config, ["a", "b"], [(0.1, 1.0 / 3.0)])
        lines = text.splitlines()
        assert lines[0].startswith("# tool: ")
        assert any(line.startswith("# config_hash: ") for line in lines)
        assert "# a,b" in lines
        assert lines[-1] == "0.10000000000000001,0.33333333333333331"

    def test_table_is_deterministic(self):
        rows = [(float(i), i ** 0.5) for i in range(10)]
        first = output_service.format_table(resolve_config(preset="ks"), ["x", "y"], rows)
        second = output_service.format_table(resolve_config(preset="ks"), ["x", "y"], rows)
        assert first == second

    def test_report_carries_provenance(self):
        config = resolve_config(preset="ks")
        payload = json.loads(output_service.format_report(config, {"winding": 2}))
        assert payload["result"] == {"winding": 2}
        assert payload["provenance"]["model"] == "ks"
        assert payload["provenance"]["params"]["delta"] == 1.0


class TestCommands:
    def test_ks_wave(self, tmp_path):
        out = tmp_path / "wave.csv"
        assert main(["wave", "--preset", "ks", "--out", str(out)]) == 0
        table = read_table(out)
        assert table.shape[1] == 5
        row = table[np.argmin(np.abs(table[:, 0]))]
        assert row[1] == pytest.approx(0.8, abs=1e-2)
        assert np.all(np.diff(table[:, 1]) >= 0)

    def test_wave_json_to_stdout(self, capsys):
        assert main(["wave", "--preset", "ks", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"provenance", "result"}
        assert set(payload["result"][0]) == {"z", "u", "w", "du", "dw"}

    def test_invalid_diffusion_exits_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"model": "ks", "ks": {"alpha": 1.0, "beta": 1.0, "c": 2.0, "delta": 1.0}}))
        assert main(["wave", "--config", str(path)]) == 2
        assert "0 < delta < beta" in capsys.readouterr().err

    def test_unknown_preset_exits_two(self, capsys):
        assert main(["wave", "--preset", "no-such-run"]) == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_slow_front_crossings_exit_two(self, tmp_path):
        path = tmp_path / "slow.json"
        path.write_text(json.dumps({"model": "fkpp", "fkpp": {"delta": 1.0, "c": 1.8}, "lambdas": [0.0]}))
        assert main(["crossings", "--config", str(path)]) == 2

    def test_branch_point_exits_four(self, tmp_path, capsys):
        path = tmp_path / "branch.json"
        path.write_text(json.dumps({"model": "fkpp", "fkpp": {"delta": 1.0, "c": 2.4}, "lambdas": [-0.44]}))
        assert main(["evans", "eval", "--config", str(path)]) == 4
        assert "branch point" in capsys.readouterr().err

    def test_zero_on_contour_exits_three(self, monkeypatch, tmp_path):
        def vanishing(*args, **kwargs):
            raise ZeroOnContour("E vanishes on the contour at λ=0.01", 0.01)

        monkeypatch.setattr("cli.commands.evans.winding", vanishing)
        assert main(["evans", "wind", "--preset", "ks-origin", "--out", str(tmp_path / "w.json")]) == 3

    def test_crossings_table(self, tmp_path):
        out = tmp_path / "crossings.csv"
        assert main(["crossings", "--preset", "fkpp-crossings", "--lambdas", "0.5", "5", "--out", str(out)]) == 0
        table = read_table(out)
        assert table[:, 0].tolist() == [0.5, 5.0]
        assert table[:, 1].tolist() == [0.0, 0.0]


class TestLogging:
    def test_errors_always_reach_stderr(self, monkeypatch, capsys):
        monkeypatch.setattr(settings, "DEBUG", False)
        log_error("E vanishes at λ=0.01", prefix="EVANS")
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "[EVANS] ✗ E vanishes at λ=0.01" in captured.err

    def test_progress_is_debug_gated(self, monkeypatch, capsys):
        monkeypatch.setattr(settings, "DEBUG", False)
        log_success("winding 2", prefix="EVANS")
        log_progress(3, 4, prefix="WAVE")
        assert capsys.readouterr().err == ""

    def test_progress_bar_clamps_when_total_grows(self, monkeypatch, capsys):
        monkeypatch.setattr(settings, "DEBUG", True)
        log_progress(90, 64, "refining 26 intervals", prefix="EVANS")
        captured = capsys.readouterr()
        assert captured.out == ""
        line = captured.err.strip()
        assert "[EVANS] [" + "=" * 20 + "]" in line
        assert "(90/64) - refining 26 intervals" in line
