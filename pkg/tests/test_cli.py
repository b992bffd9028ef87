import json
from fractions import Fraction

import pytest

from zakbench.cli import run
from zakbench.config import ConfigError, parse_alpha, validate


class TestConfig:
    def test_parse_rational_alpha(self):
        val, frac = parse_alpha("3/4")
        assert val == 0.75 and frac == Fraction(3, 4)

    def test_parse_float_alpha(self):
        val, frac = parse_alpha(0.7)
        assert val == 0.7 and frac is None

    def test_negative_alpha_rejected(self):
        with pytest.raises(ConfigError, match="positive"):
            parse_alpha("-1/2")

    def test_unknown_keys_listed(self):
        with pytest.raises(ConfigError, match="bogus_key"):
            validate("simulate", {"N": 16, "bogus_key": 1, "другое": 2})

    def test_missing_required_named(self):
        with pytest.raises(ConfigError, match="N"):
            validate("simulate", {})

    def test_small_N_rejected(self):
        with pytest.raises(ConfigError, match="N"):
            validate("simulate", {"N": 4})

    def test_defaults_filled(self):
        cfg = validate("simulate", {"N": 16})
        assert cfg["alpha"] == "3/4"
        assert cfg["t_end"] == 1.0

    def test_empty_seeds_rejected(self):
        with pytest.raises(ConfigError, match="seeds"):
            validate("smoothing", {"N": 16, "seeds": []})

    def test_ensemble_size_truncates_seeds(self):
        cfg = validate("smoothing", {"N": 16, "seeds": [5, 6, 7, 8],
                                     "ensemble_size": 2})
        assert cfg["seeds"] == [5, 6]
        with pytest.raises(ConfigError, match="ensemble_size"):
            validate("smoothing", {"N": 16, "seeds": [1], "ensemble_size": 3})

    def test_forcing_modes_validated(self):
        with pytest.raises(ConfigError, match="forcing_modes"):
            validate("simulate", {"N": 16, "forcing_modes": [[1, 0.5]]})
        cfg = validate("simulate", {"N": 16, "forcing_modes": [[1, 0.5, -0.25]]})
        assert cfg["forcing_modes"] == [[1, 0.5, -0.25]]


class TestCliRuns:
    def _write_config(self, tmp_path, name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    def test_zero_simulate_exits_clean(self, tmp_path, capsys):
        cfg = self._write_config(
            tmp_path,
            "zero.toml",
            'N = 16\nzero_data = true\nt_end = 0.05\ndt = 1e-3\n'
            f'output_dir = "{tmp_path}/runs"\n',
        )
        assert run(["simulate", "--config", cfg]) == 0
        out = capsys.readouterr().out
        summary = json.loads(out.splitlines()[0])
        assert summary["mass_final"] == 0.0
        run_dirs = list((tmp_path / "runs").iterdir())
        assert len(run_dirs) == 1
        assert (run_dirs[0] / "trajectory.csv").exists()
        assert (run_dirs[0] / "diagnostics.csv").exists()
        assert (run_dirs[0] / "manifest.json").exists()
        assert (run_dirs[0] / "config.json").exists()

    def test_missing_required_key_exit_2(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path, "bad.toml", 't_end = 1.0\n')
        assert run(["simulate", "--config", cfg]) == 2
        assert "N" in capsys.readouterr().err

    def test_unknown_key_exit_2(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path, "bad.toml", 'N = 16\nwhatever = 3\n')
        assert run(["simulate", "--config", cfg]) == 2
        assert "whatever" in capsys.readouterr().err

    def test_blowup_exit_3(self, tmp_path):
        cfg = self._write_config(
            tmp_path,
            "blow.toml",
            'N = 8\namplitude = 100.0\nt_end = 50.0\ndt = 0.5\n'
            'blowup_threshold = 1e4\n'
            f'output_dir = "{tmp_path}/runs"\n',
        )
        assert run(["simulate", "--config", cfg]) == 3

    def test_identical_runs_byte_identical_csv(self, tmp_path):
        cfg = self._write_config(
            tmp_path,
            "sim.toml",
            'N = 16\nt_end = 0.1\ndt = 1e-3\nseed = 3\n'
            f'output_dir = "{tmp_path}/runs"\n',
        )
        assert run(["simulate", "--config", cfg]) == 0
        assert run(["simulate", "--config", cfg]) == 0
        dirs = sorted((tmp_path / "runs").iterdir())
        assert len(dirs) == 2
        for name in ("trajectory.csv", "diagnostics.csv", "config.json"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_config_snapshot_reruns_identically(self, tmp_path):
        cfg = self._write_config(
            tmp_path,
            "sim.toml",
            'N = 16\nt_end = 0.1\ndt = 1e-3\nseed = 9\n'
            f'output_dir = "{tmp_path}/runs"\n',
        )
        assert run(["simulate", "--config", cfg]) == 0
        first = next((tmp_path / "runs").iterdir())
        snapshot = json.loads((first / "config.json").read_text())

        def toml_value(v):
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, str):
                return f'"{v}"'
            if isinstance(v, list):
                return "[" + ", ".join(toml_value(x) for x in v) + "]"
            return repr(v)

        snapshot["output_dir"] = str(tmp_path / "runs2")
        replay = tmp_path / "replay.toml"
        replay.write_text(
            "\n".join(f"{k} = {toml_value(v)}" for k, v in snapshot.items()) + "\n"
        )
        assert run(["simulate", "--config", str(replay)]) == 0
        second = next((tmp_path / "runs2").iterdir())
        assert (first / "trajectory.csv").read_bytes() == (
            second / "trajectory.csv"
        ).read_bytes()
        assert (first / "diagnostics.csv").read_bytes() == (
            second / "diagnostics.csv"
        ).read_bytes()

    def test_normalform_check_json(self, tmp_path, capsys):
        code = run([
            "normalform-check", "--alpha", "3/4", "--N", "32", "--seed", "5",
            "--output-dir", str(tmp_path / "runs"),
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out.splitlines()[0])
        assert payload["residual_u"] <= 1e-10
        assert payload["excluded_tuples_count"] == 0
        assert payload["mode"] == "nonresonant"

    def test_normalform_without_rho_large_residual(self, tmp_path, capsys):
        code = run([
            "normalform-check", "--alpha", "1", "--N", "32", "--without-rho",
            "--output-dir", str(tmp_path / "runs"),
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out.splitlines()[0])
        assert payload["residual_u"] > 1e-4
        assert payload["excluded_tuples_count"] > 0

    def test_gauge_round_trip_files(self, tmp_path, capsys):
        code = run([
            "gauge", "--N", "16", "--seed", "2",
            "--output-dir", str(tmp_path / "runs"),
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out.splitlines()[0])
        assert "A" in payload and "B" in payload
        run_dir = next((tmp_path / "runs").iterdir())
        from zakbench.fields import field_from_csv

        gauged = field_from_csv(run_dir / "n0_gauged.csv")
        assert gauged[0] == 0

    def test_bounds_small_sweep(self, tmp_path, capsys):
        cfg = self._write_config(
            tmp_path,
            "bounds.toml",
            "\n".join([
                'lemma_b_betas = [1.0]',
                '[[supsums]]',
                'kind = "R2"',
                's = 2.0',
                's0 = 1.0',
                's1 = 0.0',
                'b = 0.55',
                'alpha = "3/4"',
                'K = 16',
            ]) + "\n",
        )
        code = run(["bounds", "--config", cfg, "--output-dir", str(tmp_path / "runs")])
        assert code == 0
        run_dir = next((tmp_path / "runs").iterdir())
        verdicts = json.loads((run_dir / "verdicts.json").read_text())
        assert len(verdicts["supsums"]) == 1
        assert (run_dir / "supsum-0-R2.csv").exists()
