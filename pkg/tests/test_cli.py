import json
import math

import pytest

from secprec import cli
from secprec.cli import (EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE,
                         STATUS_EXIT_CODES, ConfigError,
                         experiment_config_from_values, parse_config_text)
from secprec.presets import CAPTION_PARAMS, PRESET_NAMES, make_preset


class TestConfigFile:
    def test_empty_config_is_documented_defaults(self):
        cfg = experiment_config_from_values(parse_config_text(""))
        assert cfg.n_an == 3
        assert cfg.modulation_order == 4
        assert cfg.sigma_d2 == 1.0 and cfg.sigma_e2 == 1.0
        assert cfg.pathloss_exponent == 2.7
        assert cfg.realizations == 1000

    def test_full_config_roundtrip(self):
        text = """
        n_t = 8
        k_eves = 3
        n_an = 2
        modulation = 8psk
        gamma_d_db = 10, 15, 20
        gamma_e_db = 5
        sigma_d2 = 2.0
        eps_d = 0.1
        eps_e = 0.3
        realizations = 50
        slots = 200
        seed = 9
        schemes = conv, const, cd
        distances = 1, 2, 2, 2
        pathloss_exponent = 3.0
        """
        cfg = experiment_config_from_values(parse_config_text(text))
        assert cfg.n_t == 8 and cfg.k_eves == 3 and cfg.n_an == 2
        assert cfg.modulation_order == 8
        assert cfg.gamma_d_db == (10.0, 15.0, 20.0)
        assert cfg.schemes == ("conventional", "constructive",
                               "constructive_destructive")
        assert cfg.distances == (1.0, 2.0, 2.0, 2.0)

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="unknown config key: bogus"):
            parse_config_text("bogus = 1")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("n_t = 2\nn_t = 3")

    def test_malformed_line(self):
        with pytest.raises(ConfigError, match="key=value"):
            parse_config_text("just some words")

    def test_unknown_scheme_named(self):
        with pytest.raises(ConfigError, match="unknown scheme"):
            parse_config_text("schemes = telepathy")

    def test_bad_modulation(self):
        with pytest.raises(ConfigError, match="modulation"):
            parse_config_text("modulation = qam16")


def write_mrt_fixture(tmp_path):
    ch = tmp_path / "channels.csv"
    ch.write_text("ir,1.0,0.0,1.0,0.0\n")
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(f"gamma_d_db = {10 * math.log10(4.0)}\nschemes = const\n")
    return cfg, ch


class TestSolveCommand:
    def test_closed_form_fixture(self, tmp_path, capsys):
        cfg, ch = write_mrt_fixture(tmp_path)
        code = cli.main(["solve", "--config", str(cfg), "--channels", str(ch)])
        out = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert abs(out["transmit_power_w"] - 2.0) <= 1e-6

    def test_infeasible_exit_code(self, tmp_path, capsys):
        ch = tmp_path / "channels.csv"
        ch.write_text("ir,1.0,0.0,1.0,0.0\neve1,1.0,0.0,1.0,0.0\n")
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("gamma_e_db = -80\nschemes = const\n")
        code = cli.main(["solve", "--config", str(cfg), "--channels", str(ch)])
        out = json.loads(capsys.readouterr().out)
        assert code == EXIT_INFEASIBLE
        assert out["status"] == "infeasible"

    def test_unknown_key_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("bad = 1\n")
        code = cli.main(["solve", "--config", str(cfg)])
        assert code == EXIT_USAGE
        assert "bad" in capsys.readouterr().err

    def test_grid_config_rejected_for_solve(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("gamma_d_db = 10, 20\n")
        assert cli.main(["solve", "--config", str(cfg)]) == EXIT_USAGE

    def test_missing_file(self, capsys):
        assert cli.main(["solve", "--config", "/nonexistent/f.txt"]) == EXIT_USAGE


class TestSweepCommands:
    def test_sweep_outputs_and_determinism(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("n_t = 4\nk_eves = 1\ngamma_d_db = 5, 10\n"
                       "realizations = 3\nseed = 5\n")
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out1),
                         "--threads", "1"]) == EXIT_OK
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out2),
                         "--threads", "2"]) == EXIT_OK
        csv1 = (out1 / "cfg.csv").read_bytes()
        csv2 = (out2 / "cfg.csv").read_bytes()
        assert csv1 == csv2
        manifest = json.loads((out1 / "manifest.json").read_text())
        assert manifest["command"] == "power"
        assert manifest["outputs"] == ["cfg.csv"]
        assert "git_describe" in manifest
        assert manifest["configs"]["cfg.csv"]["seed"] == 5

    def test_preset_kind_mismatch(self, tmp_path):
        assert cli.main(["sweep", "--preset", "fig5", "--out",
                         str(tmp_path / "x")]) == EXIT_USAGE

    def test_robust_preset_tiny(self, tmp_path):
        code = cli.main(["robust", "--preset", "fig6", "--out",
                         str(tmp_path / "r"), "--realizations", "1",
                         "--threads", "1"])
        assert code == EXIT_OK
        text = (tmp_path / "r" / "fig6_k3.csv").read_text()
        assert "robust_conventional" in text
        assert "violation" in text.splitlines()[0]

    def test_usage_error_on_missing_out(self):
        assert cli.main(["sweep", "--preset", "fig3"]) == EXIT_USAGE


class TestPresets:
    def test_parameters_match_caption_table(self):
        # transcribed caption parameters for the four reproduced figures
        table = {
            "fig3": dict(n_t=8, ks=(4, 6), gamma_e_db=5.0),
            "fig4": dict(n_t=6, ks=(4,), gamma_d_db=20.0),
            "fig5": dict(n_t=6, ks=(2, 5), gamma_e_db=5.0),
            "fig6": dict(n_t=6, ks=(3,), gamma_e_db=5.0, eps_d=0.1, eps_e=0.3),
        }
        for name, want in table.items():
            preset = make_preset(name)
            ks = tuple(cfg.k_eves for _, cfg in preset.runs)
            assert ks == want["ks"], name
            for _, cfg in preset.runs:
                assert cfg.n_t == want["n_t"], name
                if "gamma_e_db" in want:
                    assert cfg.gamma_e_db == (want["gamma_e_db"],) \
                        or want["gamma_e_db"] in cfg.gamma_e_db, name
                if "gamma_d_db" in want:
                    assert cfg.gamma_d_db == (want["gamma_d_db"],), name
                if "eps_d" in want:
                    assert cfg.eps_d == want["eps_d"], name
                    assert cfg.eps_e == want["eps_e"], name

    def test_caption_params_constant_agrees(self):
        assert set(CAPTION_PARAMS) == set(PRESET_NAMES)

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            make_preset("fig9")


class TestExitCodes:
    def test_contract_is_exhaustive(self):
        assert set(STATUS_EXIT_CODES) == {"optimal", "infeasible",
                                          "numerical_failure", "unbounded"}
        assert set(STATUS_EXIT_CODES.values()) <= {0, 1, 2, 3}
