import math

import pytest

import finprob as fp
from finprob.cli import main
from finprob.config import demo_config, load_config, resolve_output, validate_config
from finprob.experiments import run, run_experiment


def write(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


GOOD = """
[experiment]
name = levy-up
seed = 3
mode = rational
horizon = 32
n = 2

[sizes]
levels = 4
count = 2
"""


class TestConfigParsing:
    def test_well_formed(self, tmp_path):
        cfg = load_config(write(tmp_path, GOOD))
        assert cfg.experiment == "levy-up"
        assert cfg.seed == 3
        assert cfg.mode.exact
        assert cfg.norm_index == 2
        assert cfg.levels == 4

    def test_defaults(self, tmp_path):
        cfg = load_config(write(tmp_path, "[experiment]\nname = noncauchy-l1\n"))
        assert cfg.seed == 0
        assert cfg.mode.exact
        assert validate_config(cfg) == []

    def test_norm_index_inf(self, tmp_path):
        cfg = load_config(write(tmp_path, "[experiment]\nname = levy-up\nn = inf\n"))
        assert cfg.norm_index == math.inf

    def test_unknown_experiment_suggests(self, tmp_path):
        with pytest.raises(fp.ConfigError) as err:
            load_config(write(tmp_path, "[experiment]\nname = levyup\n"))
        assert "did you mean" in str(err.value)
        assert "levy-up" in str(err.value)

    def test_negative_tolerance_rejected(self, tmp_path):
        text = "[experiment]\nname = levy-up\nmode = float\ntolerance = -1\n"
        with pytest.raises(fp.ConfigParseError) as err:
            load_config(write(tmp_path, text))
        assert "tolerance" in str(err.value)

    def test_tolerance_forbidden_in_rational(self, tmp_path):
        text = "[experiment]\nname = levy-up\nmode = rational\ntolerance = 1e-9\n"
        with pytest.raises(fp.ConfigParseError):
            load_config(write(tmp_path, text))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(fp.ConfigParseError):
            load_config(write(tmp_path, "[experiment]\nname = levy-up\nfoo = 1\n"))

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(fp.ConfigParseError):
            load_config(write(tmp_path, "[experiment]\nname = levy-up\n[extra]\na = 1\n"))

    def test_parse_error_reports_location(self, tmp_path):
        with pytest.raises(fp.ConfigParseError):
            load_config(write(tmp_path, "not an ini line\n"))

    def test_bad_size_value(self, tmp_path):
        with pytest.raises(fp.ConfigParseError) as err:
            load_config(write(tmp_path, "[experiment]\nname = levy-up\n[sizes]\nlevels = ten\n"))
        assert "levels" in str(err.value)

    def test_galois_size_cap(self, tmp_path):
        text = "[experiment]\nname = galois-audit\n[sizes]\nsize = 9\n"
        with pytest.raises(fp.ConfigError):
            load_config(write(tmp_path, text))


class TestOutputResolution:
    def test_default_name(self):
        cfg = demo_config("levy-up")
        assert resolve_output(cfg).name == "levy_up.csv"

    def test_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FINPROB_OUTDIR", str(tmp_path / "outs"))
        cfg = demo_config("levy-up")
        assert str(resolve_output(cfg)).startswith(str(tmp_path / "outs"))

    def test_outdir_argument_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FINPROB_OUTDIR", "/nope")
        cfg = demo_config("levy-up")
        assert str(resolve_output(cfg, str(tmp_path))).startswith(str(tmp_path))


class TestExperiments:
    @pytest.mark.parametrize(
        "name,expected",
        [
            ("levy-up", "CONVERGED"),
            ("levy-down", "CONVERGED"),
            ("levi-kernel", "CONVERGED"),
            ("levi-hilbert", "CONVERGED"),
            ("noncauchy-l1", "STABILIZED-NONCAUCHY"),
            ("banach-counterexample", "STABILIZED"),
            ("galois-audit", "PASS"),
            ("homeo-audit", "PASS"),
        ],
    )
    def test_demo_verdicts(self, name, expected, tmp_path):
        cfg = demo_config(name)
        code, path, verdict = run(cfg, outdir=str(tmp_path))
        assert verdict == expected
        assert code == 0
        text = path.read_text()
        lines = text.splitlines()
        assert "," in lines[0]  # header row
        assert lines[-1].startswith("# verdict:")
        assert any(line.startswith("# exercises:") for line in lines)

    def test_levy_up_row_count_and_final_zero(self, tmp_path):
        cfg = demo_config("levy-up")
        result = run_experiment(cfg)
        assert len(result.rows) == cfg.levels + 1
        final = result.rows[-1]
        assert final[1] == cfg.levels and final[2] == 0

    def test_galois_demo_covers_all_52_partitions(self):
        result = run_experiment(demo_config("galois-audit"))
        assert result.rows[0][1] == 52

    def test_rational_rerun_byte_identical(self, tmp_path):
        for name in ("levy-up", "noncauchy-l1", "galois-audit"):
            cfg = demo_config(name)
            _, path1, _ = run(cfg, outdir=str(tmp_path / "a"))
            _, path2, _ = run(cfg, outdir=str(tmp_path / "b"))
            assert path1.read_bytes() == path2.read_bytes()

    def test_float_rerun_same_verdict(self, tmp_path):
        cfg = demo_config("homeo-audit")
        _, p1, v1 = run(cfg, outdir=str(tmp_path / "a"))
        _, p2, v2 = run(cfg, outdir=str(tmp_path / "b"))
        assert v1 == v2
        assert p1.read_bytes() == p2.read_bytes()


class TestTerminalRvInput:
    def test_levy_up_consumes_serialized_rv(self, tmp_path):
        from fractions import Fraction as F

        import finprob as fp
        from finprob import serialize

        space = fp.dyadic_space(3)
        rv = fp.RandomVar([F(i, 7) for i in range(8)], space)
        serialize.dump(rv, tmp_path / "rv.txt")
        cfg_path = tmp_path / "cfg.ini"
        cfg_path.write_text(
            "[experiment]\nname = levy-up\nmode = rational\nn = 2\n"
            f"input = {tmp_path / 'rv.txt'}\n[sizes]\nlevels = 3\n"
        )
        code, path, verdict = run(load_config(cfg_path), outdir=str(tmp_path))
        assert code == 0 and verdict == "CONVERGED"
        lines = path.read_text().splitlines()
        assert len([l for l in lines if not l.startswith("#")]) == 5  # header + 4 levels
        assert lines[-3].split(",")[2] == "0"  # exact zero at the last level

    def test_wrong_size_rejected(self, tmp_path):
        from fractions import Fraction as F

        import finprob as fp
        from finprob import serialize

        rv = fp.RandomVar([F(1)], fp.point_space(fp.rational_mode()))
        serialize.dump(rv, tmp_path / "rv.txt")
        cfg_path = tmp_path / "cfg.ini"
        cfg_path.write_text(
            "[experiment]\nname = levy-up\nmode = rational\n"
            f"input = {tmp_path / 'rv.txt'}\n[sizes]\nlevels = 3\n"
        )
        with pytest.raises(fp.ConfigError):
            run(load_config(cfg_path), outdir=str(tmp_path))

    def test_input_only_for_levy(self, tmp_path):
        cfg_path = tmp_path / "cfg.ini"
        cfg_path.write_text("[experiment]\nname = galois-audit\ninput = rv.txt\n")
        with pytest.raises(fp.ConfigError):
            load_config(cfg_path)


class TestCliEntryPoint:
    def test_run_subcommand(self, tmp_path, capsys):
        path = tmp_path / "cfg.ini"
        path.write_text(
            "[experiment]\nname = noncauchy-l1\noutput = out.csv\n[sizes]\nlevels = 4\n"
        )
        code = main(["run", str(path), "--outdir", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "STABILIZED-NONCAUCHY" in out
        assert (tmp_path / "out.csv").exists()

    def test_validate_ok(self, tmp_path, capsys):
        path = tmp_path / "cfg.ini"
        path.write_text("[experiment]\nname = levy-up\n")
        assert main(["validate", str(path)]) == 0
        assert "OK" in capsys.readouterr().out

    def test_validate_bad_config(self, tmp_path, capsys):
        path = tmp_path / "cfg.ini"
        path.write_text("[experiment]\nname = levy-up\nmode = float\ntolerance = 0\n")
        assert main(["validate", str(path)]) == 2

    def test_demo_subcommand(self, tmp_path, capsys):
        code = main(["demo", "banach-counterexample", "--outdir", str(tmp_path)])
        assert code == 0
        assert "STABILIZED" in capsys.readouterr().out

    def test_demo_unknown_name(self, capsys):
        code = main(["demo", "levyup"])
        assert code == 2
        assert "did you mean" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.ini")]) == 2
