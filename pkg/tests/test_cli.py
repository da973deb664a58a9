import csv

import pytest

from emgsim.cli import main

TINY_CONFIG = """\
N = 20
m = 2
beta = 0.6
gamma_B = 2.0
S_th = -0.5
omega_th = -1.0
t_relax = 30
t_meas = 40
n_runs = 2
master_seed = 11
"""


def write_config(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestRunCommand:
    def test_writes_summary_hist_and_runs(self, tmp_path, capsys):
        cfg = write_config(tmp_path, TINY_CONFIG)
        out = tmp_path / "out"
        assert main(["run", "--config", cfg, "--out", str(out)]) == 0
        rows = read_csv(out / "summary.csv")
        assert len(rows) == 2
        assert rows[1][8] == "2"  # n_runs column
        runs = read_csv(out / "runs.csv")
        assert len(runs) == 3  # header + 2 runs
        assert runs[0][0] == "run_index"
        assert (out / "hist_000.csv").exists()
        assert "summary.csv" in capsys.readouterr().out

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write_config(tmp_path, TINY_CONFIG)
        main(["run", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
        main(["run", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
        main(["run", "--config", cfg, "--out", str(tmp_path / "c"), "--seed", "1"])
        a = (tmp_path / "a" / "summary.csv").read_bytes()
        b = (tmp_path / "b" / "summary.csv").read_bytes()
        c = (tmp_path / "c" / "summary.csv").read_bytes()
        assert a != b and a == c

    def test_sweep_config_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, TINY_CONFIG + "axis1=beta\naxis1_values=0.2\n")
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "x")]) == 2
        assert "sweep" in capsys.readouterr().err

    def test_bad_config_reports_line(self, tmp_path):
        cfg = write_config(tmp_path, "beta=1.5\n")
        with pytest.raises(SystemExit, match="line 1"):
            main(["run", "--config", cfg, "--out", str(tmp_path / "x")])

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(SystemExit, match="cannot read"):
            main(["run", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)])


class TestSweepCommand:
    def test_grid_written(self, tmp_path):
        cfg = write_config(tmp_path, TINY_CONFIG + "axis1=beta\naxis1_values=0.2,0.8\n")
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        rows = read_csv(out / "summary.csv")
        assert len(rows) == 3
        assert (out / "hist_001.csv").exists()

    def test_plain_config_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, TINY_CONFIG)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x")]) == 2
        assert "no sweep axes" in capsys.readouterr().err

    def test_worker_counts_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, TINY_CONFIG + "axis1=gamma_B\naxis1_values=0.5,2\n")
        main(["sweep", "--config", cfg, "--out", str(tmp_path / "w1"), "--workers", "1"])
        main(["sweep", "--config", cfg, "--out", str(tmp_path / "w2"), "--workers", "2"])
        for name in ("summary.csv", "hist_000.csv", "hist_001.csv"):
            assert (tmp_path / "w1" / name).read_bytes() == \
                (tmp_path / "w2" / name).read_bytes()


class TestMeanfieldCommand:
    def test_closed_form_value(self, capsys):
        assert main(["meanfield", "--n0", "250", "--q", "0.125"]) == 0
        out = capsys.readouterr().out
        assert "285.714286" in out
        assert "series gap" in out

    def test_sign_law(self, capsys):
        assert main(["meanfield", "--beta", "0.5"]) == 0
        assert "round-trip sign: zero" in capsys.readouterr().out
        main(["meanfield", "--beta", "0.2"])
        assert "positive" in capsys.readouterr().out

    def test_regime_mode(self, capsys):
        assert main(["meanfield", "--regime", "above", "--agents", "1000"]) == 0
        out = capsys.readouterr().out
        assert "173.076923" in out
        assert "recursion gap" in out

    def test_divergent_ratio_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["meanfield", "--n0", "10", "--q", "1.0"])
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err

    def test_no_arguments_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["meanfield"])
        assert exc.value.code == 2

    def test_half_given_pair_is_usage_error(self):
        with pytest.raises(SystemExit):
            main(["meanfield", "--n0", "10"])
