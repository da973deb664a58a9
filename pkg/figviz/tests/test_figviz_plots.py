import hashlib
from pathlib import Path

import pytest

from figviz import FigureSpec, SchemaError, plot_figure
from figviz.cli import main

SUMMARY_HEADER = ("beta,gamma_B,omega_th,mean_N_B,sigma_P_A,sigma_P_B,"
                  "mean_W_A,mean_W_B,n_runs,master_seed")


def write_summary(path: Path, rows):
    lines = [SUMMARY_HEADER]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_hist(path: Path, spike_bin=None):
    lines = ["bin_low,bin_high,mass_A,mass_B"]
    for i in range(50):
        lo, hi = i * 0.02, (i + 1) * 0.02
        mass = 1.0 if i == spike_bin else (0.0 if spike_bin is not None else 0.02)
        lines.append(f"{lo},{hi},{mass},{mass}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def sweep_dir(tmp_path):
    d = tmp_path / "sweep"
    d.mkdir()
    write_summary(d / "summary.csv", [
        (0.8, 0.1, -200, 520.0, 2.9, 2.8, -1800.0, -1700.0, 24, 7),
        (0.8, 1.0, -200, 500.0, 3.0, 2.9, -1900.0, -1850.0, 24, 7),
        (0.8, 4.0, -200, 380.0, 3.1, 3.0, -2100.0, -2200.0, 24, 7),
    ])
    write_hist(d / "hist_000.csv")
    write_hist(d / "hist_001.csv", spike_bin=24)
    return d


def sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestPlotFigure:
    @pytest.mark.parametrize("fig_id", ["fig1", "fig3", "fig4"])
    def test_summary_families_render(self, sweep_dir, tmp_path, fig_id):
        out = tmp_path / f"{fig_id}.png"
        spec = FigureSpec(fig_id, (sweep_dir / "summary.csv",), out)
        assert plot_figure(spec) == out
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert out.stat().st_size > 5_000

    def test_fig2_renders_spike(self, sweep_dir, tmp_path):
        out = tmp_path / "fig2.png"
        spec = FigureSpec("fig2", tuple(sorted(sweep_dir.glob("hist_*.csv"))), out)
        plot_figure(spec)
        assert out.stat().st_size > 5_000

    def test_two_cell_sweep_renders_points(self, tmp_path):
        d = tmp_path / "two"
        d.mkdir()
        write_summary(d / "summary.csv", [
            (0.2, 0.5, -200, 420.0, 12.0, 13.0, 1e5, 1.2e5, 24, 7),
            (0.8, 0.5, -200, 500.0, 3.0, 3.1, -2e3, -2.1e3, 24, 7),
        ])
        out = tmp_path / "fig1.png"
        plot_figure(FigureSpec("fig1", (d / "summary.csv",), out))
        assert out.exists()

    def test_rendering_is_deterministic(self, sweep_dir, tmp_path):
        out1 = tmp_path / "a.png"
        out2 = tmp_path / "b.png"
        plot_figure(FigureSpec("fig3", (sweep_dir / "summary.csv",), out1))
        plot_figure(FigureSpec("fig3", (sweep_dir / "summary.csv",), out2))
        assert out1.read_bytes() == out2.read_bytes()

    def test_inputs_never_modified(self, sweep_dir, tmp_path):
        before = {p: sha(p) for p in sweep_dir.iterdir()}
        for fig_id in ("fig1", "fig3", "fig4"):
            plot_figure(FigureSpec(fig_id, (sweep_dir / "summary.csv",),
                                   tmp_path / f"{fig_id}.png"))
        plot_figure(FigureSpec("fig2", tuple(sorted(sweep_dir.glob("hist_*.csv"))),
                               tmp_path / "fig2.png"))
        assert {p: sha(p) for p in sweep_dir.iterdir()} == before

    def test_schema_violation_names_column(self, tmp_path):
        bad = tmp_path / "summary.csv"
        bad.write_text(SUMMARY_HEADER.replace("mean_N_B", "population") +
                       "\n0.8,1,-200,1,2,3,4,5,6,7\n", encoding="utf-8")
        with pytest.raises(SchemaError, match="mean_N_B"):
            plot_figure(FigureSpec("fig1", (bad,), tmp_path / "x.png"))

    def test_unknown_figure_id_rejected(self, sweep_dir, tmp_path):
        with pytest.raises(ValueError, match="figure_id"):
            FigureSpec("fig9", (sweep_dir / "summary.csv",), tmp_path / "x.png")

    def test_empty_inputs_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="no input"):
            FigureSpec("fig1", (), tmp_path / "x.png")


class TestCli:
    def test_renders_each_family(self, sweep_dir, tmp_path, capsys):
        for fig_id in ("fig1", "fig2", "fig3", "fig4"):
            out = tmp_path / f"{fig_id}.png"
            assert main([fig_id, "--in", str(sweep_dir), "--out", str(out)]) == 0
            assert out.exists()
            assert "wrote" in capsys.readouterr().out

    def test_missing_summary_is_error(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["fig1", "--in", str(empty), "--out", str(tmp_path / "x.png")]) == 2
        assert "summary.csv" in capsys.readouterr().err

    def test_missing_hists_is_error(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["fig2", "--in", str(empty), "--out", str(tmp_path / "x.png")]) == 2
        assert "hist_" in capsys.readouterr().err

    def test_schema_error_exit_code(self, tmp_path, capsys):
        d = tmp_path / "bad"
        d.mkdir()
        (d / "summary.csv").write_text("beta\n0.5\n", encoding="utf-8")
        assert main(["fig1", "--in", str(d), "--out", str(tmp_path / "x.png")]) == 2
        assert "missing column" in capsys.readouterr().err
