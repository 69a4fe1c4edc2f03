import json
import subprocess
import sys
from pathlib import Path

import pytest

from plotviz import FigureSpec, SpecError, render
from plotviz.cli import main

HEADER = ("scheme,grid_param_name,grid_value_db,mean_power_w,mean_power_dbw,"
          "feasibility_rate,ser,ser_ci_low,ser_ci_high,violation_rate,"
          "n_realizations,n_slots")


def write_power_csv(path: Path, schemes, grid, k_label="k4"):
    lines = [HEADER]
    for s in schemes:
        for i, g in enumerate(grid):
            p = 1.0 + i + 0.1 * hash(s) % 3
            lines.append(f"{s},gamma_d_db,{g},{p},{p},1,,,,,10,")
    path.write_text("\n".join(lines) + "\n")


def write_ser_csv(path: Path, schemes, grid):
    lines = [HEADER]
    for s in schemes:
        for i, g in enumerate(grid):
            ser = 10.0 ** -(1 + i)
            lines.append(f"{s},gamma_d_db,{g},1,0,1,{ser},{ser/2},{ser*2},,10,1000")
    path.write_text("\n".join(lines) + "\n")


THREE = ("conventional", "constructive", "constructive_destructive")


class TestSpec:
    def test_requires_core_keys(self):
        with pytest.raises(SpecError, match="missing"):
            FigureSpec.from_dict({"inputs": ["a.csv"]})

    def test_rejects_unknown_keys(self):
        with pytest.raises(SpecError, match="unknown spec keys"):
            FigureSpec.from_dict({"inputs": ["a.csv"], "x_column": "x",
                                  "y_column": "y", "output": "o.svg",
                                  "wat": 1})

    def test_ser_requires_log_axis(self):
        with pytest.raises(SpecError, match="log"):
            FigureSpec(inputs=["a.csv"], x_column="grid_value_db",
                       y_column="ser", output="o.svg", y_scale="linear")


class TestRender:
    def test_single_point_single_scheme(self, tmp_path):
        csv = tmp_path / "one.csv"
        write_power_csv(csv, ("conventional",), (10.0,))
        spec = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                          y_column="mean_power_dbw", output="one.svg")
        out = render(spec, tmp_path)
        assert out.exists()
        assert "Conv Prec" in out.read_text()

    def test_two_files_make_six_series(self, tmp_path):
        a, b = tmp_path / "fig3_k4.csv", tmp_path / "fig3_k6.csv"
        write_power_csv(a, THREE, (10.0, 15.0))
        write_power_csv(b, THREE, (10.0, 15.0))
        spec = FigureSpec(inputs=[str(a), str(b)], x_column="grid_value_db",
                          y_column="mean_power_dbw", output="fig3.svg")
        text = render(spec, tmp_path).read_text()
        for label in ("Conv Prec (K=4)", "Const Prec (K=4)",
                      "Const-Dest Prec (K=4)", "Conv Prec (K=6)",
                      "Const Prec (K=6)", "Const-Dest Prec (K=6)"):
            assert label in text

    def test_missing_column_names_it(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("scheme,grid_value_db\nconventional,10\n")
        spec = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                          y_column="mean_power_dbw", output="o.svg")
        with pytest.raises(SpecError, match="mean_power_dbw"):
            render(spec, tmp_path)

    def test_empty_series_skipped_with_warning(self, tmp_path, capsys):
        csv = tmp_path / "gap.csv"
        lines = [HEADER,
                 "conventional,gamma_d_db,10,2,3,1,,,,,5,",
                 "constructive,gamma_d_db,10,,,0,,,,,5,"]
        csv.write_text("\n".join(lines) + "\n")
        spec = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                          y_column="mean_power_dbw", output="gap.svg")
        out = render(spec, tmp_path)
        assert out.exists()
        err = capsys.readouterr().err
        assert "skipped" in err and "Const Prec" in err

    def test_deterministic_bytes(self, tmp_path):
        csv = tmp_path / "fig.csv"
        write_power_csv(csv, THREE, (10.0, 15.0, 20.0))
        spec = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                          y_column="mean_power_dbw", output="a.svg")
        first = render(spec, tmp_path).read_bytes()
        spec2 = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                           y_column="mean_power_dbw", output="b.svg")
        second = render(spec2, tmp_path).read_bytes()
        assert first == second

    def test_log_axis_for_ser(self, tmp_path):
        csv = tmp_path / "ser.csv"
        write_ser_csv(csv, THREE, (0.0, 5.0, 10.0))
        spec = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                          y_column="ser", y_scale="log", output="ser.svg")
        assert render(spec, tmp_path).exists()

    def test_png_output(self, tmp_path):
        csv = tmp_path / "fig.csv"
        write_power_csv(csv, ("conventional",), (10.0,))
        spec = FigureSpec(inputs=[str(csv)], x_column="grid_value_db",
                          y_column="mean_power_dbw", output="fig.png")
        out = render(spec, tmp_path)
        assert out.suffix == ".png" and out.stat().st_size > 0


class TestCli:
    def test_roundtrip(self, tmp_path, capsys):
        csv = tmp_path / "fig.csv"
        write_power_csv(csv, THREE, (10.0, 15.0))
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps({
            "inputs": [str(csv)], "x_column": "grid_value_db",
            "y_column": "mean_power_dbw", "output": "fig.svg"}))
        assert main(["--spec", str(spec_file), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig.svg").exists()

    def test_missing_column_exit_nonzero(self, tmp_path, capsys):
        csv = tmp_path / "bad.csv"
        csv.write_text("scheme,grid_value_db\nconventional,10\n")
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps({
            "inputs": [str(csv)], "x_column": "grid_value_db",
            "y_column": "mean_power_dbw", "output": "fig.svg"}))
        code = main(["--spec", str(spec_file), "--out", str(tmp_path)])
        assert code != 0
        assert "mean_power_dbw" in capsys.readouterr().err

    def test_bad_json_exit_nonzero(self, tmp_path):
        spec_file = tmp_path / "spec.json"
        spec_file.write_text("{nope")
        assert main(["--spec", str(spec_file)]) != 0

    def test_console_script_installed(self, tmp_path):
        csv = tmp_path / "fig.csv"
        write_power_csv(csv, ("conventional",), (10.0,))
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps({
            "inputs": [str(csv)], "x_column": "grid_value_db",
            "y_column": "mean_power_dbw", "output": "fig.svg"}))
        proc = subprocess.run(["render", "--spec", str(spec_file),
                               "--out", str(tmp_path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
