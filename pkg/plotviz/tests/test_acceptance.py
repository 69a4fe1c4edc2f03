"""Secondary acceptance: render every preset CSV family to labeled SVGs.

Generates desk-scale preset CSVs through the secprec CLI (tiny realization
counts; caption-level parameters are preset-fixed), then renders all four
figures and checks the scheme legends and exit codes.
"""

import json
import shutil
import subprocess

import pytest

from plotviz.specs import preset_figure_specs

SECPREC = shutil.which("secprec")

PRESET_COMMANDS = (
    ("sweep", "fig3", ["--realizations", "2"]),
    ("sweep", "fig4", ["--realizations", "2"]),
    ("ser", "fig5", ["--realizations", "2", "--slots", "50"]),
    ("robust", "fig6", ["--realizations", "1"]),
)


@pytest.fixture(scope="module")
def preset_csvs(tmp_path_factory):
    if SECPREC is None:
        pytest.skip("secprec CLI is not installed")
    out = tmp_path_factory.mktemp("csvs")
    for command, preset, extra in PRESET_COMMANDS:
        proc = subprocess.run(
            [SECPREC, command, "--preset", preset, "--out", str(out),
             "--threads", "2"] + extra,
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    return out


def test_renders_all_four_preset_families(preset_csvs, tmp_path):
    specs = preset_figure_specs(preset_csvs)
    for name, raw in specs.items():
        spec_file = tmp_path / f"{name}.json"
        spec_file.write_text(json.dumps(raw))
        proc = subprocess.run(
            ["render", "--spec", str(spec_file), "--out", str(tmp_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0, (name, proc.stderr)
        svg = (tmp_path / raw["output"]).read_text()
        assert "<svg" in svg
        if name in ("fig3", "fig4", "fig5"):
            for label in ("Conv Prec", "Const Prec", "Const-Dest Prec"):
                assert label in svg, (name, label)
        else:
            for label in ("Robust Conv Prec", "Robust Const Prec",
                          "Conv Prec", "Const-Dest Prec"):
                assert label in svg, (name, label)
    print("\nACCEPTANCE preset figures rendered with scheme legends: PASS")


def test_missing_column_fixture_exits_nonzero(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("scheme,grid_value_db\nconventional,10\n")
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps({
        "inputs": [str(bad)], "x_column": "grid_value_db",
        "y_column": "mean_power_dbw", "output": "fig.svg"}))
    proc = subprocess.run(
        ["render", "--spec", str(spec_file), "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode != 0
    assert "mean_power_dbw" in proc.stderr
    print("\nACCEPTANCE missing-column fixture exits nonzero: PASS")
