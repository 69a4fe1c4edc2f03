"""Ready-made figure specs for the four shipped sweep families."""

from __future__ import annotations

from pathlib import Path


def preset_figure_specs(csv_dir) -> dict[str, dict]:
    """Spec dictionaries for CSVs produced by the secprec presets.

    Keys are figure names; values are FigureSpec dictionaries pointing at
    files inside ``csv_dir``.
    """
    d = Path(csv_dir)
    return {
        "fig3": {
            "inputs": [str(d / "fig3_k4.csv"), str(d / "fig3_k6.csv")],
            "x_column": "grid_value_db", "y_column": "mean_power_dbw",
            "output": "fig3.svg", "x_label": "IR SINR target (dB)",
            "y_label": "mean transmit power (dBW)",
            "title": "Transmit power vs IR SINR target",
        },
        "fig4": {
            "inputs": [str(d / "fig4_k4.csv")],
            "x_column": "grid_value_db", "y_column": "mean_power_dbw",
            "output": "fig4.svg", "x_label": "Eve SINR cap (dB)",
            "y_label": "mean transmit power (dBW)",
            "title": "Transmit power vs eavesdropper cap",
        },
        "fig5": {
            "inputs": [str(d / "fig5_k2.csv"), str(d / "fig5_k5.csv")],
            "x_column": "grid_value_db", "y_column": "ser",
            "y_scale": "log",
            "output": "fig5.svg", "x_label": "IR SINR target (dB)",
            "y_label": "symbol error rate",
            "title": "Symbol error rate vs IR SINR target",
        },
        "fig6": {
            "inputs": [str(d / "fig6_k3.csv")],
            "x_column": "grid_value_db", "y_column": "mean_power_dbw",
            "output": "fig6.svg", "x_label": "IR SINR target (dB)",
            "y_label": "mean transmit power (dBW)",
            "title": "Robust vs non-robust transmit power",
        },
    }
