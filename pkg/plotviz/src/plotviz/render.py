"""Render figure families from sweep CSVs.

A FigureSpec names input CSVs, the x and y columns, a series-grouping
column, the y-axis scale, and the output image. Rendering never recomputes
statistics: values are plotted exactly as the CSV carries them. Output is
deterministic (fixed SVG hash salt, no embedded timestamps).
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SCHEME_LABELS = {
    "conventional": "Conv Prec",
    "constructive": "Const Prec",
    "constructive_destructive": "Const-Dest Prec",
    "robust_conventional": "Robust Conv Prec",
    "robust_constructive": "Robust Const Prec",
}

MARKERS = ("o", "s", "^", "v", "D", "x", "*", "P")


class SpecError(Exception):
    pass


@dataclass
class FigureSpec:
    inputs: list[str]
    x_column: str
    y_column: str
    output: str
    series_column: str = "scheme"
    y_scale: str = "linear"
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        if not self.inputs:
            raise SpecError("spec needs at least one input CSV")
        if self.y_scale not in ("linear", "log"):
            raise SpecError(f"unknown y_scale {self.y_scale!r}")
        if self.y_column == "ser" and self.y_scale != "log":
            raise SpecError("SER figures use a log y-axis")

    @classmethod
    def from_dict(cls, raw: dict) -> "FigureSpec":
        known = {"inputs", "x_column", "y_column", "output", "series_column",
                 "y_scale", "title", "x_label", "y_label"}
        unknown = set(raw) - known
        if unknown:
            raise SpecError(f"unknown spec keys: {', '.join(sorted(unknown))}")
        missing = {"inputs", "x_column", "y_column", "output"} - set(raw)
        if missing:
            raise SpecError(f"spec is missing keys: {', '.join(sorted(missing))}")
        return cls(**raw)


def _read_rows(path: Path) -> tuple[list[dict], list[str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SpecError(f"{path}: empty CSV")
        return list(reader), list(reader.fieldnames)


def _file_tag(path: Path) -> str:
    """Human tag for multi-file figures, e.g. fig3_k4 -> K=4."""
    suffix = path.stem.rsplit("_", 1)[-1]
    if suffix.startswith("k") and suffix[1:].isdigit():
        return f"K={suffix[1:]}"
    return path.stem


def render(spec: FigureSpec, out_dir=".") -> Path:
    """Render one figure; returns the written image path.

    Raises SpecError when a referenced column is missing; series with no
    plottable rows are skipped with a warning on stderr.
    """
    plt.rcParams["svg.hashsalt"] = "plotviz"
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    series_index = 0
    plotted = 0
    for input_path in spec.inputs:
        path = Path(input_path)
        rows, header = _read_rows(path)
        for col in (spec.x_column, spec.y_column, spec.series_column):
            if col not in header:
                raise SpecError(f"{path}: column {col!r} not in CSV header")
        tag = _file_tag(path) if len(spec.inputs) > 1 else ""
        by_series: dict[str, list[tuple[float, float]]] = {}
        order: list[str] = []
        for row in rows:
            key = row[spec.series_column]
            if key not in by_series:
                by_series[key] = []
                order.append(key)
            x_raw, y_raw = row[spec.x_column], row[spec.y_column]
            if x_raw == "" or y_raw == "":
                continue
            x, y = float(x_raw), float(y_raw)
            if spec.y_scale == "log" and y <= 0.0:
                continue
            by_series[key].append((x, y))
        for key in order:
            pts = sorted(by_series[key])
            label = SCHEME_LABELS.get(key, key)
            if tag:
                label = f"{label} ({tag})"
            if not pts:
                print(f"warning: series {label!r} has no plottable rows, "
                      f"skipped", file=sys.stderr)
                continue
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            ax.plot(xs, ys, marker=MARKERS[series_index % len(MARKERS)],
                    label=label)
            series_index += 1
            plotted += 1
    if spec.y_scale == "log":
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label or spec.x_column)
    ax.set_ylabel(spec.y_label or spec.y_column)
    if spec.title:
        ax.set_title(spec.title)
    if plotted:
        ax.legend()
    ax.grid(True, alpha=0.4)
    out_path = Path(out_dir) / spec.output
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Date": None}
                if out_path.suffix == ".svg" else None)
    plt.close(fig)
    return out_path
