"""plotviz: deterministic figure rendering for secprec sweep CSVs."""

from .render import SCHEME_LABELS, FigureSpec, SpecError, render
from .specs import preset_figure_specs

__version__ = "0.1.0"
