"""Figure regeneration for the two-market game simulator's CSV output."""

from .plots import FIGURE_IDS, FigureSpec, plot_figure
from .schema import HIST_COLUMNS, SUMMARY_COLUMNS, SchemaError, read_hist, read_summary

__version__ = "0.1.0"

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "HIST_COLUMNS",
    "SUMMARY_COLUMNS",
    "SchemaError",
    "plot_figure",
    "read_hist",
    "read_summary",
]
