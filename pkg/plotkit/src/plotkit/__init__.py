"""Figure rendering for boldcal CSV output."""

from __future__ import annotations

__version__ = "0.1.0"

from .figures import (
    DEFAULT_LEVELS,
    ContourFigureSpec,
    LineplotFigureSpec,
    PlotkitError,
    build_contour_figure,
    build_lineplot_figure,
    read_contour_grid,
    render_contour,
    render_lineplot,
)

__all__ = [
    "DEFAULT_LEVELS",
    "ContourFigureSpec",
    "LineplotFigureSpec",
    "PlotkitError",
    "build_contour_figure",
    "build_lineplot_figure",
    "read_contour_grid",
    "render_contour",
    "render_lineplot",
]
