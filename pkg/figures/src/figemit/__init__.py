"""Static figure renderer for growth-analysis figure-data files."""

from ._version import __version__
from .render import (
    DEVIATION,
    FIGURE_HEADERS,
    FIGURE_IDS,
    FIGURE_SIZES,
    PEAKS_TROUGHS,
    WINDOWED,
    RenderError,
    RenderJob,
    load_data,
    load_spec,
    render,
)

__all__ = [
    "DEVIATION",
    "FIGURE_HEADERS",
    "FIGURE_IDS",
    "FIGURE_SIZES",
    "PEAKS_TROUGHS",
    "WINDOWED",
    "RenderError",
    "RenderJob",
    "load_data",
    "load_spec",
    "render",
    "__version__",
]
