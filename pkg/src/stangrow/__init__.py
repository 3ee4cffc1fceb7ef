"""Toolkit for greedy 3-AP-free (Stanley) sequences and their growth rate.

The package generates Stanley sequences from integer seed sets, derives
growth diagnostics (log-ratio exponents, windowed exponents, deviation
from k^2 / ln k scaling), detects oscillation extrema in the smoothed
exponent curve, and fits a three-term asymptotic model to the exponent
values at those extrema.
"""

__version__ = "0.1.0"

from .engine import (
    GenerationError,
    SeedError,
    SeedSet,
    SequenceLoadError,
    StanleySequence,
    generate,
    is_admissible,
    load_sequence,
    save_sequence,
    verify_ap_free,
)
from .series import (
    IndexedSeries,
    SmoothingConfig,
    deviation_series,
    exponent_ratio,
    moving_average,
    windowed_exponent,
)
from .extrema import (
    ExtremaSet,
    ExtremumValue,
    PeakConfig,
    curated_extrema,
    extrema_values,
    find_extrema,
    prominence,
)
from .regression import (
    FitError,
    FitInput,
    GrowthFit,
    fit_growth_model,
    robustness_sweep,
)
from .figdata import FigureSpec, Annotation

__all__ = [
    "__version__",
    "Annotation",
    "ExtremaSet",
    "ExtremumValue",
    "FigureSpec",
    "FitError",
    "FitInput",
    "GenerationError",
    "GrowthFit",
    "IndexedSeries",
    "PeakConfig",
    "SeedError",
    "SeedSet",
    "SequenceLoadError",
    "SmoothingConfig",
    "StanleySequence",
    "curated_extrema",
    "deviation_series",
    "exponent_ratio",
    "extrema_values",
    "find_extrema",
    "fit_growth_model",
    "generate",
    "is_admissible",
    "load_sequence",
    "moving_average",
    "prominence",
    "robustness_sweep",
    "save_sequence",
    "verify_ap_free",
    "windowed_exponent",
]
