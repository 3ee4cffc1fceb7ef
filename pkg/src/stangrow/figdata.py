"""Self-describing figure-data files for the plotting component.

Each figure gets a CSV of plot-ready columns plus a small JSON spec
(figure id, skip convention, annotation lines) so the renderer never has
to recompute analysis values.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .extrema import ExtremaSet
from .ioutil import fmt_float
from .series import IndexedSeries

WINDOWED = "windowed_exponent"
PEAKS_TROUGHS = "peaks_troughs"
DEVIATION = "deviation"
FIGURE_IDS = (WINDOWED, PEAKS_TROUGHS, DEVIATION)

FIGURE_HEADERS = {
    WINDOWED: ["k", "alpha"],
    PEAKS_TROUGHS: ["layer", "k", "value"],
    DEVIATION: ["log_k", "f"],
}

# Reference bounds drawn on the deviation figure by default.
DEFAULT_HLINE_Y = -0.64
DEFAULT_AFFINE_SLOPE = -0.1
DEFAULT_AFFINE_INTERCEPT = -0.14
DEFAULT_AFFINE_X0 = 7.0
DEFAULT_SKIP = 20


@dataclass(frozen=True)
class Annotation:
    """A reference line: horizontal (y = const) or affine (y = slope x + intercept).

    Affine lines also carry an anchor point (x0, y0) on the line so a
    renderer can draw through-point-with-slope directly.
    """

    type: str
    y: float | None = None
    slope: float | None = None
    intercept: float | None = None
    x0: float | None = None
    y0: float | None = None

    def __post_init__(self) -> None:
        if self.type == "hline":
            if self.y is None:
                raise ValueError("hline annotation needs y")
        elif self.type == "affine":
            if self.slope is None or self.intercept is None:
                raise ValueError("affine annotation needs slope and intercept")
            x0 = self.x0 if self.x0 is not None else 0.0
            y0 = self.slope * x0 + self.intercept
            object.__setattr__(self, "x0", x0)
            object.__setattr__(self, "y0", y0)
        else:
            raise ValueError(f"unknown annotation type {self.type!r}")

    def to_dict(self) -> dict:
        if self.type == "hline":
            return {"type": "hline", "y": self.y}
        return {
            "type": "affine",
            "slope": self.slope,
            "intercept": self.intercept,
            "x0": self.x0,
            "y0": self.y0,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        if d.get("type") == "hline":
            return cls(type="hline", y=d["y"])
        if d.get("type") == "affine":
            return cls(
                type="affine",
                slope=d["slope"],
                intercept=d["intercept"],
                x0=d.get("x0"),
            )
        raise ValueError(f"unknown annotation type {d.get('type')!r}")


def default_annotations(
    hline_y: float = DEFAULT_HLINE_Y,
    slope: float = DEFAULT_AFFINE_SLOPE,
    intercept: float = DEFAULT_AFFINE_INTERCEPT,
) -> tuple[Annotation, ...]:
    return (
        Annotation(type="hline", y=hline_y),
        Annotation(
            type="affine", slope=slope, intercept=intercept, x0=DEFAULT_AFFINE_X0
        ),
    )


@dataclass(frozen=True)
class FigureSpec:
    """What the renderer needs to know beyond the data columns."""

    figure_id: str
    skip: int = 0
    annotations: tuple[Annotation, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "annotations", tuple(self.annotations))
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure_id {self.figure_id!r}, expected one of {FIGURE_IDS}"
            )
        if self.skip < 0:
            raise ValueError(f"skip must be non-negative, got {self.skip}")
        if self.annotations and self.figure_id != DEVIATION:
            raise ValueError("annotation lines are only defined for the deviation figure")

    def to_dict(self) -> dict:
        return {
            "figure_id": self.figure_id,
            "skip": self.skip,
            "annotations": [a.to_dict() for a in self.annotations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FigureSpec":
        return cls(
            figure_id=d["figure_id"],
            skip=int(d.get("skip", 0)),
            annotations=tuple(
                Annotation.from_dict(a) for a in d.get("annotations", [])
            ),
        )


def save_figure_spec(spec: FigureSpec, destination: "str | Path") -> Path:
    dest = Path(destination)
    with open(dest, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")
    return dest


def load_figure_spec(source: "str | Path") -> FigureSpec:
    with open(source, "r", encoding="utf-8") as fh:
        return FigureSpec.from_dict(json.load(fh))


def windowed_figure_data(
    series: IndexedSeries,
) -> tuple[list[tuple], FigureSpec]:
    """Rows (k, alpha) for the windowed-exponent figure, full domain."""
    rows = [(int(k), float(v)) for k, v in zip(series.k, series.values)]
    return rows, FigureSpec(figure_id=WINDOWED, skip=0)


def peaks_troughs_figure_data(
    raw: IndexedSeries,
    smoothed: IndexedSeries,
    extrema: ExtremaSet,
    skip: int = DEFAULT_SKIP,
) -> tuple[list[tuple], FigureSpec]:
    """Layered rows for the smoothed-exponent figure.

    The raw and smoothed curves are trimmed by `skip` samples at both ends
    (the zero-padded smoother corrupts the edges); extremum markers carry
    the smoothed value at their k.
    """
    n = len(smoothed)
    if skip and n <= 2 * skip:
        raise ValueError(f"skip = {skip} leaves no samples from a series of {n}")
    sl = slice(skip, n - skip) if skip else slice(None)
    rows: list[tuple] = []
    for kk, v in zip(raw.k[sl], raw.values[sl]):
        rows.append(("raw", int(kk), float(v)))
    for kk, v in zip(smoothed.k[sl], smoothed.values[sl]):
        rows.append(("smoothed", int(kk), float(v)))
    for kind, ks in (("peak", extrema.peaks), ("trough", extrema.troughs)):
        for k in ks:
            rows.append((kind, int(k), smoothed.value_at(k)))
    return rows, FigureSpec(figure_id=PEAKS_TROUGHS, skip=skip)


def deviation_figure_data(
    series: IndexedSeries,
    skip: int = DEFAULT_SKIP,
    annotations: "Sequence[Annotation] | None" = None,
) -> tuple[list[tuple], FigureSpec]:
    """Rows (ln k, f(k)) for the deviation figure, first `skip` samples dropped."""
    if skip >= len(series):
        raise ValueError(f"skip = {skip} leaves no samples from a series of {len(series)}")
    rows = [
        (math.log(int(k)), float(v))
        for k, v in zip(series.k[skip:], series.values[skip:])
    ]
    anns = default_annotations() if annotations is None else tuple(annotations)
    return rows, FigureSpec(figure_id=DEVIATION, skip=skip, annotations=anns)


def save_figure_data(
    figure_id: str, rows: Sequence[tuple], destination: "str | Path"
) -> Path:
    """Write figure rows under the figure's documented header."""
    dest = Path(destination)
    header = FIGURE_HEADERS[figure_id]
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            out = []
            for cell in row:
                if isinstance(cell, str):
                    out.append(cell)
                elif isinstance(cell, (int,)) and not isinstance(cell, bool):
                    out.append(str(cell))
                else:
                    out.append(fmt_float(cell))
            writer.writerow(out)
    return dest


def load_figure_data(source: "str | Path") -> tuple[list[str], list[list[str]]]:
    """Raw header and string rows; consumers parse by figure_id."""
    src = Path(source)
    with open(src, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{src}: empty file") from None
        rows = [row for row in reader]
    return header, rows
