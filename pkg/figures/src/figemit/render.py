"""Render growth-analysis figures from a figure-data CSV and a spec JSON.

The renderer is deliberately dumb. It parses the two input files, maps
columns onto axes, and draws. It never recomputes an analysis value, so
the arrays in the finished figure are exactly the arrays in the file.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

WINDOWED = "windowed_exponent"
PEAKS_TROUGHS = "peaks_troughs"
DEVIATION = "deviation"
FIGURE_IDS = (WINDOWED, PEAKS_TROUGHS, DEVIATION)

FIGURE_HEADERS = {
    WINDOWED: ["k", "alpha"],
    PEAKS_TROUGHS: ["layer", "k", "value"],
    DEVIATION: ["log_k", "f"],
}

# default canvas per figure, inches
FIGURE_SIZES = {
    WINDOWED: (10.0, 4.0),
    PEAKS_TROUGHS: (14.0, 6.0),
    DEVIATION: (12.0, 6.0),
}

CURVE_LAYERS = ("raw", "smoothed")
MARKER_LAYERS = ("peak", "trough")
MARKER_COLORS = {"peak": "red", "trough": "blue"}

IMAGE_FORMATS = ("png", "svg")

ANNOTATION_STYLE = {"color": "black", "linewidth": 0.8, "linestyle": "--"}


class RenderError(ValueError):
    """Input files do not satisfy the figure-data contract."""


@dataclass(frozen=True)
class RenderJob:
    """One figure to draw: where the data lives and where the image goes."""

    data: Path
    spec: Path
    out: Path
    image_format: str | None = None
    dpi: int = 150
    size: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", Path(self.data))
        object.__setattr__(self, "spec", Path(self.spec))
        object.__setattr__(self, "out", Path(self.out))
        if self.dpi <= 0:
            raise RenderError(f"dpi must be positive, got {self.dpi}")
        if self.size is not None:
            w, h = self.size
            if w <= 0 or h <= 0:
                raise RenderError(f"size must be positive, got {self.size}")
        if self.format not in IMAGE_FORMATS:
            raise RenderError(
                f"unsupported image format {self.format!r}, expected one of {IMAGE_FORMATS}"
            )

    @property
    def format(self) -> str:
        if self.image_format:
            return self.image_format.lower()
        return self.out.suffix.lstrip(".").lower()


def _num(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise RenderError(f"{where}: expected a number, got {cell!r}") from None


def load_spec(path: "str | Path") -> dict:
    """Parse and validate a figure-spec JSON file."""
    path = Path(path)
    if not path.is_file():
        raise RenderError(f"spec file not found: {path}")
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RenderError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(spec, dict):
        raise RenderError(f"{path}: spec must be a JSON object")
    figure_id = spec.get("figure_id")
    if figure_id not in FIGURE_IDS:
        raise RenderError(
            f"{path}: unknown figure_id {figure_id!r}, expected one of {FIGURE_IDS}"
        )
    annotations = spec.get("annotations", [])
    if annotations and figure_id != DEVIATION:
        raise RenderError(f"{path}: annotations are only defined for {DEVIATION!r}")
    for ann in annotations:
        kind = ann.get("type")
        if kind == "hline":
            if not isinstance(ann.get("y"), (int, float)):
                raise RenderError(f"{path}: hline annotation needs a numeric y")
        elif kind == "affine":
            for key in ("slope", "intercept"):
                if not isinstance(ann.get(key), (int, float)):
                    raise RenderError(
                        f"{path}: affine annotation needs a numeric {key}"
                    )
        else:
            raise RenderError(f"{path}: unknown annotation type {kind!r}")
    return spec


def load_data(path: "str | Path", figure_id: str):
    """Parse a figure-data CSV for the given figure.

    Returns plot-ready columns: (k, alpha) for the windowed figure,
    {layer: (k, value)} for peaks_troughs, (log_k, f) for deviation.
    """
    path = Path(path)
    if not path.is_file():
        raise RenderError(f"data file not found: {path}")
    expected = FIGURE_HEADERS[figure_id]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderError(f"{path}: empty file") from None
        if header != expected:
            raise RenderError(
                f"{path}: header {header!r} does not match {expected!r} for {figure_id!r}"
            )
        rows = list(reader)
    if not rows:
        raise RenderError(f"{path}: no data rows")
    for i, row in enumerate(rows, start=2):
        if len(row) != len(expected):
            raise RenderError(f"{path}: line {i} has {len(row)} fields, expected {len(expected)}")

    if figure_id == PEAKS_TROUGHS:
        layers: dict[str, tuple[list[float], list[float]]] = {}
        for i, (layer, k, value) in enumerate(rows, start=2):
            if layer not in CURVE_LAYERS + MARKER_LAYERS:
                raise RenderError(f"{path}: line {i} has unknown layer {layer!r}")
            xs, ys = layers.setdefault(layer, ([], []))
            xs.append(_num(k, f"{path} line {i}"))
            ys.append(_num(value, f"{path} line {i}"))
        for layer in CURVE_LAYERS:
            if layer not in layers:
                raise RenderError(f"{path}: missing required layer {layer!r}")
        return layers

    xs = [_num(row[0], f"{path} line {i}") for i, row in enumerate(rows, start=2)]
    ys = [_num(row[1], f"{path} line {i}") for i, row in enumerate(rows, start=2)]
    return xs, ys


def _draw_windowed(ax, data) -> None:
    k, alpha = data
    ax.plot(k, alpha)
    ax.set_xlabel("k")
    ax.set_ylabel("local exponent alpha_k^(w)")
    ax.set_title("Windowed local exponent")


def _draw_peaks_troughs(ax, layers) -> None:
    k, v = layers["raw"]
    ax.plot(k, v, alpha=0.3, label="raw r_k")
    k, v = layers["smoothed"]
    ax.plot(k, v, label="smoothed r_k")
    for layer in MARKER_LAYERS:
        if layer in layers:
            k, v = layers[layer]
            ax.scatter(k, v, color=MARKER_COLORS[layer], zorder=3, label=f"{layer}s")
    ax.set_xlabel("k")
    ax.set_ylabel("smoothed r_k")
    ax.set_title("Smoothed r_k with peaks/troughs")
    ax.legend()


def _draw_deviation(ax, data, annotations) -> None:
    log_k, f = data
    ax.plot(log_k, f, label=r"$\log a_k - 2\log k + \log\log k$")
    for ann in annotations:
        if ann["type"] == "hline":
            ax.axhline(ann["y"], **ANNOTATION_STYLE)
        else:
            x0 = ann.get("x0", 0.0)
            y0 = ann.get("y0")
            if y0 is None:
                y0 = ann["slope"] * x0 + ann["intercept"]
            ax.axline((x0, y0), slope=ann["slope"], **ANNOTATION_STYLE)
    ax.set_xlabel(r"$\log k$")
    ax.set_ylabel(r"$\log a_k - 2\log k + \log\log k$")
    ax.set_title(r"Deviation from $a_k \sim k^2 / \log k$")
    ax.legend()


def render(job: RenderJob):
    """Draw the figure described by `job` and write the image.

    Returns the matplotlib Figure so callers can inspect what was plotted;
    the caller owns the figure and should close it.
    """
    spec = load_spec(job.spec)
    figure_id = spec["figure_id"]
    data = load_data(job.data, figure_id)

    fig, ax = plt.subplots(figsize=job.size or FIGURE_SIZES[figure_id])
    try:
        if figure_id == WINDOWED:
            _draw_windowed(ax, data)
        elif figure_id == PEAKS_TROUGHS:
            _draw_peaks_troughs(ax, data)
        else:
            _draw_deviation(ax, data, spec.get("annotations", []))
        fig.tight_layout()
        try:
            fig.savefig(job.out, format=job.format, dpi=job.dpi)
        except OSError as exc:
            raise RenderError(f"cannot write {job.out}: {exc}") from exc
    except Exception:
        plt.close(fig)
        raise
    return fig
