"""Derived growth series: exponent ratio, windowed exponent, deviation,
and the zero-padded moving-average smoother.

All logarithms are natural. Series are indexed by the 1-based term index
k (a_1 is the first term), and every exported series starts at k = 2
because a_1 = 0 for the usual seeds.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import StanleySequence
from .ioutil import fmt_float

SERIES_FORMAT = "indexed-series/1"


@dataclass(frozen=True)
class IndexedSeries:
    """Pairs (k, value) with strictly increasing integer k and finite values."""

    label: str
    k: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.k, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if k.ndim != 1 or values.ndim != 1 or k.size != values.size:
            raise ValueError("k and values must be 1-d arrays of equal length")
        if k.size == 0:
            raise ValueError("series must be non-empty")
        if k.size > 1 and not np.all(np.diff(k) > 0):
            raise ValueError("k must be strictly increasing")
        if not np.all(np.isfinite(values)):
            bad = int(k[np.flatnonzero(~np.isfinite(values))[0]])
            raise ValueError(f"non-finite value at k = {bad}")
        k.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.k.size)

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(int(kk), float(v)) for kk, v in zip(self.k, self.values)]

    def index_of(self, k: int) -> int:
        """Position of index k in the series, or ValueError naming k."""
        pos = int(np.searchsorted(self.k, k))
        if pos >= self.k.size or self.k[pos] != k:
            raise ValueError(f"k = {k} is not in the domain of series {self.label!r}")
        return pos

    def value_at(self, k: int) -> float:
        return float(self.values[self.index_of(k)])


@dataclass(frozen=True)
class SmoothingConfig:
    """Moving-average window; length must be odd so the window centers."""

    window_length: int = 25
    edge_truncated: bool = False

    def __post_init__(self) -> None:
        if self.window_length < 1:
            raise ValueError(f"window_length must be >= 1, got {self.window_length}")
        if self.window_length % 2 == 0:
            raise ValueError(
                f"window_length must be odd for a centered window, got {self.window_length}"
            )


def _terms_array(seq: "StanleySequence | Sequence[float]") -> np.ndarray:
    """Terms as a float array indexed 0-based (entry i is a_{i+1})."""
    if isinstance(seq, StanleySequence):
        return np.asarray(seq.terms, dtype=np.float64)
    arr = np.asarray(list(seq), dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("terms must be a 1-d sequence")
    return arr


def _check_positive_tail(a: np.ndarray) -> None:
    # Every a_k with k >= 2 enters a logarithm.
    bad = np.flatnonzero(a[1:] <= 0)
    if bad.size:
        k = int(bad[0]) + 2
        raise ValueError(f"a_{k} = {a[k - 1]} is not positive; cannot take its log")


def exponent_ratio(seq: "StanleySequence | Sequence[float]") -> IndexedSeries:
    """Pointwise exponent estimate r_k = ln a_k / ln k for k = 2..N."""
    a = _terms_array(seq)
    if a.size < 2:
        raise ValueError(f"need at least 2 terms, got {a.size}")
    _check_positive_tail(a)
    k = np.arange(2, a.size + 1, dtype=np.int64)
    r = np.log(a[1:]) / np.log(k)
    return IndexedSeries("exponent_ratio", k, r)


def windowed_exponent(
    seq: "StanleySequence | Sequence[float]", w: int
) -> IndexedSeries:
    """Two-sided local exponent over k +/- w.

    alpha_k = (ln a_{k+w} - ln a_{k-w}) / (ln(k+w) - ln(k-w)), evaluated
    for k = w+2 .. N-w so the lower index never touches a_1.
    """
    if w < 1:
        raise ValueError(f"window w must be >= 1, got {w}")
    a = _terms_array(seq)
    if a.size < 2 * w + 2:
        raise ValueError(
            f"window w = {w} needs at least {2 * w + 2} terms, got {a.size}"
        )
    _check_positive_tail(a)
    k = np.arange(w + 2, a.size - w + 1, dtype=np.int64)
    num = np.log(a[k + w - 1]) - np.log(a[k - w - 1])
    den = np.log((k + w).astype(np.float64)) - np.log((k - w).astype(np.float64))
    return IndexedSeries(f"windowed_exponent_w{w}", k, num / den)


def deviation_series(seq: "StanleySequence | Sequence[float]") -> IndexedSeries:
    """Deviation from k^2 / ln k scaling: f(k) = ln a_k - 2 ln k + ln ln k.

    Bounded above and below exactly when a_k = Theta(k^2 / ln k).
    """
    a = _terms_array(seq)
    if a.size < 2:
        raise ValueError(f"need at least 2 terms, got {a.size}")
    _check_positive_tail(a)
    k = np.arange(2, a.size + 1, dtype=np.int64)
    logk = np.log(k.astype(np.float64))
    f = np.log(a[1:]) - 2.0 * logk + np.log(logk)
    return IndexedSeries("deviation", k, f)


def moving_average(series: IndexedSeries, cfg: SmoothingConfig) -> IndexedSeries:
    """Centered moving average over the same k-domain as the input.

    Default is same-mode convolution with a uniform kernel, which treats
    out-of-range samples as zero and therefore biases the first and last
    (L-1)/2 values toward zero. cfg.edge_truncated instead averages only
    the in-range part of the window near the edges.
    """
    L = cfg.window_length
    v = series.values
    if cfg.edge_truncated:
        h = (L - 1) // 2
        padded = np.concatenate([[0.0], np.cumsum(v)])
        n = v.size
        lo = np.maximum(np.arange(n) - h, 0)
        hi = np.minimum(np.arange(n) + h, n - 1)
        smooth = (padded[hi + 1] - padded[lo]) / (hi - lo + 1)
    else:
        smooth = np.convolve(v, np.ones(L) / L, mode="same")
    return IndexedSeries(f"{series.label}_smooth{L}", series.k, smooth)


def save_series(
    series: IndexedSeries,
    destination: "str | Path",
    source_hashes: dict | None = None,
    parameters: dict | None = None,
) -> Path:
    """Write `k,value` CSV plus a JSON sidecar with label and provenance."""
    dest = Path(destination)
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "value"])
        for kk, v in zip(series.k, series.values):
            writer.writerow([int(kk), fmt_float(v)])
    sidecar = {
        "format": SERIES_FORMAT,
        "label": series.label,
        "source_hashes": source_hashes or {},
        "parameters": parameters or {},
    }
    with open(dest.with_name(dest.name + ".json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    return dest


def load_series(source: "str | Path") -> IndexedSeries:
    """Read a `k,value` CSV; label comes from the sidecar when present."""
    src = Path(source)
    label = src.stem
    sidecar_file = src.with_name(src.name + ".json")
    if sidecar_file.exists():
        with open(sidecar_file, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        label = meta.get("label", label)
    ks: list[int] = []
    vals: list[float] = []
    with open(src, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{src}: empty file") from None
        if header != ["k", "value"]:
            raise ValueError(f"{src}: expected header 'k,value', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{src}:{lineno}: expected 2 fields")
            try:
                ks.append(int(row[0]))
                vals.append(float(row[1]))
            except ValueError:
                raise ValueError(f"{src}:{lineno}: bad row {row}") from None
    if not ks:
        raise ValueError(f"{src}: no data rows")
    return IndexedSeries(label, np.array(ks), np.array(vals))
