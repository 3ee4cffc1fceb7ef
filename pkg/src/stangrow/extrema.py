"""Peak and trough detection on smoothed exponent curves.

Candidates are strict local maxima (a plateau counts once, at its
left-most sample) filtered by topographic prominence, then thinned so
that no two kept extrema are closer than a minimum k-distance, keeping
the taller of any conflicting pair. Troughs are peaks of the negated
series. A bundled file carries the manually curated extremum positions
for the reference 20000-term {0,4} run.
"""

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .ioutil import fmt_float
from .series import IndexedSeries

AUTOMATIC = "automatic"
MANUAL = "manual"

CURATED_RESOURCE = "curated_extrema.csv"


@dataclass(frozen=True)
class PeakConfig:
    """Selection thresholds; distances are measured along the k axis."""

    min_distance: int = 50
    min_prominence: float = 0.005

    def __post_init__(self) -> None:
        if self.min_distance < 1:
            raise ValueError(f"min_distance must be >= 1, got {self.min_distance}")
        if not self.min_prominence > 0:
            raise ValueError(
                f"min_prominence must be positive, got {self.min_prominence}"
            )


@dataclass(frozen=True)
class ExtremaSet:
    """Selected peak and trough k-indices, tagged by how they were chosen."""

    peaks: tuple[int, ...]
    troughs: tuple[int, ...]
    source: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "peaks", tuple(int(k) for k in self.peaks))
        object.__setattr__(self, "troughs", tuple(int(k) for k in self.troughs))
        if self.source not in (AUTOMATIC, MANUAL):
            raise ValueError(f"source must be automatic or manual, got {self.source!r}")
        for name, ks in (("peaks", self.peaks), ("troughs", self.troughs)):
            for i in range(len(ks) - 1):
                if ks[i] >= ks[i + 1]:
                    raise ValueError(
                        f"{name} not strictly increasing at positions {i},{i + 1}"
                    )


class ExtremumValue(NamedTuple):
    """One row of the extrema table; values may be None in curated files."""

    kind: str
    k: int
    r_smooth: float | None
    r_raw: float | None


def _local_max_positions(v: np.ndarray) -> list[int]:
    """Strict local maxima; a flat run flanked by lower values counts at
    its left-most sample. Boundary samples are never maxima."""
    n = v.size
    out = []
    i = 1
    while i < n - 1:
        if v[i] > v[i - 1]:
            j = i
            while j + 1 < n and v[j + 1] == v[i]:
                j += 1
            if j < n - 1 and v[j + 1] < v[i]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def _prominence_at(v: np.ndarray, p: int) -> float:
    """Height of v[p] above the higher of the two window minima, where each
    window runs from p out to the nearest strictly higher sample or edge."""
    left_min = v[p]
    i = p - 1
    while i >= 0 and v[i] <= v[p]:
        if v[i] < left_min:
            left_min = v[i]
        i -= 1
    right_min = v[p]
    i = p + 1
    while i < v.size and v[i] <= v[p]:
        if v[i] < right_min:
            right_min = v[i]
        i += 1
    return float(v[p] - max(left_min, right_min))


def prominence(series: IndexedSeries, at: int) -> float:
    """Topographic prominence of the local maximum at index k = at."""
    pos = series.index_of(at)
    v = series.values
    if pos == 0 or pos == v.size - 1:
        raise ValueError(f"k = {at} is a boundary sample, not a local maximum")
    if pos not in _local_max_positions(v):
        raise ValueError(f"k = {at} is not a local maximum of {series.label!r}")
    return _prominence_at(v, pos)


def _select(k: np.ndarray, v: np.ndarray, cfg: PeakConfig) -> list[int]:
    candidates = [
        p for p in _local_max_positions(v) if _prominence_at(v, p) >= cfg.min_prominence
    ]
    kept: list[int] = []
    # Tallest first; a candidate within min_distance of a kept one is dropped.
    for p in sorted(candidates, key=lambda p: (-v[p], p)):
        if all(abs(int(k[p]) - int(k[q])) >= cfg.min_distance for q in kept):
            kept.append(p)
    return sorted(kept)


def find_extrema(
    series: IndexedSeries, cfg_peaks: PeakConfig, cfg_troughs: PeakConfig
) -> ExtremaSet:
    """Prominence-filtered, distance-thinned local maxima and minima."""
    if len(series) < 3:
        raise ValueError(f"series has {len(series)} points, need at least 3")
    peak_pos = _select(series.k, series.values, cfg_peaks)
    trough_pos = _select(series.k, -series.values, cfg_troughs)
    return ExtremaSet(
        peaks=tuple(int(series.k[p]) for p in peak_pos),
        troughs=tuple(int(series.k[p]) for p in trough_pos),
        source=AUTOMATIC,
    )


def extrema_values(
    extrema: ExtremaSet, smoothed: IndexedSeries, raw: IndexedSeries
) -> list[ExtremumValue]:
    """Evaluate both the smoothed and raw series at every extremum index."""
    rows = []
    for kind, ks in (("peak", extrema.peaks), ("trough", extrema.troughs)):
        for k in ks:
            rows.append(
                ExtremumValue(kind, k, smoothed.value_at(k), raw.value_at(k))
            )
    return rows


def rows_to_set(rows: Iterable[ExtremumValue], source: str) -> ExtremaSet:
    """Collect table rows back into an ExtremaSet."""
    peaks = [r.k for r in rows if r.kind == "peak"]
    troughs = [r.k for r in rows if r.kind == "trough"]
    return ExtremaSet(peaks=tuple(peaks), troughs=tuple(troughs), source=source)


def save_extrema_csv(
    rows: Sequence[ExtremumValue], destination: "str | Path"
) -> Path:
    """Write `kind,k,r_smooth,r_raw` rows; None values become empty fields."""
    dest = Path(destination)
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "k", "r_smooth", "r_raw"])
        for row in rows:
            writer.writerow(
                [
                    row.kind,
                    row.k,
                    "" if row.r_smooth is None else fmt_float(row.r_smooth),
                    "" if row.r_raw is None else fmt_float(row.r_raw),
                ]
            )
    return dest


def _parse_extrema_rows(fh, origin: str) -> list[ExtremumValue]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{origin}: empty file") from None
    if header != ["kind", "k", "r_smooth", "r_raw"]:
        raise ValueError(
            f"{origin}: expected header 'kind,k,r_smooth,r_raw', got {header}"
        )
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 4:
            raise ValueError(f"{origin}:{lineno}: expected 4 fields")
        kind = row[0]
        if kind not in ("peak", "trough"):
            raise ValueError(f"{origin}:{lineno}: unknown kind {kind!r}")
        try:
            k = int(row[1])
            r_smooth = float(row[2]) if row[2] else None
            r_raw = float(row[3]) if row[3] else None
        except ValueError:
            raise ValueError(f"{origin}:{lineno}: bad row {row}") from None
        rows.append(ExtremumValue(kind, k, r_smooth, r_raw))
    return rows


def load_extrema_csv(source: "str | Path") -> list[ExtremumValue]:
    src = Path(source)
    with open(src, "r", encoding="utf-8", newline="") as fh:
        return _parse_extrema_rows(fh, str(src))


def curated_extrema() -> ExtremaSet:
    """The hand-selected extremum positions bundled for the reference run
    (seed {0,4}, 20000 terms, smoothing window 25)."""
    ref = resources.files("stangrow").joinpath("data").joinpath(CURATED_RESOURCE)
    with ref.open("r", encoding="utf-8") as fh:
        rows = _parse_extrema_rows(fh, CURATED_RESOURCE)
    return rows_to_set(rows, MANUAL)
