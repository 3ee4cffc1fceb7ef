"""Least-squares fit of the growth model r_k = A + B (ln ln k / ln k) + C (1 / ln k).

A can be left free (three-column design with an intercept) or fixed, in
which case only B and C are fitted against r - A. The robustness sweep
refits after dropping the last and the first sample to expose how fragile
the coefficients are on small extrema sets.
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

SUBSETS = ("full", "drop_last", "drop_first")

# Design columns are collinear over one decade of k; beyond this the
# solve is too unstable to report coefficients.
MAX_CONDITION = 1e12


class FitError(ValueError):
    """Raised when a fit is underdetermined or numerically unstable."""


@dataclass(frozen=True)
class FitInput:
    """Regression samples (k, r) with a label such as 'peaks'."""

    k: np.ndarray
    r: np.ndarray
    label: str

    def __post_init__(self) -> None:
        k = np.asarray(self.k, dtype=np.int64)
        r = np.asarray(self.r, dtype=np.float64)
        if k.ndim != 1 or r.ndim != 1 or k.size != r.size:
            raise ValueError("k and r must be 1-d arrays of equal length")
        if k.size == 0:
            raise ValueError("fit input must be non-empty")
        if np.any(k < 3):
            raise ValueError(
                f"all k must be >= 3 so ln ln k is positive; got k = {int(k.min())}"
            )
        if k.size > 1 and not np.all(np.diff(k) > 0):
            raise ValueError("k must be strictly increasing")
        if not np.all(np.isfinite(r)):
            raise ValueError("r contains non-finite values")
        k.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "r", r)

    def __len__(self) -> int:
        return int(self.k.size)

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(int(kk), float(rr)) for kk, rr in zip(self.k, self.r)]


@dataclass(frozen=True)
class GrowthFit:
    A: float
    B: float
    C: float
    r_squared: float
    fixed_A: float | None = None
    subset: str = "full"


def _design_columns(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    logk = np.log(k.astype(np.float64))
    return np.log(logk) / logk, 1.0 / logk


def fit_growth_model(fit_input: FitInput, fixed_A: float | None = None) -> GrowthFit:
    """Ordinary least squares via SVD (np.linalg.lstsq).

    R-squared is taken about the mean of the observed r values and defined
    as 1.0 when they have zero variance.
    """
    x1, x2 = _design_columns(fit_input.k)
    r = fit_input.r
    n = len(fit_input)
    if fixed_A is None:
        if n < 3:
            raise FitError(f"free-A fit needs >= 3 points, got {n}")
        design = np.column_stack([np.ones_like(x1), x1, x2])
        y = r
    else:
        if n < 2:
            raise FitError(f"fixed-A fit needs >= 2 points, got {n}")
        design = np.column_stack([x1, x2])
        y = r - fixed_A
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise FitError(
            f"design matrix condition number {cond:.3g} is too large; "
            "use more widely spread k values or fix A"
        )
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    if fixed_A is None:
        A, B, C = (float(c) for c in coef)
    else:
        A = float(fixed_A)
        B, C = (float(c) for c in coef)
    pred = A + B * x1 + C * x2
    ss_res = float(np.sum((r - pred) ** 2))
    ss_tot = float(np.sum((r - np.mean(r)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return GrowthFit(A=A, B=B, C=C, r_squared=r_squared, fixed_A=fixed_A)


def subset_input(fit_input: FitInput, subset: str) -> FitInput:
    """The sample subset used by one leg of the robustness sweep."""
    if subset == "full":
        return fit_input
    if subset == "drop_last":
        return FitInput(fit_input.k[:-1], fit_input.r[:-1], fit_input.label)
    if subset == "drop_first":
        return FitInput(fit_input.k[1:], fit_input.r[1:], fit_input.label)
    raise ValueError(f"unknown subset {subset!r}, expected one of {SUBSETS}")


def robustness_sweep(
    fit_input: FitInput, fixed_A: float | None = None
) -> list[GrowthFit]:
    """Fits on the full samples, without the last, and without the first."""
    fits = []
    for subset in SUBSETS:
        fit = fit_growth_model(subset_input(fit_input, subset), fixed_A)
        fits.append(replace(fit, subset=subset))
    return fits


def fit_report(fit: GrowthFit, fit_input: FitInput) -> dict:
    """JSON-ready record of one fit, including the k values it used."""
    sub = subset_input(fit_input, fit.subset)
    return {
        "label": fit_input.label,
        "subset": fit.subset,
        "fixed_A": fit.fixed_A,
        "A": fit.A,
        "B": fit.B,
        "C": fit.C,
        "r_squared": fit.r_squared,
        "n_points": len(sub),
        "k_values": [int(k) for k in sub.k],
    }


def save_fit_report(
    fits: "GrowthFit | Sequence[GrowthFit]",
    fit_input: FitInput,
    destination: "str | Path",
) -> Path:
    """Write one fit as a JSON object, or several as a JSON array."""
    dest = Path(destination)
    if isinstance(fits, GrowthFit):
        payload: "dict | list" = fit_report(fits, fit_input)
    else:
        payload = [fit_report(f, fit_input) for f in fits]
    with open(dest, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return dest


def load_fit_report(source: "str | Path") -> "dict | list":
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)
