"""Command-line pipeline: generate, analyze, extrema, fit, figure-data.

Every command writes its data files plus a run manifest, re-reads what it
wrote to confirm the files parse back identically, and exits nonzero with
a one-line diagnostic on any failure. Data files are deterministic in the
inputs and parameters; only manifests and sidecars carry timing.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from ._version import __version__
from .engine import (
    BITSET_SCAN,
    STRATEGIES,
    SeedSet,
    generate,
    load_sequence,
    save_sequence,
)
from .extrema import (
    MANUAL,
    PeakConfig,
    curated_extrema,
    extrema_values,
    find_extrema,
    load_extrema_csv,
    rows_to_set,
    save_extrema_csv,
)
from .figdata import (
    DEFAULT_AFFINE_INTERCEPT,
    DEFAULT_AFFINE_SLOPE,
    DEFAULT_HLINE_Y,
    DEFAULT_SKIP,
    FIGURE_IDS,
    DEVIATION,
    PEAKS_TROUGHS,
    WINDOWED,
    default_annotations,
    deviation_figure_data,
    load_figure_data,
    load_figure_spec,
    peaks_troughs_figure_data,
    save_figure_data,
    save_figure_spec,
    windowed_figure_data,
)
from .manifest import RunManifest
from .regression import (
    FitInput,
    fit_growth_model,
    load_fit_report,
    robustness_sweep,
    save_fit_report,
)
from .ioutil import sha256_file
from .series import (
    SmoothingConfig,
    deviation_series,
    exponent_ratio,
    load_series,
    moving_average,
    save_series,
    windowed_exponent,
)


def _parse_seed(text: str) -> SeedSet:
    try:
        elements = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(
            f"could not parse seed {text!r}; expected comma-separated integers like 0,4"
        ) from None
    return SeedSet(elements)


def _resolve(args, name: "str | Path") -> Path:
    path = Path(name)
    if path.is_absolute():
        return path
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / path


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _finish_manifest(
    args,
    command: str,
    parameters: dict,
    inputs: "list[Path]",
    outputs: "list[Path]",
    started: float,
) -> Path:
    m = RunManifest(command=command, parameters=parameters)
    for path in inputs:
        m.add_input(path)
    for path in outputs:
        m.add_output(path)
    m.wall_clock_seconds = time.perf_counter() - started
    if args.manifest:
        dest = _resolve(args, args.manifest)
    else:
        dest = Path(str(outputs[0]) + ".manifest.json")
    m.write(dest)
    return dest


def cmd_generate(args) -> int:
    started = time.perf_counter()
    seed = _parse_seed(args.seed)
    progress = None
    if args.progress_interval > 0 and not args.quiet:
        progress = args.progress_interval
    t0 = time.perf_counter()
    seq = generate(seed, args.length, progress, args.strategy)
    elapsed = time.perf_counter() - t0
    out = _resolve(args, args.out)
    save_sequence(seq, out, wall_clock_seconds=elapsed)
    sidecar = out.with_name(out.name + ".json")

    reloaded = load_sequence(out, verify_prefix=min(len(seq), 2000))
    if reloaded.terms != seq.terms:
        raise RuntimeError(f"{out}: reloaded terms differ from generated terms")

    params = {
        "seed": list(seed.elements),
        "length": args.length,
        "strategy": args.strategy,
        "progress_interval": args.progress_interval,
    }
    manifest = _finish_manifest(
        args, "generate", params, [], [out, sidecar], started
    )
    _say(args, f"wrote {out} ({len(seq)} terms, last = {seq.last_term})")
    _say(args, f"wrote {manifest}")
    return 0


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    seq_path = Path(args.seq)
    seq = load_sequence(seq_path, verify_prefix=args.verify_prefix)
    if args.which == "ratio":
        series = exponent_ratio(seq)
        params: dict = {}
    elif args.which == "windowed":
        series = windowed_exponent(seq, args.window)
        params = {"window": args.window}
    else:
        series = deviation_series(seq)
        params = {}
    out = _resolve(args, args.out or f"{args.which}.csv")
    save_series(
        series,
        out,
        source_hashes={str(seq_path): sha256_file(seq_path)},
        parameters=params,
    )
    reloaded = load_series(out)
    if not (
        np.array_equal(reloaded.k, series.k)
        and np.array_equal(reloaded.values, series.values)
    ):
        raise RuntimeError(f"{out}: reloaded series differs from computed series")

    manifest = _finish_manifest(
        args,
        "analyze",
        {"which": args.which, **params, "verify_prefix": args.verify_prefix},
        [seq_path],
        [out, out.with_name(out.name + ".json")],
        started,
    )
    _say(args, f"wrote {out} ({len(series)} points, k = {series.k[0]}..{series.k[-1]})")
    _say(args, f"wrote {manifest}")
    return 0


def cmd_extrema(args) -> int:
    started = time.perf_counter()
    series_path = Path(args.series)
    raw = load_series(series_path)
    smoothed = moving_average(raw, SmoothingConfig(args.smooth_window))
    if args.curated:
        if args.curated == "builtin":
            ext = curated_extrema()
        else:
            ext = rows_to_set(load_extrema_csv(args.curated), MANUAL)
    else:
        ext = find_extrema(
            smoothed,
            PeakConfig(args.min_distance, args.peak_prominence),
            PeakConfig(args.min_distance, args.trough_prominence),
        )
    rows = extrema_values(ext, smoothed, raw)
    out = _resolve(args, args.out)
    save_extrema_csv(rows, out)
    if load_extrema_csv(out) != rows:
        raise RuntimeError(f"{out}: reloaded extrema differ from computed rows")

    inputs = [series_path]
    if args.curated and args.curated != "builtin":
        inputs.append(Path(args.curated))
    params = {
        "smooth_window": args.smooth_window,
        "min_distance": args.min_distance,
        "peak_prominence": args.peak_prominence,
        "trough_prominence": args.trough_prominence,
        "curated": args.curated,
    }
    manifest = _finish_manifest(args, "extrema", params, inputs, [out], started)
    _say(
        args,
        f"wrote {out} ({len(ext.peaks)} peaks, {len(ext.troughs)} troughs, "
        f"source = {ext.source})",
    )
    _say(args, f"wrote {manifest}")
    return 0


def cmd_fit(args) -> int:
    started = time.perf_counter()
    extrema_path = Path(args.extrema)
    rows = [r for r in load_extrema_csv(extrema_path) if r.kind == args.kind]
    if not rows:
        raise ValueError(f"{extrema_path}: no rows of kind {args.kind!r}")
    missing = [r.k for r in rows if r.r_raw is None]
    if missing:
        raise ValueError(
            f"{extrema_path}: rows for k = {missing} lack r_raw values; "
            "produce the file with the extrema command against a ratio series"
        )
    fit_input = FitInput(
        np.array([r.k for r in rows]),
        np.array([r.r_raw for r in rows]),
        label=f"{args.kind}s",
    )
    if args.sweep:
        fits = robustness_sweep(fit_input, args.fix_a)
    else:
        fits = fit_growth_model(fit_input, args.fix_a)
    out = _resolve(args, args.out or f"fit_{args.kind}s.json")
    save_fit_report(fits, fit_input, out)
    load_fit_report(out)

    for fit in fits if isinstance(fits, list) else [fits]:
        tag = f"A fixed at {fit.fixed_A}" if fit.fixed_A is not None else "A free"
        _say(
            args,
            f"{fit_input.label} ({tag}, {fit.subset}): A = {fit.A!r}, "
            f"B = {fit.B!r}, C = {fit.C!r}, R^2 = {fit.r_squared!r}",
        )
    params = {"kind": args.kind, "fix_A": args.fix_a, "sweep": bool(args.sweep)}
    manifest = _finish_manifest(args, "fit", params, [extrema_path], [out], started)
    _say(args, f"wrote {out}")
    _say(args, f"wrote {manifest}")
    return 0


def cmd_figure_data(args) -> int:
    started = time.perf_counter()
    series_path = Path(args.series)
    series = load_series(series_path)
    inputs = [series_path]
    params: dict = {"figure": args.figure}

    if args.figure == WINDOWED:
        rows, spec = windowed_figure_data(series)
    elif args.figure == PEAKS_TROUGHS:
        if not args.extrema:
            raise ValueError("the peaks_troughs figure needs --extrema")
        smoothed = moving_average(series, SmoothingConfig(args.smooth_window))
        ext_rows = load_extrema_csv(args.extrema)
        ext = rows_to_set(ext_rows, MANUAL)
        rows, spec = peaks_troughs_figure_data(series, smoothed, ext, skip=args.skip)
        inputs.append(Path(args.extrema))
        params.update({"smooth_window": args.smooth_window, "skip": args.skip})
    else:
        annotations = default_annotations(
            args.hline_y, args.affine_slope, args.affine_intercept
        )
        rows, spec = deviation_figure_data(series, skip=args.skip, annotations=annotations)
        params.update(
            {
                "skip": args.skip,
                "hline_y": args.hline_y,
                "affine_slope": args.affine_slope,
                "affine_intercept": args.affine_intercept,
            }
        )

    out = _resolve(args, args.out or f"figure_{args.figure}.csv")
    if out.suffix == ".csv":
        spec_path = out.with_suffix(".spec.json")
    else:
        spec_path = Path(str(out) + ".spec.json")
    save_figure_data(args.figure, rows, out)
    save_figure_spec(spec, spec_path)

    header, reread = load_figure_data(out)
    if len(reread) != len(rows):
        raise RuntimeError(f"{out}: row count changed on re-read")
    if load_figure_spec(spec_path) != spec:
        raise RuntimeError(f"{spec_path}: spec changed on re-read")

    manifest = _finish_manifest(
        args, "figure-data", params, inputs, [out, spec_path], started
    )
    _say(args, f"wrote {out} ({len(rows)} rows) and {spec_path}")
    _say(args, f"wrote {manifest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--out-dir", default=".", help="directory for relative output paths"
    )
    common.add_argument(
        "--quiet", action="store_true", help="suppress progress and summaries"
    )
    common.add_argument(
        "--manifest", default=None, help="override the run-manifest path"
    )

    parser = argparse.ArgumentParser(
        prog="stangrow",
        description="Generate greedy 3-AP-free sequences and analyze their growth.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "generate", parents=[common], help="generate and store a sequence"
    )
    p.add_argument("--seed", default="0,4", help="comma-separated seed, e.g. 0,4")
    p.add_argument("--length", type=int, default=20000, help="number of terms")
    p.add_argument(
        "--strategy",
        choices=list(STRATEGIES),
        default=BITSET_SCAN,
        help="membership structure used by the generator",
    )
    p.add_argument(
        "--progress-interval",
        type=int,
        default=1000,
        help="report every N terms on stderr (0 disables)",
    )
    p.add_argument("--out", default="sequence.csv", help="output CSV path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser(
        "analyze", parents=[common], help="derive a growth series from a sequence"
    )
    p.add_argument("--seq", required=True, help="sequence CSV written by generate")
    p.add_argument(
        "--which",
        required=True,
        choices=["ratio", "windowed", "deviation"],
        help="ratio: ln a_k/ln k; windowed: local exponent; deviation: vs k^2/ln k",
    )
    p.add_argument("--window", type=int, default=20, help="half-window for windowed")
    p.add_argument(
        "--verify-prefix",
        type=int,
        default=2000,
        help="terms re-verified on load (0 disables)",
    )
    p.add_argument("--out", default=None, help="output CSV path (default <which>.csv)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser(
        "extrema",
        parents=[common],
        help="detect (or tabulate curated) extrema of the smoothed series",
    )
    p.add_argument("--series", required=True, help="ratio series CSV from analyze")
    p.add_argument("--smooth-window", type=int, default=25, help="odd smoothing length")
    p.add_argument("--min-distance", type=int, default=50, help="minimum k separation")
    p.add_argument("--peak-prominence", type=float, default=0.005)
    p.add_argument("--trough-prominence", type=float, default=0.003)
    p.add_argument(
        "--curated",
        default=None,
        help="extrema CSV with hand-picked k values, or 'builtin' for the bundled list",
    )
    p.add_argument("--out", default="extrema.csv", help="output CSV path")
    p.set_defaults(func=cmd_extrema)

    p = sub.add_parser(
        "fit", parents=[common], help="fit the growth model to extrema values"
    )
    p.add_argument("--extrema", required=True, help="extrema CSV from the extrema command")
    p.add_argument("--kind", required=True, choices=["peak", "trough"])
    p.add_argument(
        "--fix-A",
        dest="fix_a",
        type=float,
        default=None,
        help="fix the constant A instead of fitting it",
    )
    p.add_argument(
        "--sweep",
        action="store_true",
        help="also refit without the last and without the first point",
    )
    p.add_argument("--out", default=None, help="output JSON path (default fit_<kind>s.json)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser(
        "figure-data",
        parents=[common],
        help="emit plot-ready CSV plus a figure spec JSON",
    )
    p.add_argument("--figure", required=True, choices=list(FIGURE_IDS))
    p.add_argument(
        "--series",
        required=True,
        help="input series CSV (windowed for windowed_exponent, ratio for "
        "peaks_troughs, deviation for deviation)",
    )
    p.add_argument("--extrema", default=None, help="extrema CSV (peaks_troughs only)")
    p.add_argument("--smooth-window", type=int, default=25, help="odd smoothing length")
    p.add_argument(
        "--skip", type=int, default=DEFAULT_SKIP, help="edge samples to drop from curves"
    )
    p.add_argument("--hline-y", type=float, default=DEFAULT_HLINE_Y)
    p.add_argument("--affine-slope", type=float, default=DEFAULT_AFFINE_SLOPE)
    p.add_argument("--affine-intercept", type=float, default=DEFAULT_AFFINE_INTERCEPT)
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=cmd_figure_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
