"""Renderer tests.

The fixtures drive the analysis pipeline through its command-line
interface in a subprocess, so this suite touches the upstream package
only through the files it emits.
"""

import csv
import hashlib
import json
import subprocess
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
import pytest

from figemit.cli import main as cli_main
from figemit.render import (
    DEVIATION,
    PEAKS_TROUGHS,
    WINDOWED,
    RenderError,
    RenderJob,
    load_data,
    render,
)


def upstream(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "stangrow", *map(str, argv)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    """All three figure-data files for a small pipeline run."""
    d = tmp_path_factory.mktemp("figure_inputs")
    upstream("generate", "--seed", "0,4", "--length", "600",
             "--out-dir", d, "--quiet")
    upstream("analyze", "--seq", d / "sequence.csv", "--which", "ratio",
             "--out-dir", d, "--quiet")
    upstream("analyze", "--seq", d / "sequence.csv", "--which", "windowed",
             "--window", "20", "--out-dir", d, "--quiet")
    upstream("analyze", "--seq", d / "sequence.csv", "--which", "deviation",
             "--out-dir", d, "--quiet")
    upstream("extrema", "--series", d / "ratio.csv", "--smooth-window", "11",
             "--min-distance", "10", "--peak-prominence", "0.002",
             "--trough-prominence", "0.002", "--out-dir", d, "--quiet")
    upstream("figure-data", "--figure", WINDOWED,
             "--series", d / "windowed.csv", "--out-dir", d, "--quiet")
    upstream("figure-data", "--figure", PEAKS_TROUGHS,
             "--series", d / "ratio.csv", "--extrema", d / "extrema.csv",
             "--smooth-window", "11", "--skip", "15",
             "--out-dir", d, "--quiet")
    upstream("figure-data", "--figure", DEVIATION,
             "--series", d / "deviation.csv", "--out-dir", d, "--quiet")
    return d


def job_for(d, figure_id, out):
    return RenderJob(
        data=d / f"figure_{figure_id}.csv",
        spec=d / f"figure_{figure_id}.spec.json",
        out=out,
    )


def checksum(*arrays):
    digest = hashlib.sha256()
    for a in arrays:
        digest.update(np.asarray(a, dtype=np.float64).tobytes())
    return digest.hexdigest()


class TestWindowedFigure:
    def test_plots_file_columns_verbatim(self, inputs, tmp_path):
        fig = render(job_for(inputs, WINDOWED, tmp_path / "w.png"))
        try:
            (line,) = fig.axes[0].lines
            k, alpha = load_data(inputs / f"figure_{WINDOWED}.csv", WINDOWED)
            assert checksum(line.get_xdata(), line.get_ydata()) == checksum(k, alpha)
        finally:
            plt.close(fig)
        assert (tmp_path / "w.png").stat().st_size > 0

    def test_flat_line_for_square_growth(self, tmp_path):
        # hand-built dataset: exponent exactly 2 everywhere
        data = tmp_path / "flat.csv"
        with open(data, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "alpha"])
            for k in range(3, 100):
                writer.writerow([k, "2.0"])
        spec = tmp_path / "flat.spec.json"
        spec.write_text(json.dumps({"figure_id": WINDOWED, "skip": 0, "annotations": []}))
        fig = render(RenderJob(data=data, spec=spec, out=tmp_path / "flat.png"))
        try:
            (line,) = fig.axes[0].lines
            assert np.all(line.get_ydata() == 2.0)
        finally:
            plt.close(fig)


class TestPeaksTroughsFigure:
    def test_layers_match_file_arrays(self, inputs, tmp_path):
        layers = load_data(inputs / f"figure_{PEAKS_TROUGHS}.csv", PEAKS_TROUGHS)
        assert set(layers) == {"raw", "smoothed", "peak", "trough"}
        fig = render(job_for(inputs, PEAKS_TROUGHS, tmp_path / "pt.png"))
        try:
            ax = fig.axes[0]
            raw_line, smooth_line = ax.lines
            assert raw_line.get_alpha() == pytest.approx(0.3)
            assert checksum(raw_line.get_xdata(), raw_line.get_ydata()) == checksum(*layers["raw"])
            assert checksum(smooth_line.get_xdata(), smooth_line.get_ydata()) == checksum(*layers["smoothed"])

            peak_pts, trough_pts = [c.get_offsets() for c in ax.collections]
            assert np.array_equal(peak_pts, np.column_stack(layers["peak"]))
            assert np.array_equal(trough_pts, np.column_stack(layers["trough"]))
            assert ax.collections[0].get_facecolor().tolist() != ax.collections[1].get_facecolor().tolist()
        finally:
            plt.close(fig)

    def test_missing_curve_layer_rejected(self, tmp_path):
        data = tmp_path / "pt.csv"
        with open(data, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["layer", "k", "value"])
            writer.writerow(["raw", 5, "1.5"])
        spec = tmp_path / "pt.spec.json"
        spec.write_text(json.dumps({"figure_id": PEAKS_TROUGHS, "skip": 0, "annotations": []}))
        with pytest.raises(RenderError, match="smoothed"):
            render(RenderJob(data=data, spec=spec, out=tmp_path / "pt.png"))


class TestDeviationFigure:
    def test_curve_and_annotation_lines(self, inputs, tmp_path):
        fig = render(job_for(inputs, DEVIATION, tmp_path / "d.svg"))
        try:
            ax = fig.axes[0]
            curve, hline, affine = ax.lines

            log_k, f = load_data(inputs / f"figure_{DEVIATION}.csv", DEVIATION)
            assert checksum(curve.get_xdata(), curve.get_ydata()) == checksum(log_k, f)

            assert list(hline.get_ydata()) == [-0.64, -0.64]
            assert hline.get_linestyle() == "--"

            assert affine.get_slope() == -0.1
            # anchor y is derived upstream as slope*x0 + intercept in doubles
            assert affine.get_xy1() == (7.0, -0.1 * 7.0 - 0.14)
            assert affine.get_linestyle() == "--"
        finally:
            plt.close(fig)
        assert b"<svg" in (tmp_path / "d.svg").read_bytes()[:300]

    def test_annotations_follow_spec_not_defaults(self, inputs, tmp_path):
        spec_path = tmp_path / "custom.spec.json"
        spec_path.write_text(json.dumps({
            "figure_id": DEVIATION,
            "skip": 20,
            "annotations": [{"type": "hline", "y": -0.5}],
        }))
        fig = render(RenderJob(
            data=inputs / f"figure_{DEVIATION}.csv",
            spec=spec_path,
            out=tmp_path / "d.png",
        ))
        try:
            assert len(fig.axes[0].lines) == 2
            assert list(fig.axes[0].lines[1].get_ydata()) == [-0.5, -0.5]
        finally:
            plt.close(fig)


class TestGeometryDeterminism:
    def test_two_renders_plot_identical_arrays(self, inputs, tmp_path):
        sums = []
        for name in ("one.png", "two.png"):
            fig = render(job_for(inputs, PEAKS_TROUGHS, tmp_path / name))
            try:
                ax = fig.axes[0]
                arrays = []
                for line in ax.lines:
                    arrays += [line.get_xdata(), line.get_ydata()]
                for coll in ax.collections:
                    arrays.append(coll.get_offsets())
                sums.append(checksum(*arrays))
            finally:
                plt.close(fig)
        assert sums[0] == sums[1]


class TestJobValidation:
    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(RenderError, match="format"):
            RenderJob(data="a.csv", spec="a.json", out=tmp_path / "img.bmp")

    def test_format_override(self, tmp_path):
        job = RenderJob(data="a.csv", spec="a.json", out=tmp_path / "img.raw",
                        image_format="png")
        assert job.format == "png"

    def test_bad_dpi(self, tmp_path):
        with pytest.raises(RenderError, match="dpi"):
            RenderJob(data="a.csv", spec="a.json", out=tmp_path / "i.png", dpi=0)


class TestErrorPaths:
    def test_missing_data_file(self, inputs, tmp_path):
        job = RenderJob(
            data=tmp_path / "nope.csv",
            spec=inputs / f"figure_{WINDOWED}.spec.json",
            out=tmp_path / "x.png",
        )
        with pytest.raises(RenderError, match="not found"):
            render(job)

    def test_header_mismatch(self, inputs, tmp_path):
        # deviation spec pointed at windowed-format data
        job = RenderJob(
            data=inputs / f"figure_{WINDOWED}.csv",
            spec=inputs / f"figure_{DEVIATION}.spec.json",
            out=tmp_path / "x.png",
        )
        with pytest.raises(RenderError, match="header"):
            render(job)

    def test_unknown_figure_id(self, inputs, tmp_path):
        spec = tmp_path / "bad.spec.json"
        spec.write_text(json.dumps({"figure_id": "histogram", "skip": 0}))
        job = RenderJob(
            data=inputs / f"figure_{WINDOWED}.csv",
            spec=spec,
            out=tmp_path / "x.png",
        )
        with pytest.raises(RenderError, match="figure_id"):
            render(job)

    def test_non_numeric_cell(self, tmp_path):
        data = tmp_path / "bad.csv"
        data.write_text("k,alpha\n5,abc\n")
        spec = tmp_path / "bad.spec.json"
        spec.write_text(json.dumps({"figure_id": WINDOWED, "skip": 0}))
        with pytest.raises(RenderError, match="number"):
            render(RenderJob(data=data, spec=spec, out=tmp_path / "x.png"))

    def test_annotations_on_wrong_figure(self, inputs, tmp_path):
        spec = tmp_path / "bad.spec.json"
        spec.write_text(json.dumps({
            "figure_id": WINDOWED,
            "skip": 0,
            "annotations": [{"type": "hline", "y": 1.0}],
        }))
        job = RenderJob(
            data=inputs / f"figure_{WINDOWED}.csv",
            spec=spec,
            out=tmp_path / "x.png",
        )
        with pytest.raises(RenderError, match="annotations"):
            render(job)


class TestCli:
    def test_renders_all_three_figures(self, inputs, tmp_path, capsys):
        for figure_id in (WINDOWED, PEAKS_TROUGHS, DEVIATION):
            out = tmp_path / f"{figure_id}.png"
            rc = cli_main([
                "render",
                "--data", str(inputs / f"figure_{figure_id}.csv"),
                "--spec", str(inputs / f"figure_{figure_id}.spec.json"),
                "--out", str(out),
            ])
            assert rc == 0
            assert out.stat().st_size > 0
        assert capsys.readouterr().out.count("wrote") == 3

    def test_missing_input_is_exit_1(self, inputs, tmp_path, capsys):
        rc = cli_main([
            "render",
            "--data", str(tmp_path / "missing.csv"),
            "--spec", str(inputs / f"figure_{WINDOWED}.spec.json"),
            "--out", str(tmp_path / "x.png"),
        ])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_unwritable_output_is_exit_1(self, inputs, tmp_path, capsys):
        rc = cli_main([
            "render",
            "--data", str(inputs / f"figure_{WINDOWED}.csv"),
            "--spec", str(inputs / f"figure_{WINDOWED}.spec.json"),
            "--out", str(tmp_path / "no" / "such" / "dir" / "x.png"),
        ])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_size_and_dpi_flags(self, inputs, tmp_path):
        out = tmp_path / "sized.png"
        rc = cli_main([
            "render",
            "--data", str(inputs / f"figure_{WINDOWED}.csv"),
            "--spec", str(inputs / f"figure_{WINDOWED}.spec.json"),
            "--out", str(out),
            "--size", "4", "2", "--dpi", "50",
        ])
        assert rc == 0
        # png IHDR width: 4 in * 50 dpi = 200 px
        header = out.read_bytes()[:24]
        width = int.from_bytes(header[16:20], "big")
        assert width == 200
