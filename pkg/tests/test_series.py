import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stangrow.series import (
    IndexedSeries,
    SmoothingConfig,
    deviation_series,
    exponent_ratio,
    load_series,
    moving_average,
    save_series,
    windowed_exponent,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestIndexedSeries:
    def test_points_view(self):
        s = IndexedSeries("x", [2, 3, 5], [1.0, 2.0, 3.0])
        assert s.points == [(2, 1.0), (3, 2.0), (5, 3.0)]

    def test_value_lookup(self):
        s = IndexedSeries("x", [2, 3, 5], [1.0, 2.0, 3.0])
        assert s.value_at(5) == 3.0
        with pytest.raises(ValueError, match="k = 4"):
            s.value_at(4)

    def test_rejects_non_increasing_k(self):
        with pytest.raises(ValueError, match="increasing"):
            IndexedSeries("x", [2, 2, 3], [1.0, 2.0, 3.0])

    def test_rejects_non_finite_values(self):
        with pytest.raises(ValueError, match="k = 3"):
            IndexedSeries("x", [2, 3], [1.0, float("nan")])

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="non-empty"):
            IndexedSeries("x", [], [])

    def test_arrays_are_read_only(self):
        s = IndexedSeries("x", [2, 3], [1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 9.0


class TestExponentRatio:
    def test_r2_is_exactly_two(self, seq04_2000):
        r = exponent_ratio(seq04_2000)
        assert r.value_at(2) == 2.0

    def test_r7_frozen_value(self, seq04_2000):
        # a_7 = 16, so r_7 = ln 16 / ln 7
        r = exponent_ratio(seq04_2000)
        assert r.value_at(7) == pytest.approx(math.log(16) / math.log(7), abs=1e-15)
        assert r.value_at(7) == pytest.approx(1.4248287484320887, abs=1e-15)

    def test_linear_terms_give_unit_exponent(self):
        r = exponent_ratio(list(range(1, 101)))
        assert np.allclose(r.values, 1.0, atol=1e-14)

    def test_domain(self, seq04_2000):
        r = exponent_ratio(seq04_2000)
        assert r.k[0] == 2 and r.k[-1] == 2000 and len(r) == 1999

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="2 terms"):
            exponent_ratio([5])

    def test_nonpositive_term_rejected(self):
        with pytest.raises(ValueError, match="a_2"):
            exponent_ratio([5.0, 0.0, 7.0])


class TestWindowedExponent:
    @pytest.mark.parametrize("p", [1, 2, 3])
    @pytest.mark.parametrize("w", [1, 3, 20])
    def test_power_law_oracle(self, p, w):
        terms = [float(k) ** p for k in range(1, 201)]
        alpha = windowed_exponent(terms, w)
        assert np.all(np.abs(alpha.values - p) < 1e-12)

    def test_scale_invariance(self):
        terms = [float(k) ** 2 for k in range(1, 151)]
        scaled = [7.3 * t for t in terms]
        a1 = windowed_exponent(terms, 10)
        a2 = windowed_exponent(scaled, 10)
        assert np.all(np.abs(a1.values - a2.values) < 1e-12)

    def test_domain_matches_window(self, seq04_2000):
        alpha = windowed_exponent(seq04_2000, 20)
        assert alpha.k[0] == 22
        assert alpha.k[-1] == 2000 - 20
        assert len(alpha) == 2000 - 2 * 20 - 1

    def test_frozen_value_at_22(self, seq04_2000):
        # (ln a_42 - ln a_2) / (ln 42 - ln 2) with a_42 = 284, a_2 = 4
        alpha = windowed_exponent(seq04_2000, 20)
        expected = (math.log(284) - math.log(4)) / (math.log(42) - math.log(2))
        assert alpha.value_at(22) == pytest.approx(expected, abs=1e-15)
        assert alpha.value_at(22) == pytest.approx(1.4001144561210013, abs=1e-15)

    def test_window_too_large_rejected(self):
        with pytest.raises(ValueError, match="at least"):
            windowed_exponent([1.0, 2.0, 3.0, 4.0], 2)

    def test_bad_window_rejected(self):
        with pytest.raises(ValueError, match="w must be"):
            windowed_exponent([1.0, 2.0, 3.0, 4.0], 0)


class TestDeviationSeries:
    def test_value_at_2(self, seq04_2000):
        f = deviation_series(seq04_2000)
        assert f.value_at(2) == pytest.approx(math.log(math.log(2)), abs=1e-15)

    def test_exact_cancellation(self):
        terms = [1.0] + [k * k / math.log(k) for k in range(2, 300)]
        f = deviation_series(terms)
        assert np.all(np.abs(f.values) < 1e-12)

    def test_constant_multiple_shifts_by_log_c(self):
        c = 5.5
        terms = [1.0] + [c * k * k / math.log(k) for k in range(2, 300)]
        f = deviation_series(terms)
        assert np.all(np.abs(f.values - math.log(c)) < 1e-12)

    def test_identity_with_exponent_ratio(self, seq04_2000):
        # f(k) = (r_k - 2) ln k + ln ln k
        r = exponent_ratio(seq04_2000)
        f = deviation_series(seq04_2000)
        logk = np.log(r.k.astype(float))
        reconstructed = (r.values - 2.0) * logk + np.log(logk)
        assert np.max(np.abs(f.values - reconstructed)) < 1e-10


class TestMovingAverage:
    def test_hand_example(self):
        # convolution accumulates (3+4+5)*(1/3) with rounding, hence approx
        s = IndexedSeries("x", range(5), [1, 2, 3, 4, 5])
        out = moving_average(s, SmoothingConfig(3))
        assert out.values == pytest.approx([1.0, 2.0, 3.0, 4.0, 3.0], abs=1e-12)

    def test_zero_padded_edges(self):
        s = IndexedSeries("x", range(4), [1.0, 1.0, 1.0, 1.0])
        out = moving_average(s, SmoothingConfig(3))
        assert out.values[0] == pytest.approx(2 / 3)
        assert out.values[1] == 1.0

    def test_length_one_is_identity(self):
        vals = np.array([0.3, -1.7, 2.9])
        s = IndexedSeries("x", range(3), vals)
        out = moving_average(s, SmoothingConfig(1))
        assert np.array_equal(out.values, vals)

    def test_even_length_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            SmoothingConfig(4)

    def test_matches_same_mode_convolution(self, ratio04_2000):
        out = moving_average(ratio04_2000, SmoothingConfig(25))
        expected = np.convolve(ratio04_2000.values, np.ones(25) / 25, mode="same")
        assert np.array_equal(out.values, expected)

    def test_edge_truncated_flag_removes_edge_bias(self):
        s = IndexedSeries("x", range(10), np.ones(10))
        out = moving_average(s, SmoothingConfig(5, edge_truncated=True))
        assert np.allclose(out.values, 1.0, atol=1e-15)

    def test_edge_truncated_matches_padded_in_the_interior(self):
        rng = np.random.default_rng(7)
        vals = rng.normal(size=50)
        s = IndexedSeries("x", range(50), vals)
        a = moving_average(s, SmoothingConfig(7)).values
        b = moving_average(s, SmoothingConfig(7, edge_truncated=True)).values
        assert np.allclose(a[3:-3], b[3:-3], atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(finite_floats, min_size=5, max_size=40),
        st.lists(finite_floats, min_size=5, max_size=40),
        finite_floats,
        finite_floats,
    )
    def test_linearity(self, xs, ys, a, b):
        n = min(len(xs), len(ys))
        x = np.array(xs[:n])
        y = np.array(ys[:n])
        cfg = SmoothingConfig(3)
        k = np.arange(n)
        lhs = moving_average(IndexedSeries("z", k, a * x + b * y), cfg).values
        rhs = a * moving_average(IndexedSeries("x", k, x), cfg).values + b * (
            moving_average(IndexedSeries("y", k, y), cfg).values
        )
        scale = max(1.0, np.max(np.abs(lhs)), np.max(np.abs(rhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


class TestSeriesFiles:
    def test_roundtrip_is_exact(self, tmp_path):
        vals = np.array([0.1, 1 / 3, 2.0, -1e-300, 1.4248287484320887])
        s = IndexedSeries("tricky", [2, 3, 4, 5, 6], vals)
        path = save_series(s, tmp_path / "s.csv")
        loaded = load_series(path)
        assert loaded.label == "tricky"
        assert np.array_equal(loaded.k, s.k)
        assert np.array_equal(loaded.values, s.values)

    def test_header_and_line_endings(self, tmp_path):
        s = IndexedSeries("x", [2, 3], [1.0, 2.5])
        path = save_series(s, tmp_path / "s.csv")
        raw = path.read_bytes()
        assert raw == b"k,value\n2,1.0\n3,2.5\n"

    def test_sidecar_provenance(self, tmp_path):
        import json

        s = IndexedSeries("x", [2], [1.0])
        save_series(s, tmp_path / "s.csv", source_hashes={"seq.csv": "ab"}, parameters={"w": 20})
        meta = json.loads((tmp_path / "s.csv.json").read_text())
        assert meta["label"] == "x"
        assert meta["source_hashes"] == {"seq.csv": "ab"}
        assert meta["parameters"] == {"w": 20}

    def test_load_without_sidecar_uses_stem(self, tmp_path):
        (tmp_path / "alone.csv").write_text("k,value\n2,1.5\n")
        s = load_series(tmp_path / "alone.csv")
        assert s.label == "alone"
        assert s.points == [(2, 1.5)]

    def test_bad_header_rejected(self, tmp_path):
        (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            load_series(tmp_path / "bad.csv")

    def test_empty_file_rejected(self, tmp_path):
        (tmp_path / "empty.csv").write_text("")
        with pytest.raises(ValueError, match="empty"):
            load_series(tmp_path / "empty.csv")
