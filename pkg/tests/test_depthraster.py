import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planeval.depthraster import (
    DepthRaster,
    ExtractionParams,
    extract_distance,
    percentile,
    read_manifest,
    read_pfm,
    shrink_box,
    write_manifest,
    write_pfm,
)
from planeval.detection import Detection, ObjectClass
from planeval.errors import EmptyRegion, MalformedHeader, TruncatedData, UnsupportedChannels


def det(x1, y1, x2, y2):
    return Detection(
        cls=ObjectClass.CAR, x1=x1, y1=y1, x2=x2, y2=y2, confidence=0.9, frame_id="f"
    )


def raster_from(values2d, frame_id="f"):
    arr = np.asarray(values2d, dtype=np.float32)
    return DepthRaster(width=arr.shape[1], height=arr.shape[0], values=arr, frame_id=frame_id)


def brute_force_percentile(values, beta):
    ordered = sorted(float(v) for v in values)
    if len(ordered) == 1:
        return ordered[0]
    pos = (len(ordered) - 1) * beta / 100.0
    lo = int(pos)
    hi = min(lo + 1, len(ordered) - 1)
    frac = pos - lo
    return ordered[lo] * (1.0 - frac) + ordered[hi] * frac


class TestShrinkBox:
    def test_alpha_one_is_identity(self):
        assert shrink_box(det(0, 0, 100, 100), 1.0) == (0.0, 0.0, 100.0, 100.0)

    def test_alpha_075(self):
        assert shrink_box(det(0, 0, 100, 100), 0.75) == (12.5, 12.5, 87.5, 87.5)

    def test_alpha_05_offset_box(self):
        assert shrink_box(det(10, 20, 30, 60), 0.5) == (15.0, 30.0, 25.0, 50.0)

    @settings(max_examples=50, deadline=None)
    @given(
        x1=st.floats(-500, 500),
        y1=st.floats(-500, 500),
        w=st.floats(1, 400),
        h=st.floats(1, 400),
        alpha=st.floats(0.01, 1.0),
    )
    def test_preserves_center_and_aspect(self, x1, y1, w, h, alpha):
        d = det(x1, y1, x1 + w, y1 + h)
        sx1, sy1, sx2, sy2 = shrink_box(d, alpha)
        assert (sx1 + sx2) / 2 == pytest.approx((d.x1 + d.x2) / 2, rel=1e-12, abs=1e-9)
        assert (sy1 + sy2) / 2 == pytest.approx((d.y1 + d.y2) / 2, rel=1e-12, abs=1e-9)
        assert (sx2 - sx1) == pytest.approx(alpha * w, rel=1e-12)
        assert (sy2 - sy1) == pytest.approx(alpha * h, rel=1e-12)


class TestExtractDistance:
    def test_constant_raster(self):
        r = raster_from(np.full((50, 50), 7.0))
        got = extract_distance(r, det(3, 5, 31, 42), ExtractionParams(alpha=0.8, beta=62.0))
        assert got == pytest.approx(7.0)

    def test_median_of_four(self):
        r = raster_from([[10.0, 20.0], [30.0, 40.0]])
        got = extract_distance(r, det(0, 0, 2, 2), ExtractionParams(alpha=1.0, beta=50.0))
        assert got == pytest.approx(25.0)

    def test_beta_75_of_1_to_100(self):
        vals = np.arange(1.0, 101.0).reshape(10, 10)
        r = raster_from(vals)
        got = extract_distance(r, det(0, 0, 10, 10), ExtractionParams(alpha=1.0, beta=75.0))
        assert got == pytest.approx(brute_force_percentile(vals.ravel(), 75.0))
        assert got == pytest.approx(75.25)

    def test_invalid_pixels_excluded(self):
        r = raster_from([[0.0, -3.0], [np.inf, 5.0]])
        got = extract_distance(r, det(0, 0, 2, 2), ExtractionParams(alpha=1.0, beta=50.0))
        assert got == pytest.approx(5.0)

    def test_empty_region_all_invalid(self):
        r = raster_from(np.zeros((4, 4)))
        with pytest.raises(EmptyRegion):
            extract_distance(r, det(0, 0, 4, 4), ExtractionParams(alpha=1.0, beta=50.0))

    def test_empty_region_outside_raster(self):
        r = raster_from(np.ones((4, 4)))
        with pytest.raises(EmptyRegion):
            extract_distance(r, det(100, 100, 120, 120), ExtractionParams(alpha=1.0, beta=50.0))

    def test_clamped_to_raster_bounds(self):
        r = raster_from(np.full((4, 4), 2.5))
        got = extract_distance(r, det(-50, -50, 2, 2), ExtractionParams(alpha=1.0, beta=10.0))
        assert got == pytest.approx(2.5)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_monotone_in_beta(self, seed):
        rng = np.random.default_rng(seed)
        r = raster_from(rng.uniform(0.5, 90.0, size=(20, 20)))
        box = det(2, 3, 17, 19)
        results = [
            extract_distance(r, box, ExtractionParams(alpha=0.9, beta=b))
            for b in np.linspace(0.0, 100.0, 21)
        ]
        assert all(a <= b + 1e-12 for a, b in zip(results, results[1:]))

    def test_alpha1_beta50_equals_brute_force_median(self):
        rng = np.random.default_rng(33)
        r = raster_from(rng.uniform(1.0, 50.0, size=(30, 30)))
        box = det(4, 7, 21, 26)
        got = extract_distance(r, box, ExtractionParams(alpha=1.0, beta=50.0))
        inside = [r.values[v, u] for v in range(7, 26) for u in range(4, 21)]
        assert got == pytest.approx(brute_force_percentile(inside, 50.0), rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(k=st.floats(1e-3, 1e3), seed=st.integers(0, 1000))
    def test_positive_homogeneity(self, k, seed):
        rng = np.random.default_rng(seed)
        base = rng.uniform(0.5, 20.0, size=(12, 12)).astype(np.float32)
        r1 = raster_from(base)
        r2 = raster_from(base.astype(np.float64) * k)
        box = det(1, 2, 10, 11)
        p = ExtractionParams(alpha=0.75, beta=66.0)
        assert extract_distance(r2, box, p) == pytest.approx(
            k * extract_distance(r1, box, p), rel=1e-5
        )


class TestPfm:
    def test_round_trip(self, tmp_path):
        r = raster_from([[1.5, 2.5, 3.5], [4.5, 5.5, 6.5]], frame_id="a")
        path = tmp_path / "r.pfm"
        write_pfm(r, path)
        back = read_pfm(path, frame_id="a")
        assert back.width == 3 and back.height == 2
        assert np.array_equal(back.values, r.values)

    def test_wire_format(self, tmp_path):
        # header "Pf", dims "3 2", scale "-1.0", then 24 bytes little-endian
        # bottom-up: the first float is row 1 (bottom), column 0
        payload = b"Pf\n3 2\n-1.0\n" + struct.pack("<6f", 4.0, 5.0, 6.0, 1.0, 2.0, 3.0)
        path = tmp_path / "wire.pfm"
        path.write_bytes(payload)
        r = read_pfm(path)
        assert np.array_equal(r.values, np.array([[1, 2, 3], [4, 5, 6]], dtype=np.float32))

    def test_truncated(self, tmp_path):
        payload = b"Pf\n3 2\n-1.0\n" + b"\x00" * 10
        path = tmp_path / "trunc.pfm"
        path.write_bytes(payload)
        with pytest.raises(TruncatedData):
            read_pfm(path)

    def test_color_rejected(self, tmp_path):
        path = tmp_path / "color.pfm"
        path.write_bytes(b"PF\n1 1\n-1.0\n" + b"\x00" * 12)
        with pytest.raises(UnsupportedChannels):
            read_pfm(path)

    def test_malformed_magic(self, tmp_path):
        path = tmp_path / "bad.pfm"
        path.write_bytes(b"Px\n1 1\n-1.0\n" + b"\x00" * 4)
        with pytest.raises(MalformedHeader):
            read_pfm(path)

    def test_big_endian_scale(self, tmp_path):
        payload = b"Pf\n2 1\n1.0\n" + struct.pack(">2f", 9.0, 11.0)
        path = tmp_path / "be.pfm"
        path.write_bytes(payload)
        r = read_pfm(path)
        assert r.values.tolist() == [[9.0, 11.0]]

    def test_write_read_write_byte_stable(self, tmp_path):
        rng = np.random.default_rng(4)
        r = raster_from(rng.uniform(0.1, 100.0, size=(7, 5)))
        p1, p2 = tmp_path / "a.pfm", tmp_path / "b.pfm"
        write_pfm(r, p1)
        write_pfm(read_pfm(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestManifest:
    def test_round_trip(self, tmp_path):
        entries = [("f0", "rasters/f0.pfm"), ("f1", "rasters/f1.pfm")]
        path = tmp_path / "manifest.jsonl"
        write_manifest(entries, path)
        assert read_manifest(path) == entries


class TestPercentileHelper:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.uniform(0, 100, size=int(rng.integers(1, 40)))
        for beta in (0.0, 10.0, 33.3, 50.0, 75.0, 99.0, 100.0):
            assert percentile(vals, beta) == pytest.approx(
                brute_force_percentile(vals, beta), rel=1e-12, abs=1e-12
            )
