import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planeval.detection import (
    Detection,
    FilterConfig,
    ObjectClass,
    anchor_point,
    assign_gt_distance,
    filter_detections,
    intersection_over_min_area,
    read_detections,
    write_detections,
)
from planeval.errors import PointAtInfinity
from planeval.geometry import Homography


def det(x1, y1, x2, y2, cls=ObjectClass.CAR, conf=0.9, frame="f0", oid=None):
    return Detection(cls=cls, x1=x1, y1=y1, x2=x2, y2=y2, confidence=conf, frame_id=frame, object_id=oid)


CFG = FilterConfig(horizon_v=300.0)


class TestAnchorPoint:
    def test_midpoint_of_lower_edge(self):
        a = anchor_point(det(100, 200, 300, 400))
        assert (a.u, a.v) == (200.0, 400.0)

    def test_small_box(self):
        a = anchor_point(det(0, 0, 10, 10))
        assert (a.u, a.v) == (5.0, 10.0)

    def test_zero_width_rejected_at_construction(self):
        with pytest.raises(ValueError):
            det(10, 0, 10, 10)


class TestFilterStages:
    def test_low_confidence(self):
        kept, rejected = filter_detections([det(0, 400, 100, 500, conf=0.4)], CFG)
        assert kept == []
        assert rejected[0][1] == "low_confidence"

    def test_above_horizon(self):
        kept, rejected = filter_detections([det(0, 100, 100, 250)], CFG)
        assert kept == []
        assert rejected[0][1] == "above_horizon"

    def test_on_horizon_is_kept_by_horizon_stage(self):
        kept, _ = filter_detections([det(0, 200, 100, 300)], CFG)
        assert len(kept) == 1

    def test_area_thresholds(self):
        person = det(0, 370, 30, 400, cls=ObjectClass.PERSON)  # 900 px^2
        car = det(200, 360, 300, 400, cls=ObjectClass.CAR)  # 4000 px^2
        kept, rejected = filter_detections([person, car], CFG)
        assert kept == [car]
        assert rejected == [(person, "small_area")]

    def test_occlusion_keeps_lowest(self):
        a = det(0, 0, 50, 100 + 300, conf=0.9)
        b = det(25, 0, 75, 90 + 300, conf=0.9)
        kept, rejected = filter_detections([a, b], CFG)
        assert kept == [a]
        assert rejected == [(b, "occluded")]

    def test_occlusion_tie_breaks_by_area(self):
        big = det(0, 300, 100, 500)
        small = det(60, 400, 120, 500)  # same y2, smaller area, overlapping
        kept, rejected = filter_detections([small, big], CFG)
        assert kept == [big]
        assert rejected == [(small, "occluded")]

    def test_low_confidence_box_still_occludes(self):
        # the occlusion relation is computed over the full input: dropping the
        # occluder for low confidence does not resurrect the occluded box
        occluder = det(0, 300, 100, 500, conf=0.3)
        hidden = det(10, 300, 90, 450, conf=0.9)
        kept, rejected = filter_detections([occluder, hidden], CFG)
        assert kept == []
        assert [r for _, r in rejected] == ["low_confidence", "occluded"]

    def test_kept_preserves_input_order(self):
        boxes = [det(i * 200, 350, i * 200 + 100, 450, oid=str(i)) for i in range(5)]
        kept, _ = filter_detections(boxes, CFG)
        assert [d.object_id for d in kept] == ["0", "1", "2", "3", "4"]


def random_detections(rng, n):
    out = []
    for i in range(n):
        x1 = rng.uniform(0, 1200)
        y1 = rng.uniform(0, 650)
        w = rng.uniform(5, 300)
        h = rng.uniform(5, 200)
        cls = list(ObjectClass)[int(rng.integers(0, 6))]
        out.append(
            Detection(
                cls=cls,
                x1=x1,
                y1=y1,
                x2=x1 + w,
                y2=y1 + h,
                confidence=float(rng.uniform(0, 1)),
                frame_id="f",
                object_id=str(i),
            )
        )
    return out


class TestFilterProperties:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_partition(self, seed):
        rng = np.random.default_rng(seed)
        ds = random_detections(rng, 40)
        kept, rejected = filter_detections(ds, CFG)
        assert len(kept) + len(rejected) == len(ds)
        ids = [d.object_id for d in kept] + [d.object_id for d, _ in rejected]
        assert sorted(ids) == sorted(d.object_id for d in ds)

    @pytest.mark.parametrize("seed", [5, 6, 7])
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        kept, _ = filter_detections(random_detections(rng, 50), CFG)
        kept2, rejected2 = filter_detections(kept, CFG)
        assert kept2 == kept
        assert rejected2 == []

    @pytest.mark.parametrize("seed", [8, 9, 10])
    def test_no_mutual_overlap_after_filtering(self, seed):
        rng = np.random.default_rng(seed)
        kept, _ = filter_detections(random_detections(rng, 50), CFG)
        for i, a in enumerate(kept):
            for b in kept[i + 1 :]:
                assert intersection_over_min_area(a, b) <= CFG.occlusion_overlap_min

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), lo=st.floats(0, 1), hi=st.floats(0, 1))
    def test_confidence_monotonicity(self, seed, lo, hi):
        lo, hi = min(lo, hi), max(lo, hi)
        rng = np.random.default_rng(seed)
        ds = random_detections(rng, 30)
        cfg_lo = FilterConfig(horizon_v=300.0, min_confidence=lo)
        cfg_hi = FilterConfig(horizon_v=300.0, min_confidence=hi)
        kept_lo, _ = filter_detections(ds, cfg_lo)
        kept_hi, _ = filter_detections(ds, cfg_hi)
        assert set(d.object_id for d in kept_hi) <= set(d.object_id for d in kept_lo)


class TestAssignGtDistance:
    def test_identity_homography(self):
        h = Homography(np.eye(3), 2.0)
        d = det(-10, -10, 10, 0)  # anchor at pixel (0, 0) -> plane (0, 0)
        assert assign_gt_distance(d, h) == pytest.approx(2.0)

    def test_anchor_on_horizon(self):
        h = Homography(np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 1.0, -360.0]]), 1.0)
        d = det(0, 300, 100, 360)
        with pytest.raises(PointAtInfinity):
            assign_gt_distance(d, h)


class TestDetectionsFile:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        ds = random_detections(rng, 12)
        path = tmp_path / "dets.jsonl"
        write_detections(path, ds)
        assert read_detections(path) == ds

    def test_round_trip_byte_stable(self, tmp_path):
        rng = np.random.default_rng(2)
        ds = random_detections(rng, 6)
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_detections(p1, ds)
        write_detections(p2, read_detections(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejected_records_skipped_on_read(self, tmp_path):
        rng = np.random.default_rng(3)
        ds = random_detections(rng, 10)
        kept, rejected = filter_detections(ds, CFG)
        path = tmp_path / "filtered.jsonl"
        write_detections(path, kept, rejected)
        assert read_detections(path) == kept
