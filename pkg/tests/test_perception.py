import json

import numpy as np
import pytest
from generators import random_cloud
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from oracles import union_find_clusters

from seqplan.errors import EmptyCluster
from seqplan.perception import (
    BoundingBox, boxes_to_scene, cluster_points, density_shift, fit_box, label_clusters, perceive, read_cloud,
    write_boxes, write_cloud,
)

coords = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
clouds = arrays(np.float64, st.tuples(st.integers(1, 40), st.just(3)), elements=coords)


def test_zero_iterations_is_identity():
    pts = np.random.default_rng(0).normal(size=(20, 3))
    assert np.array_equal(density_shift(pts, 0.5, 0), pts)


def test_two_close_points_meet_at_midpoint():
    out = density_shift([(0, 0, 0), (0.05, 0, 0)], bandwidth=0.1)
    assert out == pytest.approx(np.array([[0.025, 0, 0]] * 2))


def test_drift_points_move_toward_cluster():
    rng = np.random.default_rng(3)
    center = np.array([0.5, 0.5, 0.5])
    blob = center + rng.normal(0, 0.01, size=(100, 3))
    direction = rng.normal(size=(5, 3))
    drift = center + 0.06 * direction / np.linalg.norm(direction, axis=1, keepdims=True)
    cloud = np.vstack([blob, drift])
    mean = blob.mean(axis=0)
    before = np.linalg.norm(drift - mean, axis=1)
    after = np.linalg.norm(density_shift(cloud, bandwidth=0.1)[100:] - mean, axis=1)
    assert np.all(after < before)


def test_shift_fixed_point_is_idempotent():
    pts = np.array([[0, 0, 0]] * 4 + [[1, 1, 1]] * 3, dtype=float)
    once = density_shift(pts, 0.5)
    assert np.array_equal(once, pts)
    assert np.array_equal(density_shift(once, 0.5, 3), once)


@pytest.mark.parametrize("kwargs", [dict(bandwidth=0), dict(iterations=-1)])
def test_shift_rejects_bad_args(kwargs):
    with pytest.raises(ValueError):
        density_shift(np.zeros((2, 3)), **kwargs)


def test_two_blobs():
    rng = np.random.default_rng(1)
    radius = 0.05
    a = rng.uniform(0, 0.02, size=(30, 3))
    b = a + np.array([10 * radius, 0, 0])
    clusters = cluster_points(np.vstack([a, b]), radius, min_points=5)
    assert [len(c) for c in clusters] == [30, 30]
    assert list(clusters[0]) == list(range(30))


def test_singleton_and_noise_threshold():
    assert [list(c) for c in cluster_points([(5, 5, 2)], 0.1, 1)] == [[0]]
    assert cluster_points([(5, 5, 2)], 0.1, 2) == []


def test_clustering_matches_union_find():
    rng = np.random.default_rng(42)
    for _ in range(20):
        pts, _ = random_cloud(rng, 300)
        radius = float(rng.uniform(0.01, 0.08))
        min_points = int(rng.integers(1, 6))
        got = [list(c) for c in cluster_points(pts, radius, min_points)]
        assert got == union_find_clusters(pts, radius, min_points)


@settings(max_examples=50, deadline=None)
@given(clouds, st.floats(0.1, 50), st.integers(1, 4))
def test_clusters_partition_non_noise(pts, radius, min_points):
    clusters = cluster_points(pts, radius, min_points)
    members = np.concatenate(clusters) if clusters else np.array([], dtype=int)
    assert len(members) == len(set(members.tolist()))
    assert all(len(c) >= min_points for c in clusters)


def test_fit_box_examples():
    box = fit_box([(0, 0, 0), (2, 4, 6)], [0, 1])
    assert box.size == pytest.approx((2, 4, 6)) and box.center == pytest.approx((1, 2, 3))
    box = fit_box([(5, 5, 2)], [0])
    assert box.size == pytest.approx((0, 0, 0)) and box.center == pytest.approx((5, 5, 2))
    with pytest.raises(EmptyCluster):
        fit_box([(0, 0, 0)], [])


def test_fit_box_inside_known_box():
    rng = np.random.default_rng(9)
    lo, hi = np.array([0.1, -0.2, 0.0]), np.array([0.3, 0.1, 0.05])
    pts = rng.uniform(lo, hi, size=(1000, 3))
    box = fit_box(pts, range(1000))
    assert np.all(box.contains(pts))
    assert np.all(np.asarray(box.lo) >= lo) and np.all(np.asarray(box.hi) <= hi)


@settings(max_examples=100, deadline=None)
@given(clouds)
def test_box_wraps_tightly(pts):
    box = fit_box(pts, range(len(pts)))
    assert np.all(box.contains(pts))
    for axis in range(3):
        assert not np.all(box.shrunk(axis, 1e-9).contains(pts))


def test_labels_by_majority():
    pts = np.zeros((5, 3))
    (lb,) = label_clusters(pts, ["cube A", "cube A", "cube B", "cube A", "cube B"], [[0, 1, 2, 3, 4]])
    assert lb.label == "cube A" and lb.point_indices == (0, 1, 2, 3, 4)
    (tie,) = label_clusters(pts[:2], ["y", "x"], [[0, 1]])
    assert tie.label == "x"


def test_perceive_recovers_scene(tmp_path):
    rng = np.random.default_rng(4)
    a = rng.uniform([0, 0, 0], [0.1, 0.1, 0.1], size=(200, 3))
    b = rng.uniform([0.5, 0, 0], [0.58, 0.08, 0.08], size=(200, 3))
    cloud = np.vstack([a, b])
    labels = ["A"] * 200 + ["B"] * 200
    boxes = perceive(cloud, labels, iterations=0, radius=0.05, min_points=10)
    assert [b.label for b in boxes] == ["A", "B"]
    scene = boxes_to_scene(boxes)
    assert scene.get("B").position[0] == pytest.approx(0.54, abs=0.01)

    write_cloud(tmp_path / "c.txt", cloud, labels)
    again, again_labels = read_cloud(tmp_path / "c.txt")
    assert np.array_equal(again, cloud) and again_labels == labels
    write_boxes(tmp_path / "b.json", boxes)
    data = json.loads((tmp_path / "b.json").read_text(encoding="utf-8"))
    assert [d["label"] for d in data] == ["A", "B"] and set(data[0]) == {"label", "size", "center"}


def test_unlabeled_cloud_reads_without_labels(tmp_path):
    write_cloud(tmp_path / "c.txt", [(0, 0, 0), (1, 2, 3)])
    cloud, labels = read_cloud(tmp_path / "c.txt")
    assert cloud.shape == (2, 3) and labels is None


def test_box_json_shape():
    assert BoundingBox((0, 0, 0), (2, 2, 2)).to_json() == {"size": [2, 2, 2], "center": [1, 1, 1]}


def test_repeated_labels_get_distinct_names():
    pts = np.array([[0, 0, 0], [1, 1, 1], [5, 5, 5]], dtype=float)
    boxes = label_clusters(pts, ["A", "A", "A"], [[0], [1], [2]])
    scene = boxes_to_scene(boxes)
    assert [o.name for o in scene.objects] == ["A", "A#2", "A#3"]
    assert {o.label for o in scene.objects} == {"A"}
