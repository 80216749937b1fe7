import numpy as np
import pytest

from scsparse.builders import (
    FiltrationConfig,
    PointCloud,
    clique_complex,
    ingest_hypergraph,
    neighborhood_graph,
    sample_clustered_points,
    vietoris_rips,
)
from scsparse.errors import EmptyInput, OddCount, ValidationError


def test_clustered_points_shape_and_offset():
    pc = sample_clustered_points(40, 3.0, 0)
    assert pc.points.shape == (40, 2)
    a, b = pc.points[:20].mean(axis=0), pc.points[20:].mean(axis=0)
    # cluster means sit near 0 and (3, 3)
    assert np.all(np.abs(a) < 0.8) and np.all(np.abs(b - 3.0) < 0.8)


def test_clustered_points_deterministic():
    a = sample_clustered_points(10, 3.0, 5).points
    b = sample_clustered_points(10, 3.0, 5).points
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, sample_clustered_points(10, 3.0, 6).points)


def test_box_muller_is_standard_normal():
    pts = sample_clustered_points(20000, 0.0, 1).points.ravel()
    assert abs(pts.mean()) < 0.02 and abs(pts.std() - 1.0) < 0.02


def test_zero_offset_same_distribution():
    pc = sample_clustered_points(2, 0.0, 3)
    assert pc.points.shape == (2, 2)


@pytest.mark.parametrize("m0", [7, 0, 1])
def test_odd_count(m0):
    with pytest.raises(OddCount):
        sample_clustered_points(m0, 3.0, 0)


def test_point_cloud_validation():
    with pytest.raises(ValidationError):
        PointCloud(np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        PointCloud(np.array([[0.0, np.inf]]))


def test_filtration_validation():
    with pytest.raises(ValidationError):
        FiltrationConfig(0.0)
    with pytest.raises(ValidationError):
        FiltrationConfig(1.0, 0)


def test_vr_below_min_distance():
    pc = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    c = vietoris_rips(pc, FiltrationConfig(0.5))
    assert c.counts == (3,)
    assert c.m(1) == 0


def test_vr_complete():
    pc = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    assert vietoris_rips(pc, FiltrationConfig(2.0, 2)).counts == (4, 6, 4)
    assert vietoris_rips(pc, FiltrationConfig(2.0, 3)).counts == (4, 6, 4, 1)


def test_vr_collinear():
    pc = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
    c = vietoris_rips(pc, FiltrationConfig(1.1, 2))
    assert c.level(1) == ((0, 1), (1, 2))
    assert c.m(2) == 0


def test_vr_matches_brute_force():
    from itertools import combinations

    pc = sample_clustered_points(16, 1.0, 4)
    eps = 1.2
    c = vietoris_rips(pc, FiltrationConfig(eps, 3))
    d = np.linalg.norm(pc.points[:, None] - pc.points[None], axis=-1)
    for size in range(2, 5):
        brute = [s for s in combinations(range(16), size) if all(d[a, b] <= eps for a, b in combinations(s, 2))]
        assert list(c.level(size - 1)) == brute


def test_clique_complex_from_adjacency():
    adj = neighborhood_graph(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]]), 1.0)
    assert clique_complex(adj, 2).counts == (3, 3, 1)


def test_hypergraph_closure():
    assert ingest_hypergraph([[1, 2, 3, 4]]).counts == (4, 6, 4)
    assert ingest_hypergraph([[1, 2, 3, 4]], closure_order=3).counts == (4, 6, 4, 1)


def test_hypergraph_skips_large_edges():
    big = list(range(10, 21))
    c = ingest_hypergraph([big, [1, 2]])
    assert c.counts == (2, 1)


def test_hypergraph_dedup():
    assert ingest_hypergraph([[1, 2, 3], [3, 2, 1]]) == ingest_hypergraph([[1, 2, 3]])


def test_hypergraph_empty():
    with pytest.raises(EmptyInput):
        ingest_hypergraph([list(range(20))])
