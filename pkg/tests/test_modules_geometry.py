from pathlib import Path
import numpy as np
import pytest

import src.modules.Geometry as Geometry

BASE_DIR = Path(__file__).parent

right_triangle = Geometry.Configuration(Dim=2, Points=((0, 0), (3, 0), (0, 4)))
unit_square = Geometry.Configuration(Dim=2, Points=((0, 0), (1, 0), (0, 1), (1, 1)))


def random_orthogonal(rng, d):
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    return q


def test_configuration():
    assert right_triangle.n == 3
    assert right_triangle.Points[1] == (3.0, 0.0)
    assert right_triangle.diameter() == pytest.approx(5.0)
    assert right_triangle.subset([3, 1]).Points == ((0.0, 4.0), (0.0, 0.0))
    assert right_triangle.scaled(2).Points[2] == (0.0, 8.0)

    with pytest.raises(Geometry.GeometryError):
        Geometry.Configuration(Dim=2, Points=((0, 0), (1, 2, 3)))
    with pytest.raises(Geometry.GeometryError):
        Geometry.Configuration(Dim=0, Points=((),))
    with pytest.raises(IndexError):
        right_triangle.subset([4])


def test_edge_indexing():
    indexing = Geometry.EdgeIndexing(4)
    assert indexing.Count == 6
    assert indexing.Edges == ((1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4))
    for k, (i, j) in enumerate(indexing.Edges):
        assert indexing.index(i, j) == k
        assert indexing.index(j, i) == k
        assert indexing.pair(k) == (i, j)

    assert Geometry.edge_index(4, 5) == 9
    with pytest.raises(IndexError):
        indexing.index(1, 5)
    with pytest.raises(IndexError):
        indexing.pair(6)
    with pytest.raises(IndexError):
        Geometry.edge_index(2, 2)


def test_squared_distance():
    assert Geometry.squared_distance(right_triangle, 2, 3) == pytest.approx(25.0)
    assert Geometry.squared_distance(right_triangle, 1, 1) == 0.0
    with pytest.raises(IndexError):
        Geometry.squared_distance(right_triangle, 1, 4)


def test_measure_all_lengths():
    assert Geometry.measure_all_lengths(right_triangle) == pytest.approx([3.0, 4.0, 5.0])

    coincident = Geometry.Configuration(Dim=2, Points=((1, 1), (1, 1), (2, 1)))
    lengths = Geometry.measure_all_lengths(coincident)
    assert lengths[0] == 0.0
    assert lengths[1:] == pytest.approx([1.0, 1.0])


def test_cayley_menger_det():
    assert Geometry.cayley_menger_det([1, 1, 1], 1) == pytest.approx(3.0)
    assert Geometry.cayley_menger_det([1, 4, 1], 1) == pytest.approx(0.0)
    assert not Geometry.is_cayley_menger_zero([1, 1, 1], 1)
    assert Geometry.is_cayley_menger_zero([1, 4, 1], 1)

    with pytest.raises(Geometry.GeometryError):
        Geometry.cayley_menger_det([1, 1], 1)


def test_cayley_menger_planar_quadruples():
    rng = np.random.default_rng(7)
    for _ in range(100):
        cfg = Geometry.Configuration.from_array(rng.random((4, 2)))
        assert Geometry.is_cayley_menger_zero(Geometry.squared_lengths(cfg), 2)


def test_cayley_menger_tetrahedron_volume():
    rng = np.random.default_rng(11)
    for _ in range(100):
        points = rng.random((4, 3))
        volume = abs(np.linalg.det(points[1:] - points[0])) / 6.0
        det = Geometry.cayley_menger_det(Geometry.squared_lengths(points), 2)
        assert det == pytest.approx(288.0 * volume ** 2, rel=1e-8, abs=1e-12)


def test_embed_simplex():
    embedded = Geometry.embed_simplex([1, 4, 1], 1)
    assert embedded.array().ravel() == pytest.approx([0.0, 1.0, 2.0])

    embedded = Geometry.embed_simplex(Geometry.squared_lengths(unit_square), 2)
    points = embedded.array()
    assert Geometry.are_congruent(embedded, unit_square)
    assert points[0] == pytest.approx([0.0, 0.0])
    assert points[1][0] > 0 and points[1][1] == pytest.approx(0.0)
    assert points[2][1] > 0

    with pytest.raises(Geometry.NotRealizable):
        Geometry.embed_simplex([1, 1, 1], 1)

    collinear = Geometry.Configuration(Dim=2, Points=((0, 0), (1, 0), (2, 0), (3, 0)))
    with pytest.raises(Geometry.Degenerate):
        Geometry.embed_simplex(Geometry.squared_lengths(collinear), 2)


def test_embed_simplex_thin_frame():
    thin = Geometry.Configuration(Dim=2, Points=((0.8445, 0.5167), (0.3756, 0.9886), (0.7361, 0.6291), (0.0111, 0.1952)))
    embedded = Geometry.embed_simplex(Geometry.squared_lengths(thin), 2)
    assert Geometry.are_congruent(embedded, thin)


def test_embed_simplex_collinear_leading_points():
    cfg = Geometry.Configuration(Dim=2, Points=((0, 0), (1, 0), (2, 0), (0, 1)))
    embedded = Geometry.embed_simplex(Geometry.squared_lengths(cfg), 2)
    points = embedded.array()
    assert Geometry.are_congruent(embedded, cfg)
    assert points[0] == pytest.approx([0.0, 0.0])
    assert points[1][0] > 0 and points[1][1] == pytest.approx(0.0, abs=1e-12)
    assert points[3][1] > 0


@pytest.mark.parametrize("d", [2, 3])
def test_embed_simplex_round_trip(d):
    rng = np.random.default_rng(d)
    for _ in range(50):
        cfg = Geometry.Configuration.from_array(rng.random((d + 2, d)))
        embedded = Geometry.embed_simplex(Geometry.squared_lengths(cfg), d)
        assert Geometry.are_congruent(embedded, cfg)


def test_realizability():
    assert Geometry.realizability(Geometry.squared_lengths(unit_square), 4, 2) == (True, True)
    assert Geometry.realizability([1, 1, 1], 3, 1) == (True, False)
    assert Geometry.realizability([1, 9, 1], 3, 2)[0] is False


def test_congruence_and_similarity():
    rng = np.random.default_rng(3)
    points = rng.random((5, 2))
    cfg = Geometry.Configuration.from_array(points)
    moved = Geometry.Configuration.from_array(points @ random_orthogonal(rng, 2) + [4.0, -2.0])
    reflected = Geometry.Configuration.from_array(points * [-1.0, 1.0])

    assert Geometry.are_congruent(cfg, moved)
    assert Geometry.are_congruent(cfg, reflected)
    assert not Geometry.are_congruent(cfg, cfg.scaled(2))
    assert Geometry.are_similar_ordered(cfg, moved) == pytest.approx(1.0)
    assert Geometry.are_similar_ordered(cfg, cfg.scaled(3)) == pytest.approx(3.0)

    other = Geometry.Configuration.from_array(rng.random((5, 2)))
    assert Geometry.are_similar_ordered(cfg, other) is None

    with pytest.raises(Geometry.GeometryError):
        Geometry.are_congruent(cfg, right_triangle)


def test_align_onto():
    anchors = right_triangle.array()
    extra = np.array([1.0, 1.0])
    assert Geometry.align_onto(anchors, anchors, extra) == pytest.approx(extra)
    assert Geometry.align_onto(anchors, anchors + [2.0, 5.0], extra) == pytest.approx([3.0, 6.0])

    rng = np.random.default_rng(5)
    for d in (2, 3):
        for _ in range(20):
            points = rng.random((d + 2, d))
            rotation = random_orthogonal(rng, d)
            shift = rng.normal(size=d)
            image = points @ rotation + shift
            found = Geometry.align_onto(points[:d + 1], image[:d + 1], points[d + 1])
            assert found == pytest.approx(image[d + 1], abs=1e-9)


def test_align_onto_rejects():
    collinear = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(Geometry.AnchorsDegenerate):
        Geometry.align_onto(collinear, collinear, [0.0, 1.0])
    with pytest.raises(Geometry.AnchorsDegenerate):
        Geometry.align_onto(collinear[:2], collinear[:2], [0.0, 1.0])

    anchors = right_triangle.array()
    with pytest.raises(Geometry.NotCongruent):
        Geometry.align_onto(anchors, 2.0 * anchors, [1.0, 1.0])


def test_separation_ratio():
    assert Geometry.separation_ratio(right_triangle.array()) == pytest.approx(0.6)
    assert Geometry.separation_ratio(np.zeros((2, 2))) == 0.0
    assert Geometry.separation_ratio(np.zeros((1, 2))) == 1.0
