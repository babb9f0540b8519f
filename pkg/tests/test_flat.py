import numpy as np
import pytest

from helpers import grid_metric, locate, to_plane
from minkhull.flat import NotSpacelikeFace, face_euclidean_embed
from minkhull.lorentz import GeometryError, boost, mink_inner, rotation


def mink_dist(a, b):
    d = a - b
    return np.sqrt(mink_inner(d, d))


class TestEmbed:
    def test_horizontal_triangle(self):
        pts = np.array([[0.0, 0, 0], [3, 0, 0], [0, 4, 0]])
        coords, _, _ = face_euclidean_embed(pts)
        for i in range(3):
            for j in range(3):
                assert np.linalg.norm(coords[i] - coords[j]) == pytest.approx(
                    np.linalg.norm(pts[i] - pts[j]), abs=1e-12)

    def test_spacelike_face_lengths(self):
        rng = np.random.default_rng(42)
        m = rotation(0.3) @ boost(1.2)
        pts = (m @ np.column_stack([rng.normal(size=(5, 2)), np.full(5, 2.0)]).T).T
        coords, origin, basis = face_euclidean_embed(pts)
        for i in range(5):
            for j in range(i + 1, 5):
                assert np.linalg.norm(coords[i] - coords[j]) == pytest.approx(
                    mink_dist(pts[i], pts[j]), rel=1e-12)
        np.testing.assert_allclose(mink_inner(basis[:, None], basis[None]), np.eye(2), atol=1e-12)

    def test_boost_invariance(self):
        pts = np.array([[0.0, 0, 1], [1, 0, 1], [0, 1, 1]])
        c1, _, _ = face_euclidean_embed(pts)
        c2, _, _ = face_euclidean_embed((boost(0.8) @ pts.T).T)
        d1 = np.linalg.norm(c1[:, None] - c1[None], axis=-1)
        d2 = np.linalg.norm(c2[:, None] - c2[None], axis=-1)
        np.testing.assert_allclose(d1, d2, atol=1e-12)

    def test_timelike_plane_rejected(self):
        pts = np.array([[0.0, 0, 0], [0, 0, 1], [0, 0.1, 2]])
        with pytest.raises(NotSpacelikeFace):
            face_euclidean_embed(pts)


class TestGridGeodesics:
    def test_convex_patch_is_euclidean(self):
        cm, corners = grid_metric([(i, j) for i in range(3) for j in range(3)])
        rng = np.random.default_rng(42)
        g = cm.graph(8)
        for _ in range(50):
            a, b = rng.uniform(0.01, 2.99, size=(2, 2))
            d = g.path(locate(cm, corners, a), locate(cm, corners, b)).length
            assert d == pytest.approx(np.linalg.norm(a - b), abs=1e-9)

    def test_graph_distance_overestimates(self):
        cm, corners = grid_metric([(i, j) for i in range(2) for j in range(2)])
        g = cm.graph(4)
        p, q = locate(cm, corners, [0.13, 0.21]), locate(cm, corners, [1.77, 1.4])
        exact = np.linalg.norm([1.64, 1.19])
        assert g.distance(p, q) >= exact - 1e-12
        assert g.path(p, q, taut=False).length == pytest.approx(g.distance(p, q))

    def test_reflex_corner(self):
        cm, corners = grid_metric([(0, 0), (1, 0), (0, 1)])
        a, b = np.array([1.8, 0.5]), np.array([0.5, 1.8])
        path = cm.graph(8).path(locate(cm, corners, a), locate(cm, corners, b))
        corner = np.array([1.0, 1.0])
        assert path.length == pytest.approx(np.linalg.norm(a - corner) + np.linalg.norm(b - corner), abs=1e-9)
        assert path.vertex_passages

    def test_torus_wraps(self):
        cells = [(i, j) for i in range(3) for j in range(3)]
        cm, corners = grid_metric(cells, wrap=(3, 3))
        assert cm.is_closed() and cm.euler_characteristic() == 0
        np.testing.assert_allclose(cm.cone_angles(), 2 * np.pi, atol=1e-12)
        p, q = locate(cm, corners, [0.2, 0.3]), locate(cm, corners, [2.7, 2.9])
        assert cm.graph(8).path(p, q).length == pytest.approx(np.hypot(0.5, 0.4), abs=1e-9)

    def test_path_at_arclength(self):
        cm, corners = grid_metric([(i, j) for i in range(2) for j in range(2)])
        a, b = np.array([0.1, 0.2]), np.array([1.9, 1.3])
        path = cm.graph(8).path(locate(cm, corners, a), locate(cm, corners, b))
        for s in (0.0, 0.3, 1.0, path.length):
            x = to_plane(cm, corners, path.at(s))
            np.testing.assert_allclose(x, a + (b - a) * s / path.length, atol=1e-9)

    def test_symmetry_and_triangle_inequality(self):
        cm, corners = grid_metric([(0, 0), (1, 0), (0, 1), (2, 0), (2, 1)])
        rng = np.random.default_rng(42)
        pts = cm.sample_points(12, rng)
        d = cm.sampled(pts).d
        np.testing.assert_allclose(d, d.T, atol=1e-12)
        for j in range(len(pts)):
            assert np.all(d <= d[:, j:j + 1] + d[j:j + 1, :] + 1e-9)


class TestTrace:
    def test_straight_ray(self):
        cm, corners = grid_metric([(i, j) for i in range(3) for j in range(3)])
        start = np.array([0.2, 0.35])
        t, z = locate(cm, corners, start)
        # direction in the local frame of triangle t
        c = cm.flat().coords[t]
        P = corners[t]
        A = np.column_stack([c[1] - c[0], c[2] - c[0]]) @ np.linalg.inv(np.column_stack([P[1] - P[0], P[2] - P[0]]))
        v = A @ np.array([np.cos(0.4), np.sin(0.4)])
        end = cm.flat().trace(t, z, v, 2.0)
        np.testing.assert_allclose(to_plane(cm, corners, end), start + 2.0 * np.array([np.cos(0.4), np.sin(0.4)]),
                                   atol=1e-12)

    def test_leaves_complex(self):
        cm, corners = grid_metric([(0, 0)])
        t, z = locate(cm, corners, [0.3, 0.6])
        with pytest.raises(GeometryError):
            cm.flat().trace(t, z, np.array([1.0, 0.0]), 5.0)

    def test_across(self):
        cm, _ = grid_metric([(0, 0), (1, 0)])
        fc = cm.flat()
        assert fc.across(0, 2) == (1, 0)
        assert fc.across(0, 1) == (3, 2)
        assert fc.across(0, 0) is None
