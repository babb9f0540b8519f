import numpy as np
import pytest

from minkhull.fuchsian import ORIGIN
from minkhull.hull import (DomainTooSmall, HullError, alpha_beta, fuchsian_hull, lower_faces,
                           radial_function, sample_domain, support_face_at)
from minkhull.intrinsic import planar_section, polyline_length
from minkhull.io import hull_off, read_off
from minkhull.lorentz import NotFutureTimelike, hyp_dist, mink_inner, mink_sq, radial_project


def random_future(rng, n, group):
    x = sample_domain(group, n, rng)
    return x * rng.uniform(0.5, 3.0, size=(n, 1))


class TestStructure:
    @pytest.mark.parametrize("name", ["single_hull", "small_hull"])
    def test_faces_planar_and_convex(self, name, request):
        hull = request.getfixturevalue(name)
        verts = hull.vertices
        assert np.all(mink_sq(verts) < 0) and np.all(verts[:, 2] > 0)
        for plane, cyc in hull.faces:
            assert abs(mink_sq(plane.eta) + 1) < 1e-12 * plane.eta[2] ** 2 and plane.eta[2] > 0
            assert plane.c < 0
            scale = np.abs(verts[cyc]).max() * plane.eta[2]
            np.testing.assert_allclose(plane.value(verts[cyc]), 0, atol=1e-12 * scale)
        for rep in hull.reps:
            # future convexity against every cover vertex
            val = mink_inner(verts, rep.plane.eta) - rep.plane.c
            assert val.max() <= 1e-9 * max(1, abs(rep.plane.c))

    @pytest.mark.parametrize("name", ["single_hull", "small_hull"])
    def test_edges_spacelike(self, name, request):
        hull = request.getfixturevalue(name)
        v = hull.vertices
        for a, b in hull.edges:
            assert mink_sq(v[a] - v[b]) > 0

    @pytest.mark.parametrize("name", ["single_hull", "small_hull", "dense_hull"])
    def test_euler_characteristic(self, name, request):
        assert request.getfixturevalue(name).euler_characteristic() == -2

    def test_single_orbit_vertices_on_hyperboloid(self, single_hull):
        f = -mink_sq(single_hull.vertices)
        np.testing.assert_allclose(f, 1.0, atol=1e-9)
        assert len(single_hull.vertex_classes) == 1

    def test_faces_equivariant(self, small_hull, group):
        h = small_hull.hconvex
        for rep in small_hull.reps:
            for g in group.generators:
                y = (g @ rep.points.T).T
                np.testing.assert_allclose(h.radial_function(radial_project(y)),
                                           np.sqrt(-mink_sq(y)), rtol=1e-9)

    def test_domain_too_small(self, group):
        with pytest.raises(DomainTooSmall):
            fuchsian_hull(group, np.array([[0.0, 0.0, 1.0]]), 1.0)

    def test_rejects_non_timelike_seeds(self, group):
        with pytest.raises(NotFutureTimelike):
            fuchsian_hull(group, np.array([[2.0, 0.0, 1.0]]), 5.0)
        with pytest.raises(HullError):
            fuchsian_hull(group, np.zeros((0, 3)), 5.0)

    def test_lower_faces_cube_top(self):
        # lower hull of a tetrahedron above the plane x3 = 1
        pts = np.array([[0, 0, 1.0], [0.3, 0, 1.0], [0, 0.3, 1.0], [0.1, 0.1, 2.0]])
        faces, planes, spacelike = lower_faces(pts)
        k = [i for i, f in enumerate(faces) if sorted(f) == [0, 1, 2]][0]
        assert spacelike[k]
        np.testing.assert_allclose(planes[k].eta, [0, 0, 1], atol=1e-12)
        assert planes[k].c == pytest.approx(-1.0)

    def test_off_roundtrip(self, single_hull):
        v, faces = read_off(hull_off(single_hull))
        np.testing.assert_array_equal(v, single_hull.vertices)
        assert len(faces) == len(single_hull.faces)


class TestRadialFunction:
    def test_vertex_values(self, small_hull):
        h = small_hull.hconvex
        v = small_hull.vertices[:50]
        np.testing.assert_allclose(h.radial_function(radial_project(v)), np.sqrt(-mink_sq(v)), rtol=1e-9)

    def test_single_orbit_bounds(self, single_hull, group):
        h = single_hull.hconvex
        x = sample_domain(group, 2000, np.random.default_rng(42))
        u = h.radial_function(x)
        assert u.min() >= 1 - 1e-12
        vx = radial_project(single_hull.vertices)
        np.testing.assert_allclose(h.radial_function(vx), 1.0, atol=1e-9)
        # away from the vertex orbit the surface is strictly outside H^2
        far = hyp_dist(x[:, None], vx[None]).min(axis=1) > 1e-3
        assert np.all(u[far] > 1)

    def test_equivariance(self, small_hull, group):
        rng = np.random.default_rng(42)
        h = small_hull.hconvex
        x = sample_domain(group, 1000, rng)
        gi = rng.integers(0, 4, size=1000)
        gx = np.array([group.generators[i] @ xi for i, xi in zip(gi, x)])
        np.testing.assert_allclose(h.radial_function(gx), h.radial_function(x), rtol=1e-9)

    def test_support_face(self, small_hull, group):
        h = small_hull.hconvex
        for x in sample_domain(group, 100, np.random.default_rng(42)):
            key, plane = support_face_at(h, x)
            u = radial_function(h, x)
            assert plane.value(u * x) == pytest.approx(0.0, abs=1e-9)

    def test_support_face_tie_break_on_edge(self, small_hull):
        h = small_hull.hconvex
        patch = small_hull.default_patch
        (a, b), occ = next(iter(patch.edges.items()))
        mid = radial_project(0.5 * (patch.vertex_pos[a] + patch.vertex_pos[b]))
        key, plane = h.support_face_at(mid)
        keys = [patch.face_keys[f] for f, _ in occ]
        assert key in keys

    def test_interior_point(self, small_hull):
        h = small_hull.hconvex
        rep = small_hull.reps[0]
        key, plane = h.support_face_at(rep.centroid)
        assert key[1] == 0
        np.testing.assert_allclose(plane.eta, rep.plane.eta, atol=1e-9)

    def test_minus_inverse_convex(self, small_hull, group):
        rng = np.random.default_rng(42)
        h = small_hull.hconvex
        n = 10_000
        y1, y2 = random_future(rng, n, group), random_future(rng, n, group)
        t = rng.uniform(0, 1, size=n)
        mid = t[:, None] * y1 + (1 - t)[:, None] * y2
        lhs = -1 / h.U(mid)
        rhs = -t / h.U(y1) - (1 - t) / h.U(y2)
        assert np.max(lhs - rhs) <= 1e-9

    def test_chords_spacelike(self, small_hull, group):
        rng = np.random.default_rng(42)
        h = small_hull.hconvex
        x, y = sample_domain(group, 10_000, rng), sample_domain(group, 10_000, rng)
        p = h.radial_function(x)[:, None] * x
        q = h.radial_function(y)[:, None] * y
        far = np.linalg.norm(p - q, axis=1) > 1e-9
        assert np.all(mink_sq(p - q)[far] > 0)

    def test_planar_section_shorter_than_chord(self, small_hull, group):
        rng = np.random.default_rng(42)
        h = small_hull.hconvex
        for _ in range(20):
            x, y = sample_domain(group, 2, rng)
            p, q = h.surface_point(x)[1], h.surface_point(y)[1]
            sec = planar_section(h, p, q)
            assert polyline_length(sec) <= np.sqrt(mink_sq(p - q)) + 1e-9

    def test_lipschitz_finite(self, small_hull, group):
        rng = np.random.default_rng(42)
        h = small_hull.hconvex
        x, y = sample_domain(group, 2000, rng), sample_domain(group, 2000, rng)
        d = hyp_dist(x, y)
        ok = d > 1e-6
        L = np.max(np.abs(h.radial_function(x) - h.radial_function(y))[ok] / d[ok])
        assert np.isfinite(L)
        print(f"empirical Lipschitz constant of u: {L:.4f}")


class TestAlphaBeta:
    def test_single_orbit(self, single_hull):
        a, b = alpha_beta(single_hull.hconvex)
        assert a == pytest.approx(1.0, abs=1e-9)
        assert b > 1
        lo, hi = single_hull.hconvex.mesh_extremes(0.05)
        assert a - 1e-9 <= lo <= hi <= b + 1e-9

    def test_dense_near_constant(self, small_hull, dense_hull):
        a1, b1 = small_hull.hconvex.alpha_beta()
        a2, b2 = dense_hull.hconvex.alpha_beta()
        assert a1 == pytest.approx(2.0, abs=1e-9) and a2 == pytest.approx(2.0, abs=1e-9)
        assert b2 - 2 < b1 - 2
        assert b2 - 2 < 0.05

    def test_homogeneity(self, small_hull):
        s = 1.7
        scaled = small_hull.scaled(s)
        a, b = small_hull.hconvex.alpha_beta()
        a2, b2 = scaled.hconvex.alpha_beta()
        assert a2 == pytest.approx(s * a, rel=1e-9) and b2 == pytest.approx(s * b, rel=1e-9)
        x = sample_domain(small_hull.group, 100, np.random.default_rng(42))
        np.testing.assert_allclose(scaled.hconvex.radial_function(x),
                                   s * small_hull.hconvex.radial_function(x), rtol=1e-9)

    def test_alpha_below_beta(self, single_hull, small_hull, dense_hull):
        for hull in (single_hull, small_hull, dense_hull):
            a, b = hull.hconvex.alpha_beta()
            assert a <= b


def test_origin_value_single(single_hull):
    # the origin is the seed, so the surface passes through it
    assert single_hull.hconvex.radial_function(ORIGIN) == pytest.approx(1.0, abs=1e-9)
