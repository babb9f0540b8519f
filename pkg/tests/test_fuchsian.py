import numpy as np
import pytest

from minkhull.fuchsian import (ORIGIN, BadDeterminant, DegenerateAxes, FuchsianGroup,
                               NormalizationData, NotHyperbolic, enumerate_orbit, fixed_points,
                               invert_word, is_isometry, length_spectrum, normalization_data,
                               normalize_representation, normalizing_conjugator, octagon_inradius,
                               polygon_area, reduce_word, sl2_to_so21, translation_length)
from minkhull.lorentz import GeometryError, boost, hyp_dist, mink_inner, radial_project, rotation


def random_sl2(rng, n):
    out = []
    while len(out) < n:
        m = rng.normal(size=(2, 2))
        d = np.linalg.det(m)
        if d > 0.1:
            out.append(m / np.sqrt(d))
    return out


def random_isometry(rng):
    return rotation(rng.uniform(0, 2 * np.pi)) @ boost(rng.uniform(-2, 2)) @ rotation(rng.uniform(0, 2 * np.pi))


class TestSL2:
    def test_identity(self):
        np.testing.assert_allclose(sl2_to_so21(np.eye(2)), np.eye(3), atol=1e-15)

    def test_diagonal_is_unit_boost(self):
        m = sl2_to_so21(np.diag([np.exp(0.5), np.exp(-0.5)]))
        assert is_isometry(m)
        assert translation_length(m) == pytest.approx(1.0, abs=1e-12)
        w = np.sort(np.linalg.eigvals(m).real)
        np.testing.assert_allclose(w, [np.exp(-1), 1.0, np.exp(1)], atol=1e-12)

    def test_homomorphism(self):
        rng = np.random.default_rng(42)
        ms = random_sl2(rng, 2000)
        for a, b in zip(ms[::2], ms[1::2]):
            lhs = sl2_to_so21(a @ b)
            rhs = sl2_to_so21(a) @ sl2_to_so21(b)
            np.testing.assert_allclose(lhs, rhs, atol=1e-9 * max(1.0, np.abs(lhs).max()))

    def test_image_in_identity_component(self):
        rng = np.random.default_rng(42)
        for m in random_sl2(rng, 100):
            assert is_isometry(sl2_to_so21(m), tol=1e-8)

    def test_bad_determinant(self):
        with pytest.raises(BadDeterminant):
            sl2_to_so21(np.diag([2.0, 1.0]))


class TestTranslationLength:
    def test_identity(self):
        assert translation_length(np.eye(3)) == 0.0

    def test_pure_boost(self):
        for t in (0.1, 1.0, 3.5):
            assert translation_length(boost(t)) == pytest.approx(t, abs=1e-12)

    def test_elliptic_raises(self):
        with pytest.raises(NotHyperbolic):
            translation_length(rotation(0.3))

    def test_conjugation_invariant(self, group):
        rng = np.random.default_rng(42)
        g = group.generators[0]
        L = translation_length(g)
        for _ in range(1000):
            h = random_isometry(rng)
            assert translation_length(h @ g @ np.linalg.inv(h)) == pytest.approx(L, abs=1e-8)

    def test_minimum_displacement(self, group):
        rng = np.random.default_rng(42)
        xy = rng.normal(scale=1.5, size=(1000, 2))
        x = np.column_stack([xy, np.sqrt(1 + np.sum(xy ** 2, axis=1))])
        for g in group.generators:
            d = hyp_dist(x, (g @ x.T).T)
            assert d.min() >= translation_length(g) - 1e-9


class TestOctagonGroup:
    def test_relator(self, group):
        assert group.relator_residual() <= 1e-8
        assert group.genus == 2 and len(group.generators) == 4

    def test_generators_preserve_form_and_future(self, group):
        for g in group.generators:
            assert is_isometry(g)
            assert (g @ ORIGIN)[2] > 0

    def test_equal_generator_lengths(self, group):
        L = length_spectrum(group, [(k,) for k in range(1, 5)])
        np.testing.assert_allclose(L, L[0], atol=1e-9)
        assert L[0] == pytest.approx(2 * octagon_inradius(), abs=1e-12)

    def test_domain_area(self, group):
        dom = group.domain
        assert dom.area == pytest.approx(4 * np.pi, abs=1e-3)
        assert polygon_area(dom.vertices) == pytest.approx(4 * np.pi, abs=1e-3)
        assert len(dom.vertices) == 8

    def test_domain_contains_origin(self, group):
        assert group.domain.contains(ORIGIN)
        g = group.generators[0]
        assert not group.domain.contains(g @ ORIGIN)

    def test_reduce_to_domain(self, group):
        rng = np.random.default_rng(42)
        xy = rng.normal(scale=3.0, size=(200, 2))
        x = np.column_stack([xy, np.sqrt(1 + np.sum(xy ** 2, axis=1))])
        g, xr = group.reduce_to_domain(x)
        assert np.all(group.domain.contains(xr, tol=1e-9))
        np.testing.assert_allclose(np.einsum("nij,nj->ni", g, x), xr, atol=1e-8)

    def test_json_roundtrip(self, group):
        g2 = FuchsianGroup.from_json(group.to_json())
        for a, b in zip(group.generators, g2.generators):
            np.testing.assert_array_equal(a, b)
        assert g2.relator == group.relator

    def test_rejects_bad_relator(self, group):
        gens = list(group.generators)
        gens[0] = boost(1.0)
        with pytest.raises(GeometryError):
            FuchsianGroup(tuple(gens), 2, group.relator)

    def test_short_word_displacement(self, group):
        """Some short nontrivial word moves every point by less than 2 arccosh(area/2pi + 1)."""
        rng = np.random.default_rng(42)
        R = 2 * np.arccosh(group.domain.area / (2 * np.pi) + 1)
        words, mats = group.elements_within(R + group.domain.circumradius)
        sel = [i for i, w in enumerate(words) if 0 < len(w) <= 8]
        xy = rng.normal(scale=0.6, size=(1000, 2))
        x = np.column_stack([xy, np.sqrt(1 + np.sum(xy ** 2, axis=1))])
        g, x = group.reduce_to_domain(x)
        imgs = np.einsum("nij,pj->pni", mats[sel], x)
        d = hyp_dist(x[:, None, :], imgs).min(axis=1)
        assert d.max() < R


class TestWords:
    def test_reduce(self):
        assert reduce_word((1, 2, -2, -1, 3)) == (3,)
        assert reduce_word((1, -1)) == ()

    def test_invert(self, group):
        w = (1, -3, 4, 2)
        m = group.word_matrix(w) @ group.word_matrix(invert_word(w))
        np.testing.assert_allclose(m, np.eye(3), atol=1e-12 * np.linalg.norm(group.word_matrix(w)) ** 2)

    def test_trivial_word_spectrum(self, group):
        assert length_spectrum(group, [(1, -1)]) == [0.0]

    def test_spectrum_conjugation_invariant(self, group):
        rng = np.random.default_rng(42)
        words = [(1,), (1, 2), (1, -3), (2, 4, -1)]
        h = random_isometry(rng)
        np.testing.assert_allclose(length_spectrum(group.conjugate(h), words),
                                   length_spectrum(group, words), atol=1e-8)


class TestOrbit:
    def test_small_radius_gives_point_only(self, group):
        p = radial_project(np.array([0.1, -0.05, 1.0]))
        orbit = enumerate_orbit(group, p, 0.45 * group.systole)
        assert len(orbit) == 1
        assert orbit[0][0] == ()

    def test_predicate_and_monotone(self, group):
        p = np.array([0.2, 0.1, 1.5])
        x = radial_project(p)
        small = enumerate_orbit(group, p, 3.0)
        big = enumerate_orbit(group, p, 4.0)
        for _, q in small:
            assert hyp_dist(x, radial_project(q)) <= 3.0 + 1e-12
        keys = {tuple(np.round(q, 8)) for _, q in big}
        assert all(tuple(np.round(q, 8)) in keys for _, q in small)
        assert len(big) > len(small)

    def test_distinct_points(self, group):
        pts = np.array([q for _, q in enumerate_orbit(group, ORIGIN, 4.0)])
        d = hyp_dist(pts[:, None], pts[None, :])
        np.fill_diagonal(d, np.inf)
        assert d.min() >= group.systole - 1e-6

    def test_exhaustive_word_search(self, group):
        """Every orbit point from words of length <= 3 within the radius is returned."""
        import itertools
        p = np.array([0.1, 0.2, 1.2])
        x = radial_project(p)
        found = {tuple(np.round(q, 6)) for _, q in enumerate_orbit(group, p, 3.0)}
        letters = [1, -1, 2, -2, 3, -3, 4, -4]
        for n in range(1, 4):
            for w in itertools.product(letters, repeat=n):
                q = group.word_matrix(w) @ p
                if hyp_dist(x, radial_project(q)) <= 3.0 - 1e-9:
                    assert tuple(np.round(q, 6)) in found

    def test_orbit_growth(self, group):
        counts = [len(enumerate_orbit(group, ORIGIN, r)) for r in (2.0, 3.0, 4.0, 5.0)]
        assert counts == sorted(counts)


class TestNormalization:
    def test_already_normalized(self, group):
        h = normalizing_conjugator(group, normalization_data(group))
        np.testing.assert_allclose(h, np.eye(3), atol=1e-9)

    def test_recovers_fixed_points(self, group):
        rng = np.random.default_rng(42)
        nd = normalization_data(group)
        for _ in range(5):
            moved = group.conjugate(random_isometry(rng))
            out = normalize_representation(moved, nd)
            got = normalization_data(out)
            for a, b in ((got.a, nd.a), (got.b, nd.b), (got.c, nd.c)):
                np.testing.assert_allclose(a, b, atol=1e-8)
            np.testing.assert_allclose(length_spectrum(out, [(1,), (2,), (1, 2)]),
                                       length_spectrum(group, [(1,), (2,), (1, 2)]), atol=1e-8)

    def test_fixed_points_are_eigenvectors(self, group):
        g = group.generators[0]
        a, b = fixed_points(g)
        L = translation_length(g)
        np.testing.assert_allclose(g @ a, np.exp(L) * a, atol=1e-8)
        np.testing.assert_allclose(g @ b, np.exp(-L) * b, atol=1e-8)
        assert abs(mink_inner(a, a)) < 1e-9

    def test_normalization_data_validation(self):
        a = np.array([1.0, 0.0, 1.0])
        with pytest.raises(GeometryError):
            NormalizationData(a, a, np.array([0.0, 1.0, 1.0]))
        with pytest.raises(GeometryError):
            NormalizationData(np.array([0.5, 0, 1.0]), a, np.array([0.0, 1.0, 1.0]))

    def test_degenerate_axes(self, group):
        g = group.generators[0]
        bad = FuchsianGroup.__new__(FuchsianGroup)
        object.__setattr__(bad, "generators", (g, g, g, g))
        object.__setattr__(bad, "_cache", {})
        with pytest.raises(DegenerateAxes):
            normalizing_conjugator(bad, normalization_data(group))
