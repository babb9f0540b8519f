"""Fuchsian surface groups in O_0(2,1).

Group elements are 3x3 numpy arrays acting on column vectors.  Words are
tuples of nonzero ints: ``k`` stands for generator ``k`` (1-based) and
``-k`` for its inverse.

Orbit enumeration works tile by tile.  The Dirichlet domain ``D`` centred
at the origin ``o = (0, 0, 1)`` is computed first, and certified by
comparing its area with ``2*pi*(2g - 2)``.  Tiles ``hD`` and ``hwD`` are
adjacent whenever ``w`` is a side pairing of ``D``, and every tile met by
the geodesic from ``o`` to ``g o`` has its centre within
``d(o, g o) + circumradius(D)`` of ``o``.  A breadth-first search over
side pairings, pruned at that bound, therefore reaches every element
with ``d(o, g o) <= r``.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .lorentz import (
    J, GeometryError, boost, hyp_dist, lorentz_inverse, mink_inner,
    radial_project, rotation,
)

ORIGIN = np.array([0.0, 0.0, 1.0])
ISOMETRY_TOL = 1e-9
RELATOR_TOL = 1e-8
IDENTITY_TOL = 1e-8
TRACE_TOL = 1e-9
DEFAULT_ORBIT_CAP = 10**6
DEDUP_TOL = 1e-3


class BadDeterminant(GeometryError):
    pass


class NotHyperbolic(GeometryError):
    """Elliptic or parabolic element where a hyperbolic one is required."""


class DegenerateAxes(GeometryError):
    pass


class RadiusTooLarge(GeometryError):
    pass


class DomainNotCertified(GeometryError):
    pass


def is_isometry(m, tol=ISOMETRY_TOL):
    m = np.asarray(m, dtype=float)
    return (np.allclose(m.T @ J @ m, J, atol=tol, rtol=0)
            and np.linalg.det(m) > 0 and m[2, 2] > 0)


def sl2_to_so21(m):
    """Image of an SL(2, R) matrix in SO_0(2,1).

    R^{2,1} is identified with symmetric 2x2 matrices through
    x -> [[x3 + x1, x2], [x2, x3 - x1]], whose determinant is -<x,x>;
    ``m`` acts by X -> m X m^T.
    """
    m = np.asarray(m, dtype=float)
    if abs(np.linalg.det(m) - 1.0) > 1e-12:
        raise BadDeterminant(f"det = {np.linalg.det(m)!r}")
    out = np.empty((3, 3))
    for k, e in enumerate(np.eye(3)):
        x = np.array([[e[2] + e[0], e[1]], [e[1], e[2] - e[0]]])
        y = m @ x @ m.T
        out[:, k] = [(y[0, 0] - y[1, 1]) / 2, y[0, 1], (y[0, 0] + y[1, 1]) / 2]
    return out


def translation_length(m):
    """Hyperbolic translation length arccosh((tr m - 1)/2); 0 for the identity."""
    m = np.asarray(m, dtype=float)
    if np.linalg.norm(m - np.eye(3)) < IDENTITY_TOL:
        return 0.0
    tr = np.trace(m)
    if tr < 3.0 + TRACE_TOL:
        kind = "parabolic" if tr > 3.0 - TRACE_TOL else "elliptic"
        raise NotHyperbolic(f"trace {tr!r}: {kind} element")
    return float(np.arccosh((tr - 1.0) / 2.0))


def fixed_points(m):
    """Attractive and repulsive fixed points on the circle at infinity.

    Returned as lightlike vectors scaled to third coordinate 1.
    """
    translation_length(m)  # raises unless hyperbolic
    w, v = np.linalg.eig(np.asarray(m, dtype=float))
    w = w.real
    v = v.real
    order = np.argsort(w)
    pts = []
    for k in (order[-1], order[0]):
        p = v[:, k]
        pts.append(p / p[2])
    return pts[0], pts[1]


def reduce_word(word):
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word):
    return tuple(-letter for letter in reversed(word))


def octagon_inradius():
    """Inradius r of the regular hyperbolic octagon with angle sum 2*pi.

    The right triangle (centre, side midpoint, vertex) has angles pi/8 and
    theta/2, so cos(theta/2) = cosh(r) sin(pi/8); r solves theta = pi/4.
    """
    s = np.sin(np.pi / 8)
    angle = lambda r: 2.0 * np.arccos(np.clip(np.cosh(r) * s, -1.0, 1.0))
    hi = np.arccosh(1.0 / s)
    return brentq(lambda r: 8 * angle(r) - 2 * np.pi, 1e-6, hi - 1e-12, xtol=1e-15)


class PointIndex:
    """Spatial hash for deduplicating points up to a tolerance."""

    def __init__(self, cell=1e-3):
        self.cell = cell
        self.cells = {}

    def _key(self, p):
        return tuple(np.floor(np.asarray(p) / self.cell).astype(np.int64))

    def find(self, p, tol=None):
        tol = self.cell / 2 if tol is None else tol
        k = self._key(p)
        best, best_d = None, tol
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for idx, q in self.cells.get((k[0] + dx, k[1] + dy, k[2] + dz), ()):
                        d = np.max(np.abs(q - p))
                        if d <= best_d:
                            best, best_d = idx, d
        return best

    def add(self, p, idx):
        self.cells.setdefault(self._key(p), []).append((idx, np.asarray(p, float)))


@dataclass(frozen=True)
class DirichletDomain:
    """Dirichlet polygon at the origin.

    ``vertices`` lie on H^2 in counterclockwise order; side ``k`` joins
    vertex ``k`` to vertex ``k+1`` and lies on the bisector of ``o`` and
    ``pairings[k] o``.
    """
    vertices: np.ndarray
    pairings: tuple
    pairing_words: tuple
    area: float
    circumradius: float
    inradius: float

    @cached_property
    def normals(self):
        # x is in D iff <x, w o - o> <= 0 for every side element w
        return np.array([m @ ORIGIN - ORIGIN for m in self.pairings])

    @property
    def diameter(self):
        v = self.vertices
        return float(max(hyp_dist(a, b) for a in v for b in v))

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        vals = mink_inner(x[..., None, :], self.normals)
        scale = np.abs(x[..., 2])[..., None] * (1.0 + np.abs(self.normals[:, 2]))
        return np.all(vals <= tol * scale, axis=-1)


def _clip_polygon(poly, labels, a, b, label):
    n = len(poly)
    vals = [a @ p - b for p in poly]
    if all(v <= 0 for v in vals):
        return poly, labels
    out, out_labels = [], []
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = vals[i], vals[(i + 1) % n]
        if fp <= 0:
            out.append(p)
            out_labels.append(labels[i] if fq <= 0 else labels[i])
            if fq > 0:
                t = fp / (fp - fq)
                out.append(p + t * (q - p))
                out_labels.append(label)
        elif fq <= 0:
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
            out_labels.append(labels[i])
    # drop duplicate vertices created by clipping through a vertex
    keep_p, keep_l = [], []
    for p, l in zip(out, out_labels):
        if keep_p and np.max(np.abs(p - keep_p[-1])) < 1e-14:
            keep_l[-1] = l
            continue
        keep_p.append(p)
        keep_l.append(l)
    if len(keep_p) > 1 and np.max(np.abs(keep_p[0] - keep_p[-1])) < 1e-14:
        keep_p.pop()
        keep_l.pop()
    return keep_p, keep_l


def _klein_to_hyperboloid(k):
    k = np.asarray(k, dtype=float)
    return np.array([k[0], k[1], 1.0]) / np.sqrt(1.0 - k @ k)


def polygon_angles(vertices):
    """Interior angles of a convex hyperbolic polygon given on H^2."""
    n = len(vertices)
    angles = []
    for i in range(n):
        v = vertices[i]
        tangents = []
        for w in (vertices[i - 1], vertices[(i + 1) % n]):
            t = w + mink_inner(w, v) * v
            tangents.append(t / np.sqrt(mink_inner(t, t)))
        c = np.clip(mink_inner(tangents[0], tangents[1]), -1.0, 1.0)
        angles.append(np.arccos(c))
    return np.array(angles)


def polygon_area(vertices):
    return float((len(vertices) - 2) * np.pi - np.sum(polygon_angles(vertices)))


@dataclass(frozen=True, eq=False)
class FuchsianGroup:
    """A genus-g surface group given by 2g generators and one relator."""
    generators: tuple
    genus: int
    relator: tuple
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(np.array(g, dtype=float) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relator", tuple(int(x) for x in self.relator))
        if self.genus < 2:
            raise GeometryError("genus must be at least 2")
        if len(gens) != 2 * self.genus:
            raise GeometryError(f"need {2 * self.genus} generators, got {len(gens)}")
        for g in gens:
            if not is_isometry(g):
                raise GeometryError("generator is not in O_0(2,1)")
            if translation_length(g) <= 0:
                raise NotHyperbolic("generator is the identity")
        if self.relator_residual() > RELATOR_TOL:
            raise GeometryError(f"relator residual {self.relator_residual():.3e}")

    # -- words -----------------------------------------------------------

    def letter(self, k):
        g = self.generators[abs(k) - 1]
        return g if k > 0 else lorentz_inverse(g)

    def word_matrix(self, word):
        m = np.eye(3)
        for k in word:
            m = m @ self.letter(k)
        return m

    def relator_residual(self):
        return float(np.linalg.norm(self.word_matrix(self.relator) - np.eye(3)))

    def conjugate(self, h):
        """The group h G h^{-1}."""
        h = np.asarray(h, dtype=float)
        hi = lorentz_inverse(h)
        return FuchsianGroup(tuple(h @ g @ hi for g in self.generators),
                             self.genus, self.relator, self.name)

    # -- Dirichlet domain --------------------------------------------------

    @property
    def expected_area(self):
        return 2 * np.pi * (2 * self.genus - 2)

    @property
    def domain(self) -> DirichletDomain:
        if "domain" not in self._cache:
            self._cache["domain"] = self._dirichlet_domain()
        return self._cache["domain"]

    def _dirichlet_domain(self, max_depth=10):
        lim = 1.0 + 1e-9
        square = [np.array(p, float) for p in ((-lim, -lim), (lim, -lim), (lim, lim), (-lim, lim))]
        mats = {(): np.eye(3)}
        frontier = [()]
        candidates = []
        index = PointIndex(1e-6)
        index.add(ORIGIN, ())
        bound = np.inf
        for depth in range(1, max_depth + 1):
            nxt = []
            for w in frontier:
                for k in range(1, 2 * self.genus + 1):
                    for s in (k, -k):
                        if w and w[-1] == -s:
                            continue
                        nw = w + (s,)
                        m = mats[w] @ self.letter(s)
                        p = m @ ORIGIN
                        if index.find(p, 1e-7) is not None:
                            continue
                        d = hyp_dist(ORIGIN, p)
                        if d > bound:
                            continue
                        index.add(p, nw)
                        mats[nw] = m
                        nxt.append(nw)
                        candidates.append(nw)
            frontier = nxt
            poly, labels = list(square), [None] * 4
            order = sorted(candidates, key=lambda w: hyp_dist(ORIGIN, mats[w] @ ORIGIN))
            for w in order:
                n = mats[w] @ ORIGIN - ORIGIN
                poly, labels = _clip_polygon(poly, labels, n[:2], n[2], w)
            if any(l is None for l in labels) or any(p @ p >= 1 for p in poly):
                continue
            verts = [_klein_to_hyperboloid(p) for p in poly]
            area = polygon_area(verts)
            radius = max(hyp_dist(ORIGIN, v) for v in verts)
            # any element cutting D moves o by at most twice the circumradius
            bound = 2 * radius + 1e-6
            if abs(area - self.expected_area) < 1e-9:
                pairings = tuple(mats[w] for w in labels)
                inr = min(hyp_dist(ORIGIN, m @ ORIGIN) for m in pairings) / 2
                return DirichletDomain(np.array(verts), pairings, tuple(labels),
                                       area, radius, inr)
            if not frontier:
                break
        raise DomainNotCertified("Dirichlet domain area never matched 2*pi*(2g-2)")

    def reduce_to_domain(self, x, max_steps=200):
        """Move points of H^2 into the Dirichlet domain.

        Returns ``(g, gx)`` with ``g`` an array of group elements (one per
        point) and ``gx`` the translated points.
        """
        x = np.array(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x).copy()
        dom = self.domain
        inv_pairings = np.array([lorentz_inverse(m) for m in dom.pairings])
        g = np.broadcast_to(np.eye(3), (len(x), 3, 3)).copy()
        for _ in range(max_steps):
            vals = mink_inner(x[:, None, :], dom.normals[None, :, :])
            scale = np.abs(x[:, 2:3]) * (1.0 + np.abs(dom.normals[None, :, 2]))
            viol = vals / scale
            k = np.argmax(viol, axis=1)
            active = viol[np.arange(len(x)), k] > 1e-13
            if not active.any():
                break
            idx = np.nonzero(active)[0]
            step = inv_pairings[k[idx]]
            x[idx] = np.einsum("nij,nj->ni", step, x[idx])
            g[idx] = step @ g[idx]
            # renormalize to keep points on H^2
            x[idx] /= np.sqrt(-mink_inner(x[idx], x[idx]))[:, None]
        else:
            raise GeometryError("reduction to the Dirichlet domain did not terminate")
        if single:
            return g[0], x[0]
        return g, x

    # -- enumeration -------------------------------------------------------

    def elements_within(self, radius, cap=DEFAULT_ORBIT_CAP):
        """All elements g with d(o, g o) <= radius, as (words, matrices).

        Sorted by (word length, word).
        """
        key = ("within", round(float(radius), 12))
        if key in self._cache:
            return self._cache[key]
        dom = self.domain
        bound = radius + dom.circumradius + 1e-9
        estimate = 2 * np.pi * (np.cosh(bound) - 1) / dom.area
        if estimate > cap:
            raise RadiusTooLarge(f"about {estimate:.3g} elements within {bound:.3f}")
        pairings = np.array(dom.pairings)
        pwords = dom.pairing_words
        words = [()]
        mats = [np.eye(3)]
        positions = [ORIGIN]
        frontier = np.array([0])
        while len(frontier):
            fm = np.array([mats[i] for i in frontier])
            prod = np.einsum("nij,pjk->npik", fm, pairings)
            pos = prod[..., :, 2]  # image of the origin is the last column
            a, b = np.nonzero(pos[..., 2] <= np.cosh(bound))
            cand = pos[a, b]
            if not len(cand):
                break
            # distinct orbit points are far apart in R^3 (at least the systole)
            dist, _ = cKDTree(np.array(positions)).query(cand, distance_upper_bound=DEDUP_TOL)
            fresh = np.nonzero(~np.isfinite(dist))[0]
            drop = set()
            if len(fresh) > 1:
                pairs = cKDTree(cand[fresh]).query_pairs(DEDUP_TOL, output_type="ndarray")
                drop = {int(j) for j in np.maximum(pairs[:, 0], pairs[:, 1])}
            nxt = []
            for pos_k, c in enumerate(fresh):
                if pos_k in drop:
                    continue
                i, j = a[c], b[c]
                nxt.append(len(mats))
                mats.append(prod[i, j])
                positions.append(cand[c])
                words.append(reduce_word(words[frontier[i]] + pwords[j]))
            frontier = np.array(nxt, dtype=int)
        heights = np.array(positions)[:, 2]
        keep = list(np.nonzero(np.arccosh(np.maximum(heights, 1.0)) <= radius + 1e-12)[0])
        keep.sort(key=lambda i: (len(words[i]), words[i]))
        out = ([words[i] for i in keep], np.array([mats[i] for i in keep]))
        self._cache[key] = out
        return out

    @property
    def systole(self):
        """Length of the shortest closed geodesic, certified by enumeration.

        A closed geodesic of length l has a lift through D, so its element
        moves o by at most l + 2*circumradius.
        """
        if "systole" not in self._cache:
            dom = self.domain
            l0 = min(translation_length(m) for m in dom.pairings)
            _, mats = self.elements_within(l0 + 2 * dom.circumradius)
            vals = [translation_length(m) for m in mats[1:]]
            self._cache["systole"] = float(min(vals))
        return self._cache["systole"]

    def element_table(self):
        if "table" not in self._cache:
            self._cache["table"] = ElementTable(self)
        return self._cache["table"]

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return json.dumps({
            "genus": self.genus,
            "name": self.name,
            "generators": [[float(f"{x:.17g}") for x in g.ravel()] for g in self.generators],
            "relator": list(self.relator),
        }, indent=1)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        gens = tuple(np.array(g, dtype=float).reshape(3, 3) for g in data["generators"])
        return cls(gens, int(data["genus"]), tuple(data["relator"]), data.get("name", ""))


class ElementTable:
    """Append-only registry of group elements, identified by their action on o.

    Ids are stable: extending the table only appends.
    """

    def __init__(self, group):
        self.group = group
        self.radius = -1.0
        self.words = []
        self.mats = np.zeros((0, 3, 3))
        self._tree = None

    def extend(self, radius):
        if radius <= self.radius:
            return
        words, mats = self.group.elements_within(radius)
        if len(self.words):
            found = self.lookup_many(mats)
            fresh = [k for k in range(len(words)) if found[k] < 0]
        else:
            fresh = list(range(len(words)))
        self.words.extend(words[k] for k in fresh)
        self.mats = np.concatenate([self.mats, mats[fresh]])
        self._tree = cKDTree(self.mats[:, :, 2])
        self.radius = radius

    def lookup_many(self, mats):
        """Ids of the given elements, -1 where not registered."""
        mats = np.asarray(mats, dtype=float).reshape(-1, 3, 3)
        if self._tree is None:
            return np.full(len(mats), -1)
        d, idx = self._tree.query(mats[:, :, 2], distance_upper_bound=DEDUP_TOL)
        return np.where(np.isfinite(d), idx, -1)

    def lookup(self, m):
        k = int(self.lookup_many(m)[0])
        return None if k < 0 else k

    def __len__(self):
        return len(self.words)


def enumerate_orbit(group, p, radius, cap=DEFAULT_ORBIT_CAP):
    """Orbit points g.p whose projections lie within ``radius`` of that of p.

    Returns a list of (word, point) sorted by word, then by coordinates.
    """
    if radius <= 0:
        raise GeometryError("radius must be positive")
    p = np.asarray(p, dtype=float)
    x = radial_project(p)
    r0 = hyp_dist(ORIGIN, x)
    words, mats = group.elements_within(radius + 2 * r0, cap=cap)
    imgs = np.einsum("nij,j->ni", mats, p)
    d = hyp_dist(radial_project(imgs), x)
    out = [(w, q) for w, q, dd in zip(words, imgs, d) if dd <= radius]
    out.sort(key=lambda t: (len(t[0]), t[0], tuple(t[1])))
    return out


def genus2_octagon_group():
    """Genus-2 group of the regular octagon with angles pi/4.

    Generator k (k = 1..4) is the translation by twice the inradius along
    the ray at angle (k-1)*pi/4; it pairs opposite sides of the octagon.
    """
    t0 = 2 * octagon_inradius()
    gens = tuple(rotation(k * np.pi / 4) @ boost(t0) @ rotation(-k * np.pi / 4)
                 for k in range(4))
    return FuchsianGroup(gens, 2, (1, -2, 3, -4, -1, 2, -3, 4), "genus2_octagon")


@dataclass(frozen=True)
class NormalizationData:
    """Three distinct points at infinity, as lightlike vectors."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        pts = [np.asarray(p, dtype=float) / p[2] for p in (self.a, self.b, self.c)]
        for p in pts:
            if abs(mink_inner(p, p)) > 1e-9:
                raise GeometryError("normalization points must be lightlike")
        for i in range(3):
            for j in range(i + 1, 3):
                if np.linalg.norm(pts[i] - pts[j]) < 1e-9:
                    raise GeometryError("normalization points must be distinct")
        object.__setattr__(self, "a", pts[0])
        object.__setattr__(self, "b", pts[1])
        object.__setattr__(self, "c", pts[2])


def normalization_data(group):
    """Current (attractive, repulsive) points of the last generator and the
    attractive point of the one before it."""
    a, b = fixed_points(group.generators[-1])
    c, _ = fixed_points(group.generators[-2])
    return NormalizationData(a, b, c)


def normalizing_conjugator(group, nd):
    """h in SO_0(2,1) with h(a0, b0, c0) = (a, b, c) projectively."""
    a, b = fixed_points(group.generators[-1])
    c, d = fixed_points(group.generators[-2])
    if min(np.linalg.norm(p - q) for p in (a, b) for q in (c, d)) < 1e-9:
        raise DegenerateAxes("last two generators share a fixed point")
    src = [a, b, c]
    dst = [nd.a, nd.b, nd.c]
    # h src_i = lam_i dst_i; preserving the form fixes lam_i lam_j
    prod = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        prod[i, j] = mink_inner(src[i], src[j]) / mink_inner(dst[i], dst[j])
    lam = np.sqrt([prod[0, 1] * prod[0, 2] / prod[1, 2],
                   prod[0, 1] * prod[1, 2] / prod[0, 2],
                   prod[0, 2] * prod[1, 2] / prod[0, 1]])
    S = np.column_stack(src)
    T = np.column_stack([l * d for l, d in zip(lam, dst)])
    h = T @ np.linalg.inv(S)
    if np.linalg.det(h) < 0:
        raise GeometryError("prescribed points have the opposite cyclic order")
    return h


def normalize_representation(group, nd):
    return group.conjugate(normalizing_conjugator(group, nd))


def length_spectrum(group, words):
    return [translation_length(group.word_matrix(w)) for w in words]
