"""Metric-space tools: sampled metrics, comparison triangles, cone metrics.

A :class:`SampledMetric` is a distance matrix on a labelled point set; it
is how uniform convergence of distances is measured.  A
:class:`ConeMetric` is a closed surface glued from Euclidean triangles,
with distances computed by a :class:`~minkhull.flat.SurfaceGraph`.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .flat import FlatComplex, SurfaceGraph
from .hull import sample_domain
from .lorentz import GeometryError

AUDIT_TOL = 1e-9


class IdMismatch(ValueError):
    pass


class MetricAuditError(ValueError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class NonGeodesicEdge(GeometryError):
    pass


class ConeAngleViolation(GeometryError):
    pass


class GluingError(GeometryError):
    pass


# -- sampled metrics -------------------------------------------------------


@dataclass
class SampledMetric:
    ids: list
    d: np.ndarray

    def __post_init__(self):
        self.ids = list(self.ids)
        self.d = np.asarray(self.d, dtype=float)
        if self.d.shape != (len(self.ids), len(self.ids)):
            raise ValueError("distance matrix does not match the id list")

    def audit(self, tol=AUDIT_TOL):
        """Raise MetricAuditError unless d is a (pseudo)metric up to tol.

        Returns the worst triangle-inequality excess.
        """
        d = self.d
        scale = max(1.0, float(np.max(np.abs(d)))) if d.size else 1.0
        if np.any(d < -tol * scale):
            raise MetricAuditError("negative distance")
        if np.any(np.abs(np.diag(d)) > tol * scale):
            raise MetricAuditError("nonzero diagonal")
        if np.any(np.abs(d - d.T) > tol * scale):
            raise MetricAuditError("asymmetric distances")
        worst = 0.0
        for j in range(len(d)):
            # d[i, k] <= d[i, j] + d[j, k] for all i, k
            excess = d - (d[:, j:j + 1] + d[j:j + 1, :])
            worst = max(worst, float(excess.max()))
        if worst > tol * scale:
            raise MetricAuditError(f"triangle inequality fails by {worst:.3e}")
        return worst

    def scaled(self, s):
        return SampledMetric(self.ids, s * self.d)

    def to_csv(self):
        rows = ["id," + ",".join(str(i) for i in self.ids)]
        for i, row in zip(self.ids, self.d):
            rows.append(f"{i}," + ",".join(f"{v:.17g}" for v in row))
        return "\n".join(rows) + "\n"

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.strip().splitlines() if ln]
        ids = lines[0].split(",")[1:]
        d = np.array([[float(v) for v in ln.split(",")[1:]] for ln in lines[1:]])
        return cls(ids, d)


def _aligned(m1, m2):
    if set(m1.ids) != set(m2.ids) or len(m1.ids) != len(m2.ids):
        raise IdMismatch("sample sets differ")
    pos = {i: k for k, i in enumerate(m2.ids)}
    perm = np.array([pos[i] for i in m1.ids], dtype=int)
    return m2.d[np.ix_(perm, perm)]


def uniform_distance(m1, m2):
    """sup over pairs of |d1 - d2| on identical sample sets."""
    d2 = _aligned(m1, m2)
    return float(np.max(np.abs(m1.d - d2))) if d2.size else 0.0


def sup_metric(ms):
    if not ms:
        raise ValueError("need at least one metric")
    out = ms[0].d.copy()
    for m in ms[1:]:
        out = np.maximum(out, _aligned(ms[0], m))
    return SampledMetric(ms[0].ids, out)


# -- comparison triangles --------------------------------------------------


@dataclass
class TriangleExcess:
    upper_angles: tuple
    excess: float
    sides: tuple = ()


def comparison_angles(a, b, c, strict=True):
    """Euclidean angles opposite the sides a, b, c."""
    s = np.array([a, b, c], dtype=float)
    per = s.sum()
    slack = per - 2 * s
    if strict and (np.any(s <= 0) or np.any(slack <= 1e-12 * per)):
        raise DegenerateTriangle(f"sides {a}, {b}, {c} violate the strict triangle inequality")
    out = []
    for opp, x, y in ((a, b, c), (b, c, a), (c, a, b)):
        if x <= 0 or y <= 0:
            out.append(0.0)
            continue
        cosv = (x * x + y * y - opp * opp) / (2 * x * y)
        out.append(float(np.arccos(np.clip(cosv, -1.0, 1.0))))
    return tuple(out)


def comparison_triangle(a, b, c):
    return comparison_angles(a, b, c, strict=True)


def upper_angle_estimate(surface, p, q, r, scales=(0.2, 0.1, 0.05)):
    """Max over scales of comparison angles at p along shortest paths to q and r.

    ``surface`` needs ``path(p, q)`` returning a path with ``length`` and
    ``at(s)``, and ``distance(p, q)``.
    """
    pq, pr = surface.path(p, q), surface.path(p, r)
    if pq.length <= 0 or pr.length <= 0:
        return 0.0
    best = 0.0
    for s in scales:
        a, b = s * pq.length, s * pr.length
        qs, rs = pq.at(a), pr.at(b)
        c = surface.distance(qs, rs)
        best = max(best, comparison_angles(c, a, b, strict=False)[0])
    return best


# -- cone metrics ----------------------------------------------------------


def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


class ConeMetric:
    """Closed or bordered surface glued from Euclidean triangles.

    Side e of triangle t joins corners e and e+1; ``triangles[t][e]`` is
    its length.  A gluing entry (t, e, t2, e2) identifies two sides,
    running in opposite directions.
    """

    def __init__(self, triangles, gluing, edge_tol=1e-12):
        self.triangles = np.asarray(triangles, dtype=float).reshape(-1, 3)
        self.gluing = np.asarray(gluing, dtype=int).reshape(-1, 4)
        T = len(self.triangles)
        for a, b, c in self.triangles:
            comparison_angles(a, b, c)
        seen = set()
        for t, e, t2, e2 in self.gluing:
            for key in ((t, e), (t2, e2)):
                if key in seen or not (0 <= key[0] < T and 0 <= key[1] < 3):
                    raise GluingError(f"side {key} glued twice or out of range")
                seen.add(key)
            l1, l2 = self.triangles[t, e], self.triangles[t2, e2]
            if abs(l1 - l2) > edge_tol * max(1.0, l1):
                raise GluingError(f"glued sides ({t},{e}) and ({t2},{e2}) differ by {abs(l1 - l2):.3e}")
        self._glued = seen
        parent = list(range(3 * T))
        for t, e, t2, e2 in self.gluing:
            for x, y in ((3 * t + e, 3 * t2 + (e2 + 1) % 3), (3 * t + (e + 1) % 3, 3 * t2 + e2)):
                ra, rb = _find(parent, x), _find(parent, y)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        roots = [_find(parent, i) for i in range(3 * T)]
        label = {r: k for k, r in enumerate(sorted(set(roots)))}
        self.vertex_of_corner = np.array([label[r] for r in roots], dtype=int).reshape(T, 3)
        self.n_vertices = len(label)
        self._flat = None
        self._graphs = {}

    # -- combinatorics --------------------------------------------------

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.gluing) + 3 * self.n_triangles - 2 * len(self.gluing)

    def is_closed(self):
        return 2 * len(self.gluing) == 3 * self.n_triangles

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles

    def corner_angles(self):
        """(T, 3) angles; corner c sits between sides c-1 and c."""
        out = np.zeros((self.n_triangles, 3))
        for t, (a, b, c) in enumerate(self.triangles):
            # angles opposite a=|01|, b=|12|, c=|20| sit at corners 2, 0, 1
            oa, ob, oc = comparison_angles(a, b, c)
            out[t] = (ob, oc, oa)
        return out

    def cone_angles(self):
        return np.bincount(self.vertex_of_corner.ravel(), weights=self.corner_angles().ravel(),
                           minlength=self.n_vertices)

    def boundary_vertices(self):
        out = set()
        for t in range(self.n_triangles):
            for e in range(3):
                if (t, e) not in self._glued:
                    out.update((int(self.vertex_of_corner[t, e]), int(self.vertex_of_corner[t, (e + 1) % 3])))
        return out

    def interior_vertices(self):
        b = self.boundary_vertices()
        return [v for v in range(self.n_vertices) if v not in b]

    def gauss_bonnet_sum(self):
        """Sum of 2 pi - angle over interior vertices (closed surfaces: all)."""
        ang = self.cone_angles()
        return float(sum(2 * np.pi - ang[v] for v in self.interior_vertices()))

    def check(self, nonpositive=True, tol=1e-9, gb_tol=1e-6):
        """Cone angles >= 2 pi - tol and Gauss-Bonnet; returns a summary dict."""
        ang = self.cone_angles()
        inner = self.interior_vertices()
        worst = float(min((ang[v] - 2 * np.pi for v in inner), default=np.inf))
        chi = self.euler_characteristic()
        gb = self.gauss_bonnet_sum()
        out = {"min_cone_excess": worst, "gauss_bonnet": gb, "chi": chi,
               "gauss_bonnet_error": abs(gb - 2 * np.pi * chi) if self.is_closed() else None}
        if nonpositive and worst < -tol:
            raise ConeAngleViolation(f"cone angle below 2 pi by {-worst:.3e}")
        if self.is_closed() and abs(gb - 2 * np.pi * chi) > gb_tol:
            raise GeometryError(f"Gauss-Bonnet off by {abs(gb - 2 * np.pi * chi):.3e}")
        return out

    # -- geometry -------------------------------------------------------

    def flat(self):
        if self._flat is None:
            self._flat = FlatComplex.from_triangles(self.triangles, self.gluing.tolist(),
                                                    self.vertex_of_corner, self.n_vertices)
        return self._flat

    def graph(self, k=8):
        if k not in self._graphs:
            self._graphs[k] = SurfaceGraph(self.flat(), k)
        return self._graphs[k]

    def surface(self, k=8):
        return _ConeSurface(self, k)

    def corner_point(self, t, c):
        return int(t), self.flat().coords[t][c].copy()

    def vertex_point(self, v):
        t, c = np.argwhere(self.vertex_of_corner == v)[0]
        return self.corner_point(t, c)

    def areas(self):
        a, b, c = self.triangles.T
        s = (a + b + c) / 2
        return np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0.0))

    def sample_points(self, n, rng):
        """Area-uniform random points (triangle, local coords)."""
        w = self.areas()
        tri = rng.choice(self.n_triangles, size=n, p=w / w.sum())
        uv = rng.random((n, 2))
        flip = uv.sum(axis=1) > 1
        uv[flip] = 1 - uv[flip]
        out = []
        for t, (u, v) in zip(tri, uv):
            c = self.flat().coords[t]
            out.append((int(t), c[0] + u * (c[1] - c[0]) + v * (c[2] - c[0])))
        return out

    def shoot(self, p, angle, length):
        """Point reached from p = (t, z) along a straight ray at ``angle``."""
        t, z = p
        return self.flat().trace(t, z, np.array([np.cos(angle), np.sin(angle)]), length)

    def shoot_from_vertex(self, t, c, phi, length):
        """Ray leaving corner c of triangle t at total angle phi around the vertex.

        phi is measured counterclockwise from side c, continuing through the
        neighbouring corners.
        """
        fc = self.flat()
        ang = self.corner_angles()
        for _ in range(3 * self.n_triangles + 1):
            if phi < ang[t, c]:
                co = fc.coords[t]
                d = co[(c + 1) % 3] - co[c]
                base = np.arctan2(d[1], d[0]) + phi
                v = np.array([np.cos(base), np.sin(base)])
                # leave the corner before tracing so the start is interior
                return fc.trace(t, co[c] + 1e-12 * v, v, length - 1e-12)
            phi -= ang[t, c]
            nxt = fc.across(t, (c - 1) % 3)
            if nxt is None:
                raise GeometryError("angle runs off the boundary")
            t, c = nxt[0], nxt[1]
        raise GeometryError("angle exceeds the cone angle")

    def sampled(self, points, k=8, ids=None):
        g = self.graph(k)
        n = len(points)
        d = np.zeros((n, n))
        for i in range(n):
            paths = g.paths(points[i], points[i + 1:]) if i + 1 < n else []
            for j, p in enumerate(paths, start=i + 1):
                d[i, j] = d[j, i] = p.length
        return SampledMetric(list(range(n)) if ids is None else ids, d)

    # -- io --------------------------------------------------------------

    def to_dict(self):
        return {"triangles": [[float(f"{x:.17g}") for x in row] for row in self.triangles],
                "gluing": self.gluing.tolist()}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(obj["triangles"], obj["gluing"])


class _ConeSurface:
    """Distance oracle on a cone metric (points are (triangle, local coords))."""

    def __init__(self, cm, k):
        self.cm = cm
        self.graph = cm.graph(k)

    def path(self, p, q):
        return self.graph.path((int(p[0]), np.asarray(p[1], float)), (int(q[0]), np.asarray(q[1], float)))

    def distance(self, p, q):
        return self.path(p, q).length


# -- CAT(0) spot checks ----------------------------------------------------


@dataclass
class SpotReport:
    n_triangles: int
    worst_angle_margin: float
    max_excess: float
    violations: int
    tolerance: float
    excesses: list = field(default_factory=list)

    @property
    def ok(self):
        return self.violations == 0


def triangle_excess(surface, p, q, r, scales=(0.2, 0.1, 0.05)):
    """Upper angles at each corner of the geodesic triangle pqr and their excess."""
    dpq, dqr, drp = surface.distance(p, q), surface.distance(q, r), surface.distance(r, p)
    angles = (upper_angle_estimate(surface, p, q, r, scales),
              upper_angle_estimate(surface, q, r, p, scales),
              upper_angle_estimate(surface, r, p, q, scales))
    return TriangleExcess(angles, float(sum(angles) - np.pi), (dpq, dqr, drp))


def cat0_spot_check(cm, n_triangles, rng_seed=0, size=None, k=8, tol=1e-6):
    """Sample small geodesic triangles; compare upper angles and excesses.

    Half of the triangles surround a vertex (where curvature sits), the
    rest are placed at random points.  Each upper angle must not exceed the
    comparison angle, and the excess must be <= tol.
    """
    rng = np.random.default_rng(rng_seed)
    surf = cm.surface(k)
    if size is None:
        size = 0.25 * float(np.min(cm.triangles))
    worst_margin, max_excess, bad = np.inf, -np.inf, 0
    excesses = []
    done = attempts = 0
    ang = cm.cone_angles()
    while done < n_triangles and attempts < 20 * n_triangles:
        attempts += 1
        try:
            if done % 2 == 0:
                t, c = int(rng.integers(cm.n_triangles)), int(rng.integers(3))
                theta = ang[cm.vertex_of_corner[t, c]]
                phis = (rng.random() + np.arange(3) + 0.3 * (rng.random(3) - 0.5)) * theta / 3
                rho = size * (0.5 + 0.5 * rng.random(3))
                pts = [cm.shoot_from_vertex(t, c, float(ph % theta), float(r)) for ph, r in zip(phis, rho)]
            else:
                p0 = cm.sample_points(1, rng)[0]
                a0 = rng.random() * 2 * np.pi
                pts = [cm.shoot(p0, a0 + 2 * np.pi * j / 3 + 0.4 * (rng.random() - 0.5),
                                size * (0.4 + 0.6 * rng.random())) for j in range(3)]
            tri = triangle_excess(surf, *pts)
            comp = comparison_angles(*(tri.sides[1], tri.sides[2], tri.sides[0]))
        except GeometryError:
            continue
        done += 1
        margin = min(c - u for c, u in zip(comp, tri.upper_angles))
        worst_margin = min(worst_margin, margin)
        max_excess = max(max_excess, tri.excess)
        excesses.append(tri.excess)
        if margin < -tol or tri.excess > tol:
            bad += 1
    return SpotReport(done, float(worst_margin), float(max_excess), bad, tol, excesses)


def cube_corner():
    """Three unit squares around a corner: one cone point of angle 3 pi / 2.

    A bordered surface of six right isosceles triangles; the negative
    control for CAT(0) checks.
    """
    h = np.sqrt(2.0)
    # triangle (corner, a_j, m_j) and (corner, m_j, a_{j+1}) per square,
    # with corners 0 = cone point
    tris, glue = [], []
    for j in range(3):
        tris.append([1.0, 1.0, h])   # 0 -> a_j -> m_j
        tris.append([h, 1.0, 1.0])   # 0 -> m_j -> a_{j+1}
    for j in range(3):
        t0, t1 = 2 * j, 2 * j + 1
        glue.append([t0, 2, t1, 0])                    # diagonal 0 - m_j
        glue.append([t1, 2, (2 * j + 2) % 6, 0])       # shared side 0 - a_{j+1}
    return ConeMetric(tris, glue)


# -- hull-induced metrics and flattening -----------------------------------


def induced_cone_metric(hull):
    """Triangulate each quotient face fan-wise from its lowest-index vertex."""
    fc = FlatComplex.from_hull_quotient(hull)
    tris, glue = [], []
    owner = {}
    for f, c in enumerate(fc.coords):
        n = len(c)
        vids = fc.vertex_ids[f]
        r0 = min(range(n), key=lambda i: (int(vids[i]), i))
        base = len(tris)
        for j in range(1, n - 1):
            a, b, cc = c[r0], c[(r0 + j) % n], c[(r0 + j + 1) % n]
            tris.append([np.linalg.norm(b - a), np.linalg.norm(cc - b), np.linalg.norm(a - cc)])
            if j > 1:
                glue.append([base + j - 2, 2, base + j - 1, 0])
        for s in range(n):
            rel = (s - r0) % n
            if rel == 0:
                owner[(f, s)] = (base, 0)
            elif rel == n - 1:
                owner[(f, s)] = (base + n - 3, 2)
            else:
                owner[(f, s)] = (base + rel - 1, 1)
    for e, occ in enumerate(fc.edge_sides):
        if len(occ) != 2:
            raise GluingError(f"quotient edge {e} is not shared by two sides")
        (f1, s1, g1), (f2, s2, g2) = occ
        if g1 == g2:
            raise GluingError("orientation-reversing gluing")
        glue.append([*owner[(f1, s1)], *owner[(f2, s2)]])
    tris = np.array(tris)
    # glued sides are one edge measured twice; store a single length
    for t, e, t2, e2 in glue:
        m = 0.5 * (tris[t, e] + tris[t2, e2])
        if abs(tris[t, e] - tris[t2, e2]) > 1e-9 * max(1.0, m):
            raise GluingError("glued face sides differ in length")
        tris[t, e] = tris[t2, e2] = m
    return ConeMetric(tris, glue)


@dataclass
class Refinement:
    """A subdivided cone metric and its coarse triangulation.

    ``chains[(T, E)]`` lists the fine sides (t, e) along coarse side E of
    coarse triangle T, in order from corner E to corner E+1.
    """
    fine: ConeMetric
    coarse_gluing: np.ndarray
    chains: dict


def refine(cm, n):
    """Regular n x n subdivision of every triangle."""
    if n < 1:
        raise ValueError("subdivision order must be positive")
    tris, glue = [], []
    chains = {}
    for T, (a, b, c) in enumerate(cm.triangles):
        A, B, C = cm.flat().coords[T]
        P = lambda i, j: A + (i / n) * (B - A) + (j / n) * (C - A)
        side_of = {}
        for i in range(n):
            for j in range(n - i):
                for corners in (((i, j), (i + 1, j), (i, j + 1)),
                                ((i + 1, j), (i + 1, j + 1), (i, j + 1)) if i + j < n - 1 else None):
                    if corners is None:
                        continue
                    pts = [P(*q) for q in corners]
                    t = len(tris)
                    tris.append([np.linalg.norm(pts[1] - pts[0]), np.linalg.norm(pts[2] - pts[1]),
                                 np.linalg.norm(pts[0] - pts[2])])
                    for e in range(3):
                        key = (corners[e], corners[(e + 1) % 3])
                        side_of[key] = (t, e)
        for (u, v), (t, e) in side_of.items():
            if (v, u) in side_of and u < v:
                glue.append([t, e, *side_of[(v, u)]])
        chains[(T, 0)] = [side_of[((i, 0), (i + 1, 0))] for i in range(n)]
        chains[(T, 1)] = [side_of[((n - m, m), (n - m - 1, m + 1))] for m in range(n)]
        chains[(T, 2)] = [side_of[((0, n - m), (0, n - m - 1))] for m in range(n)]
    for T, E, T2, E2 in cm.gluing:
        c1, c2 = chains[(T, E)], chains[(T2, E2)]
        for m in range(n):
            glue.append([*c1[m], *c2[n - 1 - m]])
    tris = np.array(tris)
    for t, e, t2, e2 in glue:
        m = 0.5 * (tris[t, e] + tris[t2, e2])
        tris[t, e] = tris[t2, e2] = m
    return Refinement(ConeMetric(tris, glue), cm.gluing.copy(), chains)


def _chain_turns(cm, chain):
    """Left and right angles at the interior vertices of a chain of sides."""
    ang = cm.corner_angles()
    fc = cm.flat()
    boundary = cm.boundary_vertices()
    out = []
    for (t, e), (t2, e2) in zip(chain[:-1], chain[1:]):
        # walk clockwise around the junction from the incoming side's end
        f, c = t, (e + 1) % 3
        v = int(cm.vertex_of_corner[f, c])
        left = 0.0
        for _ in range(3 * cm.n_triangles + 1):
            left += ang[f, c]
            if (f, c) == (t2, e2):
                break
            nxt = fc.across(f, c)
            if nxt is None:
                left = np.nan
                break
            f, c = nxt[0], (nxt[1] + 1) % 3
        total = cm.cone_angles()[v]
        if v in boundary:
            # only the sector inside the surface constrains a boundary chain
            out.append((left, np.inf) if np.isfinite(left) else (np.inf, total))
        else:
            out.append((left, total - left))
    return out


def az_flatten(refinement, tol=1e-9, nonpositive=True):
    """Replace coarse triangles by comparison triangles of their fine edge chains.

    Every coarse edge must be a geodesic of the fine metric: at each
    interior chain vertex both sides span an angle >= pi.
    """
    cm = refinement.fine
    n_coarse = len(refinement.chains) // 3
    lengths = np.zeros((n_coarse, 3))
    for (T, E), chain in refinement.chains.items():
        for left, right in _chain_turns(cm, chain):
            if not (left >= np.pi - tol and right >= np.pi - tol):
                raise NonGeodesicEdge(f"coarse side ({T},{E}) bends: angles {left:.6f}, {right:.6f}")
        lengths[T, E] = sum(cm.triangles[t, e] for t, e in chain)
    for T, E, T2, E2 in refinement.coarse_gluing:
        m = 0.5 * (lengths[T, E] + lengths[T2, E2])
        lengths[T, E] = lengths[T2, E2] = m
    out = ConeMetric(lengths, refinement.coarse_gluing)
    ang = out.cone_angles()
    if nonpositive:
        low = [v for v in out.interior_vertices() if ang[v] < 2 * np.pi - tol]
        if low:
            raise ConeAngleViolation(f"{len(low)} flattened cone angles below 2 pi")
    return out


# -- convergence ------------------------------------------------------------


@dataclass
class LadderStep:
    density: int
    gap_to_reference: float
    gap_to_previous: float = None
    alpha: float = None
    beta: float = None
    n_faces: int = 0


@dataclass
class ConvergenceReport:
    steps: list
    reference_diameter: float
    verdict: str = None

    @property
    def gaps(self):
        return [s.gap_to_reference for s in self.steps]

    @property
    def final_relative_gap(self):
        return self.steps[-1].gap_to_reference / self.reference_diameter

    def to_csv(self):
        rows = ["step,density,gap_to_reference,gap_to_previous,relative_gap,alpha,beta,n_faces"]
        for i, s in enumerate(self.steps):
            prev = "" if s.gap_to_previous is None else f"{s.gap_to_previous:.12g}"
            rows.append(f"{i},{s.density},{s.gap_to_reference:.12g},{prev},"
                        f"{s.gap_to_reference / self.reference_diameter:.12g},"
                        f"{s.alpha:.12g},{s.beta:.12g},{s.n_faces}")
        return "\n".join(rows) + "\n"


def convergence_experiment(group, c=2.0, ladder=(50, 200, 800), n_points=16, k=8,
                           rng_seed=0, domain_radius=None):
    """Hull quotient metrics of c H^2 samples against c times the hyperbolic quotient metric."""
    from .hull import fuchsian_hull
    from .intrinsic import QuotientSurface, hyperbolic_quotient_distance

    rng = np.random.default_rng(rng_seed)
    xs = sample_domain(group, n_points, rng)
    n = len(xs)
    ref = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            ref[i, j] = ref[j, i] = c * hyperbolic_quotient_distance(group, xs[i], xs[j])
    reference = SampledMetric(list(range(n)), ref)
    steps, prev = [], None
    for density in ladder:
        seeds = c * sample_domain(group, density, np.random.default_rng([rng_seed, density]))
        hull = fuchsian_hull(group, seeds, domain_radius)
        h = hull.hconvex
        qs = QuotientSurface(hull, k)
        pts = [h.surface_point(x)[1] for x in xs]
        d = np.zeros((n, n))
        for i in range(n - 1):
            d[i, i + 1:] = qs.distances(pts[i], pts[i + 1:])
        d = d + d.T
        m = SampledMetric(list(range(n)), d)
        a, b = h.alpha_beta()
        steps.append(LadderStep(int(density), uniform_distance(m, reference),
                                None if prev is None else uniform_distance(m, prev),
                                float(a), float(b), len(hull.reps)))
        prev = m
    verdict = None
    if len(steps) > 1:
        g = [s.gap_to_reference for s in steps]
        verdict = "decreasing" if all(x > y for x, y in zip(g[:-1], g[1:])) else "non-monotone"
    return ConvergenceReport(steps, float(ref.max()), verdict)
