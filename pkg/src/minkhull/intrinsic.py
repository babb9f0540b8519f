"""Intrinsic distances on hull surfaces.

Surface points are handled in two ways: as points ``y`` of R^{2,1} on the
hull, or as ``(face, z)`` with ``z`` in that face's 2D frame.  A surface
object converts between the two and owns the Steiner graph.

`CoverSurface` is a finite patch of the universal cover around a centre;
`QuotientSurface` is the compact quotient, whose graph distances are the
quotient distances directly (a path on the quotient lifts to a path from p
to some translate of q, and conversely).
"""

from dataclasses import dataclass

import numpy as np

from .flat import FlatComplex, GeodesicPath, PointOffSurface, SurfaceGraph, face_euclidean_embed
from .fuchsian import ORIGIN, GeometryError
from .lorentz import hyp_dist, lorentz_inverse, mink_inner, radial_project

SURFACE_TOL = 1e-9
DEFAULT_STEINER = 8


class WordCapTooSmall(GeometryError):
    pass


class ImaginaryIntegrand(GeometryError):
    pass


@dataclass(frozen=True)
class ConeAngleReport:
    vertex: np.ndarray
    total_angle: float


class _Surface:
    fc: FlatComplex
    graph: SurfaceGraph

    def lift(self, x):
        """Surface point u(x) x above x in H^2."""
        return self.hull.hconvex.surface_point(np.asarray(x, float))[1]

    def distance(self, p, q):
        """Induced distance between surface points (3D), taut graph path."""
        return self.path(p, q).length

    def distances(self, p, qs, taut=True):
        lp = self.locate(p)
        lqs = [self.locate(q) for q in qs]
        if not taut:
            return self.graph.distances(lp, lqs)
        return np.array([path.length for path in self.graph.paths(lp, lqs)])

    def graph_distance(self, p, q):
        return self.graph.distance(self.locate(p), self.locate(q))

    def path(self, p, q, taut=True):
        return self.graph.path(self.locate(p), self.locate(q), taut=taut)

    def paths(self, p, qs, taut=True):
        return self.graph.paths(self.locate(p), [self.locate(q) for q in qs], taut=taut)

    def _check_on_plane(self, y, plane):
        dev = abs(plane.value(y)) / max(1.0, abs(plane.c))
        if dev > SURFACE_TOL:
            raise PointOffSurface(f"point is {dev:.2e} off the surface")


class CoverSurface(_Surface):
    """Patch of the universal cover with its Steiner graph."""

    def __init__(self, hull, k=DEFAULT_STEINER, radius=None, center=ORIGIN):
        self.hull = hull
        self.k = k
        if radius is None:
            radius = min(hull.domain_radius, hull.group.domain.circumradius + 1.5)
        self.radius = radius
        self.center = radial_project(np.asarray(center, float))
        self.patch = hull.patch(radius, self.center)
        self.fc = FlatComplex.from_patch(self.patch)
        self.graph = SurfaceGraph(self.fc, k)

    def locate(self, y):
        y = np.asarray(y, float)
        key, plane = self.hull.hconvex.support_face_at(radial_project(y))
        self._check_on_plane(y, plane)
        f = self.patch.key_index.get(key)
        if f is None:
            raise PointOffSurface("point lies outside the patch")
        return f, self.fc.to_local(f, y)


class QuotientSurface(_Surface):
    """The compact quotient surface."""

    def __init__(self, hull, k=DEFAULT_STEINER):
        self.hull = hull
        self.k = k
        self.fc = FlatComplex.from_hull_quotient(hull)
        self.graph = SurfaceGraph(self.fc, k)

    def locate(self, y):
        y = np.asarray(y, float)
        h = self.hull.hconvex
        g, xr = self.hull.group.reduce_to_domain(radial_project(y))
        vals = h._core_values(xr[None])[0]
        top = vals.max()
        kf = int(np.nonzero(vals >= top - 1e-12 * abs(top))[0][0])
        gc, r = h.core.face_keys[kf]
        # bring the point into the representative's own coordinates
        z = lorentz_inverse(self.hull.table.mats[gc]) @ (g @ y)
        self._check_on_plane(z, self.hull.reps[r].plane)
        return r, self.fc.to_local(r, z)


def induced_distance(surface, p, q):
    return surface.distance(p, q)


def quotient_distance(qs: QuotientSurface, p, q):
    """Distance on the quotient surface between the images of p and q."""
    return qs.distance(p, q)


def quotient_distance_cover(hull, p, q, word_cap, k=DEFAULT_STEINER, upper=None):
    """Quotient distance as min over translates w.q of cover distances.

    A cross-check for :func:`quotient_distance`.  Minimizers satisfy
    d_u(p, w q) <= upper, hence d_H(p, w q) <= upper / a with ``a`` the
    lower bi-Lipschitz constant; every such w must have at most
    ``word_cap`` letters.
    """
    alpha, beta = hull.hconvex.alpha_beta()
    lower = 1.0 / (1.0 / alpha + np.sqrt(max(beta ** 2 - alpha ** 2, 0.0)) / alpha ** 2)
    if upper is None:
        upper = QuotientSurface(hull, k).distance(p, q) * 1.01 + 1e-9
    xp, xq = radial_project(p), radial_project(q)
    reach = upper / lower
    rp, rq = hyp_dist(ORIGIN, xp), hyp_dist(ORIGIN, xq)
    words, mats = hull.group.elements_within(rp + rq + reach)
    imgs = np.einsum("nij,j->ni", mats, q)
    d = hyp_dist(radial_project(imgs), xp)
    sel = np.nonzero(d <= reach)[0]
    longest = max(len(words[i]) for i in sel)
    if longest > word_cap:
        raise WordCapTooSmall(f"a candidate translate needs {longest} letters (cap {word_cap})")
    cover = CoverSurface(hull, k, radius=reach + hull.hconvex.hull.face_radius + 1.0, center=xp)
    return float(np.min(cover.distances(p, [imgs[i] for i in sel])))


def hyperbolic_quotient_distance(group, x, y):
    """min over g of d_H(x, g y)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    bound = hyp_dist(ORIGIN, x) + hyp_dist(ORIGIN, y) + hyp_dist(x, y)
    _, mats = group.elements_within(bound + 1e-9)
    return float(np.min(hyp_dist(x, np.einsum("nij,j->ni", mats, y))))


def cone_angle(hull, vertex_index):
    """Total angle at a vertex of the default patch, from the quotient corners."""
    patch = hull.default_patch
    if not 0 <= vertex_index < len(patch.vertex_pos):
        raise IndexError(vertex_index)
    seed = int(patch.vertex_labels[vertex_index, 0])
    corners = [a for s, _, _, a in hull.corner_angles() if s == seed]
    if len(corners) < 3:
        from .flat import DanglingVertex
        raise DanglingVertex(f"vertex has {len(corners)} incident faces")
    return ConeAngleReport(patch.vertex_pos[vertex_index].copy(), float(sum(corners)))


def length_functional(u, samples):
    """Length of the lift t -> u(c(t)) c(t) of a discrete curve c on H^2.

    Evaluates the integral of sqrt(u^2 |c'|^2 - ((u o c)')^2) with
    second-order differences on a uniform parameter and the trapezoid rule.
    """
    c = np.asarray(samples, dtype=float)
    if len(c) < 3:
        raise ValueError("need at least three samples")
    if np.any(np.all(np.abs(np.diff(c, axis=0)) == 0, axis=1)):
        raise ValueError("consecutive samples must be distinct")
    dc = np.gradient(c, axis=0, edge_order=2)
    # project onto the tangent plane of H^2
    dc = dc + mink_inner(dc, c)[:, None] * c
    uc = np.asarray(u(c), dtype=float)
    du = np.gradient(uc, edge_order=2)
    integrand = uc ** 2 * mink_inner(dc, dc) - du ** 2
    if np.min(integrand) < -1e-9:
        raise ImaginaryIntegrand(f"integrand {np.min(integrand):.3e} < 0: the lift is not spacelike")
    return float(np.trapezoid(np.sqrt(np.maximum(integrand, 0.0))))


def polyline_length(points):
    d = np.diff(np.asarray(points, float), axis=0)
    return float(np.sum(np.sqrt(np.maximum(mink_inner(d, d), 0.0))))


@dataclass
class FDiagnostics:
    """f(y) = -<y,y> along a path, segment by segment (unit speed)."""
    f_start: np.ndarray
    f_end: np.ndarray
    second_derivative: np.ndarray
    edge_jumps: np.ndarray
    vertex_jumps: np.ndarray
    integral: float
    length: float
    segment_lengths: np.ndarray


def _abs_linear_integral(p, q, ell):
    """Integral over [0, ell] of |p + q s|."""
    if q != 0:
        r = -p / q
        if 0 < r < ell:
            return abs(p * r + q * r * r / 2) + abs((p * ell + q * ell * ell / 2) - (p * r + q * r * r / 2))
    return abs(p * ell + q * ell * ell / 2)


def f_along_path(path: GeodesicPath):
    segs = path.segments3d
    if segs is None or not len(segs):
        raise GeometryError("path has no embedding in R^{2,1}")
    # drop zero-length segments; a junction merged with a vertex passage
    # counts as a vertex passage
    kept, kinds, pending = [], [], None
    for i, (a, b) in enumerate(segs):
        d = b - a
        if mink_inner(d, d) <= 1e-28:
            if i > 0 and path.junction_kinds[i - 1] == "vertex":
                pending = "vertex"
            continue
        if kept:
            kind = path.junction_kinds[i - 1]
            kinds.append("vertex" if pending == "vertex" else kind)
        pending = None
        kept.append((a, b))
    if not kept:
        z = np.zeros(0)
        return FDiagnostics(z, z, z, z, z, 0.0, 0.0, z)
    a = np.array([k[0] for k in kept])
    b = np.array([k[1] for k in kept])
    d = b - a
    ell = np.sqrt(mink_inner(d, d))
    v = d / ell[:, None]
    slope_start = -2 * mink_inner(a, v)
    slope_end = -2 * mink_inner(b, v)
    jumps = slope_start[1:] - slope_end[:-1]
    kinds = np.array(kinds, dtype=object)
    av, vv = mink_inner(a, v), mink_inner(v, v)
    integral = sum(_abs_linear_integral(float(av[i]), float(vv[i]), float(ell[i]))
                   for i in range(len(ell)))
    return FDiagnostics(
        f_start=-mink_inner(a, a), f_end=-mink_inner(b, b),
        second_derivative=-2 * vv,
        edge_jumps=jumps[kinds == "edge"].astype(float),
        vertex_jumps=jumps[kinds == "vertex"].astype(float),
        integral=float(integral), length=float(ell.sum()), segment_lengths=ell)


def planar_section(hconvex, p, q, n=400):
    """Section of the surface by the plane through 0, p and q, from p to q.

    Returns the vertices of the section polyline, including every crossing
    with a face edge.
    """
    p, q = np.asarray(p, float), np.asarray(q, float)
    xp, xq = radial_project(p), radial_project(q)
    t = np.linspace(0.0, 1.0, n)
    xs = radial_project((1 - t)[:, None] * xp + t[:, None] * xq)
    faces = [hconvex.support_face_at(x) for x in xs]
    pts = [p]
    for i in range(1, n):
        (k0, pl0), (k1, pl1) = faces[i - 1], faces[i]
        if k0 != k1:
            pts.extend(_section_breaks(hconvex, xs[i - 1], xs[i], pl0, pl1))
    pts.append(q)
    return np.array(pts)


def _section_breaks(hconvex, x0, x1, pl0, pl1, depth=0):
    """Surface points where the support face changes between x0 and x1."""
    # along x0 + s (x1 - x0) the lifts to the two planes agree where
    # c0 <x, eta1> = c1 <x, eta0>, which is linear in s
    g0 = pl0.c * mink_inner(x0, pl1.eta) - pl1.c * mink_inner(x0, pl0.eta)
    g1 = pl0.c * mink_inner(x1, pl1.eta) - pl1.c * mink_inner(x1, pl0.eta)
    s = g0 / (g0 - g1) if g0 != g1 else 0.5
    x = radial_project(x0 + min(max(s, 0.0), 1.0) * (x1 - x0))
    u = hconvex.radial_function(x)
    u0 = pl0.c / mink_inner(x, pl0.eta)
    if u - u0 <= 1e-12 * u or depth > 40:
        return [u * x]
    # a third face rises above both: recurse on each side of it
    _, plm = hconvex.support_face_at(x)
    return (_section_breaks(hconvex, x0, x, pl0, plm, depth + 1)
            + _section_breaks(hconvex, x, x1, plm, pl1, depth + 1))
