"""Convex hulls of Fuchsian orbits in the future cone.

The hull of a finite truncation of the orbit is computed with Qhull.  A
face of the truncated hull is kept when its outward Euclidean normal
``n`` points to the past and is timelike for the Minkowski form, i.e.
``n3 < 0`` and ``n3**2 > n1**2 + n2**2``.  Its future unit normal is then
``eta = (n1, n2, -n3) / sqrt(n3**2 - n1**2 - n2**2)`` and the face lies on
``<y, eta> = c`` with ``c < 0``; the hull is the side ``<y, eta> <= c``.

Only faces incident to seed vertices are trusted.  Together they contain
one representative of every face orbit; everything else (patches over
larger regions, the quotient complex) is rebuilt from these
representatives by applying group elements, so the truncation rim never
leaks into the result.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .fuchsian import ORIGIN, GeometryError
from .lorentz import (
    NotFutureTimelike, hyp_dist, lorentz_inverse, mink_inner, radial_project,
)

PLANE_TOL = 1e-9
MERGE_ANGLE = 1e-10


class HullError(GeometryError):
    pass


class NotSpacelikeFace(HullError):
    pass


class TruncationUnstable(HullError):
    pass


class DomainTooSmall(HullError):
    pass


@dataclass(frozen=True)
class FacePlane:
    """Spacelike support plane <y, eta> = c, with eta future unit timelike."""
    eta: np.ndarray
    c: float

    def value(self, y):
        return mink_inner(y, self.eta) - self.c

    def transformed(self, m):
        return FacePlane(m @ self.eta, self.c)


@dataclass(frozen=True)
class RepFace:
    """Representative of a face orbit.

    ``labels`` are (seed, element id) pairs in counterclockwise order; the
    vertex is ``table.mats[element] @ seeds[seed]``.
    """
    labels: tuple
    plane: FacePlane
    points: np.ndarray

    @property
    def centroid(self):
        return radial_project(self.points.mean(axis=0))


def _union_find(n, pairs):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(a) for a in range(n)]


def _ccw_order(points, idx):
    """Sort polygon vertex indices counterclockwise in the (x1, x2) plane."""
    p = points[idx, :2]
    ctr = p.mean(axis=0)
    ang = np.arctan2(p[:, 1] - ctr[1], p[:, 0] - ctr[0])
    order = np.argsort(ang, kind="stable")
    out = [idx[k] for k in order]
    # start at the smallest index for determinism
    s = int(np.argmin(out))
    return out[s:] + out[:s]


def lower_faces(points):
    """Spacelike past-facing faces of conv(points).

    Returns (faces, planes, spacelike) where faces are ccw vertex cycles and
    ``spacelike[k]`` tells whether face k passes the timelike-normal test.
    """
    hull = ConvexHull(points)
    eq = hull.equations
    n, d = eq[:, :3], eq[:, 3]
    s2 = n[:, 2] ** 2 - n[:, 0] ** 2 - n[:, 1] ** 2
    good = (n[:, 2] < 0) & (s2 > 1e-14)
    s = np.sqrt(np.where(good, s2, 1.0))
    eta = np.column_stack([n[:, 0], n[:, 1], -n[:, 2]]) / s[:, None]
    c = -d / s
    pairs = []
    for a in range(len(eq)):
        for b in hull.neighbors[a]:
            if b <= a or good[a] != good[b]:
                continue
            if good[a]:
                # the Minkowski norm of the difference is the dihedral angle
                # to first order and, unlike arccosh, well conditioned
                diff = eta[a] - eta[b]
                ang = np.sqrt(max(mink_inner(diff, diff), 0.0))
                rel = abs(c[a] - c[b]) / max(abs(c[a]), 1.0)
                if ang < MERGE_ANGLE and rel < MERGE_ANGLE:
                    pairs.append((a, b))
            elif np.linalg.norm(n[a] - n[b]) < MERGE_ANGLE and abs(d[a] - d[b]) < MERGE_ANGLE * (1 + abs(d[a])):
                pairs.append((a, b))
    roots = _union_find(len(eq), pairs)
    groups = {}
    for k, r in enumerate(roots):
        groups.setdefault(r, []).append(k)
    faces, planes, spacelike = [], [], []
    for r in sorted(groups):
        simp = groups[r]
        verts = sorted({int(v) for k in simp for v in hull.simplices[k]})
        faces.append(_ccw_order(points, np.array(verts)))
        planes.append(FacePlane(eta[r].copy(), float(c[r])))
        spacelike.append(bool(good[r]))
    return faces, planes, spacelike


def covering_radius_estimate(group, proj, n_samples=4000, rng_seed=0):
    """Estimate max over D of the distance to the nearest point of ``proj``."""
    dom = group.domain
    rng = np.random.default_rng(rng_seed)
    r = np.tanh(dom.circumradius / 2) * np.sqrt(rng.uniform(size=n_samples))
    t = rng.uniform(0, 2 * np.pi, size=n_samples)
    z = np.column_stack([r * np.cos(t), r * np.sin(t)])
    zz = np.sum(z * z, axis=1)
    x = np.column_stack([2 * z[:, 0], 2 * z[:, 1], 1 + zz]) / (1 - zz)[:, None]
    x = np.concatenate([x[dom.contains(x)], dom.vertices])
    # Euclidean neighbours in R^3 as candidates, exact distance among them;
    # the estimate only sizes the padding, which the two passes certify
    k = min(16, len(proj))
    _, idx = cKDTree(proj).query(x, k=k)
    idx = idx.reshape(len(x), k)
    d = hyp_dist(x[:, None, :], proj[idx])
    return float(d.min(axis=1).max())


class HullComplex:
    """Fuchsian convex polyhedral surface through a finite set of seed orbits.

    Attributes
    ----------
    reps : list of RepFace
        One face per orbit, translated so that its centroid lies in the
        Dirichlet domain.
    quotient_edges : list of (face, side, face, side)
        Gluing of representative sides; side k of a face joins its vertices
        k and k+1.
    """

    def __init__(self, group, seeds, domain_radius, pad=None):
        self.group = group
        self.table = group.element_table()
        dom = group.domain
        if domain_radius < dom.diameter - 1e-9:
            raise DomainTooSmall(
                f"domain_radius {domain_radius} is below the domain diameter {dom.diameter:.4f}")
        self.domain_radius = float(domain_radius)
        seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
        if not len(seeds):
            raise HullError("need at least one seed")
        try:
            proj = radial_project(seeds)
        except NotFutureTimelike:
            raise NotFutureTimelike("seeds must be future timelike") from None
        g, _ = group.reduce_to_domain(proj)
        self.seeds = np.einsum("nij,nj->ni", g, seeds)
        self.seed_radius = float(np.max(hyp_dist(ORIGIN, radial_project(self.seeds))))

        if pad is None:
            cover = self._orbit(self.seed_radius + dom.circumradius + 1.0)[1]
            pad = 2 * covering_radius_estimate(group, radial_project(cover)) + 0.5
        self.pad = float(pad)
        r1 = self.seed_radius + self.pad
        r2 = self.seed_radius + 1.5 * self.pad
        first = self._seed_faces(r1)
        second = self._seed_faces(r2)
        if set(first) != set(second):
            raise TruncationUnstable(
                f"seed faces differ between orbit radii {r1:.3f} and {r2:.3f}")
        for key in first:
            a, b = first[key][0], second[key][0]
            if np.linalg.norm(a.eta - b.eta) > 1e-8 or abs(a.c - b.c) > 1e-8 * max(1, abs(a.c)):
                raise TruncationUnstable("support planes moved between passes")
        self.orbit_radius = r2
        self._build_reps(second)
        self._build_quotient_edges()
        self.check_euler()

    # -- construction ----------------------------------------------------

    def _orbit(self, radius):
        """Orbit points whose projection lies within ``radius`` of o."""
        self.table.extend(radius + self.seed_radius)
        mats = self.table.mats
        pts = np.einsum("eij,sj->esi", mats, self.seeds)
        nrm = np.sqrt(-mink_inner(pts, pts))
        d = np.arccosh(np.maximum(pts[..., 2] / nrm, 1.0))
        e, s = np.nonzero(d <= radius)
        labels = np.column_stack([s, e])
        return labels, pts[e, s]

    def _seed_faces(self, radius):
        """Faces incident to seed vertices, keyed by canonical label class."""
        labels, pts = self._orbit(radius)
        faces, planes, spacelike = lower_faces(pts)
        out = {}
        for f, pl, ok in zip(faces, planes, spacelike):
            lab = [tuple(labels[k]) for k in f]
            if not any(e == 0 for _, e in lab):
                continue
            if not ok:
                raise NotSpacelikeFace("a face at a seed vertex is not spacelike")
            key, m = self._canonical_face(lab)
            if key not in out:
                eta = m @ pl.eta
                out[key] = (FacePlane(eta / np.sqrt(-mink_inner(eta, eta)), pl.c), lab)
        return out

    def _translate_labels(self, m, labels):
        mats = np.array([m @ self.table.mats[e] for _, e in labels])
        ids = self.table.lookup_many(mats)
        if np.any(ids < 0):
            need = max(hyp_dist(ORIGIN, radial_project(x[:, 2])) for x in mats)
            self.table.extend(need + 1e-6)
            ids = self.table.lookup_many(mats)
        return [(int(s), int(i)) for (s, _), i in zip(labels, ids)]

    def _canonical_face(self, labels):
        n = len(labels)
        best, best_m = None, None
        for j in range(n):
            inv = lorentz_inverse(self.table.mats[labels[j][1]])
            lab = self._translate_labels(inv, labels)
            cand = tuple(lab[(j + k) % n] for k in range(n))
            if best is None or cand < best:
                best, best_m = cand, inv
        return best, best_m

    def _build_reps(self, faces):
        reps = []
        for key in sorted(faces):
            pts = np.array([self.table.mats[e] @ self.seeds[s] for s, e in key])
            g, _ = self.group.reduce_to_domain(radial_project(pts.mean(axis=0)))
            lab = self._translate_labels(g, key)
            pts = np.array([self.table.mats[e] @ self.seeds[s] for s, e in lab])
            eta = g @ faces[key][0].eta
            eta /= np.sqrt(-mink_inner(eta, eta))
            # refit c from the vertices to wash out the transport error
            c = float(np.mean(mink_inner(pts, eta)))
            reps.append(RepFace(tuple(lab), FacePlane(eta, c), pts))
        dist = [hyp_dist(ORIGIN, r.centroid) for r in reps]
        order = np.argsort(dist, kind="stable")
        self.reps = [reps[k] for k in order]
        for r in self.reps:
            dev = np.max(np.abs(r.plane.value(r.points))) / max(1.0, abs(r.plane.c))
            if dev > PLANE_TOL:
                raise HullError(f"face vertices off their plane by {dev:.2e}")
        self.face_radius = max(
            float(np.max(hyp_dist(r.centroid, radial_project(r.points)))) for r in self.reps)

    def _edge_key(self, a, b):
        """Orientation-independent key of the edge class from label a to b.

        Returns (key, sign) where sign is +1 if a->b matches the canonical
        orientation.
        """
        (i, ea), (j, eb) = a, b
        Ma, Mb = self.table.mats[ea], self.table.mats[eb]
        fwd = self._translate_labels(lorentz_inverse(Ma), [b])[0][1]
        bwd = self._translate_labels(lorentz_inverse(Mb), [a])[0][1]
        k1, k2 = (i, j, fwd), (j, i, bwd)
        return (k1, 1) if k1 <= k2 else (k2, -1)

    def _build_quotient_edges(self):
        sides = {}
        self.face_sides = []
        for f, rep in enumerate(self.reps):
            n = len(rep.labels)
            row = []
            for k in range(n):
                key, sign = self._edge_key(rep.labels[k], rep.labels[(k + 1) % n])
                sides.setdefault(key, []).append((f, k, sign))
                row.append(key)
            self.face_sides.append(row)
        self.edge_keys = sorted(sides)
        self.edge_index = {k: i for i, k in enumerate(self.edge_keys)}
        self.quotient_edges = []
        for key in self.edge_keys:
            occ = sides[key]
            if len(occ) != 2 or occ[0][2] == occ[1][2]:
                raise HullError(f"edge class {key} is not glued to exactly one opposite side")
            self.quotient_edges.append((occ[0][0], occ[0][1], occ[1][0], occ[1][1]))
        self._side_sign = {(f, k): s for occ in sides.values() for f, k, s in occ}

    def side_orientation(self, f, k):
        """(edge id, sign) for side k of representative face f."""
        return self.edge_index[self.face_sides[f][k]], self._side_sign[f, k]

    @property
    def vertex_classes(self):
        return sorted({s for r in self.reps for s, _ in r.labels})

    def euler_characteristic(self):
        return len(self.vertex_classes) - len(self.edge_keys) + len(self.reps)

    def check_euler(self):
        chi = self.euler_characteristic()
        if chi != 2 - 2 * self.group.genus:
            raise HullError(f"quotient Euler characteristic {chi}, expected {2 - 2 * self.group.genus}")

    # -- patches ---------------------------------------------------------

    def patch(self, radius, center=ORIGIN):
        """Faces g.rep whose centroid projects within ``radius`` of ``center``."""
        center = radial_project(np.asarray(center, dtype=float))
        rc = hyp_dist(ORIGIN, center)
        dom = self.group.domain
        self.table.extend(radius + rc + self.face_radius + self.seed_radius + 1e-6)
        words, mats = self.group.elements_within(radius + rc + dom.circumradius)
        cents = np.array([r.centroid for r in self.reps])
        img = np.einsum("gij,rj->gri", mats, cents)
        d = np.arccosh(np.maximum(-mink_inner(img, center), 1.0))
        gs, rs = np.nonzero(d <= radius)
        order = np.lexsort((rs, d[gs, rs]))
        gs, rs = gs[order], rs[order]
        gids = self.table.lookup_many(mats[gs])
        return Patch(self, gids, rs)

    @cached_property
    def default_patch(self):
        return self.patch(self.domain_radius)

    # convenience views of the default patch
    @property
    def vertices(self):
        return self.default_patch.vertex_pos

    @property
    def faces(self):
        p = self.default_patch
        return [(p.plane(k), p.face_vertices[k]) for k in range(len(p.face_vertices))]

    @property
    def edges(self):
        return self.default_patch.edges

    # -- cone angles ---------------------------------------------------

    def corner_angles(self):
        """Face angle at every corner of every representative, by seed class."""
        out = []
        for f, rep in enumerate(self.reps):
            pts = rep.points
            n = len(pts)
            for k in range(n):
                a = pts[k - 1] - pts[k]
                b = pts[(k + 1) % n] - pts[k]
                cosang = mink_inner(a, b) / np.sqrt(mink_inner(a, a) * mink_inner(b, b))
                out.append((rep.labels[k][0], f, k, float(np.arccos(np.clip(cosang, -1, 1)))))
        return out

    def cone_angles(self):
        tot = {}
        for s, _, _, ang in self.corner_angles():
            tot[s] = tot.get(s, 0.0) + ang
        return tot

    def gauss_bonnet_sum(self):
        return float(sum(2 * np.pi - a for a in self.cone_angles().values()))

    def scaled(self, s):
        """The hull of the seeds scaled by s > 0."""
        return HullComplex(self.group, s * self.seeds, self.domain_radius, self.pad)

    @cached_property
    def hconvex(self):
        return HConvexFn(self)


class Patch:
    """Finite piece of the universal-cover surface made of translated reps."""

    def __init__(self, hull, gids, rids):
        self.hull = hull
        table = hull.table
        self.face_keys = [(int(g), int(r)) for g, r in zip(gids, rids)]
        labels = {}
        face_vertices = []
        all_mats, all_idx = [], []
        for g, r in self.face_keys:
            M = table.mats[g]
            for s, e in hull.reps[r].labels:
                all_mats.append(M @ table.mats[e])
        ids = table.lookup_many(np.array(all_mats))
        if np.any(ids < 0):
            raise HullError("element table too small for patch")
        pos = 0
        for g, r in self.face_keys:
            cyc = []
            for s, _ in hull.reps[r].labels:
                lab = (int(s), int(ids[pos]))
                pos += 1
                if lab not in labels:
                    labels[lab] = len(labels)
                cyc.append(labels[lab])
            face_vertices.append(np.array(cyc))
        self.face_vertices = face_vertices
        self.vertex_labels = np.array(list(labels), dtype=int).reshape(-1, 2)
        self.vertex_pos = np.einsum("nij,nj->ni", table.mats[self.vertex_labels[:, 1]],
                                    hull.seeds[self.vertex_labels[:, 0]])
        self.key_index = {k: i for i, k in enumerate(self.face_keys)}

    def plane(self, k):
        g, r = self.face_keys[k]
        return self.hull.reps[r].plane.transformed(self.hull.table.mats[g])

    @cached_property
    def edges(self):
        """Map (min vertex, max vertex) -> list of (face, side)."""
        out = {}
        for f, cyc in enumerate(self.face_vertices):
            n = len(cyc)
            for k in range(n):
                a, b = int(cyc[k]), int(cyc[(k + 1) % n])
                out.setdefault((min(a, b), max(a, b)), []).append((f, k))
        return out

    def __len__(self):
        return len(self.face_keys)


def fuchsian_hull(group, seeds, domain_radius=None, pad=None):
    """Boundary of the convex hull of the orbit of ``seeds`` under ``group``."""
    if domain_radius is None:
        domain_radius = group.domain.diameter
    return HullComplex(group, seeds, domain_radius, pad)


class HConvexFn:
    """Radial function u of a hull: u(x) = inf{t > 0 : t x in K}."""

    def __init__(self, hull):
        self.hull = hull
        radius = hull.group.domain.circumradius + hull.face_radius + 1e-6
        self.core = hull.patch(radius)
        planes = [self.core.plane(k) for k in range(len(self.core))]
        self.etas = np.array([p.eta for p in planes])
        self.cs = np.array([p.c for p in planes])

    def _core_values(self, x):
        return self.cs[None, :] / mink_inner(x[:, None, :], self.etas[None, :, :])

    def radial_function(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        _, xr = self.hull.group.reduce_to_domain(np.atleast_2d(x))
        u = self._core_values(xr).max(axis=1)
        return float(u[0]) if single else u

    def U(self, y):
        """(-1)-homogeneous extension to the future cone."""
        y = np.asarray(y, dtype=float)
        return self.radial_function(radial_project(y)) / np.sqrt(-mink_inner(y, y))

    def support_face_at(self, x):
        """(face key, plane) of a face attaining the max; lowest index on ties.

        The face key refers to the cover face g.rep that contains u(x) x.
        """
        x = np.asarray(x, dtype=float)
        g, xr = self.hull.group.reduce_to_domain(x)
        vals = self._core_values(xr[None])[0]
        top = vals.max()
        k = int(np.nonzero(vals >= top - 1e-12 * abs(top))[0][0])
        gc, r = self.core.face_keys[k]
        table = self.hull.table
        gid = table.lookup(lorentz_inverse(g) @ table.mats[gc])
        if gid is None:
            table.extend(hyp_dist(ORIGIN, radial_project(x)) + 2 * self.hull.group.domain.circumradius)
            gid = table.lookup(lorentz_inverse(g) @ table.mats[gc])
        return (gid, r), self.hull.reps[r].plane.transformed(table.mats[gid])

    def surface_point(self, x):
        """Surface point above x as (face key, 3D point)."""
        key, plane = self.support_face_at(x)
        x = np.asarray(x, dtype=float)
        return key, x * (plane.c / mink_inner(x, plane.eta))

    # -- extremes ----------------------------------------------------------

    def alpha_beta(self):
        """Exact (min, max) of u.

        f = -<y,y> restricted to a face plane is concave, so its minimum over
        the face is at a vertex and its maximum is either the plane's closest
        point -c eta to the origin, when inside the face, or on an edge.
        """
        alpha = np.inf
        fmax = -np.inf
        for rep in self.hull.reps:
            pts = rep.points
            f = -mink_inner(pts, pts)
            alpha = min(alpha, float(np.sqrt(f.min())))
            fmax = max(fmax, _face_fmax(pts, rep.plane))
        return alpha, float(np.sqrt(fmax))

    def mesh_extremes(self, mesh, rng_seed=0):
        """Min and max of u sampled on a net of D with spacing about ``mesh``."""
        dom = self.hull.group.domain
        R = dom.circumradius
        n = int(np.ceil(2 * R / mesh)) + 1
        t = np.linspace(-np.tanh(R / 2), np.tanh(R / 2), n)
        z = np.array([(a, b) for a in t for b in t if a * a + b * b < 1])
        zz = np.sum(z * z, axis=1)
        x = np.column_stack([2 * z[:, 0], 2 * z[:, 1], 1 + zz]) / (1 - zz)[:, None]
        x = x[dom.contains(x)]
        u = self._core_values(x).max(axis=1)
        return float(u.min()), float(u.max())


def _face_fmax(pts, plane):
    y0 = -plane.c * plane.eta
    if _inside_polygon(pts, plane, y0):
        return plane.c ** 2
    best = -np.inf
    n = len(pts)
    for k in range(n):
        a, b = pts[k], pts[(k + 1) % n]
        d = b - a
        # f(a + t d) = -<a,a> - 2t<a,d> - t^2 <d,d>
        t = np.clip(-mink_inner(a, d) / mink_inner(d, d), 0.0, 1.0)
        y = a + t * d
        best = max(best, float(-mink_inner(y, y)))
    return best


def _inside_polygon(pts, plane, y):
    """Whether y (on the plane) lies in the convex polygon pts (ccw in x1x2)."""
    n = len(pts)
    for k in range(n):
        a, b = pts[k, :2], pts[(k + 1) % n, :2]
        cross = (b[0] - a[0]) * (y[1] - a[1]) - (b[1] - a[1]) * (y[0] - a[0])
        if cross < -1e-12:
            return False
    return True


def radial_function(h, x):
    return h.radial_function(x)


def support_face_at(h, x):
    return h.support_face_at(x)


def alpha_beta(h, mesh=0.1):
    """(alpha, beta) of the radial function.

    Returns exact values; ``mesh`` only drives the sampled estimate reported
    by :meth:`HConvexFn.mesh_extremes`, which must fall inside them.
    """
    return h.alpha_beta()


def sample_domain(group, n, rng):
    """n points of H^2 uniformly distributed (by area) in the Dirichlet domain."""
    dom = group.domain
    R = dom.circumradius
    out = []
    while sum(len(o) for o in out) < n:
        m = 2 * n
        rho = np.arccosh(rng.uniform(1.0, np.cosh(R), size=m))
        t = rng.uniform(0, 2 * np.pi, size=m)
        x = np.column_stack([np.sinh(rho) * np.cos(t), np.sinh(rho) * np.sin(t), np.cosh(rho)])
        out.append(x[dom.contains(x)])
    return np.concatenate(out)[:n]
