"""Flat complexes: surfaces glued from convex Euclidean polygons.

A :class:`FlatComplex` stores every face in its own 2D frame, and the
gluing through shared edge ids.  Side ``s`` of a face runs from corner
``s`` to corner ``s+1`` (counterclockwise); it carries an edge id and a
sign, +1 when that direction matches the edge's own start -> end.

The same structure serves cover patches of a hull, the quotient surface
(where faces may be glued to themselves and edges may be loops), and
abstract triangle gluings.

:class:`SurfaceGraph` discretizes the intrinsic metric: nodes are the
vertices plus ``k - 1`` Steiner points per edge, and every pair of
boundary nodes of a face is joined by a straight arc.  Graph paths are
then straightened inside the corridor of faces they cross.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .lorentz import GeometryError, mink_inner


class NotSpacelikeFace(GeometryError):
    pass


class PointOffSurface(GeometryError):
    pass


class DanglingVertex(GeometryError):
    pass


def face_euclidean_embed(points):
    """Isometric 2D coordinates of a planar spacelike polygon.

    Returns ``(coords, origin, basis)`` with ``coords[k] = (<p_k - origin, e1>,
    <p_k - origin, e2>)`` for the Minkowski-orthonormal pair ``basis = (e1, e2)``.
    The orientation of the cycle is kept counterclockwise.
    """
    p = np.asarray(points, dtype=float)
    origin = p[0]
    d = p - origin
    q = mink_inner(d, d)
    far = int(np.argmax(q))
    if q[far] <= 0:
        raise NotSpacelikeFace("degenerate face")
    e1 = d[far] / np.sqrt(q[far])
    r = d - mink_inner(d, e1)[:, None] * e1
    rq = mink_inner(r, r)
    k = int(np.argmax(np.abs(rq)))
    if rq[k] <= 1e-300:
        raise NotSpacelikeFace("face plane is not spacelike")
    e2 = r[k] / np.sqrt(rq[k])
    coords = np.column_stack([mink_inner(d, e1), mink_inner(d, e2)])
    if _signed_area(coords) < 0:
        e2 = -e2
        coords[:, 1] *= -1
    return coords, origin, np.array([e1, e2])


def _signed_area(c):
    x, y = c[:, 0], c[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _triangle_coords(a, b, c):
    """Corners of a triangle with side lengths a=|01|, b=|12|, c=|20|."""
    x = (a * a + c * c - b * b) / (2 * a)
    y = np.sqrt(max(c * c - x * x, 0.0))
    return np.array([[0.0, 0.0], [a, 0.0], [x, y]])


class FlatComplex:
    """Gluing of convex Euclidean polygons.

    Parameters
    ----------
    coords : list of (n_f, 2) arrays, counterclockwise corners
    vertex_ids : list of (n_f,) int arrays
    side_edges, side_signs : list of (n_f,) int arrays
    edge_ends : (n_e, 2) array of (start, end) vertex ids
    frames : optional list of (origin, basis) mapping faces into R^{2,1}
    """

    def __init__(self, coords, vertex_ids, side_edges, side_signs, n_vertices,
                 edge_ends, frames=None, meta=None):
        self.coords = [np.asarray(c, dtype=float) for c in coords]
        self.vertex_ids = [np.asarray(v, dtype=int) for v in vertex_ids]
        self.side_edges = [np.asarray(e, dtype=int) for e in side_edges]
        self.side_signs = [np.asarray(s, dtype=int) for s in side_signs]
        self.n_vertices = int(n_vertices)
        self.edge_ends = np.asarray(edge_ends, dtype=int).reshape(-1, 2)
        self.frames = frames
        self.meta = meta or {}
        self.edge_sides = [[] for _ in range(len(self.edge_ends))]
        for f, (es, ss) in enumerate(zip(self.side_edges, self.side_signs)):
            for s, (e, sg) in enumerate(zip(es, ss)):
                self.edge_sides[e].append((f, s, int(sg)))
        self.edge_len = np.zeros(len(self.edge_ends))
        for e, occ in enumerate(self.edge_sides):
            lens = [self.side_length(f, s) for f, s, _ in occ]
            self.edge_len[e] = lens[0]
            if len(lens) > 2:
                raise GeometryError(f"edge {e} has {len(lens)} incident sides")
            if len(lens) == 2 and abs(lens[0] - lens[1]) > 1e-9 * max(1.0, lens[0]):
                raise GeometryError(f"glued sides of edge {e} differ in length")

    @property
    def n_faces(self):
        return len(self.coords)

    @property
    def n_edges(self):
        return len(self.edge_ends)

    def side_length(self, f, s):
        c = self.coords[f]
        return float(np.linalg.norm(c[(s + 1) % len(c)] - c[s]))

    def is_closed(self):
        return all(len(o) == 2 for o in self.edge_sides)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_polygons3d(cls, points, vertex_ids, side_edges, side_signs, n_vertices,
                        edge_ends, meta=None):
        coords, frames = [], []
        for p in points:
            c, o, b = face_euclidean_embed(p)
            coords.append(c)
            frames.append((o, b))
        return cls(coords, vertex_ids, side_edges, side_signs, n_vertices, edge_ends,
                   frames, meta)

    @classmethod
    def from_patch(cls, patch):
        hull = patch.hull
        pts, side_e, side_s = [], [], []
        edge_id = {}
        for f, cyc in enumerate(patch.face_vertices):
            pts.append(patch.vertex_pos[cyc])
            n = len(cyc)
            es, ss = [], []
            for s in range(n):
                a, b = int(cyc[s]), int(cyc[(s + 1) % n])
                key = (min(a, b), max(a, b))
                if key not in edge_id:
                    edge_id[key] = len(edge_id)
                es.append(edge_id[key])
                ss.append(1 if a < b else -1)
            side_e.append(es)
            side_s.append(ss)
        ends = np.array(list(edge_id), dtype=int).reshape(-1, 2)
        # embed each representative once and carry its frame along; far
        # from the origin this avoids cancellation in the Minkowski products
        rep_embed = [face_euclidean_embed(r.points) for r in hull.reps]
        coords, frames = [], []
        for g, r in patch.face_keys:
            c, o, b = rep_embed[r]
            m = hull.table.mats[g]
            coords.append(c)
            frames.append((m @ o, b @ m.T))
        return cls(coords, patch.face_vertices, side_e, side_s, len(patch.vertex_pos), ends,
                   frames, meta={"kind": "patch", "face_keys": patch.face_keys})

    @classmethod
    def from_hull_quotient(cls, hull):
        """The compact quotient surface: one face per face orbit."""
        vclass = {s: i for i, s in enumerate(hull.vertex_classes)}
        pts, vids, side_e, side_s = [], [], [], []
        ends = np.zeros((len(hull.edge_keys), 2), dtype=int)
        for f, rep in enumerate(hull.reps):
            pts.append(rep.points)
            vids.append([vclass[s] for s, _ in rep.labels])
            es, ss = [], []
            for k in range(len(rep.labels)):
                e, sg = hull.side_orientation(f, k)
                es.append(e)
                ss.append(sg)
                key = hull.edge_keys[e]
                ends[e] = (vclass[key[0]], vclass[key[1]])
            side_e.append(es)
            side_s.append(ss)
        return cls.from_polygons3d(pts, vids, side_e, side_s, len(vclass), ends,
                                   meta={"kind": "quotient"})

    @classmethod
    def from_triangles(cls, lengths, gluing, vertex_of_corner, n_vertices):
        """Triangles with sides (|01|, |12|, |20|); side e joins corners e, e+1.

        ``gluing`` lists (t, e, t2, e2); glued sides run in opposite
        directions.
        """
        coords = [_triangle_coords(*l) for l in lengths]
        side_e = [[-1, -1, -1] for _ in lengths]
        side_s = [[1, 1, 1] for _ in lengths]
        ends = []
        for t, e, t2, e2 in gluing:
            idx = len(ends)
            ends.append((vertex_of_corner[t][e], vertex_of_corner[t][(e + 1) % 3]))
            side_e[t][e] = idx
            side_e[t2][e2] = idx
            side_s[t2][e2] = -1
        for t in range(len(lengths)):
            for e in range(3):
                if side_e[t][e] < 0:
                    side_e[t][e] = len(ends)
                    ends.append((vertex_of_corner[t][e], vertex_of_corner[t][(e + 1) % 3]))
        return cls(coords, vertex_of_corner, side_e, side_s, n_vertices, ends,
                   meta={"kind": "triangles"})

    # -- geometry -------------------------------------------------------

    def to_local(self, f, y):
        o, b = self.frames[f]
        d = np.asarray(y, dtype=float) - o
        return np.array([mink_inner(d, b[0]), mink_inner(d, b[1])])

    def to_space(self, f, z):
        o, b = self.frames[f]
        z = np.asarray(z, dtype=float)
        return o + z[..., 0:1] * b[0] + z[..., 1:2] * b[1]

    def corner_angles(self):
        """(vertex, face, corner, angle) for every corner."""
        out = []
        for f, c in enumerate(self.coords):
            n = len(c)
            for k in range(n):
                a = c[k - 1] - c[k]
                b = c[(k + 1) % n] - c[k]
                cosang = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
                out.append((int(self.vertex_ids[f][k]), f, k,
                            float(np.arccos(np.clip(cosang, -1.0, 1.0)))))
        return out

    def cone_angles(self):
        tot = np.zeros(self.n_vertices)
        for v, _, _, a in self.corner_angles():
            tot[v] += a
        return tot

    def euler_characteristic(self):
        used = {int(v) for ids in self.vertex_ids for v in ids}
        return len(used) - self.n_edges + self.n_faces

    def gauss_bonnet_sum(self):
        return float(np.sum(2 * np.pi - self.cone_angles()))

    def across(self, f, s):
        """The glued side (g, s2) opposite side s of face f, or None on the boundary."""
        e = int(self.side_edges[f][s])
        for g, s2, _ in self.edge_sides[e]:
            if (g, s2) != (f, s):
                return g, s2
        return None

    def trace(self, f, z, v, length, max_steps=100000):
        """Follow the straight ray from (f, z) in direction v for ``length``.

        Returns the end point (face, local coords).  Raises GeometryError
        when the ray runs into a vertex or off the boundary.
        """
        z = np.asarray(z, float).copy()
        v = np.asarray(v, float) / np.linalg.norm(v)
        left = float(length)
        came = -1
        for _ in range(max_steps):
            c = self.coords[f]
            n = len(c)
            best, side = np.inf, -1
            for s in range(n):
                if s == came:
                    continue
                a, b = c[s], c[(s + 1) % n]
                d = b - a
                # z + lam v = a + mu d
                den = v[0] * d[1] - v[1] * d[0]
                if den <= 1e-300:
                    continue  # ray not leaving through this side
                w = a - z
                lam = (w[0] * d[1] - w[1] * d[0]) / den
                if -1e-12 <= lam < best:
                    best, side = max(lam, 0.0), s
            if side < 0:
                raise GeometryError("ray does not leave the face")
            if left <= best:
                return f, z + left * v
            a, b = c[side], c[(side + 1) % n]
            L = np.linalg.norm(b - a)
            tau = float(np.linalg.norm(z + best * v - a) / L)
            if tau < 1e-12 or tau > 1 - 1e-12:
                raise GeometryError("ray hits a vertex")
            nxt = self.across(f, side)
            if nxt is None:
                raise GeometryError("ray leaves the complex")
            g, s2 = nxt
            cg = self.coords[g]
            a2, b2 = cg[s2], cg[(s2 + 1) % len(cg)]
            u, u2 = (b - a) / L, (a2 - b2) / L
            # rotation taking u to u2
            cs, sn = u @ u2, u[0] * u2[1] - u[1] * u2[0]
            rot = np.array([[cs, -sn], [sn, cs]])
            z = b2 + tau * L * u2
            v = rot @ v
            left -= best
            f, came = g, s2
        raise GeometryError("trace did not terminate")

    def contains_local(self, f, z, tol=1e-9):
        c = self.coords[f]
        n = len(c)
        scale = max(1.0, float(np.max(np.abs(c))))
        for k in range(n):
            a, b = c[k], c[(k + 1) % n]
            cross = (b[0] - a[0]) * (z[1] - a[1]) - (b[1] - a[1]) * (z[0] - a[0])
            if cross < -tol * scale * np.linalg.norm(b - a):
                return False
        return True


@dataclass
class GeodesicPath:
    """Shortest path on a flat complex.

    ``segments`` holds (face, start, end) in face coordinates; ``points``
    the corresponding points of R^{2,1} when the complex has frames.
    Consecutive 3D segments share endpoints on cover patches; on the
    quotient they may differ by a deck transformation.
    """
    faces: list
    local: list
    length: float
    crossed_edges: list = field(default_factory=list)
    vertex_passages: list = field(default_factory=list)
    segments3d: np.ndarray = None
    junction_kinds: list = field(default_factory=list)

    @property
    def points(self):
        if self.segments3d is None or not len(self.segments3d):
            return None
        return np.concatenate([self.segments3d[:, 0], self.segments3d[-1:, 1]])

    def at(self, s):
        """Surface point (face, local coords) at arclength s from the start."""
        s = float(np.clip(s, 0.0, self.length))
        last = len(self.faces) - 1
        for m, (f, (X, Y)) in enumerate(zip(self.faces, self.local)):
            ell = float(np.linalg.norm(Y - X))
            if s <= ell or m == last:
                return f, X + (Y - X) * (min(s, ell) / ell if ell > 0 else 0.0)
            s -= ell


class SurfaceGraph:
    """Steiner graph of a flat complex with ``k`` segments per edge."""

    def __init__(self, fc, k=8, connected_check=True):
        if k < 1:
            raise ValueError("steiner density must be positive")
        self.fc = fc
        self.k = int(k)
        self.n_nodes = fc.n_vertices + fc.n_edges * (self.k - 1)
        self._n_corners = sum(len(c) for c in fc.coords)
        self._corner_angle = [np.zeros(len(c)) for c in fc.coords]
        for _, f, c, a in fc.corner_angles():
            self._corner_angle[f][c] = a
        self._templates = {}
        self._face_nodes = []
        self._face_slots_xy = []
        i_all, j_all, w_all, f_all, si_all, sj_all = [], [], [], [], [], []
        by_size = {}
        for f, c in enumerate(fc.coords):
            by_size.setdefault(len(c), []).append(f)
        for n, faces in sorted(by_size.items()):
            tmpl_a, tmpl_b, tj = self._template(n)
            fs = np.array(faces)
            nodes = np.array([self._slot_nodes(f) for f in fs])
            xy = np.array([self._slot_xy(f) for f in fs])
            for row, f in enumerate(fs):
                self._face_nodes.append((f, nodes[row]))
                self._face_slots_xy.append((f, xy[row]))
            na, nb = nodes[:, tmpl_a], nodes[:, tmpl_b]
            w = np.linalg.norm(xy[:, tmpl_a] - xy[:, tmpl_b], axis=-1)
            swap = na > nb
            i_all.append(np.where(swap, nb, na).ravel())
            j_all.append(np.where(swap, na, nb).ravel())
            w_all.append(w.ravel())
            f_all.append(np.repeat(fs, len(tmpl_a)))
            sa = np.broadcast_to(tmpl_a, na.shape)
            sb = np.broadcast_to(tmpl_b, na.shape)
            si_all.append(np.where(swap, sb, sa).ravel())
            sj_all.append(np.where(swap, sa, sb).ravel())
        self._face_nodes = [v for _, v in sorted(self._face_nodes, key=lambda t: t[0])]
        self._face_slots_xy = [v for _, v in sorted(self._face_slots_xy, key=lambda t: t[0])]
        i = np.concatenate(i_all)
        j = np.concatenate(j_all)
        w = np.concatenate(w_all)
        fa = np.concatenate(f_all)
        si = np.concatenate(si_all)
        sj = np.concatenate(sj_all)
        keep = i != j
        i, j, w, fa, si, sj = i[keep], j[keep], w[keep], fa[keep], si[keep], sj[keep]
        key = i.astype(np.int64) * self.n_nodes + j
        order = np.lexsort((w, key))
        key = key[order]
        first = np.ones(len(key), dtype=bool)
        first[1:] = key[1:] != key[:-1]
        sel = order[first]
        self.arc_key = key[first]
        self.arc_i, self.arc_j, self.arc_w = i[sel], j[sel], w[sel]
        self.arc_face, self.arc_si, self.arc_sj = fa[sel], si[sel], sj[sel]
        if np.any(self.arc_w <= 0):
            raise GeometryError("zero-length arc between distinct nodes")
        N = self.n_nodes
        rows = np.concatenate([self.arc_i, self.arc_j])
        cols = np.concatenate([self.arc_j, self.arc_i])
        data = np.concatenate([self.arc_w, self.arc_w])
        base = csr_matrix((data, (rows, cols)), shape=(N + 1, N + 1))
        base.sort_indices()
        self._indptr, self._indices, self._data = base.indptr, base.indices, base.data
        if connected_check:
            ncomp, _ = connected_components(base[:N, :N], directed=False)
            if ncomp != 1:
                raise GeometryError(f"surface graph has {ncomp} components")

    @property
    def n_arcs(self):
        return len(self.arc_w)

    # -- slots ----------------------------------------------------------

    def _template(self, n):
        if n in self._templates:
            return self._templates[n]
        k = self.k
        side_lists = []
        for s in range(n):
            side_lists.append([s * k + j for j in range(k)] + [((s + 1) % n) * k])
        pos = {}
        for s, lst in enumerate(side_lists):
            for p, slot in enumerate(lst):
                pos.setdefault(slot, []).append((s, p))
        a, b = [], []
        m = n * k
        for x in range(m):
            for y in range(x + 1, m):
                ok = True
                for s1, p1 in pos[x]:
                    for s2, p2 in pos[y]:
                        if s1 == s2 and abs(p1 - p2) != 1:
                            ok = False
                if ok:
                    a.append(x)
                    b.append(y)
        out = (np.array(a), np.array(b), None)
        self._templates[n] = out
        return out

    def _slot_nodes(self, f):
        fc, k = self.fc, self.k
        n = len(fc.coords[f])
        out = np.empty(n * k, dtype=np.int64)
        for s in range(n):
            out[s * k] = fc.vertex_ids[f][s]
            e, sg = fc.side_edges[f][s], fc.side_signs[f][s]
            for j in range(1, k):
                idx = j if sg > 0 else k - j
                out[s * k + j] = fc.n_vertices + e * (k - 1) + idx - 1
        return out

    def _slot_xy(self, f):
        c = self.fc.coords[f]
        n, k = len(c), self.k
        t = np.arange(k) / k
        return np.concatenate([c[s] + t[:, None] * (c[(s + 1) % n] - c[s]) for s in range(n)])

    def slot_side(self, f, slot):
        """(side, tau) of a boundary slot: the point is corner + tau*(side vector)."""
        return slot // self.k, (slot % self.k) / self.k

    # -- queries ----------------------------------------------------------

    def _run(self, face, z, limit=np.inf):
        """Dijkstra from the surface point (face, z). Returns (dist, pred, src_slot)."""
        N = self.n_nodes
        nodes = self._face_nodes[face]
        xy = self._face_slots_xy[face]
        w = np.linalg.norm(xy - z, axis=1)
        # one outgoing arc per distinct node, keeping the shortest slot
        order = np.lexsort((w, nodes))
        first = np.ones(len(order), dtype=bool)
        first[1:] = nodes[order][1:] != nodes[order][:-1]
        sel = order[first]
        src_nodes, src_w = nodes[sel], np.maximum(w[sel], 1e-300)
        src_slot = dict(zip(src_nodes.tolist(), sel.tolist()))
        indptr = self._indptr.copy()
        indptr[-1] += len(sel)
        g = csr_matrix((np.concatenate([self._data, src_w]),
                        np.concatenate([self._indices, src_nodes]), indptr),
                       shape=(N + 1, N + 1))
        dist, pred = dijkstra(g, directed=True, indices=N, return_predecessors=True,
                              limit=limit)
        return dist, pred, src_slot

    def distances(self, src, targets, limit=np.inf):
        """Graph distances from ``src`` to each target, both (face, z)."""
        face, z = src
        dist, _, _ = self._run(face, np.asarray(z, float), limit)
        out = np.empty(len(targets))
        for t, (tf, tz) in enumerate(targets):
            out[t] = self._target_dist(dist, face, z, tf, tz)[0]
        return out

    def _target_dist(self, dist, sf, sz, tf, tz):
        nodes = self._face_nodes[tf]
        xy = self._face_slots_xy[tf]
        tot = dist[nodes] + np.linalg.norm(xy - np.asarray(tz, float), axis=1)
        best = int(np.argmin(tot))
        val, slot = float(tot[best]), best
        if tf == sf:
            direct = float(np.linalg.norm(np.asarray(tz, float) - np.asarray(sz, float)))
            if direct <= val:
                return direct, None
        return val, slot

    def distance(self, p, q):
        return float(self.distances(p, [q])[0])

    def paths(self, src, targets, taut=True, limit=np.inf):
        """Shortest paths from ``src`` to every target (one Dijkstra run)."""
        face, z = src
        z = np.asarray(z, float)
        dist, pred, src_slot = self._run(face, z, limit)
        out = []
        for tf, tz in targets:
            tz = np.asarray(tz, float)
            val, slot = self._target_dist(dist, face, z, tf, tz)
            if slot is None:
                out.append(self._direct_path(face, z, tz))
                continue
            chain = [int(self._face_nodes[tf][slot])]
            while pred[chain[-1]] != self.n_nodes and pred[chain[-1]] >= 0:
                chain.append(int(pred[chain[-1]]))
            chain.reverse()
            hops = self._hops(face, z, src_slot[chain[0]], chain, tf, tz, slot)
            path = self._corridor_path(hops)
            if not taut:
                path.length = val
            out.append(path)
        return out

    def path(self, p, q, taut=True):
        return self.paths(p, [q], taut=taut)[0]

    # -- path reconstruction ---------------------------------------------

    def _arc(self, a, b):
        i, j = min(a, b), max(a, b)
        idx = int(np.searchsorted(self.arc_key, np.int64(i) * self.n_nodes + j))
        f = int(self.arc_face[idx])
        si, sj = int(self.arc_si[idx]), int(self.arc_sj[idx])
        return (f, si, sj) if a == i else (f, sj, si)

    def _hops(self, sf, sz, s_slot, chain, tf, tz, t_slot):
        """Segments of the graph path as (face, slot_or_point, slot_or_point)."""
        segs = [(sf, ("pt", sz), ("slot", s_slot))]
        for a, b in zip(chain[:-1], chain[1:]):
            f, sa, sb = self._arc(a, b)
            segs.append((f, ("slot", sa), ("slot", sb)))
        segs.append((tf, ("slot", t_slot), ("pt", tz)))
        return segs

    def _corridor_path(self, segs):
        """Straighten a segment chain inside its corridor of faces.

        Edge junctions slide along their edge.  A vertex junction may be
        replaced by the crossings of the faces around that vertex on
        either side; the shorter result is kept.
        """
        fc, k = self.fc, self.k
        # merge consecutive segments through the same boundary point of a face
        merged = [segs[0]]
        for s in segs[1:]:
            f0, a0, b0 = merged[-1]
            f1, a1, b1 = s
            if f0 == f1 and b0 == a1:
                merged[-1] = (f0, a0, b1)
            else:
                merged.append(s)
        start = np.asarray(merged[0][1][1], float)
        stop = np.asarray(merged[-1][2][1], float)
        faces = [m[0] for m in merged]
        junctions = []
        for m in range(len(merged) - 1):
            f0, f1 = merged[m][0], merged[m + 1][0]
            slot0, slot1 = merged[m][2][1], merged[m + 1][1][1]
            s0, tau0 = self.slot_side(f0, slot0)
            s1, _ = self.slot_side(f1, slot1)
            if slot0 % k == 0:
                junctions.append(("vertex", int(fc.vertex_ids[f0][s0]), s0, s1, 0.0))
            else:
                e = int(fc.side_edges[f0][s0])
                t = tau0 if fc.side_signs[f0][s0] > 0 else 1 - tau0
                junctions.append(("edge", e, s0, s1, t))

        best = self._straighten(start, stop, faces, junctions)
        for _ in range(8):
            improved = False
            for m in range(len(best[1])):
                if best[1][m][0] != "vertex":
                    continue
                X, Y = self._neighbours(start, stop, best, m)
                for ccw in (True, False):
                    fan = self._fan(best[0][m], best[1][m][2], best[0][m + 1],
                                    best[1][m][3], ccw, X, Y)
                    if fan is None:
                        continue
                    fs, js = fan
                    cand = self._straighten(start, stop,
                                            best[0][:m + 1] + fs + best[0][m + 1:],
                                            best[1][:m] + js + best[1][m + 1:])
                    if cand[2] < best[2] - 1e-13 * max(1.0, best[2]):
                        best = cand
                        improved = True
                        break
                if improved:
                    break
            if not improved:
                break
        return self._assemble(start, stop, *best)

    def _point(self, f, kind, s, t):
        P, Q = self._side_affine(f, s, kind)
        return P + t * Q

    def _neighbours(self, start, stop, state, m):
        """Start of the segment entering junction m and end of the one leaving it."""
        faces, junctions, _ = state
        if m == 0:
            X = start
        else:
            kd, _, _, s1, t = junctions[m - 1]
            X = self._point(faces[m], kd, s1, t)
        if m + 1 == len(junctions):
            Y = stop
        else:
            kd, _, s0, _, t = junctions[m + 1]
            Y = self._point(faces[m + 1], kd, s0, t)
        return X, Y

    def _fan(self, f0, c0, f1, c1, ccw, X, Y):
        """Edge crossings around the vertex at corner c0 of f0 until corner c1 of f1.

        Returns None when the swept angle between the incoming and the
        outgoing segment is at least pi on that side (no shortcut).
        """
        fc = self.fc

        def ang(a, b):
            # counterclockwise angle from a to b in [0, 2 pi)
            return float(np.arctan2(a[0] * b[1] - a[1] * b[0], a @ b)) % (2 * np.pi)

        c = fc.coords[f0]
        V = c[c0]
        back = X - V
        if back @ back < 1e-24:
            return None
        n = len(c)
        if ccw:
            swept = ang(back, c[(c0 - 1) % n] - V)
        else:
            swept = ang(c[(c0 + 1) % n] - V, back)
        faces, junctions = [], []
        f, cc = f0, c0
        for _ in range(self._n_corners + 1):
            n = len(fc.coords[f])
            s = (cc - 1) % n if ccw else cc
            nxt = fc.across(f, s)
            if nxt is None:
                return None
            g, s2 = nxt
            # the vertex sits at the end of side s (ccw) or at its start (cw)
            tau = 1.0 if ccw else 0.0
            t = tau if fc.side_signs[f][s] > 0 else 1 - tau
            junctions.append(("edge", int(fc.side_edges[f][s]), s, s2, t))
            f, cc = g, (s2 if ccw else (s2 + 1) % len(fc.coords[g]))
            cg = fc.coords[f]
            ng, W = len(cg), cg[cc]
            if (f, cc) == (f1, c1):
                out = Y - W
                if out @ out < 1e-24:
                    return None
                if ccw:
                    swept += ang(cg[(cc + 1) % ng] - W, out)
                else:
                    swept += ang(out, cg[(cc - 1) % ng] - W)
                return (faces, junctions) if swept < np.pi - 1e-12 else None
            swept += self._corner_angle[f][cc]
            if swept >= np.pi:
                return None
            faces.append(f)
        return None

    def _side_affine(self, f, s, kind):
        """Point on side s (or corner s) of face f as P + t Q, t the edge parameter."""
        c = self.fc.coords[f]
        A = c[s]
        if kind == "vertex":
            return A.copy(), np.zeros(2)
        B = c[(s + 1) % len(c)] - A
        if self.fc.side_signs[f][s] > 0:
            return A, B
        return A + B, -B

    # -- corridor straightening --------------------------------------------

    @staticmethod
    def _reduce(faces, junctions):
        """Cancel a crossing immediately undone through the same side."""
        fs, js = [faces[0]], []
        for f, j in zip(faces[1:], junctions):
            if (js and j[0] == "edge" and js[-1][0] == "edge" and j[1] == js[-1][1]
                    and j[2] == js[-1][3] and j[3] == js[-1][2]):
                js.pop()
                fs.pop()
                continue
            js.append(j)
            fs.append(f)
        return fs, js

    def _vertex_corner(self, f, s, t):
        """Corner of face f at the end of side s where the edge parameter is t."""
        tau = t if self.fc.side_signs[f][s] > 0 else 1 - t
        return s if tau <= 0.5 else (s + 1) % len(self.fc.coords[f])

    def _collapse(self, faces, junctions):
        """Turn runs of crossings through one vertex into a single vertex junction."""
        fc = self.fc
        fs, js = [faces[0]], []
        m = 0
        while m < len(junctions):
            kd, e, s0, s1, t = junctions[m]
            if kd == "edge" and 0.0 < t < 1.0:
                js.append(junctions[m])
                fs.append(faces[m + 1])
                m += 1
                continue
            # the path is at a vertex here
            c0 = s0 if kd == "vertex" else self._vertex_corner(faces[m], s0, t)
            v = int(fc.vertex_ids[faces[m]][c0])
            n = m
            while True:
                kd2, _, _, s1b, t2 = junctions[n]
                c1 = s1b if kd2 == "vertex" else self._vertex_corner(faces[n + 1], s1b, t2)
                nxt = junctions[n + 1] if n + 1 < len(junctions) else None
                if nxt is None or (nxt[0] == "edge" and 0.0 < nxt[4] < 1.0):
                    break
                cn = nxt[2] if nxt[0] == "vertex" else self._vertex_corner(faces[n + 1], nxt[2], nxt[4])
                if int(fc.vertex_ids[faces[n + 1]][cn]) != v or cn != c1:
                    break
                n += 1
            if faces[m] == faces[n + 1] and c0 == c1:
                # touched the vertex and came back into the same corner
                pass
            else:
                js.append(("vertex", v, c0, c1, 0.0))
                fs.append(faces[n + 1])
            m = n + 1
        return fs, js

    def _straighten(self, start, stop, faces, junctions):
        """Shortest path in the corridor: unfold between vertex junctions, pull taut."""
        faces, junctions = self._reduce(faces, junctions)
        out = list(junctions)
        cuts = [m for m, j in enumerate(junctions) if j[0] == "vertex"]
        lo = 0
        for cut in cuts + [len(junctions)]:
            a = start if lo == 0 else self.fc.coords[faces[lo]][junctions[lo - 1][3]]
            b = stop if cut == len(junctions) else self.fc.coords[faces[cut]][junctions[cut][2]]
            ts = self._funnel(a, b, faces[lo:cut + 1], junctions[lo:cut])
            for m, t in zip(range(lo, cut), ts):
                kd, e, s0, s1, _ = out[m]
                out[m] = (kd, e, s0, s1, t)
            lo = cut + 1
        faces, out = self._collapse(faces, out)
        return faces, out, self._length(start, stop, faces, out)

    def _length(self, start, stop, faces, junctions):
        pts = self._segment_ends(start, stop, faces, junctions)
        return float(sum(np.linalg.norm(Y - X) for X, Y in pts))

    def _segment_ends(self, start, stop, faces, junctions):
        out = []
        X = start
        for m, f in enumerate(faces):
            if m < len(junctions):
                kd, _, s0, s1, t = junctions[m]
                Y = self._point(f, kd, s0, t)
                out.append((X, Y))
                X = self._point(faces[m + 1], kd, s1, t)
            else:
                out.append((X, stop))
        return out

    def _funnel(self, start, stop, faces, junctions):
        """Edge parameters of the taut path through a sleeve of edge portals."""
        if not junctions:
            return []
        fc = self.fc
        rot, off = np.eye(2), np.zeros(2)
        lefts, rights = [], []
        for m, (_, _, s0, s1, _) in enumerate(junctions):
            c = fc.coords[faces[m]]
            R = rot @ c[s0] + off
            L = rot @ c[(s0 + 1) % len(c)] + off
            rights.append(R)
            lefts.append(L)
            # place the next face so that its side s1 runs from L to R
            cn = fc.coords[faces[m + 1]]
            u = cn[(s1 + 1) % len(cn)] - cn[s1]
            w = R - L
            ang = np.arctan2(w[1], w[0]) - np.arctan2(u[1], u[0])
            cs, sn = np.cos(ang), np.sin(ang)
            rot = np.array([[cs, -sn], [sn, cs]])
            off = L - rot @ cn[s1]
        end = rot @ stop + off
        pts = _funnel_path(np.asarray(start, float), end, lefts, rights)
        ts = []
        seg = 0
        for m, (L, R) in enumerate(zip(lefts, rights)):
            tau = None
            while tau is None:
                P, Q = pts[seg], pts[seg + 1]
                tau = _portal_hit(P, Q, L, R, last=seg + 2 == len(pts))
                if tau is None:
                    seg += 1
            tau = float(np.clip(tau, 0.0, 1.0))
            if tau < 1e-12:
                tau = 0.0
            elif tau > 1 - 1e-12:
                tau = 1.0
            kd, e, s0, s1, _ = junctions[m]
            ts.append(tau if fc.side_signs[faces[m]][s0] > 0 else 1 - tau)
        return ts

    def _assemble(self, start, stop, faces, junctions, length):
        fc = self.fc
        local = self._segment_ends(start, stop, faces, junctions)
        segs3d = []
        if fc.frames is not None:
            segs3d = [fc.to_space(f, np.array([X, Y])) for f, (X, Y) in zip(faces, local)]
        crossed, passes, kinds = [], [], []
        for kind, e, _, _, tm in junctions:
            if kind == "edge" and 0.0 < tm < 1.0:
                crossed.append((e, tm))
                kinds.append("edge")
                continue
            v = e if kind == "vertex" else int(fc.edge_ends[e][0 if tm <= 0 else 1])
            passes.append(v)
            kinds.append("vertex")
        return GeodesicPath(list(faces), local, length, crossed, passes,
                            np.array(segs3d) if segs3d else None, kinds)

    def _direct_path(self, f, z0, z1):
        segs3d = None
        if self.fc.frames is not None:
            segs3d = np.array([self.fc.to_space(f, np.array([z0, z1]))])
        return GeodesicPath([f], [(z0, z1)], float(np.linalg.norm(z1 - z0)), [], [], segs3d, [])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _funnel_path(start, end, lefts, rights):
    """String pulling through portals (L, R) seen from the start.

    Returns the polyline start, bend points, end.
    """
    scale = max(1.0, float(np.max(np.abs(np.concatenate([lefts, rights, [start, end]])))))
    eps = 1e-14 * scale * scale

    def same(a, b):
        return abs(a[0] - b[0]) + abs(a[1] - b[1]) <= 1e-13 * scale

    portals = [(start, start)] + list(zip(lefts, rights)) + [(end, end)]
    pts = [start]
    apex = left = right = start
    ai = li = ri = 0
    i = 1
    while i < len(portals):
        L, R = portals[i]
        if _cross(apex, right, R) >= -eps:
            if same(apex, right) or _cross(apex, left, R) < -eps:
                right, ri = R, i
            else:
                pts.append(left)
                apex, ai = left, li
                right, ri = apex, ai
                i = ai + 1
                continue
        if _cross(apex, left, L) <= eps:
            if same(apex, left) or _cross(apex, right, L) > eps:
                left, li = L, i
            else:
                pts.append(right)
                apex, ai = right, ri
                left, li = apex, ai
                i = ai + 1
                continue
        i += 1
    if not same(pts[-1], end):
        pts.append(end)
    return pts


def _portal_hit(P, Q, L, R, last):
    """Parameter from R to L where the segment PQ crosses the portal, or None."""
    D = Q - P
    W = L - R
    den = D[0] * W[1] - D[1] * W[0]
    scale = max(np.linalg.norm(D), 1e-300) * max(np.linalg.norm(W), 1e-300)
    if abs(den) <= 1e-14 * scale:
        # parallel or degenerate: use the closer end of the portal
        if np.linalg.norm(D) < 1e-300:
            return float(np.clip((P - R) @ W / (W @ W), 0.0, 1.0))
        return None if not last else float(np.clip((Q - R) @ W / (W @ W), 0.0, 1.0))
    RP = R - P
    tau = -(D[0] * RP[1] - D[1] * RP[0]) / den
    lam = (RP[0] * W[1] - RP[1] * W[0]) / den
    if lam > 1 + 1e-9 and not last:
        return None
    return tau
