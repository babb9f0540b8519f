"""Numerical checks of the quantitative estimates for hull surfaces.

Every check returns a :class:`BoundReport`.  Margins are RHS - LHS, so a
sample violates the bound when its margin is below ``-tolerance``.

Intrinsic distances come from taut graph paths.  Those are lengths of
genuine surface curves, hence upper estimates of the true distance.
Where an overestimate could hide a violation, the check divides by
``1 + eps_graph`` first.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .fuchsian import ORIGIN, translation_length
from .hull import sample_domain
from .intrinsic import CoverSurface, f_along_path
from .lorentz import hyp_dist, mink_inner, radial_project

ANALYTIC_TOL = 1e-9


def graph_budget(k):
    """Declared relative error of taut Steiner-graph distances at density k."""
    return 0.5 / k


@dataclass
class BoundReport:
    name: str
    samples: int
    worst_margin: float
    violations: int
    tolerance: float
    seed: int = None
    control: bool = False
    details: dict = field(default_factory=dict)

    @classmethod
    def from_margins(cls, name, margins, tolerance, seed=None, control=False, **details):
        m = np.asarray(margins, dtype=float).ravel()
        return cls(name, int(m.size), float(m.min()) if m.size else float("inf"),
                   int(np.sum(m < -tolerance)), float(tolerance), seed, control, details)

    def to_dict(self):
        d = asdict(self)
        d["worst_margin"] = _num(d["worst_margin"])
        d["details"] = {k: _num(v) for k, v in d["details"].items()}
        return d


def _num(v):
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def reports_to_json(reports):
    ordered = sorted(reports, key=lambda r: r.name)
    return json.dumps([r.to_dict() for r in ordered], indent=1, sort_keys=True)


def lower_bilipschitz_constant(alpha, beta):
    return 1.0 / (1.0 / alpha + np.sqrt(max(beta * beta - alpha * alpha, 0.0)) / alpha ** 2)


def _pairs(group, n_pairs, rng):
    """Random pairs in D grouped by source: a few sources, many targets each."""
    n_src = int(np.ceil(np.sqrt(n_pairs)))
    src = sample_domain(group, n_src, rng)
    tgt = sample_domain(group, n_pairs, rng)
    groups = np.array_split(np.arange(n_pairs), n_src)
    return [(src[i], tgt[g]) for i, g in enumerate(groups) if len(g)]


def bilipschitz_check(h, cover: CoverSurface, n_pairs, rng_seed=0, eps_graph=None,
                      alpha=None, beta=None, control=False):
    """c_lo d_H <= d_u (1 + eps) and d_u / (1 + eps) <= beta d_H on random pairs."""
    a0, b0 = h.alpha_beta()
    alpha = a0 if alpha is None else alpha
    beta = b0 if beta is None else beta
    eps = graph_budget(cover.k) if eps_graph is None else eps_graph
    lo = lower_bilipschitz_constant(alpha, beta)
    rng = np.random.default_rng(rng_seed)
    margins, ratios = [], []
    for x, ys in _pairs(h.hull.group, n_pairs, rng):
        p = cover.lift(x)
        du = cover.distances(p, [cover.lift(y) for y in ys])
        dh = hyp_dist(x, ys)
        m_lo = du * (1 + eps) - lo * dh
        m_hi = beta * dh - du / (1 + eps)
        margins.append(np.minimum(m_lo, m_hi))
        ratios.append(du / np.maximum(dh, 1e-300))
    ratios = np.concatenate(ratios)
    return BoundReport.from_margins(
        "bilipschitz", np.concatenate(margins), ANALYTIC_TOL, rng_seed, control,
        alpha=alpha, beta=beta, lower_constant=lo, eps_graph=eps,
        min_ratio=float(ratios.min()), max_ratio=float(ratios.max()))


def chord_tangent_margins(path, alpha, beta):
    """beta^2 - alpha^2 - max <nu, nu'>^2 per segment of a unit-speed path."""
    segs = path.segments3d
    a, b = segs[:, 0], segs[:, 1]
    d = b - a
    ell = np.sqrt(np.maximum(mink_inner(d, d), 0.0))
    ok = ell > 1e-14
    a, ell, d = a[ok], ell[ok], d[ok]
    v = d / ell[:, None]
    s0 = mink_inner(a, v)
    s1 = s0 + ell * mink_inner(v, v)
    return beta ** 2 - alpha ** 2 - np.maximum(s0 ** 2, s1 ** 2)


def chord_tangent_check(paths, alpha, beta, control=False, name="chord_tangent"):
    if not isinstance(paths, (list, tuple)):
        paths = [paths]
    margins = np.concatenate([chord_tangent_margins(p, alpha, beta) for p in paths]) if paths else []
    scale = max(beta ** 2, 1.0)
    return BoundReport.from_margins(name, margins, ANALYTIC_TOL * scale, control=control,
                                    alpha=alpha, beta=beta)


def sample_paths(h, cover, n_pairs, rng_seed=0):
    rng = np.random.default_rng(rng_seed)
    out = []
    for x, ys in _pairs(h.hull.group, n_pairs, rng):
        ps = cover.paths(cover.lift(x), [cover.lift(y) for y in ys])
        out.extend((x, y, p) for y, p in zip(ys, ps))
    return out


def projection_estimate_check(h, cover, n_pairs, rng_seed=0, alpha=None, control=False):
    """d_H(x, y) <= L/alpha + (1/alpha^2) int |<nu, nu'>| along the computed path."""
    alpha = h.alpha_beta()[0] if alpha is None else alpha
    margins = []
    for x, y, path in sample_paths(h, cover, n_pairs, rng_seed):
        if path.length == 0:
            margins.append(0.0)
            continue
        fd = f_along_path(path)
        rhs = path.length / alpha + fd.integral / alpha ** 2
        margins.append(rhs - hyp_dist(x, y))
    return BoundReport.from_margins("projection_estimate", margins, ANALYTIC_TOL, rng_seed,
                                    control, alpha=alpha)


def f_maximum(hull):
    """Global maximizer y_M of f = -<y,y> over the surface, in D.

    f is concave on every face, so the maximum sits at a face's closest
    point -c eta when that lies inside the face, or on an edge.  Ties go
    to the lowest representative index.
    """
    from .hull import _face_fmax, _inside_polygon
    best, best_y = -np.inf, None
    for rep in hull.reps:
        val = _face_fmax(rep.points, rep.plane)
        if val > best + 1e-12 * abs(val):
            best = val
            y0 = -rep.plane.c * rep.plane.eta
            if _inside_polygon(rep.points, rep.plane, y0):
                best_y = y0
            else:
                best_y = _edge_argmax(rep.points)
    g, _ = hull.group.reduce_to_domain(radial_project(best_y))
    return g @ best_y, float(best)


def _edge_argmax(pts):
    best, arg = -np.inf, None
    for k in range(len(pts)):
        a, b = pts[k], pts[(k + 1) % len(pts)]
        d = b - a
        t = np.clip(-mink_inner(a, d) / mink_inner(d, d), 0.0, 1.0)
        y = a + t * d
        if -mink_inner(y, y) > best:
            best, arg = -mink_inner(y, y), y
    return arg


def vertex_f_maximum(hull):
    """Largest f over hull vertices (for comparison with the global maximum)."""
    vals = -mink_inner(hull.seeds, hull.seeds)
    used = hull.vertex_classes
    i = max(used, key=lambda s: (vals[s], -s))
    return hull.seeds[i], float(vals[i])


def _translate_path(hull, k, y, gy, margin=1.0):
    xp, xq = radial_project(y), radial_project(gy)
    mid = radial_project(xp + xq)
    radius = hyp_dist(xp, xq) / 2 + hull.face_radius + margin
    cover = CoverSurface(hull, k, radius=radius, center=mid)
    return cover.path(y, gy)


def _generators(group, words):
    if words is None:
        return [(i + 1,) for i in range(len(group.generators))]
    return [tuple(w) for w in words]


def fmax_integral_check(hull, k=8, words=None, control=False):
    """int |<c, c'>| <= l^2/2 on the path from y_M to each translate."""
    group = hull.group
    yM, fM = f_maximum(hull)
    margins, details = [], {"f_max": fM, "f_max_vertex": vertex_f_maximum(hull)[1]}
    jumps, second = [], []
    for w in _generators(group, words):
        if not w:
            margins.append(0.0)
            continue
        gy = group.word_matrix(w) @ yM
        path = _translate_path(hull, k, yM, gy)
        fd = f_along_path(path)
        margins.append(fd.length ** 2 / 2 - fd.integral)
        jumps.append(fd.edge_jumps)
        second.append(fd.second_derivative)
    jumps = np.concatenate(jumps) if jumps else np.zeros(0)
    second = np.concatenate(second) if second else np.zeros(0)
    details.update(min_edge_jump=float(jumps.min()) if jumps.size else 0.0,
                   max_second_derivative_error=float(np.max(np.abs(second + 2))) if second.size else 0.0)
    return BoundReport.from_margins("fmax_integral", margins, ANALYTIC_TOL, control=control,
                                    **details)


def f_function_check(hull, k=8, words=None):
    """(f o c)'' = -2 on segments and jumps >= 0 at crossed edges."""
    group = hull.group
    yM, _ = f_maximum(hull)
    margins = []
    for w in _generators(group, words):
        gy = group.word_matrix(w) @ yM
        fd = f_along_path(_translate_path(hull, k, yM, gy))
        margins.append(ANALYTIC_TOL - np.abs(fd.second_derivative + 2))
        margins.append(fd.edge_jumps + 0.0)
    return BoundReport.from_margins("f_function", np.concatenate(margins), ANALYTIC_TOL)


def translation_length_bound_check(hull, k=8, alpha=None, words=None, eps_graph=None,
                                   control=False):
    """L(gamma) <= B/alpha + B^2/(2 alpha^2), B = d_u(y_M, gamma y_M)."""
    group = hull.group
    alpha = hull.hconvex.alpha_beta()[0] if alpha is None else alpha
    eps = graph_budget(k) if eps_graph is None else eps_graph
    yM, _ = f_maximum(hull)
    margins, Bs = [], []
    for w in _generators(group, words):
        m = group.word_matrix(w)
        B = _translate_path(hull, k, yM, m @ yM).length / (1 + eps)
        Bs.append(B)
        margins.append(B / alpha + B * B / (2 * alpha * alpha) - translation_length(m))
    name = "translation_length_bound" + ("_control" if control else "")
    return BoundReport.from_margins(name, margins, ANALYTIC_TOL, control=control,
                                    alpha=alpha, max_B=max(Bs), min_B=min(Bs))


def short_geodesic_radius(group):
    """Short-geodesic radius 2 arccosh(Area/(2 pi) + 1) from the area argument."""
    return float(2 * np.arccosh(group.domain.area / (2 * np.pi) + 1))


def short_displacement_check(group, n_points=1000, max_word=8, rng_seed=0):
    """Every sampled x is moved less than R by some nontrivial short word."""
    R = short_geodesic_radius(group)
    rng = np.random.default_rng(rng_seed)
    x = sample_domain(group, n_points, rng)
    words, mats = group.elements_within(R + group.domain.circumradius)
    sel = [i for i, w in enumerate(words) if 0 < len(w) <= max_word]
    imgs = np.einsum("nij,pj->pni", mats[sel], x)
    d = hyp_dist(x[:, None, :], imgs).min(axis=1)
    return BoundReport.from_margins("short_displacement", R - d, ANALYTIC_TOL, rng_seed,
                                    R=R, max_min_displacement=float(d.max()))


def surface_systole(hull, k=8, n_points=0, rng_seed=0):
    """Upper estimate of G = min over p and nontrivial w of d_u(p, w p).

    Uses the point where u attains alpha (a vertex) plus ``n_points``
    random ones, and translates w p within the short-geodesic radius R,
    which always contains one.
    """
    group = hull.group
    vals = -mink_inner(hull.seeds, hull.seeds)
    low = min(hull.vertex_classes, key=lambda s: (vals[s], s))
    pts = [radial_project(hull.seeds[low])]
    if n_points:
        pts.extend(sample_domain(group, n_points, np.random.default_rng(rng_seed)))
    R = short_geodesic_radius(group)
    best = np.inf
    for x in pts:
        p = hull.hconvex.surface_point(x)[1]
        _, mats = group.elements_within(2 * hyp_dist(ORIGIN, x) + R + 1e-9)
        imgs = np.einsum("nij,j->ni", mats[1:], p)
        dh = hyp_dist(radial_project(imgs), x)
        sel = np.nonzero(dh <= R)[0]
        cover = CoverSurface(hull, k, radius=R + hull.face_radius + 0.5, center=x)
        best = min(best, float(cover.distances(p, imgs[sel]).min()))
    return best


def lower_bound_argument_check(hull, k=8, alpha=None, eps_graph=None, control=False):
    """G <= sqrt(2) alpha (cosh R - 1)^{1/2} with G the surface systole."""
    alpha = hull.hconvex.alpha_beta()[0] if alpha is None else alpha
    eps = graph_budget(k) if eps_graph is None else eps_graph
    G = surface_systole(hull, k) / (1 + eps)
    R = short_geodesic_radius(hull.group)
    rhs = np.sqrt(2) * alpha * np.sqrt(np.cosh(R) - 1)
    return BoundReport.from_margins("lower_bound_argument", [rhs - G], ANALYTIC_TOL,
                                    control=control, G=G, R=R, rhs=float(rhs), alpha=alpha)
