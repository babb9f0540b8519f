"""File formats: OFF meshes, face and cone-metric JSON, report CSV/JSON.

Floats are written with 17 significant digits and keys sorted, so equal
inputs give byte-identical files.
"""

import json
from pathlib import Path

import numpy as np

from .metricspace import induced_cone_metric


def _f(x):
    return float(f"{float(x):.17g}")


def dumps(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def off_text(vertices, faces):
    v = np.asarray(vertices, float)
    lines = ["OFF", f"{len(v)} {len(faces)} 0"]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in v]
    lines += [" ".join(str(int(i)) for i in [len(f), *f]) for f in faces]
    return "\n".join(lines) + "\n"


def read_off(text):
    tok = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if tok[0] != ["OFF"]:
        raise ValueError("not an OFF file")
    nv, nf = int(tok[1][0]), int(tok[1][1])
    v = np.array([[float(x) for x in row] for row in tok[2:2 + nv]])
    faces = [[int(x) for x in row[1:1 + int(row[0])]] for row in tok[2 + nv:2 + nv + nf]]
    return v, faces


def hull_off(hull):
    """Mesh of the default cover patch (vertices in R^{2,1})."""
    patch = hull.default_patch
    return off_text(patch.vertex_pos, [list(map(int, c)) for c in patch.face_vertices])


def hull_faces(hull):
    """Quotient face representatives, their planes and the gluing."""
    reps = []
    for f, rep in enumerate(hull.reps):
        reps.append({
            "index": f,
            "labels": [[int(s), int(g)] for s, g in rep.labels],
            "eta": [_f(x) for x in rep.plane.eta],
            "c": _f(rep.plane.c),
            "points": [[_f(x) for x in p] for p in rep.points],
            "sides": [list(map(int, hull.side_orientation(f, k))) for k in range(len(rep.labels))],
        })
    cones = hull.cone_angles()
    return {
        "n_faces": len(hull.reps),
        "n_edges": len(hull.edge_keys),
        "n_vertices": len(hull.vertex_classes),
        "euler_characteristic": int(hull.euler_characteristic()),
        "face_radius": _f(hull.face_radius),
        "faces": reps,
        "cone_angles": [[int(v), _f(a)] for v, a in sorted(cones.items())],
    }


def cone_metric_json(hull):
    return induced_cone_metric(hull).to_json() + "\n"


def alpha_beta_report(hull, seed):
    a, b = hull.hconvex.alpha_beta()
    return {"alpha": _f(a), "beta": _f(b), "rng_seed": int(seed),
            "n_seeds": int(len(hull.seeds)), "n_faces": len(hull.reps)}


def write(out_dir, name, text):
    p = Path(out_dir) / name
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def load_seeds(path):
    """Seeds from .npy, .json (list of triples) or CSV/whitespace text."""
    p = Path(path)
    if p.suffix == ".npy":
        arr = np.load(p)
    elif p.suffix == ".json":
        arr = np.array(json.loads(p.read_text()), float)
    else:
        arr = np.loadtxt(p, delimiter="," if p.suffix == ".csv" else None)
    return np.atleast_2d(np.asarray(arr, float))
