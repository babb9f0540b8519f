"""Square-grid triangulations with known flat geometry."""

import numpy as np

from minkhull.metricspace import ConeMetric

S2 = np.sqrt(2.0)


def grid_metric(cells, wrap=None):
    """Unit squares at integer cells, each cut along its rising diagonal.

    Triangle 2m is (BL, BR, TR) and 2m+1 is (BL, TR, TL) for cell m.
    ``wrap=(nx, ny)`` glues opposite sides into a torus.
    Returns the ConeMetric and the planar corners of every triangle.
    """
    index = {c: m for m, c in enumerate(cells)}
    tris, glue, corners = [], [], []
    for (i, j) in cells:
        bl, br, tr, tl = (np.array(p, float) for p in ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)))
        tris += [[1.0, 1.0, S2], [S2, 1.0, 1.0]]
        corners += [np.array([bl, br, tr]), np.array([bl, tr, tl])]
    for (i, j), m in index.items():
        glue.append([2 * m, 2, 2 * m + 1, 0])
        right, top = (i + 1, j), (i, j + 1)
        if wrap:
            right, top = (right[0] % wrap[0], right[1]), (top[0], top[1] % wrap[1])
        if right in index:
            glue.append([2 * m, 1, 2 * index[right] + 1, 2])
        if top in index:
            glue.append([2 * m + 1, 1, 2 * index[top], 0])
    return ConeMetric(tris, glue), corners


def locate(cm, corners, x):
    """(triangle, local coords) of the planar point x."""
    x = np.asarray(x, float)
    for t, P in enumerate(corners):
        A = np.column_stack([P[1] - P[0], P[2] - P[0]])
        u, v = np.linalg.solve(A, x - P[0])
        if u >= -1e-12 and v >= -1e-12 and u + v <= 1 + 1e-12:
            c = cm.flat().coords[t]
            return t, c[0] + u * (c[1] - c[0]) + v * (c[2] - c[0])
    raise ValueError(f"{x} is outside the grid")


def to_plane(cm, corners, p):
    t, z = p
    c = cm.flat().coords[t]
    A = np.column_stack([c[1] - c[0], c[2] - c[0]])
    u, v = np.linalg.solve(A, np.asarray(z, float) - c[0])
    P = corners[t]
    return P[0] + u * (P[1] - P[0]) + v * (P[2] - P[0])
