"""Exact geometry of bounded H-polytopes {x : A x <= b} in dimension 2 and 3.

Vertex enumeration, volume, and facet decomposition (area, outward normal,
vertex list per facet). 2D enumeration is done by pairwise line intersection;
3D goes through scipy's halfspace intersection seeded by a Chebyshev center.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError


class PolytopeError(ValueError):
    pass


def chebyshev_center(A, b):
    """Center and radius of the largest inscribed ball (LP)."""
    m, n = A.shape
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, norms[:, None]])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * n + [(0, None)],
                  method="highs")
    if not res.success or res.x[-1] <= 0:
        raise PolytopeError("empty or degenerate polytope")
    return res.x[:n], res.x[-1]


def polytope_vertices(A, b, tol=1e-9):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    if n == 2:
        return _vertices_2d(A, b, tol)
    interior, radius = chebyshev_center(A, b)
    halfspaces = np.hstack([A, -b[:, None]])
    try:
        hs = HalfspaceIntersection(halfspaces, interior)
    except QhullError as exc:
        raise PolytopeError(f"halfspace intersection failed: {exc}") from exc
    verts = hs.intersections
    if not np.all(np.isfinite(verts)):
        raise PolytopeError("unbounded polytope")
    return _dedupe(verts, tol)


def _vertices_2d(A, b, tol):
    m = A.shape[0]
    pts = []
    scale = max(1.0, float(np.max(np.abs(b))) if m else 1.0)
    for i, j in itertools.combinations(range(m), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) < 1e-13:
            continue
        p = np.linalg.solve(M, b[[i, j]])
        if np.all(A @ p <= b + tol * scale):
            pts.append(p)
    if len(pts) < 3:
        raise PolytopeError("not a 2D body")
    pts = _dedupe(np.array(pts), tol)
    c = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]))
    return pts[order]


def _dedupe(pts, tol):
    out = []
    for p in pts:
        if not any(np.linalg.norm(p - q) <= 10 * tol for q in out):
            out.append(p)
    return np.array(out)


def polytope_volume(A, b):
    verts = polytope_vertices(A, b)
    n = verts.shape[1]
    if n == 2:
        x, y = verts[:, 0], verts[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    hull = ConvexHull(verts)
    return float(hull.volume)


def polytope_facets(A, b, tol=1e-9):
    """List of facets as (normal, vertices, measure).

    Facet vertices are returned in a consistent cyclic order (3D) or as the
    two edge endpoints (2D). Redundant halfspaces yield no facet.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    verts = polytope_vertices(A, b, tol)
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    facets = []
    scale = max(1.0, float(np.max(np.abs(verts))))
    for i in range(A.shape[0]):
        on = np.abs(verts @ A[i] - b[i]) <= 1e-7 * scale * norms[i]
        fv = verts[on]
        if len(fv) < n:
            continue
        normal = A[i] / norms[i]
        if n == 2:
            if len(fv) != 2:
                # collinear duplicates already removed; keep the two extremes
                t = fv @ np.array([-normal[1], normal[0]])
                fv = fv[[int(np.argmin(t)), int(np.argmax(t))]]
            measure = float(np.linalg.norm(fv[1] - fv[0]))
            if measure <= tol:
                continue
        else:
            fv = _order_planar(fv, normal)
            measure = _planar_area(fv, normal)
            if measure <= tol ** 2:
                continue
        facets.append((normal, fv, measure))
    return facets


def _order_planar(pts, normal):
    c = pts.mean(axis=0)
    tmp = np.eye(3)[int(np.argmin(np.abs(normal)))]
    u = np.cross(normal, tmp)
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    ang = np.arctan2((pts - c) @ v, (pts - c) @ u)
    return pts[np.argsort(ang)]


def _planar_area(pts, normal):
    c = pts.mean(axis=0)
    total = np.zeros(3)
    m = len(pts)
    for i in range(m):
        total += np.cross(pts[i] - c, pts[(i + 1) % m] - c)
    return 0.5 * abs(float(total @ normal))


def hull_to_hrep(points):
    """H-representation (A, b) of the convex hull of the given points."""
    points = np.asarray(points, dtype=float)
    hull = ConvexHull(points)
    A = hull.equations[:, :-1]
    b = -hull.equations[:, -1]
    # merge coplanar hull facets into unique halfspaces
    keep_A, keep_b = [], []
    for row, off in zip(A, b):
        dup = False
        for ra, rb in zip(keep_A, keep_b):
            if np.linalg.norm(row - ra) < 1e-9 and abs(off - rb) < 1e-9:
                dup = True
                break
        if not dup:
            keep_A.append(row)
            keep_b.append(off)
    return np.array(keep_A), np.array(keep_b)
