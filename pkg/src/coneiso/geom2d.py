"""Exact 2D geometry for convex regions bounded by one conic and halfplanes.

A region here is {x : |S^-1 (x - c)| <= 1, A x <= b} with S = diag(a1, a2)
(a circle when a1 == a2). The boundary is resolved into straight segments and
conic arcs; areas are exact (shoelace plus circular-segment corrections in the
scaled frame) and arc lengths come from Gauss-Kronrod quadrature, which for
circles reduces to r * dphi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

TWO_PI = 2.0 * math.pi


@dataclass
class Segment:
    p0: np.ndarray
    p1: np.ndarray
    normal: np.ndarray          # outward unit normal
    measure: float
    on_cone: bool = False

    def point_at(self, s):
        return self.p0 + s * (self.p1 - self.p0)

    def normal_at(self, s):
        return self.normal


@dataclass
class ConicArc:
    center: np.ndarray
    semi_axes: np.ndarray       # (a1, a2); circle when equal
    t0: float                   # ccw parameter interval, t1 > t0
    t1: float
    measure: float
    on_cone: bool = False

    def point_at_param(self, t):
        a1, a2 = self.semi_axes
        return self.center + np.array([a1 * math.cos(t), a2 * math.sin(t)])

    def params(self, count):
        return self.t0 + (np.arange(count) + 0.5) / count * (self.t1 - self.t0)

    def point_at(self, s):
        return self.point_at_param(self.t0 + s * (self.t1 - self.t0))

    def normal_at_param(self, t):
        a1, a2 = self.semi_axes
        n = np.array([a2 * math.cos(t), a1 * math.sin(t)])
        return n / np.linalg.norm(n)

    def speed(self, t):
        a1, a2 = self.semi_axes
        return math.hypot(a1 * math.sin(t), a2 * math.cos(t))


def _arc_length(semi_axes, t0, t1):
    a1, a2 = semi_axes
    if abs(a1 - a2) < 1e-14:
        return a1 * (t1 - t0)
    val, _ = quad(lambda t: math.hypot(a1 * math.sin(t), a2 * math.cos(t)), t0, t1,
                  limit=200, epsabs=1e-13, epsrel=1e-13)
    return val


def conic_region_structure(center, semi_axes, A, b, tol=1e-11):
    """(area, pieces) of {|S^-1(x-c)| <= 1} cap {A x <= b}; pieces are Segment
    and ConicArc objects tracing the boundary counterclockwise.

    Returns (0.0, []) when the region is empty.
    """
    c = np.asarray(center, dtype=float)
    S = np.asarray(semi_axes, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1)
    m = A.shape[0]
    # scaled frame: u = S^-1 (x - c); conic -> unit circle, constraints g.u <= h
    G = A * S[None, :]
    h = b - A @ c
    gn = np.linalg.norm(G, axis=1) if m else np.zeros(0)

    def feas(u, slack=tol):
        if m == 0:
            return True
        return bool(np.all(G @ u <= h + slack))

    # empty/full detection
    active = []
    for i in range(m):
        if gn[i] < 1e-14:
            if h[i] < -tol:
                return 0.0, []
            continue
        if h[i] < -gn[i] - tol:
            return 0.0, []          # halfplane misses the disk
        if h[i] < gn[i] - tol:
            active.append(i)

    verts = []                      # (u, kind, data) kind "cc"=on circle, "ll"=(i, j)
    for i in active:
        alpha = h[i] / gn[i]
        if alpha < -1.0 + 1e-15:
            continue
        ghat = G[i] / gn[i]
        beta = math.sqrt(max(0.0, 1.0 - alpha * alpha))
        perp = np.array([-ghat[1], ghat[0]])
        for sgn in (1.0, -1.0):
            u = alpha * ghat + sgn * beta * perp
            if feas(u):
                verts.append((u, "cc", i))
    import itertools
    for i, j in itertools.combinations(active, 2):
        M = G[[i, j]]
        if abs(np.linalg.det(M)) < 1e-13:
            continue
        u = np.linalg.solve(M, h[[i, j]])
        if np.dot(u, u) <= 1.0 + tol and feas(u):
            verts.append((u, "ll", (i, j)))

    if not verts:
        if feas(np.zeros(2), slack=-tol) or (m == 0):
            # full conic (no constraint cuts through it)
            area = math.pi * S[0] * S[1]
            length = _arc_length(S, 0.0, TWO_PI)
            return area, [ConicArc(c, S, 0.0, TWO_PI, length)]
        return 0.0, []

    # deduplicate
    uniq = []
    for u, kind, data in verts:
        if not any(np.linalg.norm(u - q[0]) < 1e-10 for q in uniq):
            uniq.append((u, kind, data))
    verts = uniq

    # interior point: centroid of vertices plus feasible arc midpoints
    pts = [u for u, _, _ in verts]
    circ_angles = sorted(math.atan2(u[1], u[0]) for u, kind, _ in verts if kind == "cc")
    for idx in range(len(circ_angles)):
        a0 = circ_angles[idx]
        a1 = circ_angles[(idx + 1) % len(circ_angles)]
        if idx == len(circ_angles) - 1:
            a1 += TWO_PI
        mid = 0.5 * (a0 + a1)
        u = np.array([math.cos(mid), math.sin(mid)])
        if feas(u):
            pts.append(u)
    p_int = np.mean(pts, axis=0)

    order = sorted(range(len(verts)),
                   key=lambda idx: math.atan2(verts[idx][0][1] - p_int[1],
                                              verts[idx][0][0] - p_int[0]))
    verts = [verts[idx] for idx in order]
    nv = len(verts)

    area_u = 0.0
    pieces = []
    for idx in range(nv):
        u0, k0, d0 = verts[idx]
        u1, k1, d1 = verts[(idx + 1) % nv]
        if nv == 1:
            # single vertex: boundary is the full circle minus nothing; treat
            # as a tangency, the region is the whole conic
            u1, k1, d1 = u0, k0, d0
        area_u += 0.5 * (u0[0] * u1[1] - u0[1] * u1[0])
        is_arc = False
        t0 = t1 = None
        if k0 == "cc" and k1 == "cc":
            t0 = math.atan2(u0[1], u0[0])
            t1 = math.atan2(u1[1], u1[0])
            if t1 <= t0 + 1e-14:
                t1 += TWO_PI
            mid = 0.5 * (t0 + t1)
            is_arc = feas(np.array([math.cos(mid), math.sin(mid)]), slack=1e-9)
        if is_arc:
            if t1 - t0 > 1e-12:
                area_u += 0.5 * (t1 - t0 - math.sin(t1 - t0))
                length = _arc_length(S, t0, t1)
                pieces.append(ConicArc(c, S, t0, t1, length))
        else:
            # straight edge; find the shared active constraint
            ci = _shared_constraint(u0, u1, G, h, gn, active, tol)
            p0 = c + S * u0
            p1 = c + S * u1
            meas = float(np.linalg.norm(p1 - p0))
            if meas > 1e-12:
                nrm = A[ci] / np.linalg.norm(A[ci])
                pieces.append(Segment(p0, p1, nrm, meas))
    area = S[0] * S[1] * area_u
    return float(area), pieces


def _shared_constraint(u0, u1, G, h, gn, active, tol):
    for i in active:
        if abs(G[i] @ u0 - h[i]) < 1e-8 * max(1.0, gn[i]) and \
           abs(G[i] @ u1 - h[i]) < 1e-8 * max(1.0, gn[i]):
            return i
    raise RuntimeError("boundary walk failed: no constraint carries the edge")


def polygonalize(pieces, resolution=512):
    """Closed ccw vertex loop approximating the boundary chain.

    Arcs are sampled on an absolute parameter lattice of the given angular
    resolution so that translated or scaled copies of a region produce
    congruent polygons.
    """
    loop = []
    for piece in pieces:
        if isinstance(piece, Segment):
            loop.append(piece.p0)
        else:
            step = TWO_PI / resolution
            k0 = math.ceil(piece.t0 / step - 1e-12)
            k1 = math.floor(piece.t1 / step + 1e-12)
            ts = [piece.t0] + [k * step for k in range(k0, k1 + 1)
                               if piece.t0 + 1e-12 < k * step < piece.t1 - 1e-12]
            loop.extend(piece.point_at_param(t) for t in ts)
    if not loop:
        return np.zeros((0, 2))
    return np.array(loop)


def polygon_discretization_error(pieces, resolution=512):
    """Upper bound on the area error of `polygonalize` output."""
    err = 0.0
    for piece in pieces:
        if isinstance(piece, ConicArc):
            a = max(piece.semi_axes)
            step = TWO_PI / resolution
            n_seg = max(1, int(math.ceil((piece.t1 - piece.t0) / step)))
            # circular segment area per sagitta: a^2 (d - sin d)/2 per step
            d = (piece.t1 - piece.t0) / n_seg
            err += n_seg * 0.5 * a * a * (d - math.sin(d))
    return err
