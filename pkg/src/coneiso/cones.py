"""Convex cones, spherical sector bodies, and their support/gauge machinery.

Exports:
  - ConvexCone (polyhedral or circular), with lineality split and the rotation
    to pointed normal form baked in at construction
  - SectorBody: (B_r cap C) + center, or a bounded H-polytope
  - support_value / support_bracket, minkowski_gauge, gauge_bounds
  - optimal_recentring (translate K so the dual-norm ratio M/m is minimal)
  - boundary_height_constant, reduced_wedge, cone_projection_split
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

GEOM_TOL = 1e-9


class ConeError(ValueError):
    pass


class BodyError(ValueError):
    pass


def _unit(v):
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("zero vector has no direction")
    return v / nv


def _householder_to_last(w):
    """Orthogonal Q with Q @ w = e_d (w unit, d = len(w))."""
    d = len(w)
    e = np.zeros(d)
    e[-1] = 1.0
    if np.allclose(w, e, atol=1e-14):
        return np.eye(d)
    u = w - e
    u /= np.linalg.norm(u)
    Q = np.eye(d) - 2.0 * np.outer(u, u)
    # Householder reflection sends w -> e and is its own inverse.
    return Q


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True, eq=False)
class ConvexCone:
    """An open convex cone in R^dim.

    kind "polyhedral": intersection of half-spaces {x : n.x > 0} with the
    normals unit inward rows of `normals` (m = 0 means all of R^dim).
    kind "circular": {x : angle(x, axis) < half_angle}, half_angle in (0, pi/2).

    The lineality space (largest linear subspace of the closure) has dimension
    `lineality_dim`; `rotation` is an orthogonal matrix sending stored
    coordinates to the pointed normal form, where the first k coordinates span
    the lineality space and the pointed factor lives in the last dim-k
    coordinates with its closure meeting {x_last = 0} only at the origin.
    """

    dim: int
    normals: np.ndarray
    kind: str = "polyhedral"
    axis: np.ndarray | None = None
    half_angle: float | None = None
    lineality_dim: int = field(init=False, default=0)
    rotation: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        if self.kind not in ("polyhedral", "circular"):
            raise ConeError(f"unknown cone kind {self.kind!r}")
        if self.kind == "circular":
            if not (0.0 < self.half_angle < math.pi / 2):
                raise ConeError("circular cone half-angle must lie in (0, pi/2)")
            axis = _unit(self.axis)
            object.__setattr__(self, "axis", axis)
            object.__setattr__(self, "normals", np.zeros((0, self.dim)))
            object.__setattr__(self, "lineality_dim", 0)
            object.__setattr__(self, "rotation", _householder_to_last(axis))
            return
        N = np.asarray(self.normals, dtype=float).reshape(-1, self.dim)
        if N.shape[0]:
            norms = np.linalg.norm(N, axis=1)
            if np.any(norms < 1e-14):
                raise ConeError("zero normal")
            N = N / norms[:, None]
        object.__setattr__(self, "normals", N)
        k, R = self._normal_form(N)
        object.__setattr__(self, "lineality_dim", k)
        object.__setattr__(self, "rotation", R)
        if not self._has_interior():
            raise ConeError("cone has empty interior")

    # -- construction helpers

    def _normal_form(self, N):
        n = self.dim
        if N.shape[0] == 0:
            return n, np.eye(n)
        # lineality space = null space of the normal matrix
        _, s, Vt = np.linalg.svd(N)
        rank = int(np.sum(s > 1e-12 * s[0]))
        k = n - rank
        U_point = Vt[:rank].T          # basis of the span of the normals
        U_lin = Vt[rank:].T            # basis of the lineality space
        Np = N @ U_point               # pointed-factor normals, (m, n-k)
        if rank <= 3:
            rays = _extreme_rays(Np)
            w = _interior_axis(Np, rays)
        else:
            w = _interior_axis_lp(Np)
        Q = _householder_to_last(w)
        R = np.vstack([U_lin.T, Q @ U_point.T])
        return k, R

    def _has_interior(self):
        if self.kind == "circular" or self.normals.shape[0] == 0:
            return True
        # Chebyshev-style LP: find x with n_i . x >= t, t > 0, |x|_inf <= 1
        m = self.normals.shape[0]
        c = np.zeros(self.dim + 1)
        c[-1] = -1.0
        A_ub = np.hstack([-self.normals, np.ones((m, 1))])
        b_ub = np.zeros(m)
        bounds = [(-1.0, 1.0)] * self.dim + [(None, None)]
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        return res.success and -res.fun > 1e-9

    # -- membership / distances

    def contains(self, x, tol=0.0):
        """Strict membership in the open cone (tol > 0 shrinks the cone)."""
        x = np.asarray(x, dtype=float)
        if self.normals.shape[0] == 0 and self.kind == "polyhedral":
            return np.ones(x.shape[:-1], dtype=bool) if x.ndim > 1 else True
        return self.boundary_distance(x) > tol

    def contains_closure(self, x, tol=GEOM_TOL):
        x = np.asarray(x, dtype=float)
        return self.boundary_distance(x) > -tol

    def boundary_distance(self, x):
        """Signed distance to the cone boundary surface (positive inside)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "circular":
            s = x @ self.axis
            rad = x - (s[..., None] * self.axis if x.ndim > 1 else s * self.axis)
            rho = np.linalg.norm(rad, axis=-1)
            return s * math.sin(self.half_angle) - rho * math.cos(self.half_angle)
        if self.normals.shape[0] == 0:
            return np.full(x.shape[:-1], np.inf) if x.ndim > 1 else np.inf
        vals = x @ self.normals.T
        return np.min(vals, axis=-1)

    # -- projection onto the closed cone

    def project(self, y):
        """Euclidean projection of y onto the closure of the cone."""
        y = np.asarray(y, dtype=float)
        if self.kind == "circular":
            return _project_circular(y, self.axis, self.half_angle)
        if self.normals.shape[0] == 0:
            return y.copy()
        return _project_polyhedral(y, self.normals)

    # -- normal form and pointed factor

    def to_normal_form(self, x):
        return np.asarray(x, dtype=float) @ self.rotation.T

    def from_normal_form(self, y):
        return np.asarray(y, dtype=float) @ self.rotation

    def pointed_factor(self):
        """The pointed cone C-tilde in its own normal-form coordinates."""
        k, n = self.lineality_dim, self.dim
        d = n - k
        if d == 0:
            raise ConeError("cone is all of space; pointed factor is trivial")
        if self.kind == "circular":
            return ConvexCone(dim=n, normals=np.zeros((0, n)), kind="circular",
                              axis=np.eye(n)[-1], half_angle=self.half_angle)
        N_nf = self.normals @ self.rotation.T     # rotated normals, zero first-k part
        Np = N_nf[:, k:]
        return ConvexCone(dim=d, normals=Np)

    def extreme_rays(self):
        """Unit extreme rays of the pointed factor (normal-form coordinates)."""
        pf = self.pointed_factor()
        if pf.kind == "circular":
            raise ConeError("circular cone has a continuum of extreme rays")
        return _extreme_rays(pf.normals)

    # -- 2D / 3D measure helpers

    def angular_interval(self):
        """(lo, hi) angles of a 2D cone; requires dim == 2."""
        if self.dim != 2:
            raise ConeError("angular interval is 2D only")
        if self.normals.shape[0] == 0:
            return (-math.pi, math.pi)
        if self.lineality_dim == 1:
            nrm = self.normals[0]
            psi = math.atan2(nrm[1], nrm[0])
            return (psi - math.pi / 2, psi + math.pi / 2)
        rays = _extreme_rays(self.normals)
        angles = sorted(math.atan2(r[1], r[0]) for r in rays)
        a1, a2 = angles[0], angles[-1]
        if a2 - a1 <= math.pi:
            return (a1, a2)
        return (a2, a1 + 2.0 * math.pi)

    def solid_measure(self):
        """Surface measure of the unit directions in the cone.

        dim 2: opening angle; dim 3: solid angle. Satisfies
        n * |B_1 cap C| = solid_measure (the equality case of the sector).
        """
        n = self.dim
        if n == 2:
            lo, hi = self.angular_interval()
            return hi - lo
        if n == 3:
            if self.kind == "circular":
                return 2.0 * math.pi * (1.0 - math.cos(self.half_angle))
            m = self.normals.shape[0]
            if m == 0:
                return 4.0 * math.pi
            k = self.lineality_dim
            if k == 2:
                return 2.0 * math.pi      # half space
            if k == 1:
                # wedge R x (planar cone of opening theta): lune of angle theta
                pf = self.pointed_factor()
                lo, hi = pf.angular_interval()
                return 2.0 * (hi - lo)
            return _spherical_polygon_area(_extreme_rays(self.normals))
        raise ConeError("solid measure implemented for dim 2 and 3 only")

    def sector_volume(self, radius=1.0):
        """|B_radius cap C| in dim 2 or 3."""
        return self.solid_measure() * radius ** self.dim / self.dim

    def sector_patch_measure(self, radius=1.0):
        """H^{n-1}(dB_radius cap C) in dim 2 or 3."""
        return self.solid_measure() * radius ** (self.dim - 1)

    def lateral_measure(self, radius=1.0):
        """Surface measure of dC cap B_radius (the flat part of the sector)."""
        n = self.dim
        if n == 2:
            m = self.normals.shape[0]
            if self.kind == "circular":
                raise ConeError("circular cones are 3D+")
            if m == 0:
                return 0.0
            lo, hi = self.angular_interval()
            return (2.0 if hi - lo < math.pi else 1.0) * radius
        if n == 3:
            if self.kind == "circular":
                return math.pi * radius ** 2 * math.sin(self.half_angle)
            if self.normals.shape[0] == 0:
                return 0.0
            total = 0.0
            for j, nrm in enumerate(self.normals):
                # facet = {x in closure(C) : nrm . x = 0}; a planar cone sector
                total += _facet_disk_area(self, j, radius)
            return total
        raise ConeError("lateral measure implemented for dim 2 and 3 only")


def _extreme_rays(N):
    """Unit extreme rays of the pointed polyhedral cone {x : N x >= 0}.

    Supports ambient dimension 1, 2, 3 (enough for the pointed factors used
    here); raises for higher dimensions.
    """
    N = np.asarray(N, dtype=float)
    m, d = N.shape
    feas_tol = 1e-10
    if d == 1:
        # pointed 1D factor is a half line
        if np.all(N > 0):
            return np.array([[1.0]])
        if np.all(N < 0):
            return np.array([[-1.0]])
        raise ConeError("1D factor is not pointed")
    cands = []
    if d == 2:
        for nrm in N:
            t = np.array([-nrm[1], nrm[0]])
            for cand in (t, -t):
                if np.all(N @ cand >= -feas_tol):
                    cands.append(cand)
    elif d == 3:
        for i, j in itertools.combinations(range(m), 2):
            t = np.cross(N[i], N[j])
            nt = np.linalg.norm(t)
            if nt < 1e-12:
                continue
            t = t / nt
            for cand in (t, -t):
                if np.all(N @ cand >= -feas_tol):
                    cands.append(cand)
    else:
        raise ConeError("extreme rays implemented for factors of dim <= 3")
    rays = []
    for cand in cands:
        if not any(np.linalg.norm(cand - r) < 1e-9 for r in rays):
            rays.append(cand)
    if not rays:
        raise ConeError("cone has no extreme rays; is it pointed?")
    return np.array(rays)


def _interior_axis(N, rays):
    """Unit w with w . r > 0 for every extreme ray r (dual-interior axis)."""
    w = rays.sum(axis=0)
    nw = np.linalg.norm(w)
    if nw > 1e-12:
        w = w / nw
        if np.min(rays @ w) > 1e-9:
            return w
    # LP fallback: maximize the worst margin over rays in the unit box
    d = rays.shape[1]
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-rays, np.ones((len(rays), 1))])
    b_ub = np.zeros(len(rays))
    bounds = [(-1.0, 1.0)] * d + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success or -res.fun <= 1e-9:
        raise ConeError("factor cone is not pointed")
    return _unit(res.x[:d])


def _interior_axis_lp(N):
    """Dual-interior axis for pointed factors in dimension >= 4.

    Candidate w = mean of the normals, certified pointed by checking that the
    cone meets {w . u <= 0} only at the origin (one boxed LP per coordinate)."""
    d = N.shape[1]
    w = N.mean(axis=0)
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        raise ConeError("factor cone is not pointed")
    w = w / nw
    A_ub = np.vstack([-N, w[None, :]])
    b_ub = np.zeros(N.shape[0] + 1)
    for j in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[j] = -sign
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(-1.0, 1.0)] * d,
                          method="highs")
            if not res.success or -res.fun > 1e-9:
                raise ConeError("cannot certify a pointed normal form")
    return w


def _project_polyhedral(y, N):
    """Exact projection onto {x : N x >= 0} by active-set enumeration."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    Y = y[None, :] if single else y
    m = N.shape[0]
    out = np.empty_like(Y)
    scale = np.maximum(np.linalg.norm(Y, axis=1), 1.0)
    for r, yy in enumerate(Y):
        if np.all(N @ yy >= -1e-13 * scale[r]):
            out[r] = yy
            continue
        best, best_d = None, np.inf
        for size in range(1, m + 1):
            for S in itertools.combinations(range(m), size):
                Ns = N[list(S)]
                G = Ns @ Ns.T
                try:
                    lam = np.linalg.solve(G, Ns @ yy)
                except np.linalg.LinAlgError:
                    continue
                cand = yy - Ns.T @ lam
                if np.all(N @ cand >= -1e-11 * scale[r]):
                    d2 = float(np.dot(yy - cand, yy - cand))
                    if d2 < best_d - 1e-15:
                        best, best_d = cand, d2
        if best is None:
            best = np.zeros_like(yy)
        # the origin is always feasible
        if np.dot(yy, yy) < best_d:
            best = np.zeros_like(yy)
        out[r] = best
    return out[0] if single else out


def _project_circular(y, axis, half_angle):
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    Y = y[None, :] if single else y
    s = Y @ axis
    rad = Y - s[:, None] * axis
    rho = np.linalg.norm(rad, axis=1)
    out = np.empty_like(Y)
    inside = s * math.sin(half_angle) - rho * math.cos(half_angle) >= 0
    out[inside] = Y[inside]
    rest = ~inside
    t = s[rest] * math.cos(half_angle) + rho[rest] * math.sin(half_angle)
    with np.errstate(invalid="ignore", divide="ignore"):
        rad_hat = np.where(rho[rest, None] > 1e-15, rad[rest] / rho[rest, None], 0.0)
    u = math.cos(half_angle) * axis + math.sin(half_angle) * rad_hat
    proj = np.where((t > 0)[:, None], t[:, None] * u, 0.0)
    out[rest] = proj
    return out[0] if single else out


def _spherical_polygon_area(rays):
    """Girard area of the spherical polygon spanned by unit extreme rays."""
    rays = np.asarray(rays, dtype=float)
    m = len(rays)
    if m < 3:
        raise ConeError("3D pointed cone needs at least three extreme rays")
    center = _unit(rays.sum(axis=0))
    # order by azimuth around the center direction
    Q = _householder_to_last(center)
    flat = rays @ Q.T
    order = np.argsort(np.arctan2(flat[:, 1], flat[:, 0]))
    v = rays[order]
    total = 0.0
    for i in range(m):
        a, b, c = v[(i - 1) % m], v[i], v[(i + 1) % m]
        t1 = a - (a @ b) * b
        t2 = c - (c @ b) * b
        t1, t2 = _unit(t1), _unit(t2)
        total += math.acos(np.clip(t1 @ t2, -1.0, 1.0))
    return total - (m - 2) * math.pi


def _facet_disk_area(cone, j, radius):
    """Area of facet j of a 3D polyhedral sector: {|x|<=r, x in cl C, n_j.x=0}."""
    nrm = cone.normals[j]
    # orthonormal basis of the facet plane
    tmp = np.eye(3)[np.argmin(np.abs(nrm))]
    u = _unit(np.cross(nrm, tmp))
    v = np.cross(nrm, u)
    others = [cone.normals[i] for i in range(len(cone.normals)) if i != j]
    # 2D cone in facet coordinates
    rows = []
    for o in others:
        row = np.array([o @ u, o @ v])
        if np.linalg.norm(row) > 1e-12:
            rows.append(row / np.linalg.norm(row))
    if not rows:
        return math.pi * radius ** 2
    c2 = ConvexCone(dim=2, normals=np.array(rows))
    lo, hi = c2.angular_interval()
    return 0.5 * radius ** 2 * (hi - lo)


# convenience constructors ---------------------------------------------------


def full_space(dim):
    return ConvexCone(dim=dim, normals=np.zeros((0, dim)))


def orthant(dim):
    return ConvexCone(dim=dim, normals=np.eye(dim))


def quadrant():
    return orthant(2)


def halfplane():
    return ConvexCone(dim=2, normals=np.array([[0.0, 1.0]]))


def plane_cone(theta, bisector_angle=math.pi / 2):
    """2D cone of opening theta in (0, pi], symmetric about the bisector."""
    if not (0.0 < theta <= math.pi + 1e-12):
        raise ConeError("opening angle must lie in (0, pi]")
    if abs(theta - math.pi) < 1e-12:
        nrm = [math.cos(bisector_angle), math.sin(bisector_angle)]
        return ConvexCone(dim=2, normals=np.array([nrm]))
    a1 = bisector_angle - theta / 2
    a2 = bisector_angle + theta / 2
    n1 = [-math.sin(a1), math.cos(a1)]        # inward normal of the lower edge
    n2 = [math.sin(a2), -math.cos(a2)]        # inward normal of the upper edge
    return ConvexCone(dim=2, normals=np.array([n1, n2]))


def wedge2d():
    """The quadrant rotated into normal form: {(x, y) : y > |x|}."""
    s = 1.0 / math.sqrt(2.0)
    return ConvexCone(dim=2, normals=np.array([[s, s], [-s, s]]))


def circular_cone(half_angle, dim=3, axis=None):
    if axis is None:
        axis = np.eye(dim)[-1]
    return ConvexCone(dim=dim, normals=np.zeros((0, dim)), kind="circular",
                      axis=np.asarray(axis, dtype=float), half_angle=float(half_angle))


# ---------------------------------------------------------------------------
# sector bodies


@dataclass(frozen=True, eq=False)
class SectorBody:
    """A bounded convex gauge body.

    kind "spherical_sector": (B_radius cap C) + center.
    kind "polytope": {x : A x <= b}, which must be bounded.
    """

    cone: ConvexCone | None
    radius: float = 1.0
    center: np.ndarray = None
    kind: str = "spherical_sector"
    A: np.ndarray | None = None
    b: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "spherical_sector":
            if self.cone is None:
                raise BodyError("sector body needs a cone")
            if self.radius <= 0:
                raise BodyError("radius must be positive")
            c = np.zeros(self.cone.dim) if self.center is None else np.asarray(self.center, dtype=float)
            object.__setattr__(self, "center", c)
        elif self.kind == "polytope":
            A = np.asarray(self.A, dtype=float)
            b = np.asarray(self.b, dtype=float)
            if A.ndim != 2 or A.shape[0] != b.shape[0]:
                raise BodyError("bad H-representation")
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "center", np.zeros(A.shape[1]))
            try:
                verts = self._vertices()
            except Exception as exc:
                raise BodyError("not a body") from exc
            if len(verts) < A.shape[1] + 1:
                raise BodyError("not a body")
            object.__setattr__(self, "_verts", verts)
        else:
            raise BodyError(f"unknown body kind {self.kind!r}")

    @property
    def dim(self):
        if self.kind == "spherical_sector":
            return self.cone.dim
        return self.A.shape[1]

    def _vertices(self):
        from .geom3d import polytope_vertices
        return polytope_vertices(self.A, self.b)

    @property
    def vertices(self):
        if self.kind != "polytope":
            raise BodyError("vertices are defined for polytope bodies")
        return self._verts

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        if self.kind == "polytope":
            vals = x @ self.A.T - self.b
            return np.max(vals, axis=-1) <= tol
        rel = x - self.center
        in_ball = np.linalg.norm(rel, axis=-1) <= self.radius + tol
        return in_ball & (self.cone.boundary_distance(rel) >= -tol)

    def bounding_box(self):
        if self.kind == "polytope":
            v = self.vertices
            return v.min(axis=0), v.max(axis=0)
        c, r = self.center, self.radius
        return c - r, c + r

    def volume(self):
        if self.kind == "spherical_sector":
            return self.cone.sector_volume(self.radius)
        from .geom3d import polytope_volume
        return polytope_volume(self.A, self.b)

    def translated(self, v):
        if self.kind == "polytope":
            v = np.asarray(v, dtype=float)
            return SectorBody(cone=None, kind="polytope", A=self.A, b=self.b + self.A @ v)
        return SectorBody(cone=self.cone, radius=self.radius,
                          center=self.center + np.asarray(v, dtype=float))

    def scaled(self, s):
        if s <= 0:
            raise BodyError("scale must be positive")
        if self.kind == "polytope":
            return SectorBody(cone=None, kind="polytope", A=self.A, b=self.b * s)
        return SectorBody(cone=self.cone, radius=self.radius * s, center=self.center * s)


def unit_ball_body(dim):
    return SectorBody(cone=full_space(dim), radius=1.0)


def sector_body(cone, radius=1.0, center=None):
    return SectorBody(cone=cone, radius=radius, center=center)


# ---------------------------------------------------------------------------
# support and gauge


def support_value(body, direction):
    """sup of direction . z over the body; direction must be unit length."""
    nu = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > 1e-9:
        raise ValueError("direction must have unit Euclidean length")
    return _support_any(body, nu)


def _support_any(body, nu):
    if body.kind == "polytope":
        return float(np.max(body.vertices @ nu))
    p = body.cone.project(nu)
    return float(nu @ body.center + body.radius * np.linalg.norm(p))


def support_values(body, directions):
    D = np.asarray(directions, dtype=float)
    if body.kind == "polytope":
        return np.max(D @ body.vertices.T, axis=-1)
    P = body.cone.project(D)
    return D @ body.center + body.radius * np.linalg.norm(P, axis=-1)


def support_bracket(body, direction, gap=1e-9):
    """Certified (lower, upper) bracket of the support value.

    For sector bodies the cone projection is exact in every dimension (the
    maximizer center + r * P(nu)/|P(nu)| is feasible and Moreau's decomposition
    certifies optimality), so the bracket is tight. Polytope bodies in
    dimension >= 4 are bracketed by an LP primal value and its dual bound.
    """
    nu = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > 1e-9:
        raise ValueError("direction must have unit Euclidean length")
    if body.kind == "spherical_sector" or body.dim <= 3:
        v = _support_any(body, nu)
        return v, v
    res = linprog(-nu, A_ub=body.A, b_ub=body.b, bounds=[(None, None)] * body.dim,
                  method="highs")
    if not res.success:
        raise BodyError("not a body")
    lo = float(nu @ res.x)
    lam = res.ineqlin.marginals      # <= 0 for HiGHS convention
    hi = float(-lam @ body.b)
    if hi < lo:
        lo, hi = min(lo, hi), max(lo, hi)
    if hi - lo > gap:
        raise BodyError(f"LP duality gap {hi - lo:.2e} exceeds {gap:.0e}")
    return lo, hi


def minkowski_gauge(body, z):
    """inf{lambda > 0 : z/lambda in body}; the origin must be interior."""
    z = np.asarray(z, dtype=float)
    if not _origin_interior(body):
        raise BodyError("gauge undefined")
    nz = np.linalg.norm(z)
    if nz == 0.0:
        return 0.0
    if body.kind == "polytope":
        ratios = (body.A @ z) / body.b
        return float(np.max(ratios))
    return _sector_gauge(body, z)


def _origin_interior(body, margin=1e-12):
    if body.kind == "polytope":
        return bool(np.all(body.b > margin))
    c = body.center
    if np.linalg.norm(c) >= body.radius - margin:
        return False
    return bool(body.cone.boundary_distance(-c) > margin)


def _sector_gauge(body, z):
    c, r, cone = body.center, body.radius, body.cone
    zz = float(z @ z)
    zc = float(z @ c)
    # largest u with |u z - c| <= r
    disc = zc * zc + zz * (r * r - float(c @ c))
    u_ball = (zc + math.sqrt(disc)) / zz
    if cone.kind == "polyhedral":
        u_max = u_ball
        for nrm in cone.normals:
            nz, nc = float(nrm @ z), float(nrm @ c)
            if nz < 0.0:
                u_max = min(u_max, nc / nz)
        return 1.0 / u_max
    # circular cone constraint: bisect on the membership interval [0, u_ball]
    lo, hi = 0.0, u_ball
    if body.contains(u_ball * z):
        return 1.0 / u_ball
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if body.contains(mid * z):
            lo = mid
        else:
            hi = mid
    return 1.0 / lo


def _sphere_grid(dim, count):
    if dim == 2:
        t = np.linspace(-math.pi, math.pi, count, endpoint=False)
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        # Fibonacci sphere
        i = np.arange(count, dtype=float) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    raise ConeError("dense sphere grids implemented for dim 2 and 3")


def _polish_on_sphere(fun, start, sign):
    """Deterministic Nelder-Mead polish of fun over the unit sphere."""
    dim = len(start)
    Q = _householder_to_last(_unit(start))

    def chart(t):
        if dim == 2:
            y = np.array([math.sin(t[0]), math.cos(t[0])])
        else:
            y = np.array([t[0], t[1], math.sqrt(max(1e-12, 1.0 - t[0] ** 2 - t[1] ** 2))])
            y = y / np.linalg.norm(y)
        return y @ Q

    t0 = np.zeros(dim - 1)
    res = minimize(lambda t: sign * fun(chart(t)), t0, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400})
    return chart(res.x), sign * res.fun


def gauge_bounds(body, grid=4096):
    """(m, M): min and max of the dual norm sup{nu.z} over unit nu.

    Dense angular grid plus deterministic local refinement; accurate to well
    below 1e-8 for the smooth sector/polytope bodies used here.
    """
    dim = body.dim
    if dim not in (2, 3):
        raise ConeError("gauge bounds implemented for dim 2 and 3")
    if not _origin_interior(body):
        raise BodyError("gauge bounds need the origin strictly inside")
    D = _sphere_grid(dim, grid if dim == 2 else max(grid, 8192))
    vals = support_values(body, D)
    i_min, i_max = int(np.argmin(vals)), int(np.argmax(vals))
    fun = lambda nu: float(support_values(body, nu[None, :])[0])
    _, m = _polish_on_sphere(fun, D[i_min], +1.0)
    _, M = _polish_on_sphere(fun, D[i_max], -1.0)
    m = min(m, float(vals[i_min]))
    M = max(M, float(vals[i_max]))
    return float(m), float(M)


def gauge_bounds_exact(body):
    """Closed-form (m, M) for sector bodies: m is the inradius about the
    origin, M the farthest vertex/arc distance. Used as an oracle and as the
    fast path inside the recentring search."""
    if body.kind == "polytope":
        v = body.vertices
        M = float(np.max(np.linalg.norm(v, axis=1)))
        m = float(np.min(body.b / np.linalg.norm(body.A, axis=1)))
        return m, M
    c, r, cone = body.center, body.radius, body.cone
    # M = max over the closed body of |z| (support attains on extreme points)
    M = r + np.linalg.norm(c) if cone.normals.shape[0] == 0 and cone.kind == "polyhedral" else None
    if M is None:
        # farthest point of (B_r cap C) + c from the origin
        pts = [np.zeros(body.dim)]
        if cone.kind == "polyhedral":
            if cone.dim == 2:
                lo, hi = cone.angular_interval()
                angs = [lo, hi]
                t = math.atan2(-c[1], -c[0])
                # direction of -c maximizes |u*r + c... candidates on the arc
                angs.append(min(max(t, lo), hi))
                pts += [r * np.array([math.cos(a), math.sin(a)]) for a in angs]
            else:
                rays = _extreme_rays(cone.normals) if cone.normals.shape[0] else []
                pts += [r * ray for ray in rays]
                d = cone.project(-c)
                if np.linalg.norm(d) > 1e-12:
                    pts.append(r * d / np.linalg.norm(d))
        else:
            d = cone.project(-c)
            if np.linalg.norm(d) > 1e-12:
                pts.append(r * d / np.linalg.norm(d))
            pts.append(r * cone.axis)
        M = max(np.linalg.norm(p + c) for p in pts)
    # m = distance from the origin to the boundary of the body
    m = r - np.linalg.norm(c)
    if cone.kind == "polyhedral":
        for nrm in cone.normals:
            m = min(m, -float(nrm @ c))
    else:
        m = min(m, float(cone.boundary_distance(-c)))
    return float(m), float(M)


def optimal_recentring(K, coarse=25, refine_steps=3):
    """Translation x0 in -K minimizing M_{K0}/m_{K0} for K0 = K + x0.

    Deterministic nested grid search over -K; ties broken by the
    lexicographically smallest x0. Requires K = B_1 cap C (center 0).
    """
    if K.kind != "spherical_sector" or np.linalg.norm(K.center) > 0:
        raise BodyError("recentring expects K = B_1 cap C")
    cone = K.cone
    dim = K.dim
    if cone.normals.shape[0] == 0 and cone.kind == "polyhedral":
        return np.zeros(dim)

    def ratio(x0):
        body = SectorBody(cone=cone, radius=K.radius, center=x0)
        if not _origin_interior(body, margin=1e-9):
            return np.inf
        m, M = gauge_bounds_exact(body)
        if m <= 0:
            return np.inf
        return M / m

    lo_c, hi_c = -K.radius * np.ones(dim), K.radius * np.ones(dim)

    def candidates(center, half_width, steps):
        axes = [np.linspace(center[i] - half_width, center[i] + half_width, steps)
                for i in range(dim)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        # keep x0 with -x0 strictly inside K
        keep = K.contains(-grid, tol=-1e-12) & (cone.boundary_distance(-grid) > 1e-9)
        keep &= np.linalg.norm(grid, axis=1) < K.radius - 1e-9
        return grid[keep]

    best_x, best_r = np.zeros(dim), ratio(np.zeros(dim))
    center, width = np.zeros(dim), float(K.radius)
    for level in range(refine_steps + 1):
        cands = candidates(center, width, coarse if level == 0 else 9)
        for x0 in cands:
            r = ratio(x0)
            if r < best_r - 1e-12 or (abs(r - best_r) <= 1e-12 and tuple(x0) < tuple(best_x)):
                best_x, best_r = x0.copy(), r
        center, width = best_x, width / 4.0
    return best_x


# ---------------------------------------------------------------------------
# pointed-cone constants


def boundary_height_constant(cone):
    """Least height above the lineality hyperplane reached by the half-radius
    sphere inside the pointed factor; positive exactly when the factor is
    pointed.

    Polyhedral factors: exact minimum over unit extreme rays. Circular
    factors: cos(half_angle) / 2.
    """
    pf = cone.pointed_factor()
    if pf.kind == "circular":
        return 0.5 * math.cos(pf.half_angle)
    if pf.dim == 1:
        return 0.5
    try:
        rays = _extreme_rays(pf.normals)
    except ConeError:
        rays = None
    if rays is not None:
        b = 0.5 * float(np.min(rays[:, -1]))
    else:
        # dense sampling with local refinement
        D = _sphere_grid(pf.dim, 1 << 16)
        keep = pf.boundary_distance(D) >= 0
        b = 0.5 * float(np.min(D[keep, -1]))
    if b <= 1e-9:
        raise ConeError("not pointed")
    return b


def reduced_wedge(K):
    """Trimmed half-radius sector used for the translation-capture identities.

    Returns the region B_{1/2} cap C cap {|x_i| < bt, i <= k} cap {x_n < bt}
    in the cone's normal-form coordinates, where bt = b / M with b the
    boundary height constant, gamma = 1/(2 b), and M the smallest natural
    number with (k + gamma^2) (b/M)^2 < 1/4.
    """
    from .regions import disk_sector_region
    cone = K.cone
    b = boundary_height_constant(cone)
    k = cone.lineality_dim
    n = cone.dim
    gamma = 1.0 / (2.0 * b)
    M = 1
    while (k + gamma * gamma) * (b / M) ** 2 >= 0.25:
        M += 1
    bt = b / M
    rows, offs = [], []
    for i in range(k):
        e = np.zeros(n)
        e[i] = 1.0
        rows += [e, -e]
        offs += [bt, bt]
    e_last = np.zeros(n)
    e_last[-1] = 1.0
    rows.append(e_last)
    offs.append(bt)
    # normal-form cone: same pointed geometry with identity rotation
    nf_cone = _normal_form_copy(cone)
    return disk_sector_region(nf_cone, radius=0.5, center=np.zeros(n),
                              extra_halfspaces=(np.array(rows), np.array(offs)))


def wedge_parameters(cone):
    """(b, gamma, M, b_tilde) used by the reduced wedge construction."""
    b = boundary_height_constant(cone)
    k = cone.lineality_dim
    gamma = 1.0 / (2.0 * b)
    M = 1
    while (k + gamma * gamma) * (b / M) ** 2 >= 0.25:
        M += 1
    return b, gamma, M, b / M


def _normal_form_copy(cone):
    """The same cone expressed in its normal-form coordinates."""
    if cone.kind == "circular":
        return circular_cone(cone.half_angle, dim=cone.dim)
    if cone.normals.shape[0] == 0:
        return full_space(cone.dim)
    N_nf = cone.normals @ cone.rotation.T
    return ConvexCone(dim=cone.dim, normals=N_nf)


def cone_projection_split(y, cone):
    """Split y = y_c + y_p against the pointed factor C-tilde.

    y lives in the pointed factor's coordinates (dimension dim - k), has
    nonnegative last coordinate, and must lie outside the open factor; y_c is
    the Euclidean projection onto its boundary and y_p = y - y_c is
    perpendicular to y_c.
    """
    pf = cone if cone.lineality_dim == 0 else cone.pointed_factor()
    y = np.asarray(y, dtype=float)
    if y.shape != (pf.dim,):
        raise ValueError(f"expected a point in R^{pf.dim}")
    if y[-1] < -1e-12:
        raise ValueError("last coordinate must be nonnegative")
    if pf.contains(y, tol=1e-12):
        raise ValueError("no split needed")
    y_c = pf.project(y)
    return y_c, y - y_c
