"""Regions inside a convex cone and their measures.

Region kinds mirror the serialization tags: "polytope", "spherical_sector"
(a ball intersected with halfspaces, optionally with a circular-cone
constraint), "ellipsoid_sector" (2D axis-aligned ellipse cap halfspaces),
"boolean_combination", and "affine_image".

volume / relative_perimeter / symmetric_difference_volume are exact for 2D and
3D polytopes and for 2D/3D spherical and ellipsoid sectors; anything else
falls back to seeded Monte Carlo with a reported standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geom2d, geom3d
from .cones import ConvexCone, full_space
from .geom2d import ConicArc, Segment

DEFAULT_SEED = 1729
DEFAULT_INTERIOR_SAMPLES = 1_000_000
DEFAULT_BOUNDARY_SAMPLES = 100_000
SYMDIFF_RESOLUTION = 8192
ON_CONE_TOL = 1e-9
MAX_BOOLEAN_DEPTH = 8


class RegionError(ValueError):
    pass


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=int(seed)))


@dataclass(frozen=True)
class Measured:
    value: float
    err: float = 0.0

    def __float__(self):
        return self.value


@dataclass
class SurfaceSample:
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    on_cone: np.ndarray
    warning: bool = False

    @property
    def total_measure(self):
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class Region:
    kind: str
    cone: ConvexCone
    # polytope
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    # spherical / ellipsoid sector
    center: np.ndarray | None = None
    radius: float | None = None
    semi_axes: np.ndarray | None = None
    circ: tuple | None = None            # (circular ConvexCone, apex)
    # boolean_combination
    op: str | None = None
    children: tuple = ()
    # affine_image
    matrix: np.ndarray | None = None
    shift: np.ndarray | None = None
    base: "Region | None" = None

    @property
    def dim(self):
        return self.cone.dim

    def depth(self):
        if self.kind == "boolean_combination":
            return 1 + max(c.depth() for c in self.children)
        if self.kind == "affine_image":
            return self.base.depth()
        return 0

    # -- membership

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        if self.kind == "polytope":
            return np.max(x @ self.A.T - self.b, axis=-1) <= tol
        if self.kind == "spherical_sector":
            ok = np.linalg.norm(x - self.center, axis=-1) <= self.radius + tol
            if self.A is not None and len(self.A):
                ok &= np.max(x @ self.A.T - self.b, axis=-1) <= tol
            if self.circ is not None:
                cc, apex = self.circ
                ok &= cc.boundary_distance(x - apex) >= -tol
            return ok
        if self.kind == "ellipsoid_sector":
            u = (x - self.center) / self.semi_axes
            ok = np.linalg.norm(u, axis=-1) <= 1.0 + tol
            if self.A is not None and len(self.A):
                ok &= np.max(x @ self.A.T - self.b, axis=-1) <= tol
            return ok
        if self.kind == "boolean_combination":
            vals = [c.contains(x, tol) for c in self.children]
            if self.op == "union":
                out = vals[0]
                for v in vals[1:]:
                    out = out | v
                return out
            if self.op == "intersection":
                out = vals[0]
                for v in vals[1:]:
                    out = out & v
                return out
            if self.op == "difference":
                return vals[0] & ~vals[1]
            raise RegionError(f"unknown boolean op {self.op!r}")
        if self.kind == "affine_image":
            Minv = np.linalg.inv(self.matrix)
            return self.base.contains((x - self.shift) @ Minv.T, tol)
        raise RegionError(f"unknown region kind {self.kind!r}")

    # -- bounding box

    def bounding_box(self):
        if self.kind == "polytope":
            v = geom3d.polytope_vertices(self.A, self.b)
            return v.min(axis=0), v.max(axis=0)
        if self.kind == "spherical_sector":
            lo, hi = self.center - self.radius, self.center + self.radius
            return self._clamp_box(lo, hi)
        if self.kind == "ellipsoid_sector":
            lo, hi = self.center - self.semi_axes, self.center + self.semi_axes
            return self._clamp_box(lo, hi)
        if self.kind == "boolean_combination":
            boxes = [c.bounding_box() for c in self.children]
            if self.op == "intersection":
                lo = np.max([b[0] for b in boxes], axis=0)
                hi = np.min([b[1] for b in boxes], axis=0)
                return lo, np.maximum(hi, lo)
            if self.op == "difference":
                return boxes[0]
            lo = np.min([b[0] for b in boxes], axis=0)
            hi = np.max([b[1] for b in boxes], axis=0)
            return lo, hi
        lo, hi = self.base.bounding_box()
        corners = _box_corners(lo, hi) @ self.matrix.T + self.shift
        return corners.min(axis=0), corners.max(axis=0)

    def _clamp_box(self, lo, hi):
        """Tighten a box with any axis-aligned halfspaces in the payload."""
        lo, hi = lo.copy(), hi.copy()
        if self.A is not None:
            for row, off in zip(self.A, self.b):
                nz = np.nonzero(np.abs(row) > 1e-14)[0]
                if len(nz) != 1:
                    continue
                i, c = nz[0], row[nz[0]]
                if c > 0:
                    hi[i] = min(hi[i], off / c)
                else:
                    lo[i] = max(lo[i], off / c)
        return lo, np.maximum(hi, lo)

    # -- rigid motions and scalings (exact per kind)

    def translated(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "polytope":
            return replace(self, b=self.b + self.A @ v)
        if self.kind == "spherical_sector":
            circ = None if self.circ is None else (self.circ[0], self.circ[1] + v)
            b = None if self.b is None else self.b + self.A @ v
            return replace(self, center=self.center + v, b=b, circ=circ)
        if self.kind == "ellipsoid_sector":
            b = None if self.b is None else self.b + self.A @ v
            return replace(self, center=self.center + v, b=b)
        if self.kind == "boolean_combination":
            return replace(self, children=tuple(c.translated(v) for c in self.children))
        return replace(self, shift=self.shift + v)

    def scaled(self, s):
        """Dilation about the origin by s > 0."""
        if s <= 0:
            raise RegionError("scale must be positive")
        if self.kind == "polytope":
            return replace(self, b=self.b * s)
        if self.kind == "spherical_sector":
            circ = None if self.circ is None else (self.circ[0], self.circ[1] * s)
            b = None if self.b is None else self.b * s
            return replace(self, center=self.center * s, radius=self.radius * s,
                           b=b, circ=circ)
        if self.kind == "ellipsoid_sector":
            b = None if self.b is None else self.b * s
            return replace(self, center=self.center * s, semi_axes=self.semi_axes * s)
        if self.kind == "boolean_combination":
            return replace(self, children=tuple(c.scaled(s) for c in self.children))
        return replace(self, matrix=self.matrix * s, shift=self.shift * s)


def _box_corners(lo, hi):
    n = len(lo)
    corners = []
    for mask in range(1 << n):
        corners.append([hi[i] if mask >> i & 1 else lo[i] for i in range(n)])
    return np.array(corners, dtype=float)


# ---------------------------------------------------------------------------
# constructors


def _validate_in_cone(region, samples=128):
    lo, hi = region.bounding_box()
    scale = max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
    rng = _rng(DEFAULT_SEED)
    pts = rng.uniform(lo, hi, size=(samples * 16, region.dim))
    inside = region.contains(pts)
    pts = pts[inside][:samples]
    if len(pts) == 0:
        return region
    d = region.cone.boundary_distance(pts)
    if np.min(d) < -ON_CONE_TOL * scale - 1e-12:
        raise RegionError("region is not contained in the closure of the cone")
    return region


def polytope_region(cone, A, b, validate=True):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    r = Region(kind="polytope", cone=cone, A=A, b=b)
    geom3d.polytope_vertices(A, b)      # raises when empty or unbounded
    return _validate_in_cone(r) if validate else r


def sector_region(cone, radius=1.0, center=None, validate=True, ambient=None):
    """(B_radius cap C) + center; `ambient` overrides the ambient cone when
    the translated sector is meant to live in a larger cone."""
    center = np.zeros(cone.dim) if center is None else np.asarray(center, dtype=float)
    ambient = ambient or cone
    if cone.kind == "circular":
        r = Region(kind="spherical_sector", cone=ambient, center=center,
                   radius=float(radius), A=np.zeros((0, cone.dim)), b=np.zeros(0),
                   circ=(cone, center))
    else:
        A = -cone.normals
        b = A @ center
        r = Region(kind="spherical_sector", cone=ambient, center=center,
                   radius=float(radius), A=A, b=b)
    return _validate_in_cone(r) if validate else r


def disk_sector_region(cone, radius, center=None, extra_halfspaces=None, validate=False):
    """Ball cap cone-at-center cap extra halfspaces (used for trimmed wedges)."""
    center = np.zeros(cone.dim) if center is None else np.asarray(center, dtype=float)
    if cone.kind == "circular":
        A = np.zeros((0, cone.dim))
        b = np.zeros(0)
        circ = (cone, center)
    else:
        A = -cone.normals
        b = A @ center
        circ = None
    if extra_halfspaces is not None:
        Ae, be = extra_halfspaces
        A = np.vstack([A, np.asarray(Ae, dtype=float)])
        b = np.concatenate([b, np.asarray(be, dtype=float)])
    r = Region(kind="spherical_sector", cone=cone, center=center,
               radius=float(radius), A=A, b=b, circ=circ)
    return _validate_in_cone(r) if validate else r


def half_ball_region(cone, center, radius, inward_normal, validate=True):
    """Ball cut by one halfplane through its center (flat side against the
    hyperplane with the given inward normal)."""
    center = np.asarray(center, dtype=float)
    nrm = np.asarray(inward_normal, dtype=float)
    nrm = nrm / np.linalg.norm(nrm)
    A = -nrm[None, :]
    b = A @ center
    r = Region(kind="spherical_sector", cone=cone, center=center,
               radius=float(radius), A=A, b=b)
    return _validate_in_cone(r) if validate else r


def ellipsoid_sector_region(cone, semi_axes, center=None, halfspaces=None, validate=True):
    center = np.zeros(cone.dim) if center is None else np.asarray(center, dtype=float)
    if cone.dim != 2:
        raise RegionError("ellipsoid sectors are implemented in 2D")
    if halfspaces is None:
        A, b = np.zeros((0, 2)), np.zeros(0)
    else:
        A = np.asarray(halfspaces[0], dtype=float)
        b = np.asarray(halfspaces[1], dtype=float)
    r = Region(kind="ellipsoid_sector", cone=cone, center=center,
               semi_axes=np.asarray(semi_axes, dtype=float), A=A, b=b)
    return _validate_in_cone(r) if validate else r


def boolean_region(op, *children, validate=False):
    if op not in ("union", "intersection", "difference"):
        raise RegionError(f"unknown boolean op {op!r}")
    if op == "difference" and len(children) != 2:
        raise RegionError("difference takes exactly two operands")
    r = Region(kind="boolean_combination", cone=children[0].cone, op=op,
               children=tuple(children))
    if r.depth() > MAX_BOOLEAN_DEPTH:
        raise RegionError(f"boolean tree deeper than {MAX_BOOLEAN_DEPTH}")
    return _validate_in_cone(r) if validate else r


def affine_image_region(base, matrix, shift=None, validate=True):
    matrix = np.asarray(matrix, dtype=float)
    shift = np.zeros(base.dim) if shift is None else np.asarray(shift, dtype=float)
    if abs(np.linalg.det(matrix)) < 1e-14:
        raise RegionError("affine image must be invertible")
    r = Region(kind="affine_image", cone=base.cone, matrix=matrix, shift=shift,
               base=base)
    return _validate_in_cone(r) if validate else r


def unit_square_region(cone=None, origin=(0.0, 0.0), side=1.0):
    cone = cone or full_space(2)
    ox, oy = origin
    A = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    b = np.array([ox + side, -ox, oy + side, -oy])
    return polytope_region(cone, A, b)


# ---------------------------------------------------------------------------
# boundary decomposition


@dataclass
class FlatFacet:
    vertices: np.ndarray
    normal: np.ndarray
    measure: float
    on_cone: bool = False

    def sample(self, count, rng):
        v = self.vertices
        c = v.mean(axis=0)
        tris = [(c, v[i], v[(i + 1) % len(v)]) for i in range(len(v))]
        areas = np.array([0.5 * np.linalg.norm(np.cross(t[1] - t[0], t[2] - t[0]))
                          for t in tris])
        probs = areas / areas.sum()
        idx = rng.choice(len(tris), size=count, p=probs)
        r1 = np.sqrt(rng.uniform(size=count))
        r2 = rng.uniform(size=count)
        pts = np.empty((count, 3))
        for i, j in enumerate(idx):
            a, bb, cc = tris[j]
            pts[i] = (1 - r1[i]) * a + r1[i] * (1 - r2[i]) * bb + r1[i] * r2[i] * cc
        return pts


@dataclass
class SpherePatch:
    center: np.ndarray
    radius: float
    cone: ConvexCone
    measure: float
    on_cone: bool = False

    def sample(self, count, rng):
        out = np.empty((count, 3))
        got = 0
        while got < count:
            u = rng.normal(size=(4 * count, 3))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            keep = self.cone.contains(u, tol=0.0)
            take = u[keep][: count - got]
            out[got:got + len(take)] = self.center + self.radius * take
            got += len(take)
        return out

    def normal_at(self, pts):
        d = pts - self.center
        return d / np.linalg.norm(d, axis=1, keepdims=True)


@dataclass
class LateralCircularFacet:
    """dC part of a 3D circular-cone sector: {apex + s u : |u|=1 on the cone
    boundary, 0 <= s <= radius}."""
    apex: np.ndarray
    radius: float
    cone: ConvexCone
    measure: float
    on_cone: bool = True

    def sample(self, count, rng):
        phi = self.cone.half_angle
        s = self.radius * np.sqrt(rng.uniform(size=count))
        az = rng.uniform(0.0, 2 * math.pi, size=count)
        R = self.cone.rotation             # axis -> e3 frame
        u_local = np.column_stack([
            math.sin(phi) * np.cos(az), math.sin(phi) * np.sin(az),
            np.full(count, math.cos(phi)),
        ])
        return self.apex + s[:, None] * (u_local @ R)

    def normal_at(self, pts):
        phi = self.cone.half_angle
        rel = pts - self.apex
        s = rel @ self.cone.axis
        rad = rel - np.outer(s, self.cone.axis)
        rad /= np.maximum(np.linalg.norm(rad, axis=1, keepdims=True), 1e-300)
        return math.cos(phi) * rad - math.sin(phi) * self.cone.axis


def _scale_of(region):
    lo, hi = region.bounding_box()
    return max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))


def _mark_on_cone(piece, cone, scale):
    tol = ON_CONE_TOL * scale
    if isinstance(piece, Segment):
        d = np.abs(cone.boundary_distance(np.array([piece.p0, piece.p1])))
        piece.on_cone = bool(np.all(d <= tol))
    elif isinstance(piece, ConicArc):
        piece.on_cone = False
    elif isinstance(piece, FlatFacet):
        d = np.abs(cone.boundary_distance(piece.vertices))
        piece.on_cone = bool(np.all(d <= tol))
    return piece


def boundary_pieces(region, cone=None):
    """Exact boundary decomposition with on-cone classification.

    Raises RegionError for kinds without an exact decomposition (callers fall
    back to Monte Carlo paths).
    """
    cone = cone or region.cone
    scale = _scale_of(region)
    if region.kind == "polytope":
        if region.dim == 2:
            verts = geom3d.polytope_vertices(region.A, region.b)   # ccw order
            pieces = []
            for i in range(len(verts)):
                p0, p1 = verts[i], verts[(i + 1) % len(verts)]
                d = p1 - p0
                L = float(np.linalg.norm(d))
                if L < 1e-14:
                    continue
                normal = np.array([d[1], -d[0]]) / L
                pieces.append(Segment(p0, p1, normal, L))
        elif region.dim == 3:
            pieces = [FlatFacet(fv, normal, measure)
                      for normal, fv, measure in geom3d.polytope_facets(region.A, region.b)]
        else:
            raise RegionError("exact polytope boundaries are 2D/3D only")
        return [_mark_on_cone(p, cone, scale) for p in pieces]
    if region.kind == "spherical_sector":
        if region.dim == 2:
            _, pieces = geom2d.conic_region_structure(
                region.center, np.array([region.radius, region.radius]),
                region.A, region.b)
            return [_mark_on_cone(p, cone, scale) for p in pieces]
        if region.dim == 3:
            return _sector3d_pieces(region, cone, scale)
        raise RegionError("exact sector boundaries are 2D/3D only")
    if region.kind == "ellipsoid_sector":
        _, pieces = geom2d.conic_region_structure(
            region.center, region.semi_axes, region.A, region.b)
        return [_mark_on_cone(p, cone, scale) for p in pieces]
    if region.kind == "affine_image":
        return _affine_pieces(region, cone, scale)
    raise RegionError(f"no exact boundary decomposition for kind {region.kind!r}")


def _sector3d_pieces(region, cone, scale):
    """Exact decomposition for pure 3D sectors (B_r cap C) + center."""
    own, apex = _as_pure_sector(region)
    if own is None:
        raise RegionError("trimmed 3D sectors have no exact decomposition")
    pieces = [SpherePatch(apex, region.radius, own,
                          own.sector_patch_measure(region.radius))]
    if own.kind == "circular":
        lat = LateralCircularFacet(apex, region.radius, own,
                                   own.lateral_measure(region.radius))
        d = np.abs(cone.boundary_distance(lat.sample(16, _rng(3))))
        lat.on_cone = bool(np.all(d <= ON_CONE_TOL * scale))
        pieces.append(lat)
        return pieces
    rays = own.extreme_rays() @ own.rotation    # back to stored coordinates
    for j, nrm in enumerate(own.normals):
        on_facet = [apex] + [apex + region.radius * ray for ray in rays
                             if abs(ray @ nrm) < 1e-9]
        area = _facet_area_3d(own, j, region.radius)
        if area <= 1e-15:
            continue
        facet = _SectorFacet(apex, region.radius, own, j, area)
        d = np.abs(cone.boundary_distance(facet.sample(16, _rng(3))))
        facet.on_cone = bool(np.all(d <= ON_CONE_TOL * scale))
        pieces.append(facet)
    return pieces


def _facet_area_3d(cone, j, radius):
    from .cones import _facet_disk_area
    return _facet_disk_area(cone, j, radius)


@dataclass
class _SectorFacet:
    """Flat facet of a 3D polyhedral sector: planar disk sector in facet j."""
    apex: np.ndarray
    radius: float
    cone: ConvexCone
    facet_index: int
    measure: float
    on_cone: bool = True

    @property
    def normal(self):
        return -self.cone.normals[self.facet_index]

    def _frame(self):
        nrm = self.cone.normals[self.facet_index]
        tmp = np.eye(3)[int(np.argmin(np.abs(nrm)))]
        u = np.cross(nrm, tmp)
        u /= np.linalg.norm(u)
        v = np.cross(nrm, u)
        others = [self.cone.normals[i] for i in range(len(self.cone.normals))
                  if i != self.facet_index]
        rows = []
        for o in others:
            row = np.array([o @ u, o @ v])
            if np.linalg.norm(row) > 1e-12:
                rows.append(row / np.linalg.norm(row))
        if rows:
            c2 = ConvexCone(dim=2, normals=np.array(rows))
            lo, hi = c2.angular_interval()
        else:
            lo, hi = -math.pi, math.pi
        return u, v, lo, hi

    def sample(self, count, rng):
        u, v, lo, hi = self._frame()
        s = self.radius * np.sqrt(rng.uniform(size=count))
        ang = rng.uniform(lo, hi, size=count)
        return self.apex + s[:, None] * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v))


def _as_pure_sector(region):
    """Return (cone, apex) when the region is exactly (B_r cap C) + apex."""
    if region.circ is not None:
        if region.A is not None and len(region.A):
            return None, None
        return region.circ[0], region.circ[1]
    cone = region.cone
    if cone.kind != "polyhedral":
        return None, None
    A_expect = -cone.normals
    if region.A is None or region.A.shape != A_expect.shape:
        return None, None
    if not np.allclose(region.A, A_expect, atol=1e-12):
        return None, None
    if not np.allclose(region.b, A_expect @ region.center, atol=1e-12):
        return None, None
    return cone, region.center


def _affine_pieces(region, cone, scale):
    M, t = region.matrix, region.shift
    MtM = M.T @ M
    s2 = MtM[0, 0]
    conformal = np.allclose(MtM, s2 * np.eye(region.dim), atol=1e-12)
    if not conformal:
        if region.base.kind == "polytope" and region.dim == 2:
            verts = geom3d.polytope_vertices(region.base.A, region.base.b)
            verts = verts @ M.T + t
            A, b = geom3d.hull_to_hrep(verts)
            return boundary_pieces(Region(kind="polytope", cone=cone, A=A, b=b), cone)
        raise RegionError("non-conformal affine images lack exact boundaries")
    s = math.sqrt(s2)
    base_pieces = boundary_pieces(region.base, region.base.cone)
    out = []
    Q = M / s
    flip = np.linalg.det(Q) < 0
    for p in base_pieces:
        if isinstance(p, Segment):
            q = Segment(p.p0 @ M.T + t, p.p1 @ M.T + t, p.normal @ Q.T, p.measure * s)
        elif isinstance(p, ConicArc) and abs(p.semi_axes[0] - p.semi_axes[1]) < 1e-14:
            # circles stay circles under conformal maps
            c_new = p.center @ M.T + t
            if flip:
                raise RegionError("orientation-reversing maps are not supported")
            ang = math.atan2(Q[1, 0], Q[0, 0])
            q = ConicArc(c_new, p.semi_axes * s, p.t0 + ang, p.t1 + ang, p.measure * s)
        else:
            raise RegionError("affine ellipse arcs are not supported exactly")
        out.append(_mark_on_cone(q, cone, scale))
    return out


# ---------------------------------------------------------------------------
# measures


def volume(region, samples=DEFAULT_INTERIOR_SAMPLES, seed=DEFAULT_SEED):
    return volume_with_error(region, samples, seed).value


def volume_with_error(region, samples=DEFAULT_INTERIOR_SAMPLES, seed=DEFAULT_SEED):
    if region.kind == "polytope":
        if region.dim in (2, 3):
            return Measured(geom3d.polytope_volume(region.A, region.b))
    elif region.kind == "spherical_sector":
        if region.dim == 2:
            area, _ = geom2d.conic_region_structure(
                region.center, np.array([region.radius, region.radius]),
                region.A, region.b)
            return Measured(area)
        if region.dim == 3:
            own, _ = _as_pure_sector(region)
            if own is not None:
                return Measured(own.sector_volume(region.radius))
    elif region.kind == "ellipsoid_sector":
        area, _ = geom2d.conic_region_structure(
            region.center, region.semi_axes, region.A, region.b)
        return Measured(area)
    elif region.kind == "affine_image":
        base = volume_with_error(region.base, samples, seed)
        j = abs(np.linalg.det(region.matrix))
        return Measured(base.value * j, base.err * j)
    elif region.kind == "boolean_combination" and region.dim == 2:
        poly = to_shapely(region)
        err = _shapely_error(region)
        return Measured(poly.area, err)
    return _mc_volume(region, samples, seed)


def _mc_volume(region, samples, seed):
    lo, hi = region.bounding_box()
    box = float(np.prod(hi - lo))
    if box <= 0:
        return Measured(0.0)
    rng = _rng(seed)
    pts = rng.uniform(lo, hi, size=(samples, region.dim))
    hits = int(np.count_nonzero(region.contains(pts)))
    p = hits / samples
    return Measured(box * p, box * math.sqrt(max(p * (1 - p), 1e-12) / samples))


def relative_perimeter(region, cone=None, samples=DEFAULT_BOUNDARY_SAMPLES,
                       seed=DEFAULT_SEED):
    return relative_perimeter_with_error(region, cone, samples, seed).value


def relative_perimeter_with_error(region, cone=None, samples=DEFAULT_BOUNDARY_SAMPLES,
                                  seed=DEFAULT_SEED):
    cone = cone or region.cone
    try:
        pieces = boundary_pieces(region, cone)
    except RegionError:
        return _mc_relative_perimeter(region, cone, samples, seed)
    total = sum(p.measure for p in pieces if not p.on_cone)
    return Measured(float(total))


def full_boundary_measure(region, cone=None):
    cone = cone or region.cone
    pieces = boundary_pieces(region, cone)
    return float(sum(p.measure for p in pieces))


def _mc_relative_perimeter(region, cone, samples, seed):
    if region.kind == "boolean_combination" and region.dim == 2:
        surf = _boolean2d_surface(region, cone, max(512, samples // 64))
        val = float(surf.weights[~surf.on_cone].sum())
        return Measured(val, _shapely_error(region))
    surf = _crofton_surface(region, cone, samples, seed)
    val = float(surf.weights[~surf.on_cone].sum())
    rel = 1.0 / math.sqrt(max(1, len(surf.points)))
    return Measured(val, val * rel)


# -- symmetric difference


def symmetric_difference_volume(r1, r2, samples=DEFAULT_INTERIOR_SAMPLES,
                                seed=DEFAULT_SEED, resolution=SYMDIFF_RESOLUTION):
    return symmetric_difference_with_error(r1, r2, samples, seed, resolution).value


def symmetric_difference_with_error(r1, r2, samples=DEFAULT_INTERIOR_SAMPLES,
                                    seed=DEFAULT_SEED, resolution=SYMDIFF_RESOLUTION):
    if r1.dim != r2.dim:
        raise RegionError("dimension mismatch")
    # disjoint fast path
    lo1, hi1 = r1.bounding_box()
    lo2, hi2 = r2.bounding_box()
    if np.any(hi1 < lo2) or np.any(hi2 < lo1):
        v1 = volume_with_error(r1, samples, seed)
        v2 = volume_with_error(r2, samples, seed)
        return Measured(v1.value + v2.value, v1.err + v2.err)
    if r1.kind == "polytope" and r2.kind == "polytope" and r1.dim in (2, 3):
        v1 = geom3d.polytope_volume(r1.A, r1.b)
        v2 = geom3d.polytope_volume(r2.A, r2.b)
        try:
            inter = geom3d.polytope_volume(np.vstack([r1.A, r2.A]),
                                           np.concatenate([r1.b, r2.b]))
        except geom3d.PolytopeError:
            inter = 0.0
        return Measured(v1 + v2 - 2.0 * inter)
    rad = _radial_symdiff(r1, r2)
    if rad is not None:
        return rad
    if r1.dim == 2:
        try:
            p1, e1 = to_shapely(r1, resolution), _shapely_error(r1, resolution)
            p2, e2 = to_shapely(r2, resolution), _shapely_error(r2, resolution)
            return Measured(p1.symmetric_difference(p2).area, e1 + e2)
        except RegionError:
            pass
    return _mc_symdiff(r1, r2, samples, seed)


def _mc_symdiff(r1, r2, samples, seed):
    lo = np.minimum(r1.bounding_box()[0], r2.bounding_box()[0])
    hi = np.maximum(r1.bounding_box()[1], r2.bounding_box()[1])
    box = float(np.prod(hi - lo))
    rng = _rng(seed)
    pts = rng.uniform(lo, hi, size=(samples, r1.dim))
    inside = r1.contains(pts) ^ r2.contains(pts)
    p = np.count_nonzero(inside) / samples
    return Measured(box * p, box * math.sqrt(max(p * (1 - p), 1e-12) / samples))


def _radial_profile(region):
    """(angular interval, r(phi)) for 2D regions star-shaped about a common
    apex with halfspaces through the apex; None otherwise."""
    if region.dim != 2:
        return None
    if region.kind not in ("spherical_sector", "ellipsoid_sector"):
        return None
    c = region.center
    if region.circ is not None:
        return None
    if region.A is not None and len(region.A):
        if np.max(np.abs(region.b - region.A @ c)) > 1e-12:
            return None
        cone2 = ConvexCone(dim=2, normals=-region.A)
        lo, hi = cone2.angular_interval()
    else:
        lo, hi = -math.pi, math.pi
    if region.kind == "spherical_sector":
        r = region.radius
        fn = lambda phi: r
    else:
        a1, a2 = region.semi_axes
        fn = lambda phi: 1.0 / math.sqrt((math.cos(phi) / a1) ** 2 + (math.sin(phi) / a2) ** 2)
    return c, lo, hi, fn


def _radial_symdiff(r1, r2):
    from scipy.integrate import quad
    p1 = _radial_profile(r1)
    p2 = _radial_profile(r2)
    if p1 is None or p2 is None:
        return None
    c1, lo1, hi1, f1 = p1
    c2, lo2, hi2, f2 = p2
    if np.linalg.norm(c1 - c2) > 1e-12 or abs(lo1 - lo2) > 1e-12 or abs(hi1 - hi2) > 1e-12:
        return None
    g = lambda phi: abs(f1(phi) ** 2 - f2(phi) ** 2) / 2.0
    # locate radial crossings on a scan grid, then integrate piecewise
    grid = np.linspace(lo1, hi1, 1025)
    diff = np.array([f1(t) - f2(t) for t in grid])
    breaks = [lo1]
    from scipy.optimize import brentq
    for i in range(len(grid) - 1):
        if diff[i] == 0.0 or diff[i] * diff[i + 1] < 0:
            try:
                breaks.append(brentq(lambda t: f1(t) - f2(t), grid[i], grid[i + 1]))
            except ValueError:
                pass
    breaks.append(hi1)
    breaks = sorted(set(breaks))
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, _ = quad(g, a, b, limit=200, epsabs=1e-13, epsrel=1e-13)
        total += val
    return Measured(total, 1e-12)


# -- shapely bridge (2D)


def to_shapely(region, resolution=SYMDIFF_RESOLUTION):
    from shapely.geometry import Polygon
    if region.dim != 2:
        raise RegionError("shapely bridge is 2D only")
    if region.kind == "boolean_combination":
        childs = [to_shapely(c, resolution) for c in region.children]
        out = childs[0]
        for c in childs[1:]:
            if region.op == "union":
                out = out.union(c)
            elif region.op == "intersection":
                out = out.intersection(c)
            else:
                out = out.difference(c)
        return out
    if region.kind == "affine_image":
        from shapely import affinity
        base = to_shapely(region.base, resolution)
        M, t = region.matrix, region.shift
        return affinity.affine_transform(base, [M[0, 0], M[0, 1], M[1, 0], M[1, 1], t[0], t[1]])
    pieces = boundary_pieces(region)
    loop = geom2d.polygonalize(pieces, resolution)
    if len(loop) < 3:
        return Polygon()
    return Polygon(loop)


def _shapely_error(region, resolution=SYMDIFF_RESOLUTION):
    if region.kind == "boolean_combination":
        return sum(_shapely_error(c, resolution) for c in region.children)
    if region.kind == "affine_image":
        return _shapely_error(region.base, resolution) * abs(np.linalg.det(region.matrix))
    try:
        pieces = boundary_pieces(region)
    except RegionError:
        return 0.0
    return geom2d.polygon_discretization_error(pieces, resolution)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class InteriorSample:
    points: np.ndarray
    acceptance: float


def sample_interior(region, count, seed=DEFAULT_SEED):
    """Uniform interior points by rejection from the bounding box."""
    if count < 1:
        raise RegionError("count must be at least 1")
    lo, hi = region.bounding_box()
    rng = _rng(seed)
    out = np.empty((count, region.dim))
    got = total = hits = 0
    while got < count:
        batch = max(1024, 2 * (count - got))
        pts = rng.uniform(lo, hi, size=(batch, region.dim))
        keep = region.contains(pts)
        total += batch
        hits += int(np.count_nonzero(keep))
        take = pts[keep][: count - got]
        out[got:got + len(take)] = take
        got += len(take)
        if total > 1024 and (hits / total) < 1e-4:
            raise RegionError("degenerate region")
    return InteriorSample(out, hits / total)


def sample_boundary(region, cone=None, count=DEFAULT_BOUNDARY_SAMPLES, seed=DEFAULT_SEED):
    """Weighted boundary sample; weights sum to the total surface measure."""
    cone = cone or region.cone
    rng = _rng(seed)
    try:
        pieces = boundary_pieces(region, cone)
    except RegionError:
        if region.dim == 2:
            return _boolean2d_surface(region, cone, count)
        return _crofton_surface(region, cone, count, seed)
    measures = np.array([p.measure for p in pieces])
    total = measures.sum()
    alloc = np.maximum(1, np.round(count * measures / total).astype(int))
    pts, nrms, wts, flags = [], [], [], []
    for piece, k in zip(pieces, alloc):
        w = piece.measure / k
        if isinstance(piece, Segment):
            ss = rng.uniform(size=k)
            pp = np.array([piece.point_at(s) for s in np.sort(ss)])
            nn = np.tile(piece.normal, (k, 1))
        elif isinstance(piece, ConicArc):
            # uniform in arc length via inverse transform on a dense lattice
            ts = _arc_uniform_params(piece, k, rng)
            pp = np.array([piece.point_at_param(t) for t in ts])
            nn = np.array([piece.normal_at_param(t) for t in ts])
        elif isinstance(piece, SpherePatch):
            pp = piece.sample(k, rng)
            nn = piece.normal_at(pp)
        elif isinstance(piece, LateralCircularFacet):
            pp = piece.sample(k, rng)
            nn = piece.normal_at(pp)
        else:  # FlatFacet / _SectorFacet
            pp = piece.sample(k, rng)
            nn = np.tile(piece.normal, (k, 1))
        pts.append(pp)
        nrms.append(nn)
        wts.append(np.full(k, w))
        flags.append(np.full(k, piece.on_cone, dtype=bool))
    return SurfaceSample(np.vstack(pts), np.vstack(nrms), np.concatenate(wts),
                         np.concatenate(flags))


def _arc_uniform_params(arc, count, rng):
    if abs(arc.semi_axes[0] - arc.semi_axes[1]) < 1e-14:
        return np.sort(rng.uniform(arc.t0, arc.t1, size=count))
    dense = np.linspace(arc.t0, arc.t1, 513)
    speeds = np.array([arc.speed(t) for t in dense])
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (speeds[1:] + speeds[:-1]) * np.diff(dense))])
    cum /= cum[-1]
    u = np.sort(rng.uniform(size=count))
    return np.interp(u, cum, dense)


def _boolean2d_surface(region, cone, count):
    """Approximate decomposition from the polygonalized boolean result."""
    poly = to_shapely(region)
    rings = []
    geoms = getattr(poly, "geoms", [poly])
    for g in geoms:
        if g.is_empty:
            continue
        rings.append((np.array(g.exterior.coords), 1.0))
        for hole in g.interiors:
            rings.append((np.array(hole.coords), -1.0))
    pts, nrms, wts, flags = [], [], [], []
    scale = _scale_of(region)
    for coords, orient in rings:
        ccw = _ring_is_ccw(coords)
        for i in range(len(coords) - 1):
            p0, p1 = coords[i], coords[i + 1]
            d = p1 - p0
            L = np.linalg.norm(d)
            if L < 1e-14:
                continue
            nrm = np.array([d[1], -d[0]]) / L
            if not ccw:
                nrm = -nrm
            nrm *= orient
            mid = 0.5 * (p0 + p1)
            on = bool(np.all(np.abs(cone.boundary_distance(np.array([p0, p1])))
                             <= ON_CONE_TOL * scale))
            pts.append(mid)
            nrms.append(nrm)
            wts.append(L)
            flags.append(on)
    return SurfaceSample(np.array(pts), np.array(nrms), np.array(wts),
                         np.array(flags, dtype=bool), warning=True)


def _ring_is_ccw(coords):
    x, y = coords[:-1, 0], coords[:-1, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) > 0


def _crofton_surface(region, cone, count, seed):
    """Monte Carlo boundary sample from isotropic line crossings.

    Crossing points of isotropic random lines are distributed according to the
    surface measure; the total measure follows from the mean crossing count
    (2 pi R^2 E[#] in 3D, pi R E[#] in 2D for lines through a ball of radius R).
    """
    rng = _rng(seed)
    lo, hi = region.bounding_box()
    c0 = 0.5 * (lo + hi)
    R = 0.6 * float(np.linalg.norm(hi - lo)) + 1e-9
    dim = region.dim
    n_lines = max(64, count // 4)
    pts, nrms = [], []
    crossings = 0
    for _ in range(n_lines):
        u = rng.normal(size=dim)
        u /= np.linalg.norm(u)
        # random offset in the disk perpendicular to u
        while True:
            w = rng.normal(size=dim)
            w -= (w @ u) * u
            nw = np.linalg.norm(w)
            if nw > 1e-12:
                w /= nw
                break
        if dim == 3:
            ang = rng.uniform(0, 2 * math.pi)
            v2 = np.cross(u, w)
            rr = R * math.sqrt(rng.uniform())
            offset = rr * (math.cos(ang) * w + math.sin(ang) * v2)
        else:
            offset = R * rng.uniform(-1, 1) * w
        base = c0 + offset
        ts = np.linspace(-R, R, 513)
        line = base[None, :] + ts[:, None] * u[None, :]
        inside = region.contains(line)
        sign_change = np.nonzero(inside[1:] != inside[:-1])[0]
        for i in sign_change:
            a, b = ts[i], ts[i + 1]
            for _ in range(50):
                m = 0.5 * (a + b)
                if bool(region.contains(base + m * u)) == bool(inside[i]):
                    a = m
                else:
                    b = m
            x = base + 0.5 * (a + b) * u
            crossings += 1
            pts.append(x)
            nrms.append(_implicit_normal(region, x, u, inside[i]))
    if dim == 3:
        total = 2.0 * math.pi * R * R * crossings / n_lines
    else:
        total = math.pi * R * crossings / n_lines
    pts = np.array(pts) if pts else np.zeros((0, dim))
    nrms = np.array(nrms) if nrms else np.zeros((0, dim))
    w = np.full(len(pts), total / max(len(pts), 1))
    scale = _scale_of(region)
    flags = (np.abs(cone.boundary_distance(pts)) <= ON_CONE_TOL * scale) if len(pts) \
        else np.zeros(0, dtype=bool)
    return SurfaceSample(pts, nrms, w, flags, warning=True)


def _implicit_normal(region, x, u, was_inside, h=1e-6):
    """Outward normal at a boundary point from the leaf geometry when
    identifiable, else the crossing direction."""
    leaf = _owning_leaf(region, x)
    if leaf is not None:
        n = _leaf_normal(leaf, x)
        if n is not None:
            probe = x + 1e-5 * n
            if bool(region.contains(probe)):
                n = -n
            return n
    d = u if was_inside else -u
    return d / np.linalg.norm(d)


def _owning_leaf(region, x, tol=1e-7):
    if region.kind == "boolean_combination":
        for c in region.children:
            leaf = _owning_leaf(c, x, tol)
            if leaf is not None:
                return leaf
        return None
    return region if _on_leaf_boundary(region, x, tol) else None


def _on_leaf_boundary(region, x, tol):
    if region.kind == "polytope":
        return bool(np.max(np.abs(region.A @ x - region.b)) >= -1 and
                    np.min(np.abs(region.A @ x - region.b)) <= tol)
    if region.kind == "spherical_sector":
        d = abs(np.linalg.norm(x - region.center) - region.radius)
        cand = [d]
        if region.A is not None and len(region.A):
            cand.append(float(np.min(np.abs(region.A @ x - region.b))))
        return min(cand) <= tol
    return False


def _leaf_normal(region, x):
    if region.kind == "spherical_sector":
        d = x - region.center
        if abs(np.linalg.norm(d) - region.radius) <= 1e-6:
            return d / np.linalg.norm(d)
        if region.A is not None and len(region.A):
            i = int(np.argmin(np.abs(region.A @ x - region.b)))
            return region.A[i] / np.linalg.norm(region.A[i])
        return None
    if region.kind == "polytope":
        i = int(np.argmin(np.abs(region.A @ x - region.b)))
        return region.A[i] / np.linalg.norm(region.A[i])
    return None
