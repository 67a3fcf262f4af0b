"""Sharpness families, empirical constant estimation, and brute-force scans
of the translation-difference bounds and the trimmed-wedge identities.

All experiments are deterministic given the seed recorded in the result
metadata; family rows are sorted by parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import deficits as df
from . import regions as rg
from .cones import (ConvexCone, _normal_form_copy, plane_cone, quadrant,
                    reduced_wedge, sector_body)
from .geom3d import hull_to_hrep

FIT_WINDOW = (1e-10, 1e-1)


class FamilyError(ValueError):
    pass


@dataclass
class FamilyRow:
    parameter: float
    relative_deficit: float
    anisotropic_deficit: float
    asymmetry: float
    constrained_asymmetry: float
    stability_ratio: float
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "parameter": self.parameter,
            "relative_deficit": self.relative_deficit,
            "anisotropic_deficit": self.anisotropic_deficit,
            "asymmetry": self.asymmetry,
            "constrained_asymmetry": self.constrained_asymmetry,
            "stability_ratio": self.stability_ratio,
        }
        out.update(self.extra)
        return out


@dataclass
class ExponentFit:
    slope: float
    ci_low: float
    ci_high: float

    @property
    def beta(self):
        return 1.0 / self.slope

    def to_dict(self):
        return {"slope": self.slope, "ci_low": self.ci_low,
                "ci_high": self.ci_high, "beta": self.beta}


@dataclass
class FamilyResult:
    name: str
    parameter_name: str
    rows: list
    fit: ExponentFit | None
    metadata: dict

    def column(self, key):
        return np.array([getattr(r, key) for r in self.rows])


# ---------------------------------------------------------------------------
# boundary half-ball family over opening angles


def half_ball_region_for(theta, distance=None):
    """Unit half-ball with its flat side on one edge of the opening-theta cone,
    far enough from the vertex to stay inside the cone and clear of the
    optimal sector."""
    cone = plane_cone(theta)
    if distance is None:
        distance = max(10.0, 2.0 / math.sin(theta))
    a_edge = math.pi / 2 - theta / 2
    edge = np.array([math.cos(a_edge), math.sin(a_edge)])
    inward = np.array([-math.sin(a_edge), math.cos(a_edge)])
    region = rg.half_ball_region(cone, distance * edge, 1.0, inward)
    return cone, region


def half_ball_deficit_closed_form(theta):
    """mu of the unit half-ball on the edge of the opening-theta cone:
    pi / (2 sqrt(theta/2) sqrt(pi/2)) - 1."""
    return math.pi / (2.0 * math.sqrt(theta / 2.0) * math.sqrt(math.pi / 2.0)) - 1.0


def theta_cone_family(thetas, distance=None, resolution=2048,
                      compute_free_asymmetry=True, seed=rg.DEFAULT_SEED):
    """Per opening angle: the half-ball's deficits, asymmetries, and stability
    ratio; numeric mu must match the closed form and the ratio must grow
    toward the degenerate opening."""
    rows = []
    for theta in sorted(thetas):
        if not (0.0 < theta < math.pi):
            raise FamilyError("opening angle must lie in (0, pi)")
        cone, E = half_ball_region_for(theta, distance)
        K = sector_body(cone)
        mu = df.relative_deficit(E, cone)
        mu_cf = half_ball_deficit_closed_form(theta)
        if abs(mu - mu_cf) > 1e-6:
            raise FamilyError(f"numeric deficit {mu} disagrees with the "
                              f"closed form {mu_cf} at theta={theta}")
        delta = df.anisotropic_deficit(E, K)
        casym, _ = df.constrained_asymmetry(E, K, resolution=resolution)
        if compute_free_asymmetry:
            asym, _, _ = df.asymmetry_index(E, K, resolution=resolution)
        else:
            asym = casym
        rows.append(FamilyRow(
            parameter=theta, relative_deficit=mu, anisotropic_deficit=delta,
            asymmetry=asym, constrained_asymmetry=casym,
            stability_ratio=casym / math.sqrt(mu),
            extra={"closed_form_deficit": mu_cf}))
    ratios = [r.stability_ratio for r in rows]
    monotone = all(b > a for a, b in zip(ratios[:-1], ratios[1:]))
    fit = None
    try:
        fit = exponent_fit_from_rows(rows, seed)
    except FamilyError:
        pass
    return FamilyResult("half_ball_over_openings", "theta", rows, fit,
                        {"ratio_monotone": monotone, "seed": seed,
                         "distance": distance})


# ---------------------------------------------------------------------------
# ellipsoid family in the first orthant (2D)


def ellipsoid_family(hs, resolution=2048, seed=rg.DEFAULT_SEED,
                     identity_tol=1e-6):
    """Volume-preserving ellipses with axes (1 + 1/h, (1 + 1/h)^-1): the
    quarter piece in the quadrant has the same relative deficit as the full
    ellipse's anisotropic (ball) deficit, and asymmetry ~ sqrt(deficit)."""
    cone = quadrant()
    from .cones import full_space, unit_ball_body
    plane = full_space(2)
    B1 = unit_ball_body(2)
    K = sector_body(cone)
    rows = []
    for h in sorted(hs):
        if h < 1:
            raise FamilyError("family index must be a positive integer")
        a = 1.0 + 1.0 / h
        axes = (a, 1.0 / a)
        quarter = rg.ellipsoid_sector_region(
            cone, axes, halfspaces=(np.array([[-1.0, 0.0], [0.0, -1.0]]),
                                    np.zeros(2)))
        whole = rg.ellipsoid_sector_region(plane, axes)
        delta_ball = df.anisotropic_deficit(whole, B1)
        mu_quarter = df.relative_deficit(quarter, cone)
        if abs(mu_quarter - delta_ball) > identity_tol:
            raise FamilyError(
                f"symmetry identity violated at h={h}: {mu_quarter} vs {delta_ball}")
        # scaling identities (recorded for the invariant suite)
        per_quarter = rg.relative_perimeter(quarter, cone)
        per_whole = df.anisotropic_perimeter(whole, B1)
        casym, _ = df.constrained_asymmetry(quarter, K, resolution=resolution)
        asym, _, _ = df.asymmetry_index(quarter, K, resolution=resolution)
        delta_quarter = df.anisotropic_deficit(quarter, K)
        ratio = casym / math.sqrt(mu_quarter) if mu_quarter > df.EQUALITY_MU \
            else float("nan")
        rows.append(FamilyRow(
            parameter=float(h), relative_deficit=mu_quarter,
            anisotropic_deficit=delta_quarter, asymmetry=asym,
            constrained_asymmetry=casym, stability_ratio=ratio,
            extra={"ball_deficit_whole": delta_ball,
                   "perimeter_quarter": per_quarter,
                   "perimeter_whole": per_whole,
                   "volume_quarter": rg.volume(quarter),
                   "volume_whole": rg.volume(whole)}))
    fit = None
    try:
        fit = exponent_fit_from_rows(rows, seed)
    except FamilyError:
        pass
    return FamilyResult("orthant_ellipsoids", "h", rows, fit, {"seed": seed})


# ---------------------------------------------------------------------------
# exponent fit


def exponent_fit_from_rows(rows, seed=rg.DEFAULT_SEED, window=FIT_WINDOW,
                           resamples=200):
    pts = [(r.relative_deficit, r.asymmetry) for r in rows
           if window[0] < r.relative_deficit < window[1] and r.asymmetry > 0]
    return exponent_fit(np.array(pts), seed, resamples)


def exponent_fit(mu_asym, seed=rg.DEFAULT_SEED, resamples=200):
    """Least-squares slope of log(asymmetry) against log(deficit), with a
    seeded bootstrap 90% interval. The slope estimates the reciprocal of the
    stability exponent."""
    mu_asym = np.asarray(mu_asym, dtype=float).reshape(-1, 2)
    if len(mu_asym) < 5:
        raise FamilyError("need at least five family members in the fit window")
    x = np.log(mu_asym[:, 0])
    y = np.log(mu_asym[:, 1])
    slope, _ = np.polyfit(x, y, 1)
    rng = rg._rng(seed)
    slopes = []
    n = len(x)
    for _ in range(resamples):
        idx = rng.integers(0, n, size=n)
        if len(np.unique(x[idx])) < 2:
            continue
        s, _ = np.polyfit(x[idx], y[idx], 1)
        slopes.append(s)
    lo, hi = np.percentile(slopes, [5.0, 95.0])
    return ExponentFit(float(slope), float(lo), float(hi))


# ---------------------------------------------------------------------------
# empirical constant estimation


def random_region(cone, rng, kind=None):
    """A random polytope clipped to the cone, or a perturbed sector."""
    n = cone.dim
    kind = kind if kind is not None else ("polytope" if rng.uniform() < 0.7
                                          else "sector")
    if kind == "polytope":
        count = int(rng.integers(n + 3, 13))
        pts = _points_in_sector(cone, rng, count)
        A, b = hull_to_hrep(pts)
        if cone.kind == "polyhedral" and cone.normals.shape[0]:
            A = np.vstack([A, -cone.normals])
            b = np.concatenate([b, np.zeros(cone.normals.shape[0])])
        return rg.polytope_region(cone, A, b, validate=False)
    radius = float(rng.uniform(0.5, 1.5))
    shift = _points_in_sector(cone, rng, 1)[0] * rng.uniform(0.0, 0.3)
    return rg.sector_region(cone, radius, center=shift, validate=False)


def _points_in_sector(cone, rng, count):
    out = np.empty((count, cone.dim))
    got = 0
    while got < count:
        pts = rng.uniform(-1.0, 1.0, size=(4 * count + 16, cone.dim))
        keep = cone.contains(pts, tol=1e-6) & (np.linalg.norm(pts, axis=1) <= 1.0)
        take = pts[keep][: count - got]
        out[got:got + len(take)] = take
        got += len(take)
    return out


def constant_estimator(cone, trials, seed=rg.DEFAULT_SEED, resolution=2048,
                       mu_floor=1e-6, include_boundary_half_ball=True):
    """Max stability ratio over random perturbed regions (plus, for 2D pointed
    cones, the deterministic boundary half-ball). Estimates the cone-dependent
    constant of the stability inequality from below."""
    if trials < 1:
        raise FamilyError("need at least one trial")
    rng = rg._rng(seed)
    K = sector_body(cone)
    rows = []
    for t in range(trials):
        E = random_region(cone, rng)
        try:
            mu = df.relative_deficit(E, cone)
        except df.DeficitError:
            continue
        if mu <= mu_floor:
            continue
        casym, _ = df.constrained_asymmetry(E, K, resolution=resolution)
        rows.append(FamilyRow(
            parameter=float(t), relative_deficit=mu, anisotropic_deficit=np.nan,
            asymmetry=casym, constrained_asymmetry=casym,
            stability_ratio=casym / math.sqrt(mu)))
    if include_boundary_half_ball and cone.dim == 2 and cone.lineality_dim == 0:
        lo, hi = cone.angular_interval()
        theta = hi - lo
        if theta < math.pi:
            _, E = _half_ball_in(cone, theta)
            mu = df.relative_deficit(E, cone)
            casym, _ = df.constrained_asymmetry(E, K, resolution=resolution)
            rows.append(FamilyRow(
                parameter=-1.0, relative_deficit=mu, anisotropic_deficit=np.nan,
                asymmetry=casym, constrained_asymmetry=casym,
                stability_ratio=casym / math.sqrt(mu),
                extra={"deterministic": "boundary_half_ball"}))
    if not rows:
        raise FamilyError("no admissible trials (all near the equality case)")
    estimate = max(r.stability_ratio for r in rows)
    result = FamilyResult("constant_estimate", "trial", rows, None,
                          {"seed": seed, "estimate": estimate,
                           "trials": trials, "mu_floor": mu_floor})
    return estimate, result


def _half_ball_in(cone, theta):
    lo, hi = cone.angular_interval()
    distance = max(10.0, 2.0 / math.sin(theta))
    edge = np.array([math.cos(lo), math.sin(lo)])
    inward = np.array([-math.sin(lo), math.cos(lo)])
    E = rg.half_ball_region(cone, distance * edge, 1.0, inward)
    return cone, E


# ---------------------------------------------------------------------------
# translation-difference scans


def shift_difference_ratio_scan(A, directions, ts):
    """Table of |(y + A) delta A| / |y| over y = t d; the ratio stays bounded
    and tends to the directional perimeter as t -> 0."""
    rows = []
    sup = 0.0
    arg = None
    for d in directions:
        d = np.asarray(d, dtype=float)
        d = d / np.linalg.norm(d)
        for t in ts:
            if t <= 0:
                raise FamilyError("shifts must be positive")
            y = t * d
            f = rg.symmetric_difference_volume(A, A.translated(y))
            ratio = f / t
            rows.append({"dx": d[0], "dy": d[1], "t": t, "f": f, "ratio": ratio})
            if ratio > sup:
                sup, arg = ratio, (tuple(d), t)
    directional = [directional_perimeter(A, d) for d in directions]
    return {"rows": rows, "sup": sup, "argsup": arg,
            "directional_perimeters": directional}


def directional_perimeter(A, d):
    """int over dA of |nu . d|; the t -> 0 limit of the shift ratio."""
    d = np.asarray(d, dtype=float)
    d = d / np.linalg.norm(d)
    pieces = rg.boundary_pieces(A)
    total = 0.0
    for p in pieces:
        if hasattr(p, "normal"):
            total += p.measure * abs(float(p.normal @ d))
        else:
            from scipy.integrate import quad
            fn = lambda t: abs(float(p.normal_at_param(t) @ d)) * p.speed(t)
            val, _ = quad(fn, p.t0, p.t1, limit=200)
            total += val
    return float(total)


def shift_difference_lower_bound(A, n_directions=64, n_radii=64):
    """Brute-force constants (c, C) with min(c, C|y|) <= |(y + A) delta A|.

    C is the worst ratio f/|y| over shifts up to s = diam(A)/4; c the smallest
    f over shifts between s and the diameter. The returned table verifies the
    bound at every grid point.
    """
    if A.dim != 2:
        raise FamilyError("the lower-bound scan is 2D")
    verts = rg.geom3d.polytope_vertices(A.A, A.b) if A.kind == "polytope" else None
    if verts is not None:
        diam = max(np.linalg.norm(p - q) for p in verts for q in verts)
    else:
        lo, hi = A.bounding_box()
        diam = float(np.linalg.norm(hi - lo))
    s = diam / 4.0
    angles = 2.0 * math.pi * np.arange(n_directions) / n_directions
    radii = diam * (np.arange(1, n_radii + 1) / n_radii)
    table = []
    C = math.inf
    c = math.inf
    for ang in angles:
        d = np.array([math.cos(ang), math.sin(ang)])
        for t in radii:
            f = rg.symmetric_difference_volume(A, A.translated(t * d))
            table.append({"angle": ang, "t": t, "f": f})
            if t <= s:
                C = min(C, f / t)
            else:
                c = min(c, f)
    violations = [row for row in table
                  if min(c, C * row["t"]) > row["f"] + 1e-9]
    return c, C, {"rows": table, "s": s, "diam": diam, "violations": violations}


# ---------------------------------------------------------------------------
# trimmed-wedge identities


def wedge_identity_check(cone, ys, samples=100_000, seed=rg.DEFAULT_SEED):
    """Monte Carlo check of the trimmed-wedge set identities.

    For y with nonnegative last coordinate (and zeros in the lineality slots):
        wedge \\ (y + wedge) = wedge \\ (y + C);
    for nonpositive last coordinate:
        (y + wedge) \\ wedge = (y + wedge) \\ C.
    Works in the cone's normal-form coordinates. Returns per-y witness counts;
    the identities hold exactly, so witnesses indicate a violation.
    """
    K = sector_body(cone)
    wedge = reduced_wedge(K)
    nf_cone = _normal_form_copy(cone)
    k = cone.lineality_dim
    rng = rg._rng(seed)
    reports = []
    for y in ys:
        y = np.asarray(y, dtype=float)
        if k and np.max(np.abs(y[:k])) > 1e-12:
            raise FamilyError("lemma hypothesis violated")
        upward = y[-1] >= 0.0
        lo1, hi1 = wedge.bounding_box()
        lo = np.minimum(lo1, lo1 + y)
        hi = np.maximum(hi1, hi1 + y)
        pts = rng.uniform(lo, hi, size=(samples, cone.dim))
        in_w = wedge.contains(pts)
        in_w_shift = wedge.contains(pts - y)
        in_c_shift = nf_cone.contains(pts - y, tol=0.0)
        in_c = nf_cone.contains(pts, tol=0.0)
        if upward:
            lhs = in_w & ~in_w_shift
            rhs = in_w & ~in_c_shift
            name = "wedge_minus_shifted"
        else:
            lhs = in_w_shift & ~in_w
            rhs = in_w_shift & ~in_c
            name = "shifted_minus_wedge"
        mism = lhs ^ rhs
        n_wit = int(np.count_nonzero(mism))
        box_vol = float(np.prod(hi - lo))
        witnesses = pts[mism][:10]
        reports.append({
            "y": list(map(float, y)), "identity": name, "witnesses": n_wit,
            "mismatch_measure": box_vol * n_wit / samples,
            "witness_points": witnesses.tolist(),
        })
    return {"reports": reports, "samples": samples, "seed": seed,
            "max_witnesses": max(r["witnesses"] for r in reports)}
