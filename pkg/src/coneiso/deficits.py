"""Deficit functionals: anisotropic perimeter, both isoperimetric deficits,
asymmetry indices, and the stability ratio they bound.

Conventions: C is the ambient cone, K = B_1 cap C the reference sector,
s the scale with |E| = |sK|. The relative deficit normalizes the relative
perimeter P(E|C); the anisotropic deficit normalizes the support-weighted
perimeter P_K(E). Both vanish exactly on dilated sectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from . import regions as rg
from .cones import SectorBody, sector_body, support_value
from .geom2d import ConicArc, Segment
from .regions import Measured, Region

EQUALITY_MU = 1e-12


class DeficitError(ValueError):
    pass


@dataclass
class DeficitReport:
    volume: float
    rel_perimeter: float
    aniso_perimeter: float
    relative_deficit: float
    anisotropic_deficit: float
    scale_s: float
    asymmetry: float
    constrained_asymmetry: float
    best_translation: np.ndarray
    isoperimetric_margin: float
    err: float = 0.0

    CSV_COLUMNS = ("volume", "rel_perimeter", "aniso_perimeter",
                   "relative_deficit", "anisotropic_deficit", "scale_s",
                   "asymmetry", "constrained_asymmetry", "best_translation",
                   "isoperimetric_margin", "err")

    def to_dict(self):
        return {
            "volume": self.volume,
            "rel_perimeter": self.rel_perimeter,
            "aniso_perimeter": self.aniso_perimeter,
            "relative_deficit": self.relative_deficit,
            "anisotropic_deficit": self.anisotropic_deficit,
            "scale_s": self.scale_s,
            "asymmetry": self.asymmetry,
            "constrained_asymmetry": self.constrained_asymmetry,
            "best_translation": list(map(float, self.best_translation)),
            "isoperimetric_margin": self.isoperimetric_margin,
            "err": self.err,
        }


# ---------------------------------------------------------------------------
# anisotropic perimeter


def anisotropic_perimeter(region, K, samples=rg.DEFAULT_BOUNDARY_SAMPLES,
                          seed=rg.DEFAULT_SEED):
    return anisotropic_perimeter_with_error(region, K, samples, seed).value


def anisotropic_perimeter_with_error(region, K, samples=rg.DEFAULT_BOUNDARY_SAMPLES,
                                     seed=rg.DEFAULT_SEED):
    """Integral of the support value of K against the outward normals."""
    try:
        pieces = rg.boundary_pieces(region)
    except rg.RegionError:
        surf = rg.sample_boundary(region, count=samples, seed=seed)
        vals = np.array([support_value(K, n) for n in surf.normals])
        val = float(np.sum(vals * surf.weights))
        rel = 1.0 / math.sqrt(max(1, len(surf.points)))
        return Measured(val, val * rel)
    total = 0.0
    for p in pieces:
        total += _piece_support_integral(p, K)
    return Measured(float(total))


def _piece_support_integral(piece, K):
    if isinstance(piece, Segment):
        return piece.measure * support_value(K, piece.normal)
    if isinstance(piece, ConicArc):
        fn = lambda t: support_value(K, piece.normal_at_param(t)) * piece.speed(t)
        breaks = _support_kink_params(piece, K)
        total = 0.0
        for a, b in zip(breaks[:-1], breaks[1:]):
            val, _ = quad(fn, a, b, limit=200, epsabs=1e-12, epsrel=1e-12)
            total += val
        return total
    if isinstance(piece, rg.SpherePatch):
        # patch normals are radial directions inside the patch cone; when K is
        # an origin sector over the same cone, |P(n)| = 1 so the integral is
        # exactly radius_K * patch measure
        if K.kind == "spherical_sector" and np.linalg.norm(K.center) < 1e-14 \
                and _same_cone(piece.cone, K.cone):
            return K.radius * piece.measure
        return _patch_quadrature(piece, K)
    if isinstance(piece, (rg.FlatFacet, rg._SectorFacet, rg.LateralCircularFacet)):
        if isinstance(piece, rg.LateralCircularFacet):
            return _patch_quadrature(piece, K)
        return piece.measure * support_value(K, piece.normal)
    raise DeficitError(f"unsupported boundary piece {type(piece).__name__}")


def _support_kink_params(piece, K):
    """Quadrature breakpoints where the support integrand loses smoothness.

    The support of a sector body is nu . center + r |P(nu)| whose active
    projection face changes at the cone's edge directions and a quarter turn
    past them; convert those critical normal directions to arc parameters.
    """
    t0, t1 = piece.t0, piece.t1
    breaks = {t0, t1}
    if K.kind != "spherical_sector" or K.dim != 2:
        mids = np.linspace(t0, t1, 9)
        return sorted(set(breaks) | set(mids))
    cone = K.cone
    if cone.normals.shape[0] == 0:
        return sorted(breaks)
    lo, hi = cone.angular_interval()
    crit = [lo, hi, lo - math.pi / 2, hi + math.pi / 2]
    a1, a2 = piece.semi_axes
    for psi in crit:
        t_star = math.atan2(a2 * math.sin(psi), a1 * math.cos(psi))
        for k in (-1, 0, 1, 2):
            t = t_star + 2.0 * math.pi * k
            if t0 + 1e-12 < t < t1 - 1e-12:
                breaks.add(t)
    return sorted(breaks)


def _same_cone(c1, c2):
    if c1 is c2:
        return True
    if c1.kind != c2.kind or c1.dim != c2.dim:
        return False
    if c1.kind == "circular":
        return (abs(c1.half_angle - c2.half_angle) < 1e-12 and
                np.allclose(c1.axis, c2.axis, atol=1e-12))
    if c1.normals.shape != c2.normals.shape:
        return False
    return np.allclose(c1.normals, c2.normals, atol=1e-12)


def _patch_quadrature(piece, K, count=20000):
    rng = rg._rng(12)
    pts = piece.sample(count, rng)
    nrm = piece.normal_at(pts)
    vals = np.array([support_value(K, n) for n in nrm])
    return piece.measure * float(np.mean(vals))


# ---------------------------------------------------------------------------
# deficits


def _norm_denominator(cone, vol):
    n = cone.dim
    K_vol = cone.sector_volume(1.0)
    return n * K_vol ** (1.0 / n) * vol ** ((n - 1.0) / n)


def relative_deficit(region, cone=None, check_consistency=True):
    return relative_deficit_with_error(region, cone, check_consistency).value


def relative_deficit_with_error(region, cone=None, check_consistency=True):
    """Normalized gap between P(E|C) and its sector optimum.

    Evaluates both the definitional normalization and the sphere-patch
    representation (P(E|C) - H^{n-1}(dB_s cap C)) / H^{n-1}(dB_s cap C);
    the two must agree within combined numerical error.
    """
    cone = cone or region.cone
    vol = rg.volume_with_error(region)
    if vol.value <= 0:
        raise DeficitError("region must have positive volume")
    per = rg.relative_perimeter_with_error(region, cone)
    denom = _norm_denominator(cone, vol.value)
    mu_def = per.value / denom - 1.0
    n = cone.dim
    s = (vol.value / cone.sector_volume(1.0)) ** (1.0 / n)
    patch = cone.sector_patch_measure(s)
    mu_patch = (per.value - patch) / patch
    err = (per.err + vol.err) / denom + 1e-11
    if check_consistency and abs(mu_def - mu_patch) > err + 1e-9:
        raise DeficitError(
            f"deficit representations disagree: {mu_def} vs {mu_patch}")
    return Measured(mu_def, err)


def anisotropic_deficit(region, K, samples=rg.DEFAULT_BOUNDARY_SAMPLES,
                        seed=rg.DEFAULT_SEED):
    return anisotropic_deficit_with_error(region, K, samples, seed).value


def anisotropic_deficit_with_error(region, K, samples=rg.DEFAULT_BOUNDARY_SAMPLES,
                                   seed=rg.DEFAULT_SEED):
    vol = rg.volume_with_error(region)
    if vol.value <= 0:
        raise DeficitError("region must have positive volume")
    per = anisotropic_perimeter_with_error(region, K, samples, seed)
    n = region.dim
    K_vol = K.volume()
    denom = n * K_vol ** (1.0 / n) * vol.value ** ((n - 1.0) / n)
    return Measured(per.value / denom - 1.0, (per.err + vol.err) / denom + 1e-11)


# ---------------------------------------------------------------------------
# asymmetry


def _fitted_sector(K, region_volume):
    """r K scaled so |rK| = |E|, as a region (K must be centered at 0)."""
    cone = K.cone
    n = cone.dim
    r = (region_volume / cone.sector_volume(K.radius)) ** (1.0 / n)
    return rg.sector_region(cone, radius=r * K.radius, validate=False), r


def _symdiff_objective(region, sector_template, vol, resolution):
    """|E delta (x0 + template)| / |E| as a function of x0.

    In 2D both polygons are built once and the template is translated in
    shapely, which keeps discretizations congruent across evaluations."""
    if region.dim == 2:
        try:
            from shapely import affinity
            p_region = rg.to_shapely(region, resolution)
            p_template = rg.to_shapely(sector_template, resolution)

            def fn(x0):
                moved = affinity.translate(p_template, float(x0[0]), float(x0[1]))
                return p_region.symmetric_difference(moved).area / vol

            return fn
        except rg.RegionError:
            pass

    def fn(x0):
        moved = sector_template.translated(x0)
        sd = rg.symmetric_difference_with_error(region, moved, resolution=resolution)
        return sd.value / vol
    return fn


def asymmetry_index(region, K, resolution=4096, xatol=1e-6, starts="full"):
    """inf over translations of |E delta (x0 + rK)| / |E| with |rK| = |E|.

    Deterministic multi-start Nelder-Mead; start list: centroid difference,
    the origin, and (starts="full") the centroid difference perturbed by
    +-0.2 r in every coordinate combination. Ties resolved toward the
    lexicographically smallest translation.
    """
    vol = rg.volume(region)
    sector, r = _fitted_sector(K, vol)
    fn = _symdiff_objective(region, sector, vol, resolution)
    dim = region.dim
    centroid_E = rg.sample_interior(region, 4096, seed=101).points.mean(axis=0)
    centroid_K = rg.sample_interior(sector, 4096, seed=102).points.mean(axis=0)
    base = centroid_E - centroid_K
    start_list = [base, np.zeros(dim)]
    if starts == "full":
        for mask in range(1 << dim):
            delta = np.array([0.2 * r if mask >> i & 1 else -0.2 * r
                              for i in range(dim)])
            start_list.append(base + delta)
    best_val, best_x = np.inf, np.zeros(dim)
    for s0 in start_list:
        res = minimize(fn, s0, method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": 1e-12, "maxiter": 600})
        x, val = res.x, float(res.fun)
        if val < best_val - 1e-12 or (abs(val - best_val) <= 1e-12 and
                                      tuple(x) < tuple(best_x)):
            best_val, best_x = val, x
    return best_val, best_x, r


def constrained_asymmetry(region, K, k=None, resolution=4096, xatol=1e-6):
    """Asymmetry with translations restricted to the cone's lineality space.

    For k = 0 there is nothing to optimize: the sector stays at the origin.
    Translations are parametrized over an orthonormal lineality basis.
    """
    cone = K.cone
    if k is None:
        k = cone.lineality_dim
    if k != cone.lineality_dim:
        raise DeficitError("k must match the cone's lineality dimension")
    vol = rg.volume(region)
    sector, r = _fitted_sector(K, vol)
    dim = region.dim
    if k == 0:
        # no free translation: evaluate the symmetric difference directly,
        # which keeps the exact radial / disjoint fast paths available
        sd = rg.symmetric_difference_with_error(region, sector,
                                                resolution=resolution)
        return sd.value / vol, np.zeros(dim)
    fn = _symdiff_objective(region, sector, vol, resolution)
    basis = cone.rotation[:k]          # rows spanning the lineality space
    centroid_E = rg.sample_interior(region, 4096, seed=101).points.mean(axis=0)
    centroid_K = rg.sample_interior(sector, 4096, seed=102).points.mean(axis=0)
    base = basis @ (centroid_E - centroid_K)

    def fn_t(t):
        return fn(t @ basis)

    best_val, best_t = np.inf, np.zeros(k)
    starts = [base, np.zeros(k)]
    for mask in range(1 << k):
        starts.append(base + np.array([0.2 * r if mask >> i & 1 else -0.2 * r
                                       for i in range(k)]))
    for s0 in starts:
        res = minimize(fn_t, s0, method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": 1e-12, "maxiter": 600})
        t, val = res.x, float(res.fun)
        if val < best_val - 1e-12 or (abs(val - best_val) <= 1e-12 and
                                      tuple(t) < tuple(best_t)):
            best_val, best_t = val, t
    return best_val, best_t @ basis


def stability_ratio(region, cone=None, resolution=4096):
    """constrained asymmetry / sqrt(relative deficit); the quantity the main
    stability inequality bounds by a cone-dependent constant."""
    cone = cone or region.cone
    mu = relative_deficit(region, cone)
    if mu <= EQUALITY_MU:
        raise DeficitError("equality case; ratio undefined")
    K = sector_body(cone)
    a, _ = constrained_asymmetry(region, K, resolution=resolution)
    return a / math.sqrt(mu)


# ---------------------------------------------------------------------------
# report


def deficit_report(region, cone=None, resolution=4096):
    cone = cone or region.cone
    K = sector_body(cone)
    vol = rg.volume_with_error(region)
    per = rg.relative_perimeter_with_error(region, cone)
    aniso = anisotropic_perimeter_with_error(region, K)
    mu = relative_deficit_with_error(region, cone)
    delta = anisotropic_deficit_with_error(region, K)
    n = cone.dim
    s = (vol.value / cone.sector_volume(1.0)) ** (1.0 / n)
    asym, _, _ = asymmetry_index(region, K, resolution=resolution)
    casym, best_t = constrained_asymmetry(region, K, resolution=resolution)
    margin = per.value - _norm_denominator(cone, vol.value)
    return DeficitReport(
        volume=vol.value,
        rel_perimeter=per.value,
        aniso_perimeter=aniso.value,
        relative_deficit=mu.value,
        anisotropic_deficit=delta.value,
        scale_s=s,
        asymmetry=asym,
        constrained_asymmetry=casym,
        best_translation=best_t,
        isoperimetric_margin=margin,
        err=vol.err + per.err + aniso.err,
    )
