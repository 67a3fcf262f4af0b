import math

import numpy as np
import pytest

from coneiso import cones, deficits, regions
from coneiso.cones import sector_body, unit_ball_body
from coneiso.deficits import (DeficitError, anisotropic_deficit,
                              anisotropic_perimeter, asymmetry_index,
                              constrained_asymmetry, deficit_report,
                              relative_deficit, stability_ratio)
from coneiso.families import half_ball_region_for, random_region

SQ2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# equality cases


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_sector_deficit_vanishes_2d(quadrant, wedge, s):
    for cone in (quadrant, wedge):
        E = regions.sector_region(cone, s)
        assert abs(relative_deficit(E, cone)) <= 1e-12
        assert abs(anisotropic_deficit(E, sector_body(cone))) <= 1e-12


def test_sector_deficit_vanishes_3d(circular45, orthant3):
    for cone in (circular45, orthant3):
        E = regions.sector_region(cone, 1.3)
        assert abs(relative_deficit(E, cone)) <= 1e-9


# ---------------------------------------------------------------------------
# anisotropic perimeter


def test_sector_equality_case_perimeter(quadrant):
    K = sector_body(quadrant)
    E = regions.sector_region(quadrant)
    # P_K(K) = n |K|
    assert anisotropic_perimeter(E, K) == pytest.approx(math.pi / 2, abs=1e-12)


def test_square_with_ball_gauge_is_euclidean(plane2):
    B1 = unit_ball_body(2)
    sq = regions.unit_square_region(plane2)
    assert anisotropic_perimeter(sq, B1) == pytest.approx(4.0, abs=1e-12)


def test_gauge_body_translation_invariance():
    # moving the gauge body does not change the anisotropic perimeter
    cone, E = half_ball_region_for(math.pi / 2)
    K = sector_body(cone)
    base = anisotropic_perimeter(E, K)
    rng = np.random.default_rng(8)
    for _ in range(10):
        z0 = rng.normal(size=2)
        moved = K.translated(z0)
        assert anisotropic_perimeter(E, moved) == pytest.approx(base, abs=1e-9)


def test_anisotropic_below_relative(quadrant):
    # pointwise support <= 1 and = 0 on the cone boundary
    rng = np.random.default_rng(4)
    K = sector_body(quadrant)
    for _ in range(20):
        E = random_region(quadrant, rng, kind="polytope")
        assert anisotropic_perimeter(E, K) <= \
            regions.relative_perimeter(E, quadrant) + 1e-9


# ---------------------------------------------------------------------------
# relative deficit values


def test_half_ball_deficit_quarter_plane():
    cone, E = half_ball_region_for(math.pi / 2)
    assert relative_deficit(E, cone) == pytest.approx(SQ2 - 1, abs=1e-12)


@pytest.mark.parametrize("theta", [math.pi / 3, 2.0, 2.8])
def test_half_ball_deficit_closed_form(theta):
    cone, E = half_ball_region_for(theta)
    expected = math.sqrt(math.pi / theta) - 1.0
    assert relative_deficit(E, cone) == pytest.approx(expected, abs=1e-9)


def test_half_ball_on_halfplane_edge_is_equality_case(halfplane):
    # opening pi: the half-ball along the edge is a translated sector
    E = regions.half_ball_region(halfplane, np.array([3.0, 0.0]), 1.0,
                                 np.array([0.0, 1.0]))
    assert abs(relative_deficit(E, halfplane)) <= 1e-12


def test_deficit_requires_volume(quadrant):
    E = regions.sector_region(quadrant)
    bad = regions.Region(kind="spherical_sector", cone=quadrant,
                         center=np.zeros(2), radius=1.0,
                         A=np.array([[1.0, 0.0], [-1.0, 0.0]]),
                         b=np.array([0.0, 0.0]))
    with pytest.raises(DeficitError):
        relative_deficit(bad, quadrant)


# ---------------------------------------------------------------------------
# invariances


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_deficits_scale_invariant(quadrant, lam):
    cone, E = half_ball_region_for(2.0)
    K = sector_body(cone)
    mu = relative_deficit(E, cone)
    dl = anisotropic_deficit(E, K)
    assert relative_deficit(E.scaled(lam), cone) == pytest.approx(mu, abs=1e-9)
    assert anisotropic_deficit(E.scaled(lam), K) == pytest.approx(dl, abs=1e-9)


def test_lineality_translation_invariance(halfplane):
    E = regions.unit_square_region(halfplane, origin=(0.3, 0.2))
    mu = relative_deficit(E, halfplane)
    for v in (-2.0, 1.5, 7.0):
        assert relative_deficit(E.translated([v, 0.0]), halfplane) == \
            pytest.approx(mu, abs=1e-9)


def test_two_deficit_representations_agree(quadrant):
    rng = np.random.default_rng(31)
    for _ in range(10):
        E = random_region(quadrant, rng)
        # check_consistency raises if they disagree beyond combined error
        relative_deficit(E, quadrant, check_consistency=True)


# ---------------------------------------------------------------------------
# ordering between the two deficits


def test_anisotropic_at_most_relative_sampled(quadrant, wedge, orthant3):
    for cone in (quadrant, wedge, orthant3):
        K = sector_body(cone)
        rng = np.random.default_rng(7)
        for _ in range(30):
            E = random_region(cone, rng, kind="polytope")
            assert anisotropic_deficit(E, K) <= \
                relative_deficit(E, cone) + 1e-9


# ---------------------------------------------------------------------------
# asymmetry


def test_asymmetry_exact_fit(quadrant):
    K = sector_body(quadrant)
    E = regions.sector_region(quadrant, 1.4).translated([0.2, 0.3])
    val, x, r = asymmetry_index(E, K)
    assert val <= 2e-6
    assert r == pytest.approx(1.4, abs=1e-12)
    assert np.allclose(x, [0.2, 0.3], atol=1e-4)


def test_asymmetry_at_most_two(quadrant):
    cone, E = half_ball_region_for(math.pi / 2)
    K = sector_body(cone)
    val, _, _ = asymmetry_index(E, K, resolution=1024)
    assert val <= 2.0 + 1e-9


def test_constrained_upper_bounds_free(quadrant):
    rng = np.random.default_rng(13)
    K = sector_body(quadrant)
    for _ in range(3):
        E = random_region(quadrant, rng, kind="polytope")
        free, _, _ = asymmetry_index(E, K, resolution=1024)
        con, _ = constrained_asymmetry(E, K, resolution=1024)
        assert con >= free - 1e-6


def test_constrained_asymmetry_k0_is_direct(quadrant):
    E = regions.sector_region(quadrant, 1.3)
    K = sector_body(quadrant)
    val, x = constrained_asymmetry(E, K)
    assert val <= 1e-12
    assert np.allclose(x, 0.0)


def test_constrained_absorbs_lineality_shift(halfplane):
    K = sector_body(halfplane)
    E = regions.sector_region(halfplane, 1.0).translated([2.5, 0.0])
    val, x = constrained_asymmetry(E, K)
    assert val <= 2e-6
    assert x[0] == pytest.approx(2.5, abs=1e-3)
    assert abs(x[1]) <= 1e-9


def test_half_ball_constrained_asymmetry_is_two():
    cone, E = half_ball_region_for(math.pi / 2)
    K = sector_body(cone)
    val, _ = constrained_asymmetry(E, K)
    assert val == pytest.approx(2.0, abs=1e-6)


# ---------------------------------------------------------------------------
# stability ratio


def test_stability_ratio_equality_case_errors(quadrant):
    E = regions.sector_region(quadrant, 1.2)
    with pytest.raises(DeficitError, match="equality"):
        stability_ratio(E, quadrant)


def test_stability_ratio_growth_along_openings():
    vals = {}
    for theta in (2.0, 3.10):
        cone, E = half_ball_region_for(theta)
        vals[theta] = stability_ratio(E, cone)
    # closed-form oracle: 2 / sqrt(sqrt(pi/theta) - 1)
    for theta, v in vals.items():
        oracle = 2.0 / math.sqrt(math.sqrt(math.pi / theta) - 1.0)
        assert v == pytest.approx(oracle, rel=1e-5)
    assert vals[3.10] > vals[2.0]
    assert vals[3.10] > 10.0


# ---------------------------------------------------------------------------
# report


def test_deficit_report_fields(quadrant):
    E = regions.unit_square_region(quadrant, origin=(0.2, 0.2))
    rep = deficit_report(E, quadrant, resolution=1024)
    assert rep.volume == pytest.approx(1.0, abs=1e-12)
    assert rep.rel_perimeter == pytest.approx(4.0, abs=1e-12)
    assert rep.scale_s == pytest.approx((1.0 / (math.pi / 4)) ** 0.5, abs=1e-12)
    assert rep.anisotropic_deficit <= rep.relative_deficit + 1e-9
    assert 0.0 <= rep.asymmetry <= rep.constrained_asymmetry + 1e-6
    assert rep.constrained_asymmetry <= 2.0 + 1e-9
    assert rep.isoperimetric_margin >= -1e-9
    d = rep.to_dict()
    assert set(d) == set(deficits.DeficitReport.CSV_COLUMNS)
