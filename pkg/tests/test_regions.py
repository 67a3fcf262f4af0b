import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coneiso import cones, regions
from coneiso.regions import (RegionError, boolean_region, half_ball_region,
                             polytope_region, relative_perimeter,
                             sample_boundary, sample_interior, sector_region,
                             symmetric_difference_volume, unit_square_region,
                             volume)


# ---------------------------------------------------------------------------
# volume


def test_quarter_disk_area(quadrant):
    assert volume(sector_region(quadrant)) == pytest.approx(math.pi / 4,
                                                            abs=1e-12)


def test_unit_square_area(quadrant):
    assert volume(unit_square_region(quadrant)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("theta", [0.4, math.pi / 2, 2.5])
def test_plane_sector_area(theta):
    cone = cones.plane_cone(theta)
    assert volume(sector_region(cone)) == pytest.approx(theta / 2, abs=1e-12)


def test_3d_sector_volumes(orthant3, circular45):
    assert volume(sector_region(orthant3)) == pytest.approx(math.pi / 6, abs=1e-12)
    om = 2 * math.pi * (1 - math.cos(math.pi / 4))
    assert volume(sector_region(circular45)) == pytest.approx(om / 3, abs=1e-12)


def test_mc_volume_reports_error(quadrant):
    r1 = sector_region(quadrant)
    r2 = unit_square_region(quadrant, origin=(0.2, 0.2), side=0.3)
    tree = boolean_region("union", r1, r2)
    est = regions.volume_with_error(tree)
    assert est.value == pytest.approx(math.pi / 4, abs=1e-5)


# ---------------------------------------------------------------------------
# relative perimeter


def test_sector_relative_perimeter_is_arc_only():
    theta = 1.1
    cone = cones.plane_cone(theta)
    for s in (0.5, 1.0, 2.0):
        E = sector_region(cone, s)
        assert relative_perimeter(E, cone) == pytest.approx(s * theta, abs=1e-12)


def test_half_ball_relative_perimeter():
    theta = math.pi / 2
    cone = cones.plane_cone(theta)
    a_edge = math.pi / 2 - theta / 2
    edge = np.array([math.cos(a_edge), math.sin(a_edge)])
    inward = np.array([-math.sin(a_edge), math.cos(a_edge)])
    E = half_ball_region(cone, 10 * edge, 1.0, inward)
    assert relative_perimeter(E, cone) == pytest.approx(math.pi, abs=1e-12)
    assert volume(E) == pytest.approx(math.pi / 2, abs=1e-12)


def test_square_strictly_inside_has_full_perimeter(quadrant):
    E = unit_square_region(quadrant, origin=(0.5, 0.5))
    assert relative_perimeter(E, quadrant) == pytest.approx(4.0, abs=1e-12)


def test_square_on_corner_loses_cone_facets(quadrant):
    E = unit_square_region(quadrant, origin=(0.0, 0.0))
    assert relative_perimeter(E, quadrant) == pytest.approx(2.0, abs=1e-12)


def test_3d_sector_relative_perimeter(orthant3, circular45):
    assert relative_perimeter(sector_region(orthant3, 2.0), orthant3) == \
        pytest.approx(4 * math.pi / 2, abs=1e-12)
    om = 2 * math.pi * (1 - math.cos(math.pi / 4))
    assert relative_perimeter(sector_region(circular45, 0.5), circular45) == \
        pytest.approx(0.25 * om, abs=1e-12)


def test_3d_polytope_perimeter_classification(orthant3):
    A = np.vstack([np.eye(3), -np.eye(3)])
    b = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    E = polytope_region(orthant3, A, b)
    # three faces on the cone boundary are excluded
    assert relative_perimeter(E, orthant3) == pytest.approx(3.0, abs=1e-9)


# ---------------------------------------------------------------------------
# scaling laws


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_laws_2d(quadrant, lam):
    E = sector_region(quadrant, 1.0)
    n = 2
    assert volume(E.scaled(lam)) == pytest.approx(lam ** n * volume(E), rel=1e-9)
    assert relative_perimeter(E.scaled(lam), quadrant) == pytest.approx(
        lam ** (n - 1) * relative_perimeter(E, quadrant), rel=1e-9)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_laws_3d(circular45, lam):
    E = sector_region(circular45, 1.0)
    n = 3
    assert volume(E.scaled(lam)) == pytest.approx(lam ** n * volume(E), rel=1e-9)
    assert relative_perimeter(E.scaled(lam), circular45) == pytest.approx(
        lam ** (n - 1) * relative_perimeter(E, circular45), rel=1e-9)


# ---------------------------------------------------------------------------
# symmetric difference


def test_symmetric_difference_self_is_zero(quadrant):
    E = unit_square_region(quadrant)
    assert symmetric_difference_volume(E, E) == 0.0
    S = sector_region(quadrant)
    assert symmetric_difference_volume(S, S) <= 1e-12


@pytest.mark.parametrize("t", [0.1, 0.35, 1.0])
def test_shifted_square_symmetric_difference(quadrant, t):
    E = unit_square_region(quadrant)
    F = E.translated([t, 0.0])
    assert symmetric_difference_volume(E, F) == pytest.approx(2 * t, abs=1e-12)


@given(st.floats(0.01, 0.99))
def test_shifted_square_formula_property(t):
    E = unit_square_region(cones.full_space(2))
    F = E.translated([t, 0.0])
    assert symmetric_difference_volume(E, F) == pytest.approx(2 * t, abs=1e-12)


@given(st.floats(0.3, 2.5))
def test_sector_scaling_property(lam):
    cone = cones.plane_cone(1.3)
    E = sector_region(cone, 1.0)
    assert volume(E.scaled(lam)) == pytest.approx(lam ** 2 * volume(E),
                                                  rel=1e-11)
    assert relative_perimeter(E.scaled(lam), cone) == pytest.approx(
        lam * relative_perimeter(E, cone), rel=1e-11)


def test_disjoint_symmetric_difference(quadrant):
    E = unit_square_region(quadrant)
    F = unit_square_region(quadrant, origin=(5.0, 5.0))
    assert symmetric_difference_volume(E, F) == pytest.approx(2.0, abs=1e-12)


def test_symmetric_difference_triangle_inequality(quadrant):
    rng = np.random.default_rng(17)
    from coneiso.families import random_region
    for _ in range(6):
        A = random_region(quadrant, rng, kind="polytope")
        B = random_region(quadrant, rng, kind="polytope")
        C = random_region(quadrant, rng, kind="polytope")
        ab = symmetric_difference_volume(A, B)
        bc = symmetric_difference_volume(B, C)
        ac = symmetric_difference_volume(A, C)
        assert ac <= ab + bc + 1e-9


def test_symmetric_difference_3d_polytopes(orthant3):
    A = np.vstack([np.eye(3), -np.eye(3)])
    E = polytope_region(orthant3, A, np.array([1.0, 1, 1, 0, 0, 0]))
    F = E.translated([0.25, 0.0, 0.0])
    assert symmetric_difference_volume(E, F) == pytest.approx(0.5, abs=1e-9)


# ---------------------------------------------------------------------------
# sampling


def test_interior_sampling_uniform_mean(quadrant):
    E = unit_square_region(quadrant)
    s = sample_interior(E, 1000, seed=5)
    sigma = math.sqrt(1.0 / 12.0 / 1000)
    assert np.all(np.abs(s.points.mean(axis=0) - 0.5) <= 3 * sigma)


def test_interior_sampling_deterministic(quadrant):
    E = sector_region(quadrant)
    s1 = sample_interior(E, 500, seed=42)
    s2 = sample_interior(E, 500, seed=42)
    assert np.array_equal(s1.points, s2.points)


def test_interior_sampling_rejects_zero_count(quadrant):
    with pytest.raises(RegionError):
        sample_interior(sector_region(quadrant), 0)


def test_degenerate_region_detected(quadrant):
    sliver = unit_square_region(quadrant, origin=(0.0, 0.0), side=1.0)
    A = np.vstack([sliver.A, [[1.0, -1.0], [-1.0, 1.0]]])
    b = np.concatenate([sliver.b, [1e-6, 1e-6]])
    thin = polytope_region(quadrant, A, b)
    with pytest.raises(RegionError, match="degenerate"):
        sample_interior(thin, 100, seed=1)


def test_boundary_sample_quarter_disk(quadrant):
    E = sector_region(quadrant)
    surf = sample_boundary(E, count=512, seed=3)
    assert surf.total_measure == pytest.approx(math.pi / 2 + 2.0, abs=1e-9)
    assert surf.weights[~surf.on_cone].sum() == pytest.approx(math.pi / 2, abs=1e-9)
    assert surf.weights[surf.on_cone].sum() == pytest.approx(2.0, abs=1e-9)
    assert np.all(surf.weights > 0)
    assert np.allclose(np.linalg.norm(surf.normals, axis=1), 1.0, atol=1e-9)


def test_boundary_sample_interior_square_unflagged(quadrant):
    E = unit_square_region(quadrant, origin=(1.0, 1.0))
    surf = sample_boundary(E, count=256, seed=3)
    assert surf.weights[surf.on_cone].sum() == 0.0


def test_boundary_sample_flags_near_cone(quadrant):
    E = sector_region(quadrant)
    surf = sample_boundary(E, count=512, seed=9)
    flagged = surf.points[surf.on_cone]
    d = np.abs(quadrant.boundary_distance(flagged))
    assert np.max(d) <= 1e-9


def test_boundary_sample_3d_sector(circular45):
    E = sector_region(circular45)
    surf = sample_boundary(E, count=2048, seed=7)
    om = 2 * math.pi * (1 - math.cos(math.pi / 4))
    lateral = math.pi * math.sin(math.pi / 4)
    assert surf.total_measure == pytest.approx(om + lateral, abs=1e-9)
    assert surf.weights[surf.on_cone].sum() == pytest.approx(lateral, abs=1e-9)


def test_boolean_boundary_fallback_warns(quadrant):
    E = boolean_region("union", unit_square_region(quadrant),
                       unit_square_region(quadrant, origin=(0.5, 0.0)))
    surf = sample_boundary(E, count=512, seed=1)
    assert surf.warning
    assert surf.total_measure == pytest.approx(5.0, abs=1e-6)


def test_crofton_boundary_3d(orthant3):
    A = np.vstack([np.eye(3), -np.eye(3)])
    cube = polytope_region(orthant3, A, np.array([2.0, 2, 2, -1, -1, -1]))
    tree = boolean_region("union", cube, cube)
    surf = sample_boundary(tree, count=4000, seed=11)
    assert surf.warning
    assert surf.total_measure == pytest.approx(6.0, rel=0.1)


# ---------------------------------------------------------------------------
# global inequalities


def test_relative_isoperimetric_inequality_random(quadrant, orthant3):
    from coneiso.families import random_region
    for cone in (quadrant, orthant3):
        rng = np.random.default_rng(23)
        n = cone.dim
        K_vol = cone.sector_volume(1.0)
        for _ in range(25):
            E = random_region(cone, rng)
            lhs = n * K_vol ** (1 / n) * volume(E) ** ((n - 1) / n)
            assert lhs <= relative_perimeter(E, cone) + 1e-9


def test_sector_patch_identity():
    # n |B_1 cap C| equals the spherical patch measure
    for cone in (cones.quadrant(), cones.plane_cone(2.0), cones.orthant(3),
                 cones.circular_cone(0.9), cones.halfplane()):
        n = cone.dim
        assert n * cone.sector_volume(1.0) == pytest.approx(
            cone.sector_patch_measure(1.0), abs=1e-9)


# ---------------------------------------------------------------------------
# validation


def test_region_outside_cone_rejected(quadrant):
    with pytest.raises(RegionError, match="not contained"):
        unit_square_region(quadrant, origin=(-2.0, 0.0))


def test_boolean_depth_bound(quadrant):
    E = unit_square_region(quadrant)
    tree = E
    for _ in range(8):
        tree = boolean_region("union", tree, E)
    with pytest.raises(RegionError, match="deeper"):
        boolean_region("union", tree, E)


def test_affine_image_volume(quadrant):
    E = unit_square_region(quadrant)
    M = np.array([[2.0, 0.0], [0.0, 0.5]])
    img = regions.affine_image_region(E, M, shift=[0.5, 0.5])
    assert volume(img) == pytest.approx(1.0, abs=1e-12)


def test_conformal_affine_pieces(quadrant):
    E = sector_region(quadrant)
    ang = 0.3
    Q = 2.0 * np.array([[math.cos(ang), -math.sin(ang)],
                        [math.sin(ang), math.cos(ang)]])
    img = regions.affine_image_region(E, Q, shift=[3.0, 3.0],
                                      validate=False)
    pieces = regions.boundary_pieces(img)
    total = sum(p.measure for p in pieces)
    assert total == pytest.approx(2.0 * (math.pi / 2 + 2.0), abs=1e-9)
