"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; tolerances are fixed here, not configurable.
"""

import json
import math
from contextlib import contextmanager

import numpy as np
import pytest

from coneiso import cli, cones, deficits, families, regions, transport
from coneiso.cones import optimal_recentring, sector_body
from coneiso.families import half_ball_deficit_closed_form, half_ball_region_for

SQ2 = math.sqrt(2.0)
THETAS = [math.pi / 3, math.pi / 2, 2 * math.pi / 3, 2.8, 3.1]


@contextmanager
def criterion(num, name):
    try:
        yield
    except BaseException:
        print(f"[acceptance {num}] {name}: FAIL")
        raise
    print(f"[acceptance {num}] {name}: PASS")


def _recentred(cone):
    K = sector_body(cone)
    x0 = optimal_recentring(K)
    return K, sector_body(cone, center=x0)


def test_criterion_1_theta_cone_sharpness():
    with criterion(1, "theta-cone sharpness"):
        fam = families.theta_cone_family(THETAS, compute_free_asymmetry=False)
        for row in fam.rows:
            closed = math.pi / (2 * math.sqrt(row.parameter / 2)
                                * math.sqrt(math.pi / 2)) - 1.0
            assert abs(row.relative_deficit - closed) <= 1e-6
        ratios = fam.column("stability_ratio")
        assert np.all(np.diff(ratios) > 0)
        assert ratios[-1] > 10.0
        assert fam.rows[-1].parameter == pytest.approx(3.10)


def test_criterion_2_equality_cases():
    with criterion(2, "sector equality cases"):
        for cone in (cones.quadrant(), cones.wedge2d()):
            for s in (0.5, 1.0, 2.0):
                E = regions.sector_region(cone, s)
                assert abs(deficits.relative_deficit(E, cone)) <= 1e-12
        circ = cones.circular_cone(math.pi / 4)
        for s in (0.5, 1.0, 2.0):
            E = regions.sector_region(circ, s)
            assert abs(deficits.relative_deficit(E, circ)) <= 1e-9


def test_criterion_3_deficit_ordering_suite():
    with criterion(3, "anisotropic deficit below relative deficit"):
        cones_under_test = (cones.quadrant(), cones.wedge2d(), cones.orthant(3))
        violations = 0
        for ci, cone in enumerate(cones_under_test):
            rng = regions._rng(1000 + ci)
            K = sector_body(cone)
            for _ in range(200):
                E = families.random_region(cone, rng, kind="polytope")
                mu = deficits.relative_deficit(E, cone)
                delta = deficits.anisotropic_deficit(E, K)
                if delta > mu + 1e-9:
                    violations += 1
        assert violations == 0


def test_criterion_4_ellipsoid_sharpness():
    with criterion(4, "ellipsoid sharpness and exponent"):
        fam = families.ellipsoid_family(range(2, 65), resolution=1024,
                                        identity_tol=1e-6)
        for row in fam.rows:
            assert abs(row.relative_deficit - row.extra["ball_deficit_whole"]) \
                <= 1e-6
        assert abs(fam.fit.slope - 0.5) <= 0.1


def test_criterion_5_gromov_chain():
    with criterion(5, "transport inequality chain"):
        q = cones.quadrant()
        K, K0 = _recentred(q)
        cases = {
            "sector": regions.sector_region(q),
            "half_ball": half_ball_region_for(math.pi / 2)[1],
            "random_polytope": families.random_region(q, regions._rng(77),
                                                      kind="polytope"),
        }
        for name, E in cases.items():
            cone = E.cone
            Kc, K0c = _recentred(cone)
            plan = transport.solve_transport(E, K0c, 2000, seed=42)
            rep = transport.gromov_chain_report(E, cone, plan)
            assert rep.monotone_within(3 * rep.sampling_error), name
            if name == "sector":
                for val in rep.chain():
                    assert abs(val - math.pi / 2) <= 0.03 * (math.pi / 2)


def test_criterion_6_trace_bound_on_theta_family():
    with criterion(6, "boundary trace bound"):
        for theta in THETAS:
            cone, E = half_ball_region_for(theta)
            K, K0 = _recentred(cone)
            plan = transport.solve_transport(E, K0, 2000, seed=42)
            ti = transport.trace_integral(E, cone, plan, np.zeros(2))
            assert ti.transport_trace_integral <= \
                ti.transport_trace_bound + 3 * ti.sampling_error, theta


def test_criterion_7_shift_difference_brute_force():
    with criterion(7, "translation-difference lower bound"):
        sq = regions.unit_square_region(cones.full_space(2))
        for t in [0.1 * i for i in range(1, 11)]:
            f = regions.symmetric_difference_volume(sq, sq.translated([t, 0.0]))
            assert f == pytest.approx(2 * t, abs=1e-12)
        c, C, table = families.shift_difference_lower_bound(sq, 64, 64)
        assert not table["violations"]
        assert c > 0 and C > 0
        assert 1.9 <= C <= 2.0 + 1e-9


def test_criterion_8_wedge_identities():
    with criterion(8, "trimmed-wedge identities"):
        ups = [np.array([0.0, t]) for t in (0.02, 0.05, 0.09, 0.14, 0.2)]
        downs = [np.array([0.0, -t]) for t in (0.02, 0.05, 0.09, 0.14, 0.2)]
        w = cones.wedge2d()
        assert families.wedge_identity_check(
            w, ups, samples=100_000, seed=5)["max_witnesses"] == 0
        assert families.wedge_identity_check(
            w, downs, samples=100_000, seed=6)["max_witnesses"] == 0
        circ = cones.circular_cone(math.pi / 4)
        ups3 = [np.array([0.01 * t, 0.005 * t, 0.04 * t]) for t in range(1, 6)]
        downs3 = [np.array([0.01 * t, 0.0, -0.04 * t]) for t in range(1, 6)]
        assert families.wedge_identity_check(
            circ, ups3, samples=100_000, seed=7)["max_witnesses"] == 0
        assert families.wedge_identity_check(
            circ, downs3, samples=100_000, seed=8)["max_witnesses"] == 0


def test_criterion_9_cli_determinism(tmp_path):
    with criterion(9, "CLI byte-identical reruns"):
        cone_path = tmp_path / "cone.json"
        cone_path.write_text(json.dumps(
            {"kind": "polyhedral", "dim": 2,
             "normals": [[1.0, 0.0], [0.0, 1.0]]}))
        region_path = tmp_path / "region.json"
        region_path.write_text(json.dumps(
            {"kind": "half_ball", "center": [10.0, 0.0], "radius": 1.0,
             "inward_normal": [0.0, 1.0]}))
        hp_cone = tmp_path / "hp.json"
        hp_cone.write_text(json.dumps(
            {"kind": "polyhedral", "dim": 2, "normals": [[0.0, 1.0]]}))
        runs = {
            "deficit": ["deficit", "--cone", str(hp_cone), "--region",
                        str(region_path), "--resolution", "512"],
            "transport": ["transport", "--cone", str(hp_cone), "--region",
                          str(region_path), "--count", "300"],
            "sharpness-theta": ["sharpness-theta", "--thetas", "1.5,2.5",
                                "--resolution", "512"],
            "sharpness-ellipsoid": ["sharpness-ellipsoid", "--hs",
                                    "2,3,4,5,6", "--resolution", "512"],
            "constant": ["constant", "--cone", str(cone_path), "--trials", "5",
                         "--resolution", "512"],
            "lemmas": ["lemmas"],
            "wedge": ["wedge", "--cone", str(cone_path), "--ys",
                      "0,0.1;0,-0.1", "--samples", "20000"],
        }
        for name, argv in runs.items():
            outputs = []
            for attempt in ("x", "y"):
                out = tmp_path / f"{name}_{attempt}"
                rc = cli.main(argv + ["--out-dir", str(out)])
                assert rc == 0, name
                csvs = sorted(out.glob("*.csv"))
                assert csvs, name
                outputs.append(b"".join(p.read_bytes() for p in csvs))
            assert outputs[0] == outputs[1], name
