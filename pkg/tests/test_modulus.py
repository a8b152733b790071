import math

import numpy as np
import pytest

from findist import blocks
from findist import modulus as Mo
from findist.modulus import Circle, Disk, DiskComplement, PointSet, Segment


def test_ring_modulus():
    v = Mo.discrete_modulus(Mo.ring_problem(256)).value
    assert v == pytest.approx(2 * math.pi, rel=0.05)


def test_ring_monotone_under_refinement():
    vals = [Mo.discrete_modulus(Mo.ring_problem(n)).value for n in (64, 128, 256)]
    assert vals[0] < vals[1] < vals[2] < 2 * math.pi * 1.05


@pytest.mark.parametrize("n", [16, 64, 256])
def test_square_modulus(n):
    v = Mo.discrete_modulus(Mo.square_problem(n)).value
    assert v == pytest.approx(n / (n - 1), rel=1e-6)


def test_bounds_bracket_value():
    res = Mo.discrete_modulus(Mo.ring_problem(96))
    assert res.lower <= res.value * (1 + 1e-9) and res.value <= res.upper * (1 + 1e-9)
    assert res.duality_gap <= 1e-3 * res.value
    h = Mo.ring_problem(96).h
    assert float(np.sum(res.rho**2) * h * h) == pytest.approx(res.value, rel=1e-6)


def test_no_path_gives_zero():
    pb = Mo.problem_from_primitives((0.0, 0.0, 1.0, 0.5), 32, [Disk(0.1 + 0.25j, 0.05)], [Disk(0.9 + 0.25j, 0.05)])
    wall = np.ones(pb.shape)
    wall[:, 15:17] = 0.0  # zero-conductance wall: every E-F path crosses it for free
    pb.weight = wall
    res = Mo.discrete_modulus(pb)
    assert res.value == 0.0 and res.upper == 0.0


def test_weight_must_be_finite():
    pb = Mo.ring_problem(16)
    with pytest.raises(ValueError):
        Mo.ModulusProblem(pb.domain, 16, pb.source, pb.target, np.full(pb.shape, np.inf))


def test_modulus_monotone_in_target():
    dom = (-1.0, -1.0, 1.0, 1.0)
    small = Mo.problem_from_primitives(dom, 96, [Disk(0j, 0.1)], [Segment(0.5 + 0j, 0.5 + 0.3j)])
    big = Mo.problem_from_primitives(dom, 96, [Disk(0j, 0.1)], [Segment(0.5 - 0.3j, 0.5 + 0.3j)])
    assert Mo.discrete_modulus(small).value <= Mo.discrete_modulus(big).value


def test_conformal_invariance_under_similarity():
    a = Mo.discrete_modulus(Mo.ring_problem(192)).value
    b = Mo.discrete_modulus(Mo.ring_problem(192, R=0.9 * 0.37, center=0.3 - 0.2j, half_width=0.37)).value
    assert b == pytest.approx(a, rel=0.01)


def test_constant_weight_scales_modulus():
    pb = Mo.ring_problem(64)
    a = Mo.discrete_modulus(pb).value
    pb.weight = np.full(pb.shape, 3.0)
    assert Mo.discrete_modulus(pb).value == pytest.approx(3 * a, rel=1e-9)


def test_lazy_agrees_with_potential():
    pb = Mo.ring_problem(32)
    a = Mo.discrete_modulus(pb).value
    b = Mo.discrete_modulus(pb, method="lazy", tol=1e-4)
    assert b.value == pytest.approx(a, rel=5e-3)
    assert b.n_paths > 0


def test_eight_connectivity_ring():
    v = Mo.discrete_modulus(Mo.ring_problem(128, connectivity=8)).value
    assert v == pytest.approx(2 * math.pi, rel=0.05)


def test_bad_problems():
    with pytest.raises(ValueError):
        Mo.ring_problem(64, connectivity=6)
    with pytest.raises(ValueError):
        Mo.discrete_modulus(Mo.ring_problem(16), method="nope")
    dom = (0.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        Mo.problem_from_primitives(dom, 16, [PointSet((5 + 5j,))], [Disk(0.5 + 0.5j, 0.1)])


def test_distances():
    assert Mo.primitive_distance(Segment(0j, 1 + 0j), Segment(2j, 1 + 2j)) == pytest.approx(2)
    assert Mo.primitive_distance(Segment(-1 + 0j, 1 + 0j), Segment(-1j, 1j)) == 0
    assert Mo.primitive_distance(Circle(0j, 1), PointSet((3 + 0j,))) == pytest.approx(2)
    assert Mo.set_diameter([Segment(0j, 1 + 0j), Circle(0j, 2)]) == pytest.approx(4)


def test_segment_circle_geometry():
    fam = Mo.build_segment_circle_family(0j, 0.1)
    assert Mo.set_distance(fam.E, fam.F) == pytest.approx(0.1, rel=1e-12)
    assert Mo.set_diameter(fam.E) == pytest.approx((math.e - 1) * 0.1, rel=1e-12)
    assert Mo.vaisala_lower_bound(fam.E, fam.F, 2.0) == pytest.approx(2 * math.log(math.e), rel=1e-12)
    gap = Mo.rasterization_gap(fam.problem(512))
    assert gap >= 1 and gap == pytest.approx(0.1 / (2 * 1.15 * math.e**2 * 0.1 / 512), abs=2)


def test_segment_circle_rotated_lambda_is_rotation_invariant():
    a = Mo.build_segment_circle_family(0j, 0.1)
    b = Mo.build_segment_circle_family(1 + 1j, 0.1j)
    assert Mo.vaisala_lower_bound(a.E, a.F) == pytest.approx(Mo.vaisala_lower_bound(b.E, b.F), rel=1e-12)


def test_vaisala_touching_sets():
    assert Mo.vaisala_lower_bound([Segment(0j, 1 + 0j)], [Segment(1 + 0j, 2 + 0j)]) == math.inf


def test_segment_circle_modulus_exceeds_bound():
    fam = Mo.build_segment_circle_family(0j, 0.1)
    v = Mo.discrete_modulus(fam.problem(128)).value
    assert v >= Mo.vaisala_lower_bound(fam.E, fam.F, 1.0)


def test_inequality_identity_and_similarity():
    pb = Mo.ring_problem(96)
    assert Mo.check_modulus_inequality(lambda w: w, pb).ratio == pytest.approx(1.0, rel=1e-8)
    r = Mo.check_modulus_inequality(lambda w: 0.8 * np.exp(0.3j) * w, Mo.ring_problem(128)).ratio
    assert r == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("c2", [0.0, 1.0])
def test_inequality_spiral_block(c2):
    P = blocks.SpiralBlockParams(1.0, c2, 3.0)
    B = blocks.Ball(0j, 0.95)
    chk = Mo.check_modulus_inequality(lambda w: blocks.apply_spiral_block(P, B, w), Mo.ring_problem(128))
    assert chk.ratio <= 1.05


def test_config_and_outputs():
    pb = Mo.problem_from_config({"preset": "ring", "resolution": 48})
    res = Mo.discrete_modulus(pb)
    import json

    d = json.loads(Mo.result_json(res, {"preset": "ring"}))
    assert d["value"] == pytest.approx(res.value) and d["preset"] == "ring"
    assert Mo.rho_svg(res.rho).startswith("<svg")
    pb = Mo.problem_from_config({"domain": [0, 0, 1, 1], "resolution": 32, "weight": 2.0,
                                 "E": [{"type": "halfplane", "x": 0.05}],
                                 "F": [{"type": "halfplane", "x": 0.95, "side": "right"}]})
    assert np.all(pb.weight == 2.0)
    with pytest.raises(ValueError):
        Mo.problem_from_config({"preset": "hexagon"})
