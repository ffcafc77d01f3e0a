import math

import numpy as np
import pytest

from rectisub.exprdsl import format_spec, parse_immersion
from rectisub.geometry import snapshot
from rectisub.immersion import (
    BuiltinError,
    ConeOver,
    Helix,
    RegularityError,
    SpecImmersion,
    SphericalFactor,
    UnitSphere,
    builtin,
    circle_base,
    construct_rectifying,
    construct_rectifying_curve,
    ellipse_base,
    from_spec,
    great_circle_curve,
    parse_builtin,
    sample_points,
    small_circle_base,
    small_circle_curve,
    tilted_circle_base,
)
from rectisub.rectify import make_grid, position_split

from oracles import fd_frame, _rect_circle


def test_sphere_equator_point():
    np.testing.assert_allclose(UnitSphere(2, 3).position((math.pi / 2, 0.0)), [1.0, 0.0, 0.0], atol=1e-15)


def test_cone_over_tilted_circle():
    cone = ConeOver(tilted_circle_base())
    s, u = 1.3, 0.4
    want = s * np.array([math.cos(u), math.sin(u), 1.0]) / math.sqrt(2)
    np.testing.assert_allclose(cone.position((s, u)), want, atol=1e-15)
    assert position_split(snapshot(cone, (s, u))).nu < 1e-12


def test_helix_speed():
    h = Helix(3, 4)
    for p in sample_points(h, 7):
        assert np.linalg.norm(h.jacobian(p)[0]) == pytest.approx(5.0, rel=1e-15)


@pytest.mark.parametrize(
    "text",
    ["helix:a=-1", "torus:R=1,r=2", "cylinder:r=0", "unit_sphere:n=2,m=2", "nosuch", "rectifying:c=0", "rectifying:base=cube"],
)
def test_invalid_builtin_parameters(text):
    with pytest.raises(BuiltinError):
        parse_builtin(text)


def test_c_must_be_positive_message():
    with pytest.raises(BuiltinError, match="c must be positive"):
        builtin("rectifying", c=-1.0)


def test_t_range_must_avoid_endpoints():
    with pytest.raises(ValueError):
        construct_rectifying(1.0, circle_base(), (0.0, 1.0))
    with pytest.raises(ValueError):
        construct_rectifying(1.0, circle_base(), (0.2, math.pi / 2))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        construct_rectifying(1.0, circle_base(2), ambient_dim=4)


def test_spherical_factor_rejects_non_unit():
    spec = parse_immersion("dim 1 -> 2\nx = [2*cos(s), 2*sin(s)]\ns in [0, 1]")
    with pytest.raises(ValueError):
        SphericalFactor(from_spec(spec))


def test_rank_deficient_spec():
    imm = from_spec(parse_immersion("dim 2 -> 2\nx = [s, s]\ns in [0, 1]\nu2 in [0, 1]"))
    with pytest.raises(RegularityError):
        snapshot(imm, (0.5, 0.5))


def test_helix_file_matches_builtin():
    spec = parse_immersion("dim 1 -> 3\nx = [3*cos(s), 3*sin(s), 4*s]\ns in [0, 2*pi]")
    imm, ref = from_spec(spec), Helix(3, 4)
    rng = np.random.default_rng(3)
    for s in rng.uniform(0, 2 * math.pi, 50):
        np.testing.assert_allclose(imm.position((s,)), ref.position((s,)), atol=1e-12)


def test_sphere_spec_is_spherical():
    spec = parse_immersion(
        "dim 2 -> 3\nx = [sin(s)*cos(u2), sin(s)*sin(u2), cos(s)]\ns in [0.3, 2.8]\nu2 in [0, 6]"
    )
    SphericalFactor(from_spec(spec))


# the constructor ----------------------------------------------------------


def test_norm_squared_at_s_equal_one():
    x = construct_rectifying(1.0, circle_base()).position((1.0, 0.7))
    assert x @ x == pytest.approx(2.0, abs=1e-14)


def test_induced_metric_is_warped_product():
    imm = construct_rectifying(1.0, circle_base())
    for s, u in make_grid(imm, 5).points():
        g = snapshot(imm, (s, u)).metric
        np.testing.assert_allclose(g, [[1.0, 0.0], [0.0, s * s]], atol=1e-12)


def test_constructed_matches_closed_form_oracle():
    imm = construct_rectifying(1.0, circle_base())
    for p in [(0.5, 0.3), (1.2, 2.0), (2.0, 5.0)]:
        x, x1, x2 = fd_frame(_rect_circle, p)
        s = snapshot(imm, p)
        np.testing.assert_allclose(s.x, x, atol=1e-12)
        np.testing.assert_allclose(s.x1, x1, atol=1e-7)
        np.testing.assert_allclose(s.x2, x2, atol=1e-6)


@pytest.mark.parametrize(
    "base",
    [circle_base(3), small_circle_base(0.6, 3), ellipse_base(1.0, 0.5, 1.0, 3), ellipse_base(2.0, 0.7, 1.3, 4)],
    ids=["circle", "small_circle", "ellipse", "ellipse4"],
)
@pytest.mark.parametrize("c", [0.3, 1.0, 2.5])
def test_y_factor_metric(base, c):
    imm = construct_rectifying(c, base)
    y = imm.y_factor()
    for p in make_grid(imm, 4).points():
        s = p[0]
        yv = y.position(p)
        assert abs(yv @ yv - 1.0) < 1e-10
        gY = snapshot(y, p).metric
        gF = snapshot(base, p[1:]).metric
        want = np.zeros((2, 2))
        want[0, 0] = c * c / (s * s + c * c) ** 2
        want[1:, 1:] = s * s / (s * s + c * c) * gF
        np.testing.assert_allclose(gY, want, atol=1e-8)
        x = imm.position(p)
        assert x @ x - s * s == pytest.approx(c * c, abs=1e-8)


def test_round_trip_through_dsl_text():
    imm = construct_rectifying(1.0, circle_base())
    text = format_spec(imm.to_spec())
    assert "sqrt(s^2 + 1)" in text
    again = SpecImmersion(parse_immersion(text))
    for p in make_grid(imm, 3).points():
        np.testing.assert_allclose(again.position(p), imm.position(p), atol=1e-14)
        np.testing.assert_allclose(again.jacobian(p), imm.jacobian(p), atol=1e-13)


def test_great_circle_curve_is_a_line():
    curve = construct_rectifying_curve(1.0, great_circle_curve())
    for (s,) in make_grid(curve, 7).points():
        # first component sqrt(s^2+c^2) cos(atan(s/c)) = c
        assert curve.position((s,))[0] == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.norm(curve.evaluate((s,), 2)[0].coeffs[2]) < 1e-12


def test_small_circle_curve_has_constant_normal_length():
    curve = construct_rectifying_curve(1.0, small_circle_curve(math.pi / 4))
    nus = [position_split(snapshot(curve, p)).nu for p in make_grid(curve).points()]
    assert max(nus) - min(nus) < 1e-9
    assert nus[0] == pytest.approx(1.0, abs=1e-9)


def test_curve_must_be_unit_speed():
    slow = SphericalFactor(from_spec(parse_immersion("dim 1 -> 3\nx = [cos(2*s), sin(2*s), 0]\ns in [0, 3]")))
    with pytest.raises(ValueError, match="unit-speed"):
        construct_rectifying_curve(1.0, slow)


def test_sample_points_shrink_and_order():
    pts = sample_points(UnitSphere(2, 3), 3)
    assert len(pts) == 9
    assert pts[0][0] == pts[1][0] == pts[2][0]  # first variable slowest
