import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavris.errors import DegenerateFootprint, PointNotOnEllipse, ZeroIlluminated
from uavris.geometry import (CartesianPoint, ConeAntenna, FootprintEllipse, IntersectionCase,
                             RisPanel, SphericalPosition, aiming_point, canonical_ellipse,
                             compute_footprint, ellipse_rect_intersections,
                             elliptic_sector_area, footprint_radii, g_balance,
                             illuminated_elements, solve_phi_prime, spillover_fraction,
                             triangle_area)

# frozen outputs of tests/oracles.py
PHI_PRIME_R10_PHI60 = 1.0569793011971926
RAY_AIM_X_R10_PHI60 = 0.11231918015407905
RAY_ALPHA_R10_PHI60 = 1.511654761922765
SECTOR_2_1 = 0.8000000000000191
GRID_COUNT_C4 = 724

XI = ConeAntenna.from_degrees(15.0)
PANEL = RisPanel(1.0, 0.5, 800)

angles = st.floats(0.05, math.pi - 0.05)
distances = st.floats(1.0, 100.0)


def test_position_validation():
    with pytest.raises(ValueError, match="open interval"):
        SphericalPosition(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        SphericalPosition(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ConeAntenna.from_degrees(20.0)


def test_phi_prime_matches_independent_bisection():
    pos = SphericalPosition(10.0, math.pi / 2, math.pi / 3)
    assert solve_phi_prime(pos, XI) == pytest.approx(PHI_PRIME_R10_PHI60, abs=1e-12)


def test_broadside_aims_at_normal():
    assert solve_phi_prime(SphericalPosition(7.0, 1.0, math.pi / 2), XI) == math.pi / 2


def test_footprint_matches_ray_traced_cone():
    pos = SphericalPosition(10.0, math.pi / 2, math.pi / 3)
    alpha, _ = footprint_radii(pos, XI)
    assert alpha == pytest.approx(RAY_ALPHA_R10_PHI60, rel=1e-6)
    assert aiming_point(pos, XI).x == pytest.approx(RAY_AIM_X_R10_PHI60, rel=1e-5)


def test_normal_incidence_is_circle():
    e = compute_footprint(SphericalPosition(10.0, math.pi / 2, math.pi / 2), XI)
    assert e.semi_major == pytest.approx(e.semi_minor, rel=1e-12)
    assert e.semi_minor == pytest.approx(10.0 * math.tan(XI.xi / 2), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(distances, angles, angles)
def test_g_vanishes_at_phi_prime(r, theta, phi):
    pos = SphericalPosition(r, theta, phi)
    pp = solve_phi_prime(pos, XI)
    h = r * math.sin(phi) * math.sin(theta)
    folded = min(phi, math.pi - phi)
    root = min(pp, math.pi - pp)
    g = g_balance(root, r, theta, folded, XI.xi)
    assert abs(g) <= 1e-9 * max(1.0, h)


@settings(max_examples=200, deadline=None)
@given(distances, angles, angles)
def test_mirror_symmetry(r, theta, phi):
    p = SphericalPosition(r, theta, phi)
    a, b = compute_footprint(p, XI), compute_footprint(p.mirrored(), XI)
    # pi - (pi - phi) is phi only up to rounding
    assert a.semi_major == pytest.approx(b.semi_major, rel=1e-12)
    assert a.semi_minor == pytest.approx(b.semi_minor, rel=1e-12)
    assert math.remainder(a.rotation + b.rotation, math.pi) == pytest.approx(0.0, abs=1e-12)
    sa, sb = spillover_fraction(a, PANEL), spillover_fraction(b, PANEL)
    assert sa.case_tag is sb.case_tag
    assert sa.fraction == pytest.approx(sb.fraction, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(distances, angles, angles)
def test_footprint_grows_with_distance(r, theta, phi):
    near = compute_footprint(SphericalPosition(r, theta, phi), XI).area
    far = compute_footprint(SphericalPosition(1.5 * r, theta, phi), XI).area
    assert far > near


def test_sector_area_matches_quadrature():
    e = FootprintEllipse(2.0, 1.0, 0.0)
    q = CartesianPoint(2.0 * math.cos(0.3), math.sin(0.3))
    v = CartesianPoint(2.0 * math.cos(1.1), math.sin(1.1))
    assert elliptic_sector_area(e, q, v) == pytest.approx(SECTOR_2_1, rel=1e-9)
    whole = elliptic_sector_area(e, q, q)
    assert whole == pytest.approx(e.area, rel=1e-12)


def test_sector_rejects_points_off_the_ellipse():
    with pytest.raises(PointNotOnEllipse):
        elliptic_sector_area(FootprintEllipse(2.0, 1.0), CartesianPoint(0.1, 0.1),
                             CartesianPoint(2.0, 0.0))


def test_triangle_area():
    assert triangle_area(CartesianPoint(1.0, 0.0), CartesianPoint(0.0, 2.0)) == 1.0


def test_degenerate_footprint():
    with pytest.raises(DegenerateFootprint):
        FootprintEllipse(1.0, 0.0)


@pytest.mark.parametrize("ellipse, case", [
    (FootprintEllipse(0.4, 0.3, 0.2), IntersectionCase.C1),
    (FootprintEllipse(0.6, 0.6, 0.0), IntersectionCase.C2),
    (FootprintEllipse(1.2, 0.6, 0.0), IntersectionCase.C3),
    (FootprintEllipse(1.4, 0.7, math.radians(30)), IntersectionCase.C4),
    (FootprintEllipse(3.0, 2.0, 0.4), IntersectionCase.C5),
])
def test_case_taxonomy(ellipse, case):
    tag, pts = ellipse_rect_intersections(ellipse, PANEL)
    assert tag is case
    e = canonical_ellipse(ellipse)
    for p in pts:
        assert e.level(p.x, p.z) == pytest.approx(1.0, abs=1e-12)


def test_circle_cutting_top_and_bottom():
    tag, pts = ellipse_rect_intersections(FootprintEllipse(0.6, 0.6), PANEL)
    assert tag is IntersectionCase.C2
    x = math.sqrt(0.36 - 0.25)
    assert [p.x for p in pts] == pytest.approx([-x, x], rel=1e-12)
    cap = 0.36 * math.acos(0.5 / 0.6) - 0.5 * x
    assert spillover_fraction(FootprintEllipse(0.6, 0.6), PANEL).fraction == pytest.approx(
        2 * cap / (math.pi * 0.36), rel=1e-12)


def test_panel_inside_footprint():
    e = FootprintEllipse(20 / math.pi, 1.0)
    tag, j = spillover_fraction(e, PANEL)
    assert tag is IntersectionCase.C5
    assert j == pytest.approx(0.9, rel=1e-12)
    assert illuminated_elements(e, PANEL).illuminated_count == PANEL.num_elements


def test_corner_case_against_element_grid():
    e = FootprintEllipse(1.4, 0.7, math.radians(30))
    res = illuminated_elements(e, PANEL)
    assert res.case_tag is IntersectionCase.C4
    # element-centre counting differs from the area model by lattice effects only
    assert abs(res.illuminated_count - GRID_COUNT_C4) <= 0.01 * GRID_COUNT_C4


def test_zero_illuminated_carries_result():
    with pytest.raises(ZeroIlluminated) as info:
        illuminated_elements(FootprintEllipse(0.01, 0.01), PANEL)
    assert info.value.result.case_tag is IntersectionCase.C1


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 6.0), st.floats(0.1, 1.0), st.floats(-math.pi, math.pi))
def test_spillover_bounds_and_area_balance(major, ratio, rot):
    e = FootprintEllipse(major, major * ratio, rot)
    tag, j = spillover_fraction(e, PANEL)
    assert 0.0 <= j <= 1.0
    inside = e.area * (1.0 - j)
    assert inside <= min(e.area, PANEL.area) * (1 + 1e-9)
    if tag is IntersectionCase.C1:
        assert j == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 6.0), st.floats(0.1, 1.0), st.floats(-math.pi, math.pi))
def test_orientation_folding_is_an_overlap_symmetry(major, ratio, rot):
    e = FootprintEllipse(major, major * ratio, rot)
    flipped = FootprintEllipse(major, major * ratio, -rot)
    assert spillover_fraction(e, PANEL).fraction == pytest.approx(
        spillover_fraction(flipped, PANEL).fraction, abs=1e-12)


def test_tip_past_the_corner_cuts_one_side():
    # thin footprint leaving through the right side; the top line is met only beyond x = a
    e = FootprintEllipse(1.3, 0.08, math.atan2(0.4, 1.0))
    tag, pts = ellipse_rect_intersections(e, PANEL)
    assert tag is IntersectionCase.C2
    assert all(p.x == pytest.approx(1.0) and abs(p.z) <= 0.5 for p in pts)
    # polar-grid quadrature of the area outside the panel
    n = 2000
    outside = 0.0
    for i in range(n):
        for k in range(n // 4):
            t = 2 * math.pi * (i + 0.5) / n
            rho = (k + 0.5) / (n // 4)
            xp, zp = 1.3 * rho * math.cos(t), 0.08 * rho * math.sin(t)
            c, s = math.cos(e.rotation), math.sin(e.rotation)
            x, z = xp * c - zp * s, xp * s + zp * c
            if abs(x) > 1.0 or abs(z) > 0.5:
                outside += rho
    outside /= n * (n // 4) / 2
    assert spillover_fraction(e, PANEL).fraction == pytest.approx(outside, abs=2e-3)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 4.0), st.floats(0.2, 1.0), st.floats(0.0, math.pi / 2),
       st.floats(1.0, 1.5))
def test_spillover_grows_with_either_radius(major, ratio, rot, factor):
    minor = major * ratio
    base = spillover_fraction(FootprintEllipse(major, minor, rot), PANEL).fraction
    wider = spillover_fraction(FootprintEllipse(major * factor, minor, rot), PANEL).fraction
    taller = FootprintEllipse(max(major, minor * factor), min(major, minor * factor),
                              rot if minor * factor <= major else rot + math.pi / 2)
    assert wider >= base - 1e-12
    assert spillover_fraction(taller, PANEL).fraction >= base - 1e-12


@pytest.mark.parametrize("ellipse", [
    FootprintEllipse(0.5, 0.5),   # C1/C2 touch on the top side
    FootprintEllipse(1.0, 0.6),   # C2/C3 touch on the right side
])
def test_spillover_continuous_across_case_changes(ellipse):
    lo = spillover_fraction(ellipse.scaled(1 - 1e-7), PANEL)
    hi = spillover_fraction(ellipse.scaled(1 + 1e-7), PANEL)
    assert lo.case_tag is not hi.case_tag
    assert abs(lo.fraction - hi.fraction) <= 1e-6
