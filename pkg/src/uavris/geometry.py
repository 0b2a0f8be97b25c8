"""Radiation footprint of a conical beam on the RIS plane and its overlap with the panel.

Coordinates: the RIS lies in the plane ``y = 0`` centred at the origin, ``z`` is
vertical. A UAV at spherical position ``(r, theta, phi)`` sits at
``(r sin(theta) cos(phi), r sin(theta) sin(phi), r cos(theta))``. Planar points
on the RIS are written ``(x, z)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import DegenerateFootprint, NoRootInBracket, PointNotOnEllipse, ZeroIlluminated

HALF_PI = 0.5 * math.pi
MAX_BEAMWIDTH = math.radians(15.0)
# keeps tan(x - xi/2) away from zero at the lower end of the root bracket
BRACKET_NUDGE = 1e-9
ON_SIDE_TOL = 1e-9
ON_ELLIPSE_TOL = 1e-9


@dataclass(frozen=True)
class SphericalPosition:
    """UAV location relative to the RIS centre (angles in radians)."""

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r must be a positive finite distance, got {self.r}")
        if not 0.0 < self.theta < math.pi:
            raise ValueError(f"theta must lie in the open interval (0, pi), got {self.theta}")
        if not 0.0 < self.phi < math.pi:
            raise ValueError(f"phi must lie in the open interval (0, pi), got {self.phi}")

    def cartesian(self) -> tuple[float, float, float]:
        st = math.sin(self.theta)
        return (self.r * st * math.cos(self.phi), self.r * st * math.sin(self.phi),
                self.r * math.cos(self.theta))

    def mirrored(self) -> SphericalPosition:
        """Reflection through the plane ``x = 0``."""
        return SphericalPosition(self.r, self.theta, math.pi - self.phi)


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.z)):
            raise ValueError(f"non-finite point ({self.x}, {self.z})")


@dataclass(frozen=True)
class RisPanel:
    """Rectangular RIS of size ``2a x 2b`` tiled by ``num_elements`` elements."""

    half_width_a: float
    half_height_b: float
    num_elements: int

    def __post_init__(self):
        if not (self.half_width_a > 0 and self.half_height_b > 0):
            raise ValueError("panel half-dimensions must be positive")
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError(f"num_elements must be a positive integer, got {self.num_elements}")

    @property
    def area(self) -> float:
        return 4.0 * self.half_width_a * self.half_height_b

    @property
    def element_area(self) -> float:
        # zero inter-element spacing
        return self.area / self.num_elements


@dataclass(frozen=True)
class ConeAntenna:
    """Ideal conical beam with full spreading angle ``xi`` (radians)."""

    xi: float

    def __post_init__(self):
        if not 0.0 < self.xi <= MAX_BEAMWIDTH * (1 + 1e-12):
            raise ValueError(f"beamwidth must lie in (0, 15 deg], got {math.degrees(self.xi)} deg")

    @classmethod
    def from_degrees(cls, xi_deg: float) -> ConeAntenna:
        return cls(math.radians(xi_deg))

    @property
    def degrees(self) -> float:
        return math.degrees(self.xi)


@dataclass(frozen=True)
class FootprintEllipse:
    """Centred ellipse; ``rotation`` is the angle of the major axis from the x axis."""

    semi_major: float
    semi_minor: float
    rotation: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.semi_major) and math.isfinite(self.semi_minor)):
            raise DegenerateFootprint("non-finite footprint radii")
        if not self.semi_minor > 0:
            raise DegenerateFootprint(f"semi-minor axis must be positive, got {self.semi_minor}")
        if self.semi_major < self.semi_minor:
            raise DegenerateFootprint("semi_major must not be smaller than semi_minor")

    @property
    def area(self) -> float:
        return math.pi * self.semi_major * self.semi_minor

    def to_principal(self, x, z):
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return x * c + z * s, -x * s + z * c

    def level(self, x, z):
        """Implicit form value; 1 on the boundary, < 1 inside."""
        xp, zp = self.to_principal(x, z)
        return (xp / self.semi_major) ** 2 + (zp / self.semi_minor) ** 2

    def contains(self, x, z):
        return self.level(x, z) <= 1.0

    def parametric_angle(self, p: CartesianPoint) -> float:
        xp, zp = self.to_principal(p.x, p.z)
        return math.atan2(zp / self.semi_minor, xp / self.semi_major)

    def quadratic_coefficients(self) -> tuple[float, float, float]:
        """``(A, B, C)`` such that the boundary is ``A x^2 + B x z + C z^2 = 1``."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        ia, ib = 1.0 / self.semi_major**2, 1.0 / self.semi_minor**2
        return c * c * ia + s * s * ib, 2.0 * c * s * (ia - ib), s * s * ia + c * c * ib

    def scaled(self, factor: float) -> FootprintEllipse:
        return FootprintEllipse(self.semi_major * factor, self.semi_minor * factor, self.rotation)


class IntersectionCase(str, Enum):
    C1 = "C1"  # footprint inside the RIS
    C2 = "C2"  # one RIS side cut
    C3 = "C3"  # both sides cut, all points on the sides
    C4 = "C4"  # corner inside the footprint
    C5 = "C5"  # RIS inside the footprint

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class IlluminationResult:
    case_tag: IntersectionCase
    spillover_fraction: float
    footprint_area: float
    illuminated_count: int


class Spillover(NamedTuple):
    case_tag: IntersectionCase
    fraction: float


# ---------------------------------------------------------------------------
# footprint construction


def _mirror_phi(phi: float) -> tuple[float, int]:
    """Fold azimuths beyond pi/2 onto the x >= 0 half (sign says which side)."""
    if phi > HALF_PI:
        return math.pi - phi, -1
    return phi, 1


def g_balance(x: float, r: float, theta: float, phi: float, xi: float) -> float:
    """Difference between the two footprint half-lengths when aiming at angle ``x``.

    Zero when the footprint centre coincides with the RIS centre.
    """
    h = r * math.sin(phi) * math.sin(theta)
    cd = h / math.tan(phi)
    return abs(cd - h / math.tan(x + 0.5 * xi)) - abs(h / math.tan(x - 0.5 * xi) - cd)


def _bisect_lower_half(r, theta, phi, xi, max_iter=200):
    lo = max(phi, 0.5 * xi + BRACKET_NUDGE)
    hi = HALF_PI
    glo = g_balance(lo, r, theta, phi, xi)
    ghi = g_balance(hi, r, theta, phi, xi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo < 0) == (ghi < 0) or not (math.isfinite(glo) and math.isfinite(ghi)):
        raise NoRootInBracket(
            f"g keeps one sign on [{lo:.12g}, {hi:.12g}] (r={r}, theta={theta}, phi={phi})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g_balance(mid, r, theta, phi, xi)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    return lo if abs(glo) <= abs(ghi) else hi


def solve_phi_prime(pos: SphericalPosition, antenna: ConeAntenna) -> float:
    """Angle at the aiming point that centres the footprint on the RIS.

    Bisection over ``[phi, pi/2]`` (or ``(pi/2, phi]`` by mirror symmetry), run
    down to adjacent floating-point bracket ends.
    """
    if pos.phi == HALF_PI:
        return HALF_PI
    phi, side = _mirror_phi(pos.phi)
    root = _bisect_lower_half(pos.r, pos.theta, phi, antenna.xi)
    return root if side > 0 else math.pi - root


def _radii(pos: SphericalPosition, antenna: ConeAntenna) -> tuple[float, float, float, int]:
    """Raw (alpha, beta, phi') in the folded half-space plus the side sign."""
    phi, side = _mirror_phi(pos.phi)
    folded = SphericalPosition(pos.r, pos.theta, phi)
    phi_p = solve_phi_prime(folded, antenna)
    h = pos.r * math.sin(phi) * math.sin(pos.theta)
    alpha = abs(h / math.tan(phi) - h / math.tan(phi_p + 0.5 * antenna.xi))
    beta = pos.r * math.tan(0.5 * antenna.xi)
    return alpha, beta, phi_p, side


def compute_footprint(pos: SphericalPosition, antenna: ConeAntenna) -> FootprintEllipse:
    """Elliptical footprint centred on the RIS.

    The radius along the elevation-``theta`` direction comes from the
    law-of-cosines construction, the other one is ``r tan(xi/2)``. If the first
    is the shorter one the axes are swapped.
    """
    alpha, beta, _, side = _radii(pos, antenna)
    if not (math.isfinite(alpha) and alpha > 0):
        raise DegenerateFootprint(f"footprint radius {alpha} along the elevation direction")
    if not (math.isfinite(beta) and beta > 0):
        raise DegenerateFootprint(f"footprint radius {beta}")
    # direction (sin(theta), cos(theta)), x-mirrored on the phi > pi/2 side
    rotation = HALF_PI - pos.theta if side > 0 else HALF_PI + pos.theta
    if alpha < beta:
        alpha, beta = beta, alpha
        rotation += HALF_PI
    rotation = math.remainder(rotation, math.pi)
    return FootprintEllipse(alpha, beta, rotation)


def footprint_radii(pos: SphericalPosition, antenna: ConeAntenna) -> tuple[float, float]:
    """Unswapped ``(alpha, beta)``: elevation-direction radius and ``r tan(xi/2)``."""
    alpha, beta, _, _ = _radii(pos, antenna)
    return alpha, beta


def aiming_point(pos: SphericalPosition, antenna: ConeAntenna) -> CartesianPoint:
    """Point ``K`` on the RIS plane the boresight passes through."""
    phi_p = solve_phi_prime(pos, antenna)
    st = math.sin(pos.theta)
    rho = abs(pos.r * st * math.cos(pos.phi) - pos.r * st * math.sin(pos.phi) / math.tan(phi_p))
    sign = 1.0 if pos.phi <= HALF_PI else -1.0
    return CartesianPoint(sign * rho * st, rho * math.cos(pos.theta))


# ---------------------------------------------------------------------------
# intersection with the rectangle


@dataclass(frozen=True)
class _Cut:
    case: IntersectionCase
    ellipse: FootprintEllipse  # canonical orientation, rotation in [0, pi/2]
    top: tuple[CartesianPoint, CartesianPoint] | None  # on z = b, ordered by x
    right: tuple[CartesianPoint, CartesianPoint] | None  # on x = a, ordered by z


def canonical_ellipse(ellipse: FootprintEllipse) -> FootprintEllipse:
    """Same overlap with any centred rectangle, major axis in the first quadrant."""
    psi = ellipse.rotation % math.pi
    if psi > HALF_PI:
        psi = math.pi - psi
    return FootprintEllipse(ellipse.semi_major, ellipse.semi_minor, psi)


def _quadratic_roots(a, b, c):
    disc = b * b - 4.0 * a * c
    if not disc > 0.0:
        # tangency spills no area
        return None
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    t1, t2 = q / a, c / q
    return (t1, t2) if t1 <= t2 else (t2, t1)


def _cut(ellipse: FootprintEllipse, panel: RisPanel) -> _Cut:
    e = canonical_ellipse(ellipse)
    A, B, C = e.quadratic_coefficients()
    a, b = panel.half_width_a, panel.half_height_b
    xs = _quadratic_roots(A, B * b, C * b * b - 1.0)
    zs = _quadratic_roots(C, B * a, A * a * a - 1.0)
    top = None if xs is None else (CartesianPoint(xs[0], b), CartesianPoint(xs[1], b))
    right = None if zs is None else (CartesianPoint(a, zs[0]), CartesianPoint(a, zs[1]))

    if top is None and right is None:
        case = IntersectionCase.C1
    elif top is None or right is None:
        case = IntersectionCase.C2
    else:
        top_on = [abs(p.x) <= a + ON_SIDE_TOL for p in top]
        right_on = [abs(p.z) <= b + ON_SIDE_TOL for p in right]
        if all(top_on) and all(right_on):
            case = IntersectionCase.C3
        elif all(top_on) and not any(right_on):
            # the right line is only crossed beyond the corner: one RIS side cut
            case, right = IntersectionCase.C2, None
        elif all(right_on) and not any(top_on):
            case, top = IntersectionCase.C2, None
        elif not any(top_on) and not any(right_on):
            case = IntersectionCase.C5
        elif top_on[0] and not top_on[1] and right_on[0] and not right_on[1]:
            case = IntersectionCase.C4
        elif not e.contains(a, b):
            # only reachable through rounding at a corner; decide by corner membership
            case = IntersectionCase.C3 if any(top_on) and any(right_on) else IntersectionCase.C2
            if case is IntersectionCase.C2:
                top, right = (top, None) if any(top_on) else (None, right)
        elif e.contains(-a, b):
            case = IntersectionCase.C5
        else:
            case = IntersectionCase.C4
    return _Cut(case, e, top, right)


def ellipse_rect_intersections(ellipse: FootprintEllipse, panel: RisPanel):
    """Classify the footprint/panel intersection.

    Returns ``(case_tag, points)``. ``points`` holds the crossings with the
    upper side (ordered by x) followed by those with the right side (ordered by
    z), expressed in the canonical orientation of :func:`canonical_ellipse`.
    Only the first quadrant is analysed; both shapes are centrally symmetric.
    """
    cut = _cut(ellipse, panel)
    pts = list(cut.top or ()) + list(cut.right or ())
    return cut.case, pts


def elliptic_sector_area(ellipse: FootprintEllipse, q: CartesianPoint, v: CartesianPoint) -> float:
    """Area swept from the centre going counter-clockwise from ``q`` to ``v``."""
    scale = max(ellipse.semi_major, 1.0)
    for p in (q, v):
        if abs(math.sqrt(ellipse.level(p.x, p.z)) - 1.0) * scale > ON_ELLIPSE_TOL:
            raise PointNotOnEllipse(f"({p.x}, {p.z}) is not on the footprint boundary")
    t1 = ellipse.parametric_angle(q)
    t2 = ellipse.parametric_angle(v)
    while t2 <= t1:
        t2 += 2.0 * math.pi
    return 0.5 * (t2 - t1) * ellipse.semi_major * ellipse.semi_minor


def triangle_area(q: CartesianPoint, v: CartesianPoint) -> float:
    """Area of the triangle with vertices at the origin, ``q`` and ``v``."""
    return 0.5 * abs(q.x * v.z - v.x * q.z)


def _cap(e, q, v):
    return elliptic_sector_area(e, q, v) - triangle_area(q, v)


def spillover_fraction(ellipse: FootprintEllipse, panel: RisPanel) -> Spillover:
    """Fraction of the footprint area falling outside the panel."""
    cut = _cut(ellipse, panel)
    e = cut.ellipse
    ef = e.area
    if cut.case is IntersectionCase.C1:
        return Spillover(cut.case, 0.0)
    if cut.case is IntersectionCase.C5:
        return Spillover(cut.case, 1.0 - panel.area / ef)
    outside = 0.0
    if cut.case in (IntersectionCase.C2, IntersectionCase.C3):
        if cut.top is not None:
            left, right = cut.top
            outside += _cap(e, right, left)
        if cut.right is not None:
            low, high = cut.right
            outside += _cap(e, low, high)
    else:
        corner = CartesianPoint(panel.half_width_a, panel.half_height_b)
        z_on, x_on = cut.right[0], cut.top[0]
        outside = (elliptic_sector_area(e, z_on, x_on)
                   - triangle_area(corner, x_on) - triangle_area(z_on, corner))
    frac = 2.0 * outside / ef
    return Spillover(cut.case, min(1.0, max(0.0, frac)))


def illuminated_elements(ellipse: FootprintEllipse, panel: RisPanel) -> IlluminationResult:
    """Spillover plus the number of elements inside the footprint.

    Raises :class:`ZeroIlluminated` (carrying the result) when no element is lit.
    """
    case, frac = spillover_fraction(ellipse, panel)
    ef = ellipse.area
    if case is IntersectionCase.C5:
        count = panel.num_elements
    else:
        count = math.floor(ef * (1.0 - frac) / panel.area * panel.num_elements)
        count = min(count, panel.num_elements)
    result = IlluminationResult(case, frac, ef, int(count))
    if count == 0:
        raise ZeroIlluminated("footprint illuminates no RIS element", result)
    return result


def illumination(pos: SphericalPosition, antenna: ConeAntenna, panel: RisPanel) -> IlluminationResult:
    return illuminated_elements(compute_footprint(pos, antenna), panel)

