"""Path losses, gains and average SNR of the directional UAV-RIS-GN link and the two baselines.

All quantities are linear; decibels appear only in :func:`db_to_linear` and
:func:`linear_to_db`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (ConeAntenna, RisPanel, SphericalPosition, compute_footprint,
                       solve_phi_prime)
from .stats import NakagamiParams, aggregate_moments


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance model ``c0 * (d_u / d0) ** -n`` for the RIS-GN hop."""

    c0: float
    d0: float = 1.0
    d_u: float = 50.0
    n: float = 2.2

    def __post_init__(self):
        for name in ("c0", "d0", "d_u"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.n >= 0:
            raise ValueError("path-loss exponent must be non-negative")


@dataclass(frozen=True)
class RadioConfig:
    transmit_snr: float
    outage_threshold: float
    tx_gain: float
    rx_gain: float = 1.0

    def __post_init__(self):
        for name in ("transmit_snr", "outage_threshold", "tx_gain", "rx_gain"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def gain(self) -> float:
        return self.tx_gain * self.rx_gain


@dataclass(frozen=True)
class BenchmarkGeometry:
    """Placement of the ground node for the baselines.

    The GN sits in the ``x = 0`` plane, ``gn_distance`` from the RIS centre and
    ``gn_elevation`` below the horizontal through it; the ground plane is the
    horizontal plane through the GN.
    """

    wavelength: float = 0.1
    gn_elevation: float = math.pi / 4
    gn_distance: float = 50.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if not self.gn_distance > 0:
            raise ValueError("gn_distance must be positive")
        if not 0.0 < self.gn_elevation < math.pi / 2:
            raise ValueError("gn_elevation must lie in (0, pi/2)")

    def gn_position(self) -> tuple[float, float, float]:
        d, e = self.gn_distance, self.gn_elevation
        return 0.0, d * math.cos(e), -d * math.sin(e)


def tx_gain_directional(xi_degrees: float) -> float:
    """Gain of the UAV's highly directional antenna from its beamwidth in degrees."""
    if not 0.0 < xi_degrees <= 15.0:
        raise ValueError(f"beamwidth must lie in (0, 15] degrees, got {xi_degrees}")
    return 29000.0 / xi_degrees**2


def path_loss_uav_ris(pos: SphericalPosition, antenna: ConeAntenna, panel: RisPanel) -> float:
    """Element aperture over footprint area."""
    return panel.element_area / compute_footprint(pos, antenna).area


def path_loss_uav_ris_expanded(pos: SphericalPosition, antenna: ConeAntenna,
                               panel: RisPanel) -> float:
    """Same loss written out in terms of the aiming angle."""
    phi_p = solve_phi_prime(pos, antenna)
    st, sp = math.sin(pos.theta), math.sin(pos.phi)
    half = 0.5 * antenna.xi
    bracket = abs(sp * st / math.tan(pos.phi) - sp * st / math.tan(phi_p + half)) * math.tan(half)
    return panel.element_area / (math.pi * pos.r**2) / bracket


def path_loss_ris_gn(p: PathLossParams) -> float:
    return p.c0 * (p.d_u / p.d0) ** (-p.n)


def snr_threshold_z(radio: RadioConfig, l0: float) -> float:
    """Outage threshold mapped onto the aggregate channel amplitude."""
    if not l0 > 0:
        raise ValueError("end-to-end path loss must be positive")
    return math.sqrt(radio.outage_threshold / (l0 * radio.gain * radio.transmit_snr))


def average_snr(l0: float, radio: RadioConfig, mean: float, variance: float) -> float:
    return l0 * radio.gain * radio.transmit_snr * (mean * mean + variance)


def free_space_loss(distance: float, aperture: float, d0: float = 1.0) -> float:
    """Isotropic spreading onto an aperture: ``aperture / (4 pi) * (d/d0)^-2``."""
    return aperture / (4.0 * math.pi) * (distance / d0) ** -2


def benchmark1_snr(pos: SphericalPosition, panel: RisPanel, radio: RadioConfig,
                   bench: BenchmarkGeometry, p: PathLossParams, nak: NakagamiParams,
                   combining: str = "coherent", ris: bool = True, direct: bool = True) -> float:
    """Omnidirectional UAV served through all RIS elements plus a fading-free direct path.

    ``combining='coherent'`` adds the direct amplitude to the mean RIS amplitude;
    ``'power'`` adds the two average powers. The UAV gain is 1 by construction.
    """
    if combining not in ("coherent", "power"):
        raise ValueError(f"unknown combining rule {combining!r}")
    uav = pos.cartesian()
    l_direct = free_space_loss(math.dist(uav, bench.gn_position()),
                               bench.wavelength**2 / (4.0 * math.pi)) if direct else 0.0
    if ris:
        l_ris = free_space_loss(pos.r, panel.element_area) * path_loss_ris_gn(p)
        mean, var = aggregate_moments(panel.num_elements, nak)
    else:
        l_ris, mean, var = 0.0, 0.0, 0.0
    scale = radio.transmit_snr * radio.rx_gain
    if combining == "coherent":
        amp = math.sqrt(l_direct) + math.sqrt(l_ris) * mean
        return scale * (amp * amp + l_ris * var)
    return scale * (l_direct + l_ris * (mean * mean + var))


def ground_footprint_area(pos: SphericalPosition, antenna: ConeAntenna,
                          bench: BenchmarkGeometry) -> float:
    """Footprint of a beam steered at the GN on the ground plane.

    Reuses the RIS-plane construction in a frame where the ground is the
    reflecting plane and the UAV lies in its symmetry plane.
    """
    ux, uy, uz = pos.cartesian()
    gx, gy, gz = bench.gn_position()
    height = uz - gz
    if not height > 0:
        raise ValueError("UAV is not above the ground plane")
    horizontal = math.hypot(ux - gx, uy - gy)
    local = SphericalPosition(math.hypot(horizontal, height), math.pi / 2,
                              math.atan2(height, horizontal))
    return compute_footprint(local, antenna).area


def benchmark2_snr(pos: SphericalPosition, radio: RadioConfig, bench: BenchmarkGeometry,
                   antenna: ConeAntenna) -> float:
    """Directional beam steered at the GN, no RIS."""
    area = ground_footprint_area(pos, antenna, bench)
    return radio.transmit_snr * radio.gain * bench.wavelength**2 / (4.0 * math.pi * area)
