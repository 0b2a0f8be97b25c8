"""Gaussian approximation of the aggregate RIS channel and its outage statistics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import special

GAMMA_DOMAIN = (0.5, 1e4)
# conventional central-limit rule of thumb
CLT_MIN_ELEMENTS = 30


class SmallApertureWarning(UserWarning):
    """Fewer illuminated elements than the Gaussian approximation comfortably needs."""


@dataclass(frozen=True)
class NakagamiParams:
    m: float
    omega: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise ValueError(f"Nakagami shape m must be >= 0.5, got {self.m}")
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"Nakagami spread omega must be positive, got {self.omega}")

    @property
    def amplitude_mean(self) -> float:
        return gamma_ratio(self.m) * math.sqrt(self.omega / self.m)

    @property
    def amplitude_variance(self) -> float:
        return self.omega * (1.0 - gamma_ratio(self.m) ** 2 / self.m)


def gamma_fn(x: float) -> float:
    """Gamma function on ``[0.5, 1e4]``.

    Raises ``OverflowError`` above ~171.6 where the value leaves double range.
    """
    lo, hi = GAMMA_DOMAIN
    if not lo <= x <= hi:
        raise ValueError(f"gamma_fn argument {x} outside [{lo}, {hi:g}]")
    return math.gamma(x)


def gamma_ratio(m: float) -> float:
    """``Gamma(m + 1/2) / Gamma(m)``."""
    if m + 0.5 <= 170.0:
        return gamma_fn(m + 0.5) / gamma_fn(m)
    return math.exp(math.lgamma(m + 0.5) - math.lgamma(m))


def aggregate_moments(count: int, nak: NakagamiParams) -> tuple[float, float]:
    """Mean and variance of the sum of ``count`` i.i.d. Nakagami-m amplitudes."""
    if int(count) != count or count < 1:
        raise ValueError(f"illuminated element count must be >= 1, got {count}")
    ratio = gamma_ratio(nak.m)
    mean = count * ratio * math.sqrt(nak.omega / nak.m)
    variance = count * nak.omega * (1.0 - ratio * ratio / nak.m)
    return mean, variance


@dataclass(frozen=True)
class AggregateChannel:
    illuminated_count: int
    mean: float
    variance: float
    doppler: float
    nakagami: NakagamiParams

    @classmethod
    def from_nakagami(cls, count: int, nak: NakagamiParams, doppler: float = 5.0,
                      moments=aggregate_moments) -> AggregateChannel:
        mean, variance = moments(count, nak)
        if count < CLT_MIN_ELEMENTS:
            warnings.warn(f"only {count} illuminated elements; Gaussian approximation is coarse",
                          SmallApertureWarning, stacklevel=2)
        return cls(int(count), mean, variance, doppler, nak)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def clt_ok(self) -> bool:
        return self.illuminated_count >= CLT_MIN_ELEMENTS

    def standardized(self, z: float) -> float:
        return (z - self.mean) / self.std

    def pdf(self, z: float) -> float:
        u = self.standardized(z)
        return math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi * self.variance)


def derivative_std(agg: AggregateChannel) -> float:
    """Standard deviation of the time derivative of the aggregate envelope."""
    nak = agg.nakagami
    return math.pi * agg.doppler * math.sqrt(agg.illuminated_count * nak.omega / nak.m)


def outage_probability(z: float, agg: AggregateChannel) -> float:
    """``Pr(H <= z)`` under the Gaussian approximation (complementary form for tails)."""
    if z < 0:
        raise ValueError("amplitude threshold must be non-negative")
    u = (z - agg.mean) / math.sqrt(2.0 * agg.variance)
    return 0.5 * math.erfc(-u)


def level_crossing_rate(z: float, agg: AggregateChannel) -> float:
    """Downward crossings per second of level ``z``."""
    if z < 0:
        raise ValueError("amplitude threshold must be non-negative")
    if not agg.doppler > 0:
        raise ValueError("maximum Doppler spread must be positive")
    return agg.pdf(z) * derivative_std(agg) / math.sqrt(2.0 * math.pi)


def average_outage_duration(z: float, agg: AggregateChannel | None) -> float:
    """Mean time spent below ``z`` per outage event, in seconds.

    ``agg=None`` stands for a position with no illuminated element (permanent
    outage) and yields ``inf``. The ratio ``P_o / exp(-u^2/2)`` is evaluated as
    ``erfcx(-u/sqrt(2)) / 2`` so deep non-outage thresholds stay finite.
    """
    if agg is None:
        return math.inf
    if z < 0:
        raise ValueError("amplitude threshold must be non-negative")
    if not agg.doppler > 0:
        raise ValueError("maximum Doppler spread must be positive")
    nak = agg.nakagami
    u = (z - agg.mean) / math.sqrt(2.0 * agg.variance)
    po_over_gauss = 0.5 * float(special.erfcx(-u))
    return (2.0 * po_over_gauss * math.sqrt(nak.m * agg.variance)
            / (agg.doppler * math.sqrt(agg.illuminated_count * nak.omega)))
