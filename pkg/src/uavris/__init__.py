"""Analytic model and Monte Carlo oracles for a UAV serving a ground node through a RIS
with a highly directional beam."""
from .config import ExperimentConfig, load_config, parse_config
from .errors import (ConfigError, DegenerateFootprint, EmptyRegion, InsufficientCrossings,
                     InsufficientEvents, ModelError, NoRootInBracket, PointNotOnEllipse,
                     ZeroIlluminated)
from .geometry import (ConeAntenna, FootprintEllipse, IntersectionCase, RisPanel,
                       SphericalPosition, compute_footprint, illuminated_elements,
                       illumination, solve_phi_prime, spillover_fraction)
from .scenario import LinkScenario, default_scenario, evaluate_position
from .stats import AggregateChannel, NakagamiParams, aggregate_moments

__version__ = "0.1.0"

__all__ = [
    "AggregateChannel", "ConeAntenna", "ConfigError", "DegenerateFootprint", "EmptyRegion",
    "ExperimentConfig", "FootprintEllipse", "InsufficientCrossings", "InsufficientEvents",
    "IntersectionCase", "LinkScenario", "ModelError", "NakagamiParams", "NoRootInBracket",
    "PointNotOnEllipse", "RisPanel", "SphericalPosition", "ZeroIlluminated",
    "aggregate_moments", "compute_footprint", "default_scenario", "evaluate_position",
    "illuminated_elements", "illumination", "load_config", "parse_config", "solve_phi_prime",
    "spillover_fraction",
]
