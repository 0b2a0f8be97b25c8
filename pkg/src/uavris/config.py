"""Flat ``key = value`` experiment configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import linkbudget as lb
from .errors import ConfigError
from .geometry import ConeAntenna, RisPanel, SphericalPosition
from .scenario import LinkScenario
from .stats import NakagamiParams


@dataclass(frozen=True)
class ExperimentConfig:
    # channel and link
    m: float = 3.0
    omega: float = 1.0
    c0_db: float = -30.0
    d0_m: float = 1.0
    du_m: float = 50.0
    n: float = 2.2
    gamma_t_db: float = 50.0
    gamma_thr_db: float = 20.0
    xi_deg: float = 15.0
    half_width_m: float = 1.0
    half_height_m: float = 0.5
    num_elements: int = 800
    f_d_hz: float = 5.0
    g_r: float = 1.0
    lambda_m: float = 0.1
    phi_deg: float = 90.0
    theta_deg: float = 90.0
    gn_elevation_deg: float = 45.0
    bench1_combining: str = "coherent"
    # sweeps
    snr_r_min_m: float = 3.0
    snr_r_max_m: float = 100.0
    snr_r_step_m: float = 0.25
    op_r_min_m: float = 12.5
    op_r_max_m: float = 30.0
    op_r_step_m: float = 0.25
    # hovering boundary
    aod_target_ms: float = 1.0
    aod_rays: int = 181
    aod_rho_max_m: float = 60.0
    aod_rho_step_m: float = 0.25
    aod_tol_m: float = 0.01
    aod_max_gap_m: float = 0.5
    # validation sample counts
    validate_trials: int = 200_000
    validate_op_trials: int = 200_000
    validate_area_geometries: int = 20
    validate_area_samples: int = 1_000_000
    validate_path_positions: int = 1000
    validate_trace_elements: int = 100
    validate_trace_s: float = 60.0
    validate_trace_dt_s: float = 0.001
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        for key, check, rule in _RULES:
            if not check(getattr(self, key), self):
                raise ConfigError(f"{key} = {getattr(self, key)!r}: must {rule}")
        try:
            self.scenario()
        except ValueError as exc:
            raise ConfigError(f"invalid parameter combination: {exc}") from exc

    @property
    def gamma_t(self) -> float:
        return lb.db_to_linear(self.gamma_t_db)

    @property
    def gamma_thr(self) -> float:
        return lb.db_to_linear(self.gamma_thr_db)

    @property
    def c0(self) -> float:
        return lb.db_to_linear(self.c0_db)

    @property
    def theta(self) -> float:
        return math.radians(self.theta_deg)

    @property
    def phi(self) -> float:
        return math.radians(self.phi_deg)

    def position(self, r: float, theta: float | None = None,
                 phi: float | None = None) -> SphericalPosition:
        return SphericalPosition(r, self.theta if theta is None else theta,
                                 self.phi if phi is None else phi)

    def scenario(self, m: float | None = None) -> LinkScenario:
        return LinkScenario(
            panel=RisPanel(self.half_width_m, self.half_height_m, self.num_elements),
            antenna=ConeAntenna.from_degrees(self.xi_deg),
            path_loss=lb.PathLossParams(self.c0, self.d0_m, self.du_m, self.n),
            radio=lb.RadioConfig(self.gamma_t, self.gamma_thr,
                                 lb.tx_gain_directional(self.xi_deg), self.g_r),
            nakagami=NakagamiParams(self.m if m is None else m, self.omega),
            doppler=self.f_d_hz,
            bench=lb.BenchmarkGeometry(self.lambda_m, math.radians(self.gn_elevation_deg),
                                       self.du_m),
            bench1_combining=self.bench1_combining,
        )

    def with_overrides(self, **kw) -> ExperimentConfig:
        return replace(self, **kw)

    def header_lines(self) -> list[str]:
        """Reproducibility stamp: every resolved key, in declaration order."""
        return [f"{f.name} = {_render(getattr(self, f.name))}" for f in fields(self)]


def _render(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _pos(v, _):
    return math.isfinite(v) and v > 0


def _open_angle(v, _):
    return 0.0 < v < 180.0


_RULES = [
    ("m", lambda v, _: math.isfinite(v) and v >= 0.5, "be >= 0.5"),
    ("omega", _pos, "be > 0"),
    ("c0_db", lambda v, _: math.isfinite(v), "be finite"),
    ("d0_m", _pos, "be > 0"),
    ("du_m", _pos, "be > 0"),
    ("n", lambda v, _: math.isfinite(v) and v >= 0, "be >= 0"),
    ("gamma_t_db", lambda v, _: math.isfinite(v), "be finite"),
    ("gamma_thr_db", lambda v, _: math.isfinite(v), "be finite"),
    ("xi_deg", lambda v, _: 0.0 < v <= 15.0, "lie in the half-open interval (0, 15] degrees"),
    ("half_width_m", _pos, "be > 0"),
    ("half_height_m", _pos, "be > 0"),
    ("num_elements", lambda v, _: v >= 1, "be a positive integer"),
    ("f_d_hz", _pos, "be > 0"),
    ("g_r", _pos, "be > 0"),
    ("lambda_m", _pos, "be > 0"),
    ("phi_deg", _open_angle, "lie in the open interval (0, 180) degrees"),
    ("theta_deg", _open_angle, "lie in the open interval (0, 180) degrees"),
    ("gn_elevation_deg", lambda v, _: 0.0 < v < 90.0, "lie in the open interval (0, 90) degrees"),
    ("bench1_combining", lambda v, _: v in ("coherent", "power"), "be 'coherent' or 'power'"),
    ("snr_r_min_m", _pos, "be > 0"),
    ("snr_r_max_m", lambda v, c: v >= c.snr_r_min_m, "be >= snr_r_min_m"),
    ("snr_r_step_m", _pos, "be > 0"),
    ("op_r_min_m", _pos, "be > 0"),
    ("op_r_max_m", lambda v, c: v >= c.op_r_min_m, "be >= op_r_min_m"),
    ("op_r_step_m", _pos, "be > 0"),
    ("aod_target_ms", _pos, "be > 0"),
    ("aod_rays", lambda v, _: v >= 2, "be >= 2"),
    ("aod_rho_max_m", _pos, "be > 0"),
    ("aod_rho_step_m", lambda v, c: 0 < v < c.aod_rho_max_m, "lie in (0, aod_rho_max_m)"),
    ("aod_tol_m", _pos, "be > 0"),
    ("aod_max_gap_m", _pos, "be > 0"),
    ("validate_trials", lambda v, _: v >= 10_000, "be >= 10000"),
    ("validate_op_trials", lambda v, _: v >= 10_000, "be >= 10000"),
    ("validate_area_geometries", lambda v, _: v >= 5, "be >= 5"),
    ("validate_area_samples", lambda v, _: v >= 100_000, "be >= 100000"),
    ("validate_path_positions", lambda v, _: v >= 1, "be >= 1"),
    ("validate_trace_elements", lambda v, _: v >= 1, "be >= 1"),
    ("validate_trace_s", _pos, "be > 0"),
    ("validate_trace_dt_s", _pos, "be > 0"),
    ("seed", lambda v, _: 0 <= v < 2**64, "be an unsigned 64-bit integer"),
    ("workers", lambda v, _: v >= 1, "be >= 1"),
]

_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key: str, text: str):
    kind = _TYPES[key]
    if kind == "int":
        return int(text, 10)
    if kind == "float":
        return float(text)
    return text


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; ``#`` starts a comment, unset keys keep their defaults."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, value)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: {key} expects {_TYPES[key]}, got {value!r}") from None
    return ExperimentConfig(**values)


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    return parse_config(Path(path).read_text(encoding="utf-8"))
