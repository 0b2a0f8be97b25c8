"""Experiment drivers: SNR and OP sweeps, hovering-boundary extraction, oracle validation."""
from __future__ import annotations

import io
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import linkbudget as lb
from . import mc_oracle as mc
from . import stats
from .config import ExperimentConfig
from .errors import EmptyRegion, ModelError
from .geometry import FootprintEllipse, SphericalPosition, spillover_fraction
from .scenario import LinkScenario, aod_at, evaluate_position

SNR_COLUMNS = ("r_m", "snr_db_proposed", "snr_db_benchmark1", "snr_db_benchmark2",
               "M", "J", "case", "diagnostics")
OP_COLUMNS = ("r_m", "op_m3_t90", "op_m1_t90", "op_m3_t60")
BOUNDARY_COLUMNS = ("segment", "x_m", "y_m", "phi_rad", "rho_m", "aod_s")
# relative accuracy demanded of each boundary vertex before bisection stops
VERTEX_REL_TOL = 0.0025
MAX_BISECTIONS = 80
MAX_RAY_SPLITS = 8


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else f"{x:.9g}"
    return str(x)


@dataclass(frozen=True)
class Table:
    """CSV payload: comment lines, then a header row and data rows."""

    comments: tuple[str, ...]
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for c in self.comments:
            buf.write(f"# {c}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) for v in row) + "\n")
        return buf.getvalue()


def stamp(cfg: ExperimentConfig, command: str, extra: Iterable[str] = ()) -> tuple[str, ...]:
    return (f"command = {command}", *cfg.header_lines(), *extra)


def r_grid(lo: float, hi: float, step: float) -> list[float]:
    """``lo + i * step`` up to ``hi``; computed per index so halving the step keeps old rows."""
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def _db(x: float) -> float:
    return lb.linear_to_db(x) if x > 0 else -math.inf


# ---------------------------------------------------------------------------
# average SNR versus distance


def snr_row(cfg: ExperimentConfig, r: float, scn: LinkScenario | None = None) -> tuple:
    scn = scn or cfg.scenario()
    notes = []
    pos = cfg.position(r)
    proposed = m_count = j = case = None
    try:
        res = evaluate_position(scn, pos)
        proposed = _db(res.average_snr)
        m_count = res.illumination.illuminated_count
        j = res.illumination.spillover_fraction
        case = res.illumination.case_tag.value
        if m_count == 0:
            notes.append("no_illuminated_elements")
        elif res.low_aperture:
            notes.append("low_M")
    except ModelError as exc:
        notes.append(f"proposed:{type(exc).__name__}")
    bench1_radio = lb.RadioConfig(scn.radio.transmit_snr, scn.radio.outage_threshold, 1.0,
                                  scn.radio.rx_gain)
    b1 = _guard(notes, "benchmark1", lambda: _db(lb.benchmark1_snr(
        pos, scn.panel, bench1_radio, scn.bench, scn.path_loss, scn.nakagami,
        scn.bench1_combining)))
    b2 = _guard(notes, "benchmark2", lambda: _db(lb.benchmark2_snr(
        pos, scn.radio, scn.bench, scn.antenna)))
    return (r, proposed, b1, b2, m_count, j, case, ";".join(notes))


def _guard(notes, label, fn):
    try:
        return fn()
    except ValueError as exc:
        notes.append(f"{label}:{type(exc).__name__}")
        return None


def sweep_snr(cfg: ExperimentConfig) -> Table:
    scn = cfg.scenario()
    rows = tuple(snr_row(cfg, r, scn)
                 for r in r_grid(cfg.snr_r_min_m, cfg.snr_r_max_m, cfg.snr_r_step_m))
    return Table(stamp(cfg, "sweep-snr"), SNR_COLUMNS, rows)


# ---------------------------------------------------------------------------
# outage probability versus distance

OP_VARIANTS = ((3.0, 90.0), (1.0, 90.0), (3.0, 60.0))


def _op_at(scn: LinkScenario, pos: SphericalPosition) -> float | None:
    try:
        return evaluate_position(scn, pos).outage_probability
    except ModelError:
        return None


def op_row(cfg: ExperimentConfig, r: float) -> tuple:
    vals = []
    for m, theta_deg in OP_VARIANTS:
        vals.append(_op_at(cfg.scenario(m), cfg.position(r, theta=math.radians(theta_deg))))
    return (r, *vals)


def sweep_op(cfg: ExperimentConfig) -> Table:
    rows = tuple(op_row(cfg, r) for r in r_grid(cfg.op_r_min_m, cfg.op_r_max_m, cfg.op_r_step_m))
    return Table(stamp(cfg, "sweep-op"), OP_COLUMNS, rows)


# ---------------------------------------------------------------------------
# hovering boundary for a target AOD


@dataclass(frozen=True)
class BoundaryVertex:
    phi: float
    rho: float
    aod: float
    entering: bool  # True when AOD drops below the target as rho grows

    @property
    def x(self) -> float:
        return self.rho * math.cos(self.phi)

    @property
    def y(self) -> float:
        return self.rho * math.sin(self.phi)


@dataclass(frozen=True)
class BoundaryPolyline:
    """Boundary segments, each an ordered vertex list in increasing azimuth."""

    target: float
    theta: float
    segments: tuple[tuple[BoundaryVertex, ...], ...]
    permitted_samples: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    def vertices(self) -> list[BoundaryVertex]:
        return [v for seg in self.segments for v in seg]

    def max_gap(self) -> float:
        gaps = [math.dist((a.x, a.y), (b.x, b.y))
                for seg in self.segments for a, b in zip(seg, seg[1:])]
        return max(gaps, default=0.0)


class BoundaryScanner:
    """Radial scan of ``AOD(rho, phi) <= target`` at a fixed polar angle ``theta``."""

    def __init__(self, scn: LinkScenario, target: float, theta: float, rho_max: float,
                 rho_step: float, tol: float, aod_fn: Callable | None = None):
        if not target > 0:
            raise ValueError("target AOD must be positive")
        if not 0.0 < theta < math.pi:
            raise ValueError("theta must lie in the open interval (0, pi)")
        self.scn, self.target, self.theta = scn, target, theta
        self.rho_max, self.rho_step, self.tol = rho_max, rho_step, tol
        self._aod = aod_fn or aod_at
        self.permitted: list[tuple[float, float]] = []
        self._cache: dict[float, list[BoundaryVertex]] = {}

    def position(self, rho: float, phi: float) -> SphericalPosition:
        return SphericalPosition(rho / math.sin(self.theta), self.theta, phi)

    def aod(self, rho: float, phi: float) -> float:
        return self._aod(self.scn, self.position(rho, phi))

    def _refine(self, phi, lo, hi, lo_ok) -> BoundaryVertex:
        """Bisect between a permitted and a forbidden radius."""
        best = None
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            a = self.aod(mid, phi)
            err = abs(a - self.target)
            if best is None or err < best[1]:
                best = (mid, err, a)
            if (a <= self.target) == lo_ok:
                lo = mid
            else:
                hi = mid
            if hi - lo <= self.tol and err <= VERTEX_REL_TOL * self.target:
                break
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
        rho, _, a = best
        return BoundaryVertex(phi, rho, a, entering=not lo_ok)

    def crossings(self, phi: float) -> list[BoundaryVertex]:
        if phi in self._cache:
            return self._cache[phi]
        steps = int(math.floor(self.rho_max / self.rho_step + 1e-9))
        rhos = [k * self.rho_step for k in range(1, steps + 1)]
        ok = [self.aod(rho, phi) <= self.target for rho in rhos]
        found = []
        for k in range(1, len(rhos)):
            if ok[k] != ok[k - 1]:
                found.append(self._refine(phi, rhos[k - 1], rhos[k], ok[k - 1]))
        self.permitted.extend((rho * math.cos(phi), rho * math.sin(phi))
                              for rho, flag in zip(rhos, ok) if flag)
        self._cache[phi] = found
        return found


def _matches(a: BoundaryVertex, b: BoundaryVertex) -> bool:
    return a.entering == b.entering


def _link(scanner: BoundaryScanner, a: BoundaryVertex, b: BoundaryVertex, index: int,
          max_gap: float, depth: int = 0) -> list[BoundaryVertex] | None:
    """Vertices strictly between ``a`` and ``b`` so consecutive gaps stay below ``max_gap``.

    Returns ``None`` if an intermediate ray loses the crossing (segment break).
    """
    if math.dist((a.x, a.y), (b.x, b.y)) <= max_gap:
        return []
    if depth >= MAX_RAY_SPLITS:
        return []
    phi = 0.5 * (a.phi + b.phi)
    mid_all = scanner.crossings(phi)
    if index >= len(mid_all) or not _matches(mid_all[index], a):
        return None
    mid = mid_all[index]
    left = _link(scanner, a, mid, index, max_gap, depth + 1)
    right = _link(scanner, mid, b, index, max_gap, depth + 1)
    if left is None or right is None:
        return None
    return [*left, mid, *right]


def extract_boundary(scanner: BoundaryScanner, rays: int, max_gap: float) -> BoundaryPolyline:
    """Trace crossing ``i`` of each ray across neighbouring rays into polylines.

    Rays sit at ``phi_k = pi (k + 1) / (rays + 1)``; neighbouring rays are joined
    (with extra rays in between where needed) while their ``i``-th crossings have
    the same direction, otherwise the segment is closed.
    """
    phis = [math.pi * (k + 1) / (rays + 1) for k in range(rays)]
    per_ray = [scanner.crossings(phi) for phi in phis]
    if not scanner.permitted and not any(per_ray):
        raise EmptyRegion(f"no scanned position has AOD <= {scanner.target * 1e3:.6g} ms")
    depth = max((len(c) for c in per_ray), default=0)
    segments = []
    for index in range(depth):
        current: list[BoundaryVertex] = []
        for k, found in enumerate(per_ray):
            v = found[index] if index < len(found) else None
            if v is None:
                if current:
                    segments.append(tuple(current))
                current = []
                continue
            if current and _matches(current[-1], v):
                between = _link(scanner, current[-1], v, index, max_gap)
                if between is None:
                    segments.append(tuple(current))
                    current = [v]
                    continue
                current.extend(between)
                current.append(v)
            else:
                if current:
                    segments.append(tuple(current))
                current = [v]
        if current:
            segments.append(tuple(current))
    return BoundaryPolyline(scanner.target, scanner.theta, tuple(segments),
                            tuple(scanner.permitted))


def aod_boundary(cfg: ExperimentConfig, target_s: float | None = None,
                 theta: float | None = None, m: float | None = None) -> BoundaryPolyline:
    scanner = BoundaryScanner(cfg.scenario(m),
                              cfg.aod_target_ms * 1e-3 if target_s is None else target_s,
                              cfg.theta if theta is None else theta,
                              cfg.aod_rho_max_m, cfg.aod_rho_step_m, cfg.aod_tol_m)
    return extract_boundary(scanner, cfg.aod_rays, cfg.aod_max_gap_m)


def boundary_table(cfg: ExperimentConfig, poly: BoundaryPolyline | None,
                   target_s: float, theta: float) -> Table:
    extra = [f"target_aod_s = {target_s:.17g}", f"theta_rad = {theta:.17g}"]
    if poly is None:
        return Table(stamp(cfg, "aod-boundary", [*extra, "region = empty"]), BOUNDARY_COLUMNS, ())
    rows = tuple((i, v.x, v.y, v.phi, v.rho, v.aod)
                 for i, seg in enumerate(poly.segments) for v in seg)
    return Table(stamp(cfg, "aod-boundary", extra), BOUNDARY_COLUMNS, rows)


def in_region(scn: LinkScenario, x: float, y: float, target: float, theta: float,
              slack: float = 0.0) -> bool:
    """Whether ``(x, y)``, or any point within ``slack`` of it, is permitted."""
    offsets = [(0.0, 0.0)]
    if slack > 0:
        offsets += [(slack * math.cos(k * math.pi / 4), slack * math.sin(k * math.pi / 4))
                    for k in range(8)]
    for dx, dy in offsets:
        xx, yy = x + dx, y + dy
        if yy <= 0:
            continue
        rho = math.hypot(xx, yy)
        if aod_at(scn, SphericalPosition(rho / math.sin(theta), theta, math.atan2(yy, xx))) \
                <= target:
            return True
    return False


# ---------------------------------------------------------------------------
# analytic-vs-oracle validation


@dataclass(frozen=True)
class CheckRow:
    name: str
    analytic: float
    empirical: float
    error: float
    tolerance: float
    ci: float
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    seed: int
    rows: tuple[CheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def render(self) -> str:
        head = f"{'check':<34} {'analytic':>15} {'empirical':>15} {'error':>12} " \
               f"{'tolerance':>12} {'ci':>12}  result"
        lines = [f"# seed = {self.seed}", head]
        for r in self.rows:
            lines.append(f"{r.name:<34} {fmt(r.analytic):>15} {fmt(r.empirical):>15} "
                         f"{fmt(r.error):>12} {fmt(r.tolerance):>12} {fmt(r.ci):>12}  "
                         f"{'PASS' if r.passed else 'FAIL'}{'  ' + r.note if r.note else ''}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def compare(name, analytic, empirical, rel_tol, ci, note="", abs_tol=0.0) -> CheckRow:
    """Pass when ``|a - e| <= max(rel_tol * |a|, abs_tol, 2 ci)``."""
    err = abs(analytic - empirical)
    allowed = max(rel_tol * abs(analytic), abs_tol, 2.0 * ci)
    return CheckRow(name, analytic, empirical, err, allowed, ci, err <= allowed, note)


def _failed(name, exc) -> CheckRow:
    return CheckRow(name, math.nan, math.nan, math.nan, math.nan, math.nan, False,
                    f"{type(exc).__name__}: {exc}")


def _moment_rows(cfg, moments, seed):
    rows = []
    for m in sorted({cfg.m, 1.0}):
        nak = stats.NakagamiParams(m, cfg.omega)
        for count in (50, 100):
            tag = f"m={m:g},M={count}"
            try:
                mean, var = moments(count, nak)
                est = mc.empirical_aggregate(count, nak, cfg.validate_trials, seed, cfg.workers)
            except (ValueError, RuntimeError) as exc:
                rows.append(_failed(f"moments.mean[{tag}]", exc))
                continue
            rows.append(compare(f"moments.mean[{tag}]", mean, est.mean, 0.005,
                                est.mean_half_width))
            rows.append(compare(f"moments.variance[{tag}]", var, est.variance, 0.03,
                                est.variance_half_width))
    return rows


def _op_rows(cfg, moments, seed):
    rows = []
    scn = cfg.scenario()
    for r, label in ((15.0, "op[r=15]"), (None, "op[median]")):
        try:
            if r is None:
                res = evaluate_position(scn, cfg.position(15.0), moments)
                z, analytic = res.channel.mean, 0.5
                count = res.channel.illuminated_count
            else:
                res = evaluate_position(scn, cfg.position(r), moments)
                z, analytic = res.z, res.outage_probability
                count = res.illumination.illuminated_count
            est = mc.empirical_op(z, count, scn.nakagami, cfg.validate_op_trials, seed,
                                  cfg.workers, min_events=0)
        except (ValueError, RuntimeError) as exc:
            rows.append(_failed(label, exc))
            continue
        if r is None:
            # skew of the exact sum shifts its median slightly off the Gaussian one
            rows.append(compare(label, analytic, est.value, 0.0, est.half_width, abs_tol=0.01))
        elif est.events < 100:
            # rule of three: zero-ish events bound the true value by ~3 / trials
            bound = (est.events + 3.0) / est.trials
            ok = analytic <= bound
            rows.append(CheckRow(label, analytic, est.value, abs(analytic - est.value), bound,
                                 est.half_width, ok, f"{est.events} events"))
        else:
            rows.append(compare(label, analytic, est.value, 0.05, est.half_width))
    return rows


def random_ellipse(rng: random.Random, panel) -> FootprintEllipse:
    a, b = panel.half_width_a, panel.half_height_b
    size = rng.choice((0.3, 0.8, 1.3, 2.5, 5.0))
    major = size * a * rng.uniform(0.7, 1.3)
    ratio = rng.uniform(0.3, 1.0)
    minor = max(major * ratio, 1e-3)
    return FootprintEllipse(max(major, minor), minor, rng.uniform(-math.pi / 2, math.pi / 2))


def _area_rows(cfg, seed):
    panel = cfg.scenario().panel
    rng = random.Random(seed)
    worst = None
    cases = set()
    failures = []
    for k in range(cfg.validate_area_geometries):
        e = random_ellipse(rng, panel)
        try:
            sp = spillover_fraction(e, panel)
            est = mc.mc_area_overlap(e, panel, cfg.validate_area_samples, seed + k, cfg.workers)
        except (ValueError, RuntimeError) as exc:
            return [_failed("area_overlap", exc)]
        cases.add(sp.case_tag.value)
        row = compare("area_overlap", sp.fraction, est.value, 0.0, est.half_width, abs_tol=2e-3)
        if not row.passed:
            failures.append(sp.case_tag.value)
        if worst is None or row.error > worst.error:
            worst = row
    note = f"cases {'/'.join(sorted(cases))}"
    if failures:
        note += f"; failing cases {'/'.join(failures)}"
    return [CheckRow("area_overlap[worst]", worst.analytic, worst.empirical, worst.error,
                     worst.tolerance, worst.ci, not failures, note)]


def _path_loss_rows(cfg, seed):
    scn = cfg.scenario()
    rng = random.Random(seed)
    worst = (0.0, 0.0, 0.0)
    for _ in range(cfg.validate_path_positions):
        pos = SphericalPosition(rng.uniform(1.0, 100.0), rng.uniform(0.05, math.pi - 0.05),
                                rng.uniform(0.05, math.pi - 0.05))
        try:
            direct = lb.path_loss_uav_ris(pos, scn.antenna, scn.panel)
            expanded = lb.path_loss_uav_ris_expanded(pos, scn.antenna, scn.panel)
        except ModelError:
            continue
        rel = abs(direct - expanded) / direct
        if rel >= worst[0]:
            worst = (rel, direct, expanded)
    rel, d, e = worst
    return [CheckRow("path_loss_forms", d, e, rel, 1e-12, 0.0, rel <= 1e-12,
                     "relative error")]


def _trace_rows(cfg, moments, seed):
    m = cfg.m if cfg.m == int(cfg.m) else 3.0
    nak = stats.NakagamiParams(m, cfg.omega)
    count = cfg.validate_trace_elements
    try:
        trace = mc.fading_timeseries(count, nak, cfg.f_d_hz, cfg.validate_trace_s,
                                     cfg.validate_trace_dt_s, seed)
        mean, var = moments(count, nak)
        agg = stats.AggregateChannel(count, mean, var, cfg.f_d_hz, nak)
        est = mc.empirical_lcr_aod(trace, agg.mean)
    except (ValueError, RuntimeError) as exc:
        return [_failed("trace.lcr[z=E]", exc)]
    return [
        compare("trace.lcr[z=E]", stats.level_crossing_rate(agg.mean, agg), est.lcr, 0.15,
                est.lcr_half_width, f"{est.crossings} crossings"),
        compare("trace.aod[z=E]", stats.average_outage_duration(agg.mean, agg), est.aod, 0.15,
                est.aod_half_width),
    ]


def validate(cfg: ExperimentConfig, moments=stats.aggregate_moments,
             seed: int | None = None) -> ValidationReport:
    """Run every analytic-vs-oracle comparison; ``moments`` is injectable for mutation tests."""
    seed = cfg.seed if seed is None else seed
    rows: list[CheckRow] = []
    rows += _moment_rows(cfg, moments, seed)
    rows += _op_rows(cfg, moments, seed)
    rows += _area_rows(cfg, seed)
    rows += _path_loss_rows(cfg, seed)
    rows += _trace_rows(cfg, moments, seed)
    return ValidationReport(seed, tuple(rows))

