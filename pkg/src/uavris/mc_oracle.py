"""Monte Carlo oracles for the closed-form model.

Every estimator is split into fixed work blocks, each drawing from its own
generator seeded by ``(seed, block_index)``. Results therefore do not depend on
how many worker threads process the blocks, and pooled sums are reduced in
block order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import t as student_t

from .errors import InsufficientCrossings, InsufficientEvents
from .geometry import FootprintEllipse, RisPanel
from .stats import NakagamiParams

Z95 = 1.959963984540054
# target number of variates generated per block
BLOCK_VARIATES = 4_000_000


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *stream])))


def _blocks(total: int, per_block: int):
    per_block = max(1, int(per_block))
    starts = range(0, total, per_block)
    return [(i, s, min(per_block, total - s)) for i, s in enumerate(starts)]


def _run_blocks(fn, blocks, workers: int):
    if workers <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def sample_nakagami(nak: NakagamiParams, rng: np.random.Generator, size=None):
    """Nakagami-m amplitude(s) as the square root of a Gamma(m, omega/m) variate."""
    g = rng.standard_gamma(nak.m, size=size)
    return np.sqrt(g * (nak.omega / nak.m))


def _element_sums(nak, count, trials, rng, out=None):
    """Per-trial sums of ``count`` amplitudes, shape ``(trials,)``."""
    buf = rng.standard_gamma(nak.m, size=(trials, count))
    np.sqrt(buf, out=buf)
    return buf.sum(axis=1, out=out) * math.sqrt(nak.omega / nak.m)


@dataclass(frozen=True)
class AggregateEstimate:
    mean: float
    variance: float
    mean_half_width: float
    variance_half_width: float
    trials: int
    samples: np.ndarray | None = None

    @property
    def skewness(self) -> float:
        if self.samples is None:
            raise ValueError("sample store was not kept")
        x = self.samples - self.samples.mean()
        return float(np.mean(x**3) / np.mean(x**2) ** 1.5)


def empirical_aggregate(count: int, nak: NakagamiParams, trials: int, seed: int,
                        workers: int = 1, keep_samples: bool = False) -> AggregateEstimate:
    """Empirical mean/variance of the sum of ``count`` Nakagami amplitudes."""
    if trials < 10_000:
        raise ValueError("need at least 1e4 trials")
    per_block = max(1, BLOCK_VARIATES // count)
    blocks = _blocks(trials, per_block)

    def work(block):
        idx, _, n = block
        return _element_sums(nak, count, n, make_rng(seed, idx))

    sums = np.concatenate(_run_blocks(work, blocks, workers))
    mean = float(sums.mean())
    dev = sums - mean
    var = float(dev @ dev / (trials - 1))
    m4 = float(np.mean(dev**4))
    var_se = math.sqrt(max(m4 - var * var, 0.0) / trials)
    return AggregateEstimate(mean, var, Z95 * math.sqrt(var / trials), Z95 * var_se, trials,
                             sums if keep_samples else None)


@dataclass(frozen=True)
class ProportionEstimate:
    value: float
    half_width: float
    events: int
    trials: int


def _proportion(events: int, trials: int) -> ProportionEstimate:
    p = events / trials
    return ProportionEstimate(p, Z95 * math.sqrt(p * (1.0 - p) / trials), int(events), trials)


def empirical_op(z: float, count: int, nak: NakagamiParams, trials: int, seed: int,
                 workers: int = 1, min_events: int = 100) -> ProportionEstimate:
    """Fraction of trials whose aggregate amplitude is ``<= z``.

    Amplitudes are non-negative, so a trial is settled as soon as its partial
    sum exceeds ``z``; only undecided trials keep drawing elements.
    """
    chunk = 100
    per_block = max(1, BLOCK_VARIATES // min(count, chunk))
    blocks = _blocks(trials, per_block)
    scale = math.sqrt(nak.omega / nak.m)

    def work(block):
        idx, _, n = block
        rng = make_rng(seed, idx)
        partial = np.zeros(n)
        left = count
        while left > 0 and partial.size:
            k = min(chunk, left)
            g = rng.standard_gamma(nak.m, size=(partial.size, k))
            np.sqrt(g, out=g)
            partial += g.sum(axis=1) * scale
            partial = partial[partial <= z]
            left -= k
        return partial.size

    events = sum(_run_blocks(work, blocks, workers))
    if events < min_events:
        raise InsufficientEvents(f"only {events} outage events in {trials} trials")
    return _proportion(events, trials)


def mc_area_overlap(ellipse: FootprintEllipse, panel: RisPanel, samples: int, seed: int,
                    workers: int = 1) -> ProportionEstimate:
    """Share of uniformly sampled footprint points that miss the panel."""
    if samples < 100_000:
        raise ValueError("need at least 1e5 samples")
    c, s = math.cos(ellipse.rotation), math.sin(ellipse.rotation)
    a, b = panel.half_width_a, panel.half_height_b

    def work(block):
        idx, _, n = block
        rng = make_rng(seed, idx)
        rho = np.sqrt(rng.random(n))
        ang = rng.random(n) * (2.0 * math.pi)
        xp = ellipse.semi_major * rho * np.cos(ang)
        zp = ellipse.semi_minor * rho * np.sin(ang)
        x = xp * c - zp * s
        z = xp * s + zp * c
        return int(np.count_nonzero((np.abs(x) > a) | (np.abs(z) > b)))

    outside = sum(_run_blocks(work, _blocks(samples, 1_000_000), workers))
    return _proportion(outside, samples)


@dataclass(frozen=True)
class FadingTrace:
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValueError("trace needs at least two samples")
        if np.any(self.samples < 0):
            raise ValueError("envelope samples must be non-negative")

    @property
    def duration(self) -> float:
        return self.dt * (self.samples.size - 1)


def sum_of_sinusoids(doppler: float, n_steps: int, dt: float, rng: np.random.Generator,
                     n_processes: int = 1, n_sinusoids: int = 64, variance: float = 1.0,
                     block: int = 400) -> np.ndarray:
    """Independent real Gaussian processes with the classical Doppler spectrum.

    Each process is ``sqrt(2 v / N) * sum_n cos(2 pi f_D cos(a_n) t + p_n)`` with
    arrival angles ``a_n = (2 pi n - pi + u) / N`` (one random offset ``u`` per
    process) and i.i.d. uniform phases. Time is split as ``t = (b L + l) dt`` so
    the sum becomes two matrix products per process. Returns ``(n_processes,
    n_steps)``.
    """
    n = np.arange(1, n_sinusoids + 1)
    offsets = rng.uniform(-math.pi, math.pi, size=(n_processes, 1))
    omega = 2.0 * math.pi * doppler * np.cos((2.0 * math.pi * n - math.pi + offsets) / n_sinusoids)
    phase = rng.uniform(0.0, 2.0 * math.pi, size=(n_processes, n_sinusoids))
    n_blocks = -(-n_steps // block)
    fine = np.arange(block) * dt
    coarse = np.arange(n_blocks) * (block * dt)
    arg_fine = omega[:, None, :] * fine[None, :, None]  # (P, L, N)
    arg_coarse = omega[:, :, None] * coarse[None, None, :] + phase[:, :, None]  # (P, N, B)
    out = np.cos(arg_fine) @ np.cos(arg_coarse) - np.sin(arg_fine) @ np.sin(arg_coarse)
    out = out.transpose(0, 2, 1).reshape(n_processes, -1)[:, :n_steps]
    return out * math.sqrt(2.0 * variance / n_sinusoids)


def fading_timeseries(count: int, nak: NakagamiParams, doppler: float, duration: float,
                      dt: float, seed: int, n_sinusoids: int = 64) -> FadingTrace:
    """Aggregate envelope of ``count`` independent Nakagami-m elements over time.

    Each element is the root sum of squares of ``2m`` Gaussian processes of
    variance ``omega / (2m)``; ``m`` must be an integer.
    """
    if nak.m != int(nak.m):
        raise ValueError("time-correlated traces need an integer Nakagami m")
    if not doppler > 0:
        raise ValueError("doppler must be positive")
    if dt > 1.0 / (100.0 * doppler) * (1 + 1e-12):
        raise ValueError("dt must resolve the fading: dt <= 1 / (100 f_D)")
    if duration * doppler < 100 * (1 - 1e-12):
        raise ValueError("trace too short: need duration * f_D >= 100")
    if n_sinusoids < 64:
        raise ValueError("use at least 64 sinusoids per Gaussian component")
    n_steps = int(round(duration / dt)) + 1
    k = 2 * int(nak.m)
    total = np.zeros(n_steps)
    for element in range(count):
        rng = make_rng(seed, element)
        x = sum_of_sinusoids(doppler, n_steps, dt, rng, k, n_sinusoids, nak.omega / k)
        total += np.sqrt(np.einsum("ij,ij->j", x, x))
    return FadingTrace(dt, total)


def _crossing_times(s, z, dt, idx):
    # linear interpolation between samples idx-1 and idx
    s0, s1 = s[idx - 1], s[idx]
    return (idx - 1 + (s0 - z) / (s0 - s1)) * dt


class CrossingEstimate(NamedTuple):
    lcr: float
    aod: float
    crossings: int
    lcr_half_width: float
    aod_half_width: float


def empirical_lcr_aod(trace: FadingTrace, z: float, min_crossings: int = 100,
                      batches: int = 10) -> CrossingEstimate:
    """Downward crossing rate of ``z`` and mean duration below it.

    ``lcr`` is in crossings per second, ``aod`` in seconds. Sojourns cut by the
    trace ends are ignored. Half-widths are 95% batch-means intervals over
    ``batches`` equal stretches of the trace (ratio estimator for the AOD).
    """
    s = trace.samples
    below = s < z
    down = np.flatnonzero(~below[:-1] & below[1:]) + 1
    up = np.flatnonzero(below[:-1] & ~below[1:]) + 1
    if down.size < min_crossings:
        raise InsufficientCrossings(f"only {down.size} downward crossings of z={z}")
    lcr = down.size / trace.duration
    up = up[up > down[0]] if down.size else up[:0]
    n = min(down.size, up.size)
    if n == 0:
        return CrossingEstimate(lcr, math.nan, int(down.size), math.nan, math.nan)
    t_down = _crossing_times(s, z, trace.dt, down[:n])
    sojourn = _crossing_times(s, z, trace.dt, up[:n]) - t_down
    aod = float(np.mean(sojourn))

    edges = np.linspace(0.0, trace.duration, batches + 1)
    t_all = down * trace.dt
    counts = np.histogram(t_all, edges)[0].astype(float)
    rates = counts / np.diff(edges)
    tq = float(student_t.ppf(0.975, batches - 1))
    lcr_hw = tq * float(np.std(rates, ddof=1)) / math.sqrt(batches)
    which = np.clip(np.searchsorted(edges, t_down, side="right") - 1, 0, batches - 1)
    tot = np.bincount(which, weights=sojourn, minlength=batches)
    cnt = np.bincount(which, minlength=batches).astype(float)
    resid = tot - aod * cnt
    aod_se = math.sqrt(float(resid @ resid) / (batches * (batches - 1))) / cnt.mean()
    return CrossingEstimate(lcr, aod, int(down.size), lcr_hw, float(tq * aod_se))
