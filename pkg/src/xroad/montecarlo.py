"""Monte-Carlo outage estimation.

Each realization draws the interferer point processes on every lane of a
finite road segment, thins them by the Aloha access probability, attaches
unit-mean exponential power fades, draws the gamma signal fade, and checks
the resulting SIR against the threshold.  Trials use counter-based Philox
substreams keyed by (master_seed, trial_index), so the estimate is
bit-identical for any worker count or scheduling order.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .model import Lane, Scenario, destination_position

_MASK64 = (1 << 64) - 1
_BLOCK = 1024  # trials per work unit; fixed so reductions never reorder


@dataclass(frozen=True)
class SimConfig:
    """Simulation protocol: realization count, road extent, seeding."""

    trials: int = 50_000
    half_length: float = 1000.0   # road half-extent around the intersection, m
    master_seed: int = 0
    confidence: float = 0.95

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not (self.half_length > 0.0):
            raise ValueError("half_length must be positive")
        if not (0.0 < self.confidence < 1.0):
            raise ValueError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class OutageEstimate:
    """Point estimate of the outage probability with its uncertainty."""

    p_hat: float
    stderr: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    throughput: float            # (1 - p_hat) * log2(1 + Theta)
    excluded_interferers: int = 0


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Philox generator for one trial, keyed by (seed, trial index)."""
    key = ((trial_index & _MASK64) << 64) | (master_seed & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_interferers(lane: Lane, scenario: Scenario, sim: SimConfig,
                       rng: np.random.Generator) -> np.ndarray:
    """Positions of one lane's interferers for one realization.

    Draws N ~ Poisson(lambda * 2 * half_length) points placed uniformly on
    the lane segment centered on the intersection; returns an (N, 2) array
    of 2D coordinates.
    """
    lam = scenario.lane_intensity(lane)
    half = sim.half_length
    n = rng.poisson(lam * 2.0 * half)
    along = rng.uniform(-half, half, n)
    if lane.axis == "x":
        return np.column_stack((along, np.full(n, lane.offset)))
    return np.column_stack((np.full(n, lane.offset), along))


def _aggregate(scenario: Scenario, sim: SimConfig,
               rng: np.random.Generator) -> tuple[float, float, int]:
    """(I_X, I_Y, excluded) for one realization.

    Per lane, in layout order: sample the point process, keep each point
    with probability p, attach an exponential fade, convert to received
    power through the path loss.  Interferers landing exactly on D have
    an undefined path loss and are dropped (and counted).
    """
    dest = destination_position(scenario.geometry)
    alpha = scenario.channel.alpha
    totals = {"x": 0.0, "y": 0.0}
    excluded = 0
    for lane in scenario.lanes():
        pts = sample_interferers(lane, scenario, sim, rng)
        keep = rng.random(len(pts)) < scenario.p
        pts = pts[keep]
        fades = rng.exponential(1.0, len(pts))
        dist_sq = (pts[:, 0] - dest[0]) ** 2 + (pts[:, 1] - dest[1]) ** 2
        at_dest = dist_sq == 0.0
        if at_dest.any():
            excluded += int(at_dest.sum())
            fades, dist_sq = fades[~at_dest], dist_sq[~at_dest]
        totals[lane.axis] += float(np.sum(fades * dist_sq ** (-0.5 * alpha)))
    return totals["x"], totals["y"], excluded


def sample_aggregate_interference(scenario: Scenario, sim: SimConfig,
                                  rng: np.random.Generator
                                  ) -> tuple[float, float]:
    """Aggregate interference powers (I_X, I_Y) for one realization."""
    ix, iy, excluded = _aggregate(scenario, sim, rng)
    if excluded:
        warnings.warn(f"excluded {excluded} interferer(s) located exactly "
                      "at the destination", RuntimeWarning, stacklevel=2)
    return ix, iy


def outage_from_interference(scenario: Scenario, signal_fade: float,
                             i_x: float, i_y: float) -> bool:
    """SIR < Theta decision given a drawn signal fade and interference.

    Zero interference means infinite SIR, never an outage; an exact tie
    with the threshold counts as success.
    """
    total = i_x + i_y
    if total == 0.0:
        return False
    sir = signal_fade * scenario.link_path_loss / total
    return sir < scenario.theta_threshold


def sample_outage_event(scenario: Scenario, sim: SimConfig,
                        rng: np.random.Generator) -> bool:
    """One realization: True when the link is in outage."""
    ix, iy, _ = _aggregate(scenario, sim, rng)
    ch = scenario.channel
    fade = rng.gamma(ch.m, ch.mu / ch.m)  # rate m/mu, mean mu
    return outage_from_interference(scenario, fade, ix, iy)


def _run_block(scenario: Scenario, sim: SimConfig, start: int,
               count: int) -> tuple[int, int]:
    """Outage and exclusion counts over trials [start, start + count)."""
    outages = 0
    excluded = 0
    ch = scenario.channel
    for trial in range(start, start + count):
        rng = trial_rng(sim.master_seed, trial)
        ix, iy, ex = _aggregate(scenario, sim, rng)
        fade = rng.gamma(ch.m, ch.mu / ch.m)
        excluded += ex
        outages += outage_from_interference(scenario, fade, ix, iy)
    return outages, excluded


def _confidence_interval(count: int, trials: int,
                         confidence: float) -> tuple[float, float]:
    """Normal interval, switching to Wilson near the 0/1 boundaries where
    the normal approximation is unusable."""
    z = NormalDist().inv_cdf(0.5 * (1.0 + confidence))
    p = count / trials
    if min(count, trials - count) < 10:
        denom = 1.0 + z * z / trials
        center = (p + z * z / (2.0 * trials)) / denom
        half = (z / denom) * math.sqrt(p * (1.0 - p) / trials
                                       + z * z / (4.0 * trials * trials))
        low, high = center - half, center + half
    else:
        se = math.sqrt(p * (1.0 - p) / trials)
        low, high = p - z * se, p + z * se
    # Clamp away rounding dust so the interval always brackets p.
    return min(max(low, 0.0), p), max(min(high, 1.0), p)


def estimate(scenario: Scenario, sim: SimConfig,
             workers: int = 1) -> OutageEstimate:
    """Outage probability averaged over sim.trials realizations.

    Trials are split into fixed blocks handed to worker processes; counts
    are integers, so the reduction is exact and the result does not depend
    on the worker count.
    """
    blocks = [(start, min(_BLOCK, sim.trials - start))
              for start in range(0, sim.trials, _BLOCK)]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, scenario, sim, s, c)
                       for s, c in blocks]
            results = [f.result() for f in futures]
    else:
        results = [_run_block(scenario, sim, s, c) for s, c in blocks]
    outages = sum(r[0] for r in results)
    excluded = sum(r[1] for r in results)
    if excluded:
        warnings.warn(f"excluded {excluded} interferer(s) located exactly "
                      "at the destination", RuntimeWarning, stacklevel=2)
    p_hat = outages / sim.trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / sim.trials)
    ci_low, ci_high = _confidence_interval(outages, sim.trials,
                                           sim.confidence)
    return OutageEstimate(
        p_hat=p_hat,
        stderr=stderr,
        ci_low=ci_low,
        ci_high=ci_high,
        trials=sim.trials,
        seed=sim.master_seed,
        throughput=(1.0 - p_hat)
        * math.log2(1.0 + scenario.theta_threshold),
        excluded_interferers=excluded,
    )
