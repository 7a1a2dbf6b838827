"""Parameter sweeps, CSV output, and the cross-engine verification grid."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path

from . import analytic
from .model import (LOS, NLOS, ChannelParams, DestinationGeometry, LinkSpec,
                    RoadLayout, Scenario, validate_scenario)
from .montecarlo import SimConfig, estimate

AXES = ("density", "distance_d", "lanes", "threshold_db", "aloha_p")
ENGINES = ("analytic", "montecarlo")

#: Stable CSV schema; missing engine values are written as empty fields.
CSV_COLUMNS = ("variant", "axis", "value", "outage_analytic",
               "throughput_analytic", "outage_mc", "mc_stderr",
               "ci_low", "ci_high", "trials", "error")


@dataclass(frozen=True)
class Variant:
    """A labeled override of the base scenario (channel and/or layout)."""

    label: str
    channel: ChannelParams | None = None
    layout: RoadLayout | None = None


@dataclass(frozen=True)
class SweepSpec:
    """One experiment family: a base scenario, a swept axis, and variants."""

    base: Scenario
    axis: str
    values: tuple[float, ...]
    engines: tuple[str, ...] = ENGINES
    variants: tuple[Variant, ...] = (Variant("base"),)
    lane_spacing: float = 3.5


def validate_sweep(spec: SweepSpec) -> SweepSpec:
    if spec.axis not in AXES:
        raise ValueError(f"sweep axis must be one of {AXES}")
    if not spec.values:
        raise ValueError("sweep values must be nonempty")
    if any(b <= a for a, b in zip(spec.values, spec.values[1:])):
        raise ValueError("sweep values must be strictly increasing")
    if not spec.engines or any(e not in ENGINES for e in spec.engines):
        raise ValueError(f"engines must be a nonempty subset of {ENGINES}")
    if spec.axis == "lanes" and any(v != int(v) or v < 1
                                    for v in spec.values):
        raise ValueError("lane counts must be positive integers")
    if not spec.variants:
        raise ValueError("at least one variant is required")
    validate_scenario(spec.base)
    return spec


def apply_variant(base: Scenario, variant: Variant) -> Scenario:
    scenario = base
    if variant.channel is not None:
        scenario = replace(scenario, channel=variant.channel)
    if variant.layout is not None:
        scenario = replace(scenario, layout=variant.layout)
    return scenario


def apply_axis_value(scenario: Scenario, axis: str, value: float,
                     lane_spacing: float = 3.5) -> Scenario:
    """Scenario at one sweep point.

    The density and lanes axes touch only roads that are active in the
    variant (nonempty lanes with positive intensity), so a highway variant
    stays a highway across the sweep.
    """
    lay = scenario.layout
    if axis == "density":
        return replace(scenario, layout=replace(
            lay,
            lambda_x=value if (lay.lanes_x and lay.lambda_x > 0) else lay.lambda_x,
            lambda_y=value if (lay.lanes_y and lay.lambda_y > 0) else lay.lambda_y,
        ))
    if axis == "distance_d":
        return replace(scenario,
                       geometry=replace(scenario.geometry, d=value))
    if axis == "lanes":
        offsets = tuple(i * lane_spacing for i in range(int(value)))
        return replace(scenario, layout=replace(
            lay,
            lanes_x=offsets if (lay.lanes_x and lay.lambda_x > 0) else lay.lanes_x,
            lanes_y=offsets if (lay.lanes_y and lay.lambda_y > 0) else lay.lanes_y,
        ))
    if axis == "threshold_db":
        return replace(scenario, theta_threshold=10.0 ** (value / 10.0))
    if axis == "aloha_p":
        return replace(scenario, p=value)
    raise ValueError(f"unknown sweep axis {axis!r}")


@dataclass(frozen=True)
class SweepRow:
    """One CSV record; engine fields left None when not computed."""

    variant: str
    axis: str
    value: float
    outage_analytic: float | None = None
    throughput_analytic: float | None = None
    outage_mc: float | None = None
    mc_stderr: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    trials: int | None = None
    error: str = ""


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & ((1 << 64) - 1)
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & ((1 << 64) - 1)
    return z ^ (z >> 31)


def row_seed(master_seed: int, variant_index: int, value_index: int) -> int:
    """Deterministic per-row sub-seed, independent of execution order."""
    mixed = _splitmix64(master_seed & ((1 << 64) - 1))
    mixed = _splitmix64(mixed ^ variant_index)
    return _splitmix64(mixed ^ value_index)


def run_sweep(spec: SweepSpec, sim: SimConfig, workers: int = 1,
              eval_cfg: analytic.LaplaceEvalConfig = analytic.DEFAULT_EVAL
              ) -> list[SweepRow]:
    """All sweep rows in (variant, value) order.

    Partial failures land in the row's error column and the sweep carries
    on; callers decide what a failed row means for the exit code.
    """
    spec = validate_sweep(spec)
    rows: list[SweepRow] = []
    for vi, variant in enumerate(spec.variants):
        base = apply_variant(spec.base, variant)
        for xi, value in enumerate(spec.values):
            scenario = validate_scenario(
                apply_axis_value(base, spec.axis, value, spec.lane_spacing))
            fields: dict = {}
            errors: list[str] = []
            if "analytic" in spec.engines:
                try:
                    res = analytic.outage_probability(scenario, eval_cfg)
                    fields["outage_analytic"] = res.outage_prob
                    fields["throughput_analytic"] = res.throughput
                except (ValueError, ArithmeticError) as exc:
                    errors.append(f"analytic: {exc}")
            if "montecarlo" in spec.engines:
                try:
                    point_sim = replace(
                        sim, master_seed=row_seed(sim.master_seed, vi, xi))
                    est = estimate(scenario, point_sim, workers=workers)
                    fields.update(outage_mc=est.p_hat, mc_stderr=est.stderr,
                                  ci_low=est.ci_low, ci_high=est.ci_high,
                                  trials=est.trials)
                except (ValueError, ArithmeticError) as exc:
                    errors.append(f"montecarlo: {exc}")
            rows.append(SweepRow(variant=variant.label, axis=spec.axis,
                                 value=value, error="; ".join(errors),
                                 **fields))
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # full round-trip precision
    return str(value)


def write_csv(rows: list[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(getattr(row, col))
                             for col in CSV_COLUMNS])


def write_metadata(csv_path: str | Path, payload: dict) -> Path:
    """Companion <out>.meta.json describing how the CSV was produced."""
    meta_path = Path(str(csv_path) + ".meta.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta_path


@dataclass(frozen=True)
class PointComparison:
    label: str
    outage_analytic: float | None
    outage_mc: float | None
    stderr: float | None
    tolerance: float | None
    abs_diff: float | None
    passed: bool
    error: str = ""


@dataclass(frozen=True)
class ComparisonReport:
    points: tuple[PointComparison, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.points)


def default_verification_grid(r: float = 10.0, p: float = 0.5,
                              theta: float = 1.0) -> list[tuple[str, Scenario]]:
    """12 scenarios spanning both channel presets, three destination
    distances and two densities.

    The link distance is short enough that the finite simulated road
    (doubled to 4000 m in verify runs) reproduces the infinite-road
    analytics to well under the comparison tolerance.
    """
    grid = []
    for name, ch in (("NLOS", NLOS), ("LOS", LOS)):
        for d in (0.0, 200.0, 1000.0):
            for lam in (0.005, 0.02):
                label = f"{name} d={d:g} lam={lam:g}"
                grid.append((label, Scenario(
                    channel=ch,
                    geometry=DestinationGeometry(d=d, theta=0.0),
                    link=LinkSpec(r=r),
                    layout=RoadLayout.intersection(lam, lam),
                    p=p,
                    theta_threshold=theta,
                )))
    return grid


def compare_engines(grid: list[tuple[str, Scenario]] | None = None,
                    sim: SimConfig | None = None, workers: int = 1,
                    eval_cfg: analytic.LaplaceEvalConfig = analytic.DEFAULT_EVAL
                    ) -> ComparisonReport:
    """Analytic vs Monte-Carlo outage on every grid point.

    A point passes when |analytic - mc| <= max(0.01, 3 * stderr), so
    small-trial runs widen their own tolerance instead of failing
    spuriously.  An engine error fails the point, not the run.
    """
    if grid is None:
        grid = default_verification_grid()
    if sim is None:
        sim = SimConfig(trials=50_000, half_length=4000.0, master_seed=0)
    points = []
    for index, (label, scenario) in enumerate(grid):
        try:
            scenario = validate_scenario(scenario)
            ana = analytic.outage_probability(scenario, eval_cfg).outage_prob
            point_sim = replace(sim,
                                master_seed=row_seed(sim.master_seed, 0, index))
            est = estimate(scenario, point_sim, workers=workers)
            tol = max(0.01, 3.0 * est.stderr)
            diff = abs(ana - est.p_hat)
            points.append(PointComparison(
                label=label, outage_analytic=ana, outage_mc=est.p_hat,
                stderr=est.stderr, tolerance=tol, abs_diff=diff,
                passed=diff <= tol))
        except (ValueError, ArithmeticError) as exc:
            points.append(PointComparison(
                label=label, outage_analytic=None, outage_mc=None,
                stderr=None, tolerance=None, abs_diff=None,
                passed=False, error=str(exc)))
    return ComparisonReport(points=tuple(points))
