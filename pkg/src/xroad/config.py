"""JSON experiment configuration.

A config file mirrors the Scenario structure in nested sections.  Unknown
keys are rejected so typos in experiment definitions fail loudly instead of
silently falling back to defaults.  SIR thresholds are written in dB and
converted to linear scale on load.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .model import (CHANNEL_PRESETS, ChannelParams, DestinationGeometry,
                    LinkSpec, RoadLayout, Scenario, validate_scenario)
from .montecarlo import SimConfig
from .sweep import AXES, ENGINES, SweepSpec, Variant, validate_sweep


class ConfigError(ValueError):
    """A config file failed to parse or validate; message names the field."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def _check_keys(obj: dict, where: str, allowed: set[str],
                required: set[str] = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in {where}")
    for key in required:
        if key not in obj:
            raise ConfigError(f"missing key '{key}' in {where}")


def _number(obj: dict, where: str, key: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"missing key '{key}' in {where}")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(value)


def parse_channel(obj: dict, where: str = "channel") -> ChannelParams:
    if "preset" in obj:
        _check_keys(obj, where, {"preset"})
        name = obj["preset"]
        if name not in CHANNEL_PRESETS:
            raise ConfigError(
                f"{where}.preset must be one of {sorted(CHANNEL_PRESETS)}")
        return CHANNEL_PRESETS[name]
    _check_keys(obj, where, {"alpha", "m", "mu"}, {"alpha", "m"})
    m = _number(obj, where, "m")
    if m != int(m):
        raise ConfigError(f"{where}.m: non-integer Nakagami m")
    return ChannelParams(alpha=_number(obj, where, "alpha"), m=int(m),
                         mu=_number(obj, where, "mu", 1.0))


def _offsets(obj: dict, where: str, key: str,
             default: tuple[float, ...]) -> tuple[float, ...]:
    if key not in obj:
        return default
    value = obj[key]
    if not isinstance(value, list) or any(
            isinstance(w, bool) or not isinstance(w, (int, float))
            for w in value):
        raise ConfigError(f"{where}.{key} must be a list of numbers")
    return tuple(float(w) for w in value)


def parse_layout(obj: dict, where: str = "layout") -> RoadLayout:
    _check_keys(obj, where, {"lanes_x", "lanes_y", "lambda_x", "lambda_y"})
    return RoadLayout(
        lanes_x=_offsets(obj, where, "lanes_x", (0.0,)),
        lanes_y=_offsets(obj, where, "lanes_y", (0.0,)),
        lambda_x=_number(obj, where, "lambda_x", 0.0),
        lambda_y=_number(obj, where, "lambda_y", 0.0),
    )


_SCENARIO_KEYS = {"channel", "geometry", "link", "layout", "aloha_p",
                  "sir_threshold_db"}


def parse_scenario(obj: dict) -> Scenario:
    _check_keys(obj, "scenario", _SCENARIO_KEYS | {"sim", "sweep"},
                {"channel", "link"})
    geometry = obj.get("geometry", {})
    _check_keys(geometry, "geometry", {"d", "theta"})
    link = obj["link"]
    _check_keys(link, "link", {"r"}, {"r"})
    scenario = Scenario(
        channel=parse_channel(obj["channel"]),
        geometry=DestinationGeometry(d=_number(geometry, "geometry", "d", 0.0),
                                     theta=_number(geometry, "geometry",
                                                   "theta", 0.0)),
        link=LinkSpec(r=_number(link, "link", "r")),
        layout=parse_layout(obj.get("layout", {})),
        p=_number(obj, "scenario", "aloha_p", 1.0),
        theta_threshold=db_to_linear(
            _number(obj, "scenario", "sir_threshold_db", 0.0)),
    )
    return validate_scenario(scenario)


def parse_sim(obj: dict, seed: int | None = None,
              trials: int | None = None) -> SimConfig:
    _check_keys(obj, "sim", {"trials", "half_length", "seed", "confidence"})
    cfg_trials = trials if trials is not None else int(
        _number(obj, "sim", "trials", 50_000))
    cfg_seed = seed if seed is not None else int(
        _number(obj, "sim", "seed", 0))
    try:
        return SimConfig(
            trials=cfg_trials,
            half_length=_number(obj, "sim", "half_length", 1000.0),
            master_seed=cfg_seed,
            confidence=_number(obj, "sim", "confidence", 0.95),
        )
    except ValueError as exc:
        raise ConfigError(f"sim: {exc}") from exc


def parse_variant(obj: dict, where: str) -> Variant:
    _check_keys(obj, where, {"label", "channel", "layout"}, {"label"})
    if not isinstance(obj["label"], str) or not obj["label"]:
        raise ConfigError(f"{where}.label must be a nonempty string")
    channel = (parse_channel(obj["channel"], f"{where}.channel")
               if "channel" in obj else None)
    layout = (parse_layout(obj["layout"], f"{where}.layout")
              if "layout" in obj else None)
    return Variant(label=obj["label"], channel=channel, layout=layout)


def parse_sweep(obj: dict, base: Scenario) -> SweepSpec:
    _check_keys(obj, "sweep",
                {"axis", "values", "engines", "variants", "lane_spacing"},
                {"axis", "values"})
    axis = obj["axis"]
    if axis not in AXES:
        raise ConfigError(f"sweep.axis must be one of {AXES}")
    values = obj["values"]
    if not isinstance(values, list) or any(
            isinstance(v, bool) or not isinstance(v, (int, float))
            for v in values):
        raise ConfigError("sweep.values must be a list of numbers")
    engines = obj.get("engines", list(ENGINES))
    if (not isinstance(engines, list)
            or any(e not in ENGINES for e in engines)):
        raise ConfigError(f"sweep.engines entries must come from {ENGINES}")
    raw_variants = obj.get("variants", [{"label": "base"}])
    if not isinstance(raw_variants, list) or not raw_variants:
        raise ConfigError("sweep.variants must be a nonempty list")
    variants = tuple(parse_variant(v, f"sweep.variants[{i}]")
                     for i, v in enumerate(raw_variants))
    spec = SweepSpec(
        base=base,
        axis=axis,
        values=tuple(float(v) for v in values),
        engines=tuple(engines),
        variants=variants,
        lane_spacing=_number(obj, "sweep", "lane_spacing", 3.5),
    )
    try:
        return validate_sweep(spec)
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc


def load_config(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config root must be an object")
    return obj


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical dict form of a validated scenario, for metadata echoes."""
    ch = scenario.channel
    return {
        "channel": {"alpha": ch.alpha, "m": ch.m, "mu": ch.mu},
        "geometry": {"d": scenario.geometry.d, "theta": scenario.geometry.theta},
        "link": {"r": scenario.link.r},
        "layout": {
            "lanes_x": list(scenario.layout.lanes_x),
            "lanes_y": list(scenario.layout.lanes_y),
            "lambda_x": scenario.layout.lambda_x,
            "lambda_y": scenario.layout.lambda_y,
        },
        "aloha_p": scenario.p,
        "sir_threshold_db": 10.0 * math.log10(scenario.theta_threshold),
    }
