"""Command-line front end.

Subcommands:
  point   - outage/throughput of a single configured scenario
  sweep   - parameter sweep to CSV (plus a .meta.json sidecar)
  verify  - analytic vs Monte-Carlo agreement on a verification grid
  preset  - run a packaged figure-style sweep (fig2, fig3, fig4)

Exit codes: 0 success, 2 config error, 3 numeric error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from . import __version__, analytic
from .config import (ConfigError, load_config, parse_scenario, parse_sim,
                     parse_sweep, scenario_to_dict)
from .model import ValidationError
from .montecarlo import SimConfig, estimate
from .sweep import (ENGINES, SweepSpec, compare_engines,
                    default_verification_grid, run_sweep, write_csv,
                    write_metadata)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

_ENGINE_CHOICES = {"analytic": ("analytic",), "mc": ("montecarlo",),
                   "both": ENGINES}

PRESETS = ("fig2", "fig3", "fig4")


def _add_common(parser: argparse.ArgumentParser, config_required: bool
                ) -> None:
    parser.add_argument("--config", required=config_required,
                        help="path to a JSON experiment config")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--trials", type=int,
                        help="override the Monte-Carlo trial count")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for Monte-Carlo trials")
    parser.add_argument("--engine", choices=sorted(_ENGINE_CHOICES),
                        default="both", help="which engines to run")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xroad",
        description="Outage probability of a link near a road intersection "
                    "with Poisson fields of interfering vehicles.")
    parser.add_argument("--version", action="version",
                        version=f"xroad {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="evaluate a single scenario")
    _add_common(p_point, config_required=True)

    p_sweep = sub.add_parser("sweep", help="run a configured sweep to CSV")
    _add_common(p_sweep, config_required=True)

    p_verify = sub.add_parser(
        "verify", help="check analytic vs Monte-Carlo agreement")
    _add_common(p_verify, config_required=False)

    p_preset = sub.add_parser("preset", help="run a packaged figure sweep")
    p_preset.add_argument("name", choices=PRESETS)
    _add_common(p_preset, config_required=False)
    return parser


def _load_preset(name: str) -> dict:
    text = (resources.files("xroad") / "presets" / f"{name}.json").read_text(
        encoding="utf-8")
    return json.loads(text)


def _engines(args) -> tuple[str, ...]:
    return _ENGINE_CHOICES[args.engine]


def _metadata(config_echo: dict, sim: SimConfig,
              engines: tuple[str, ...]) -> dict:
    return {
        "tool": "xroad",
        "version": __version__,
        "engines": list(engines),
        "seed": sim.master_seed,
        "trials": sim.trials,
        "half_length": sim.half_length,
        "confidence": sim.confidence,
        "config": config_echo,
    }


def _cmd_point(args) -> int:
    raw = load_config(args.config)
    scenario = parse_scenario(raw)
    sim = parse_sim(raw.get("sim", {}), seed=args.seed, trials=args.trials)
    engines = _engines(args)
    report: dict[str, object] = {}
    if "analytic" in engines:
        res = analytic.outage_probability(scenario)
        report["outage_analytic"] = res.outage_prob
        report["throughput_analytic"] = res.throughput
        print(f"outage (analytic)      {res.outage_prob:.6f}")
        print(f"throughput (analytic)  {res.throughput:.6f} bit/s/Hz")
    if "montecarlo" in engines:
        est = estimate(scenario, sim, workers=args.workers)
        report.update(outage_mc=est.p_hat, mc_stderr=est.stderr,
                      ci_low=est.ci_low, ci_high=est.ci_high,
                      trials=est.trials)
        pct = 100.0 * sim.confidence
        print(f"outage (monte-carlo)   {est.p_hat:.6f} "
              f"(stderr {est.stderr:.6f}, {pct:.0f}% CI "
              f"[{est.ci_low:.6f}, {est.ci_high:.6f}], "
              f"{est.trials} trials, seed {est.seed})")
        print(f"throughput (mc)        {est.throughput:.6f} bit/s/Hz")
    if args.out:
        from .sweep import SweepRow
        row = SweepRow(variant="point", axis="none", value=0.0,
                       outage_analytic=report.get("outage_analytic"),
                       throughput_analytic=report.get("throughput_analytic"),
                       outage_mc=report.get("outage_mc"),
                       mc_stderr=report.get("mc_stderr"),
                       ci_low=report.get("ci_low"),
                       ci_high=report.get("ci_high"),
                       trials=report.get("trials"))
        write_csv([row], args.out)
        write_metadata(args.out,
                       _metadata(scenario_to_dict(scenario), sim, engines))
    return EXIT_OK


def _run_sweep_config(raw: dict, args, default_out: str) -> int:
    scenario = parse_scenario(raw)
    if "sweep" not in raw:
        raise ConfigError("config has no 'sweep' section")
    spec = parse_sweep(raw["sweep"], scenario)
    spec = SweepSpec(base=spec.base, axis=spec.axis, values=spec.values,
                     engines=_engines(args) if args.engine != "both"
                     else spec.engines,
                     variants=spec.variants, lane_spacing=spec.lane_spacing)
    sim = parse_sim(raw.get("sim", {}), seed=args.seed, trials=args.trials)
    rows = run_sweep(spec, sim, workers=args.workers)
    out = args.out or default_out
    write_csv(rows, out)
    echo = {
        "scenario": scenario_to_dict(scenario),
        "sweep": {
            "axis": spec.axis,
            "values": list(spec.values),
            "engines": list(spec.engines),
            "lane_spacing": spec.lane_spacing,
            "variants": [v.label for v in spec.variants],
        },
    }
    write_metadata(out, _metadata(echo, sim, spec.engines))
    failures = [r for r in rows if r.error]
    print(f"wrote {len(rows)} rows to {out}"
          + (f" ({len(failures)} failed)" if failures else ""))
    for row in failures:
        print(f"  FAILED {row.variant} {row.axis}={row.value}: {row.error}")
    return EXIT_NUMERIC if failures else EXIT_OK


def _cmd_sweep(args) -> int:
    return _run_sweep_config(load_config(args.config), args, "sweep.csv")


def _cmd_preset(args) -> int:
    raw = _load_preset(args.name)
    return _run_sweep_config(raw, args, f"{args.name}.csv")


def _cmd_verify(args) -> int:
    if args.config:
        raw = load_config(args.config)
        scenario = parse_scenario(raw)
        if "sweep" not in raw:
            raise ConfigError("verify with --config needs a 'sweep' section")
        spec = parse_sweep(raw["sweep"], scenario)
        from .sweep import apply_axis_value, apply_variant
        grid = [(f"{variant.label} {spec.axis}={value:g}",
                 apply_axis_value(apply_variant(spec.base, variant),
                                  spec.axis, value, spec.lane_spacing))
                for variant in spec.variants for value in spec.values]
        sim = parse_sim(raw.get("sim", {}), seed=args.seed,
                        trials=args.trials)
    else:
        grid = default_verification_grid()
        sim = SimConfig(trials=args.trials or 50_000, half_length=4000.0,
                        master_seed=args.seed or 0)
    report = compare_engines(grid, sim, workers=args.workers)
    print(f"{'point':38s} {'analytic':>10s} {'mc':>10s} {'diff':>9s} "
          f"{'tol':>9s}  result")
    for pt in report.points:
        if pt.error:
            print(f"{pt.label:38s} {'-':>10s} {'-':>10s} {'-':>9s} {'-':>9s} "
                  f" FAIL ({pt.error})")
            continue
        verdict = "pass" if pt.passed else "FAIL"
        print(f"{pt.label:38s} {pt.outage_analytic:10.6f} "
              f"{pt.outage_mc:10.6f} {pt.abs_diff:9.6f} {pt.tolerance:9.6f} "
              f" {verdict}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"point": _cmd_point, "sweep": _cmd_sweep,
                "verify": _cmd_verify, "preset": _cmd_preset}
    try:
        return handlers[args.command](args)
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (analytic.QuadratureError, analytic.ConsistencyError,
            ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
