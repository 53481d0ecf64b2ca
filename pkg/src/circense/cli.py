"""Command-line entry point.

Subcommands
-----------
estimate      adaptive density estimate from a censored-sample CSV
simulate      generate a censored sample from a scenario
mise          replicated risk study over a grid of sample sizes
oracle-scan   risk of every fixed order next to the adaptive risk
fit-vonmises  Von Mises parameters extracted from the adaptive estimate

Exit codes: 0 success, 1 input or configuration error, 2 statistical
failure (every order singular, or a truncated estimate where a fit was
required).  All file outputs are byte-deterministic for a fixed seed;
the ``CIRCENSE_SEED`` environment variable supplies the seed when
neither the flag nor the config does.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import report
from .basis import dimension
from .evaluation import (
    FitImpossibleError,
    fit_von_mises,
    fixed_m_oracle_scan,
    run_mise,
)
from .io import (
    StudyConfig,
    read_sample_csv,
    read_scenario_config,
    write_density_grid,
    write_mise_report,
    write_oracle_scan,
    write_sample_csv,
    write_selection_trace,
)
from .selection import DEFAULT_GRID_CAP, EstimationImpossibleError, adaptive_estimate
from .simulate import benchmark_scenario, generate_sample, make_rng

__all__ = ["main"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STATISTICAL = 2

DEFAULT_RESOLUTION = 1024


def _resolve_seed(flag: int | None, config: int | None = None) -> int:
    """Seed precedence: flag, then config, then environment, then 0."""
    if flag is not None:
        return flag
    if config is not None:
        return config
    env = os.environ.get("CIRCENSE_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(
                f"CIRCENSE_SEED must be an integer, got {env!r}"
            ) from None
    return 0


def _pick(flag, config_value, default):
    if flag is not None:
        return flag
    if config_value is not None:
        return config_value
    return default


def _load_config(args) -> StudyConfig:
    if args.config is None:
        raise ValueError("a scenario config is required (--config)")
    return read_scenario_config(args.config)


def _cmd_estimate(args) -> int:
    sample = read_sample_csv(args.input)
    est, trace = adaptive_estimate(
        sample,
        args.kappa,
        args.grid_cap if args.grid_cap is not None else DEFAULT_GRID_CAP,
    )
    resolution = (
        args.resolution if args.resolution is not None else DEFAULT_RESOLUTION
    )
    stem = args.output
    write_density_grid(est, resolution, f"{stem}.density.csv")
    write_selection_trace(trace, f"{stem}.trace.csv")
    report.render_density_figure(est, trace, resolution, f"{stem}.density.png")
    print(
        f"selected m = {trace.chosen_m} (dimension "
        f"{dimension(trace.chosen_m)}), kappa = {trace.kappa:.6g} "
        f"({trace.kappa_source}), truncated = "
        f"{str(est.truncated).lower()}"
    )
    print(
        f"wrote {stem}.density.csv, {stem}.trace.csv, {stem}.density.png"
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.config is not None:
        config = read_scenario_config(args.config)
        spec = config.spec
        n = args.n if args.n is not None else config.n_grid[0]
        seed = _resolve_seed(args.seed, config.seed)
    elif args.model is not None:
        spec = benchmark_scenario(args.model)
        n = args.n if args.n is not None else 100
        seed = _resolve_seed(args.seed)
    else:
        raise ValueError("simulate needs --config or --model")
    sample = generate_sample(spec, n, make_rng(seed))
    write_sample_csv(sample, args.output)
    print(
        f"wrote {sample.n} observations "
        f"({sample.censored_fraction:.1%} censored) to {args.output}"
    )
    return EXIT_OK


def _format_mise_table(rows) -> str:
    header = (
        f"{'n':>6} {'N':>5} {'MISE':>10} {'stderr':>10} "
        f"{'% cens.':>8} {'mean dim':>9} {'failures':>9}"
    )
    lines = [header]
    for row in rows:
        lines.append(
            f"{row.n:>6} {row.replications:>5} {row.mise:>10.4f} "
            f"{row.stderr:>10.4f} {100 * row.censored_frac:>7.1f}% "
            f"{row.mean_dim:>9.2f} {row.failures:>9}"
        )
    return "\n".join(lines)


def _cmd_mise(args) -> int:
    config = _load_config(args)
    result = run_mise(
        config.spec,
        config.n_grid,
        _pick(args.replications, config.replications, 100),
        _resolve_seed(args.seed, config.seed),
        scenario=config.label,
        kappa=args.kappa if args.kappa is not None else config.kappa,
        grid_cap=_pick(args.grid_cap, config.grid_cap, DEFAULT_GRID_CAP),
        jobs=args.jobs,
    )
    stem = args.output
    write_mise_report(result, f"{stem}.csv")
    report.render_mise_figure(result, f"{stem}.png")
    print(f"scenario {result.scenario}")
    print(_format_mise_table(result.rows))
    print(f"wrote {stem}.csv, {stem}.png")
    return EXIT_OK


def _cmd_oracle_scan(args) -> int:
    config = _load_config(args)
    n = args.n if args.n is not None else config.n_grid[0]
    scan = fixed_m_oracle_scan(
        config.spec,
        n,
        _pick(args.replications, config.replications, 100),
        _resolve_seed(args.seed, config.seed),
        scenario=config.label,
        grid_cap=_pick(args.grid_cap, config.grid_cap, DEFAULT_GRID_CAP),
        kappa=args.kappa if args.kappa is not None else config.kappa,
        jobs=args.jobs,
    )
    stem = args.output
    write_oracle_scan(scan, f"{stem}.csv")
    report.render_oracle_figure(scan, f"{stem}.png")
    best = scan.best_fixed
    print(
        f"scenario {scan.scenario}, n = {scan.n}: adaptive MISE "
        f"{scan.adaptive_mise:.4f}, best fixed m = {best.m} "
        f"(MISE {best.mise:.4f})"
    )
    print(f"wrote {stem}.csv, {stem}.png")
    return EXIT_OK


def _cmd_fit_vonmises(args) -> int:
    sample = read_sample_csv(args.input)
    est, _ = adaptive_estimate(
        sample,
        args.kappa,
        args.grid_cap if args.grid_cap is not None else DEFAULT_GRID_CAP,
    )
    fit = fit_von_mises(est)
    if fit.flat:
        print("warning: no preferred direction (flat estimate)",
              file=sys.stderr)
    print(f"mu = {fit.mu:.6f}")
    print(f"kappa = {fit.kappa:.6f}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circense",
        description=(
            "Adaptive projection density estimation for arc-censored "
            "circular data."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub, *, seed=False, jobs=False, resolution=False):
        sub.add_argument(
            "--kappa", type=float, default=None,
            help="penalty constant (default: slope-heuristic calibration)",
        )
        sub.add_argument(
            "--grid-cap", type=int, default=None,
            help="largest order scanned (default 25)",
        )
        if seed:
            sub.add_argument(
                "--seed", type=int, default=None,
                help="random seed (falls back to config, then "
                     "CIRCENSE_SEED, then 0)",
            )
        if jobs:
            sub.add_argument(
                "--jobs", type=int, default=None,
                help="worker threads for replications (default: serial)",
            )
        if resolution:
            sub.add_argument(
                "--resolution", type=int, default=None,
                help="grid resolution for tabulated densities (default 1024)",
            )

    estimate = commands.add_parser(
        "estimate", help="estimate a density from a censored-sample CSV"
    )
    estimate.add_argument("--input", required=True, help="sample CSV path")
    estimate.add_argument(
        "--output", default="estimate",
        help="output stem; writes <stem>.density.csv, <stem>.trace.csv, "
             "<stem>.density.png (default 'estimate')",
    )
    common(estimate, resolution=True)
    estimate.set_defaults(handler=_cmd_estimate)

    simulate = commands.add_parser(
        "simulate", help="generate a censored sample from a scenario"
    )
    simulate.add_argument("--config", default=None, help="scenario config")
    simulate.add_argument(
        "--model", type=int, default=None,
        help="benchmark scenario index 1..4 (alternative to --config)",
    )
    simulate.add_argument(
        "--n", type=int, default=None,
        help="sample size (default: first config size, else 100)",
    )
    simulate.add_argument(
        "--seed", type=int, default=None,
        help="random seed (falls back to config, then CIRCENSE_SEED, then 0)",
    )
    simulate.add_argument(
        "--output", default="sample.csv", help="sample CSV path"
    )
    simulate.set_defaults(handler=_cmd_simulate)

    mise = commands.add_parser(
        "mise", help="replicated risk study from a scenario config"
    )
    mise.add_argument("--config", required=True, help="scenario config")
    mise.add_argument(
        "--replications", type=int, default=None,
        help="Monte Carlo replications (default: config, else 100)",
    )
    mise.add_argument(
        "--output", default="mise",
        help="output stem; writes <stem>.csv and <stem>.png "
             "(default 'mise')",
    )
    common(mise, seed=True, jobs=True)
    mise.set_defaults(handler=_cmd_mise)

    scan = commands.add_parser(
        "oracle-scan",
        help="risk of every fixed order next to the adaptive risk",
    )
    scan.add_argument("--config", required=True, help="scenario config")
    scan.add_argument(
        "--n", type=int, default=None,
        help="sample size (default: first config size)",
    )
    scan.add_argument(
        "--replications", type=int, default=None,
        help="Monte Carlo replications (default: config, else 100)",
    )
    scan.add_argument(
        "--output", default="oracle_scan",
        help="output stem; writes <stem>.csv and <stem>.png "
             "(default 'oracle_scan')",
    )
    common(scan, seed=True, jobs=True)
    scan.set_defaults(handler=_cmd_oracle_scan)

    fit = commands.add_parser(
        "fit-vonmises",
        help="Von Mises parameters matched to the adaptive estimate",
    )
    fit.add_argument("--input", required=True, help="sample CSV path")
    common(fit)
    fit.set_defaults(handler=_cmd_fit_vonmises)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.handler(args)
    except (EstimationImpossibleError, FitImpossibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATISTICAL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
