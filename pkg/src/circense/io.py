"""Deterministic text formats for samples, grids, traces, and reports.

All files are CSV with a period decimal separator and ``\\n`` line
endings; floating-point values are written with 17 significant digits so
that reading a file back reproduces the exact doubles.  On the wire a
censored observation carries the conventional angle ``-pi`` in its ``x``
field; in memory the censoring status is always an explicit flag.
Scenario studies are configured by a small ``key = value`` text format.
"""

from __future__ import annotations

import csv
import math
from contextlib import nullcontext
from dataclasses import dataclass

from .circle import CensoredObservation, CircularArc, normalize
from .estimator import CensoredSample, DensityEstimate, evaluate_density
from .evaluation import OracleScan, MiseReport, quadrature_grid
from .selection import SelectionTrace
from .simulate import (
    CircularDistribution,
    Mixture,
    ScenarioSpec,
    UniformArc,
    VonMises,
    benchmark_scenario,
)

__all__ = [
    "SENTINEL",
    "StudyConfig",
    "read_sample_csv",
    "write_sample_csv",
    "write_density_grid",
    "write_selection_trace",
    "write_mise_report",
    "write_oracle_scan",
    "parse_distribution",
    "read_scenario_config",
]

# Wire value of the x field for censored rows.
SENTINEL = -math.pi

_SAMPLE_HEADER = ["delta", "x", "l", "u"]


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _open_read(source):
    if hasattr(source, "read"):
        return nullcontext(source)
    return open(source, "r", encoding="utf-8", newline="")


def _open_write(sink):
    if hasattr(sink, "write"):
        return nullcontext(sink)
    return open(sink, "w", encoding="utf-8", newline="")


def read_sample_csv(source) -> CensoredSample:
    """Parse a censored sample from CSV with header ``delta,x,l,u``.

    Angles are decimal radians and are normalized into [0, 2*pi); any
    row with ``delta = 0`` is censored, whatever its ``x`` field says
    (writers emit the conventional ``-pi`` there, but readers do not
    insist on it).  Errors carry the 1-based line number.
    """
    observations = []
    with _open_read(source) as stream:
        reader = csv.reader(stream)
        for number, row in enumerate(reader, start=1):
            if number == 1:
                if [cell.strip() for cell in row] != _SAMPLE_HEADER:
                    raise ValueError(
                        f"line 1: expected header "
                        f"{','.join(_SAMPLE_HEADER)!r}, got {','.join(row)!r}"
                    )
                continue
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(
                    f"line {number}: expected 4 fields, got {len(row)}"
                )
            try:
                delta = int(row[0])
                x, lower, upper = (float(cell) for cell in row[1:])
            except ValueError as exc:
                raise ValueError(f"line {number}: {exc}") from None
            if delta not in (0, 1):
                raise ValueError(
                    f"line {number}: delta must be 0 or 1, got {delta}"
                )
            if normalize(lower) == normalize(upper):
                raise ValueError(
                    f"line {number}: window endpoints coincide ({lower!r})"
                )
            try:
                window = CircularArc(lower, upper)
                observations.append(
                    CensoredObservation(
                        bool(delta), x if delta else 0.0, window
                    )
                )
            except ValueError as exc:
                raise ValueError(f"line {number}: {exc}") from None
    return CensoredSample(observations)


def write_sample_csv(sample: CensoredSample, sink) -> None:
    """Write a censored sample; censored rows get ``-pi`` in the x field."""
    with _open_write(sink) as stream:
        stream.write(",".join(_SAMPLE_HEADER) + "\n")
        for obs in sample.observations:
            x = obs.angle if obs.observed else SENTINEL
            stream.write(
                f"{int(obs.observed)},{_fmt(x)},"
                f"{_fmt(obs.arc.start)},{_fmt(obs.arc.end)}\n"
            )


def write_density_grid(
    est: DensityEstimate, resolution: int, sink
) -> None:
    """Tabulate the estimate on the uniform grid of the given resolution."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    grid = quadrature_grid(resolution)
    values = evaluate_density(est, grid)
    with _open_write(sink) as stream:
        stream.write("x,density\n")
        for x, value in zip(grid, values):
            stream.write(f"{_fmt(x)},{_fmt(value)}\n")


def write_selection_trace(trace: SelectionTrace, sink) -> None:
    """One row per scanned order with its diagnostics and a chosen marker."""
    with _open_write(sink) as stream:
        stream.write("m,dim,admissible,contrast,op_norm_inv,penalty,chosen\n")
        for record in trace.records:
            stream.write(
                f"{record.m},{record.dim},"
                f"{str(record.admissible).lower()},"
                f"{_fmt(record.contrast)},{_fmt(record.op_norm_inv)},"
                f"{_fmt(record.penalty)},"
                f"{str(record.m == trace.chosen_m).lower()}\n"
            )


def write_mise_report(report: MiseReport, sink) -> None:
    """Aggregated risk rows of a replicated study."""
    with _open_write(sink) as stream:
        stream.write(
            "scenario,n,N,mise,stderr,censored_frac,mean_dim,failures\n"
        )
        for row in report.rows:
            stream.write(
                f"{report.scenario},{row.n},{row.replications},"
                f"{_fmt(row.mise)},{_fmt(row.stderr)},"
                f"{_fmt(row.censored_frac)},{_fmt(row.mean_dim)},"
                f"{row.failures}\n"
            )


def write_oracle_scan(scan: OracleScan, sink) -> None:
    """Per-order risks; the adaptive risk is repeated on every row."""
    with _open_write(sink) as stream:
        stream.write("scenario,n,N,m,dim,mise,failures,adaptive_mise\n")
        for row in scan.rows:
            stream.write(
                f"{scan.scenario},{scan.n},{scan.replications},"
                f"{row.m},{row.dim},{_fmt(row.mise)},{row.failures},"
                f"{_fmt(scan.adaptive_mise)}\n"
            )


@dataclass(frozen=True)
class StudyConfig:
    """A replicated study parsed from a scenario config file."""

    label: str
    spec: ScenarioSpec
    n_grid: tuple[int, ...]
    replications: int
    seed: int | None
    kappa: float | None
    grid_cap: int | None


def parse_distribution(text: str) -> CircularDistribution:
    """Parse a distribution expression.

    Grammar (angles in radians)::

        vonmises <mu> <kappa>
        uniform <start> <end>           # uniform on the arc [start, end]
        <w> vonmises <mu> <kappa> + ... # mixture with weights w

    """
    parts = [p.strip() for p in text.split("+")]
    if len(parts) > 1 or parts[0].split()[0] not in ("vonmises", "uniform"):
        components = []
        for part in parts:
            tokens = part.split()
            if len(tokens) != 4 or tokens[1] != "vonmises":
                raise ValueError(
                    f"mixture component must read 'w vonmises mu kappa', "
                    f"got {part!r}"
                )
            weight, mu, kappa = (
                float(tokens[0]), float(tokens[2]), float(tokens[3])
            )
            components.append((weight, VonMises(mu, kappa)))
        return Mixture(tuple(components))
    tokens = parts[0].split()
    if tokens[0] == "vonmises":
        if len(tokens) != 3:
            raise ValueError(f"vonmises takes 2 numbers, got {text!r}")
        return VonMises(float(tokens[1]), float(tokens[2]))
    if len(tokens) != 3:
        raise ValueError(f"uniform takes 2 numbers, got {text!r}")
    return UniformArc(CircularArc(float(tokens[1]), float(tokens[2])))


def read_scenario_config(source) -> StudyConfig:
    """Parse a ``key = value`` study description.

    Keys: either ``model = 1..4`` (a benchmark scenario) or explicit
    ``target`` / ``lower`` / ``upper`` distribution expressions, with an
    optional ``offset`` replacing ``upper`` by the sliding bound
    ``U = L - offset``.  Remaining keys: ``n`` (comma-separated sizes),
    ``replications``, ``seed``, ``kappa``, ``grid_cap``, ``label``.
    Lines starting with ``#`` are comments.
    """
    pairs: dict[str, str] = {}
    with _open_read(source) as stream:
        for number, raw in enumerate(stream, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(
                    f"line {number}: expected 'key = value', got {raw!r}"
                )
            key, value = (side.strip() for side in line.split("=", 1))
            if key in pairs:
                raise ValueError(f"line {number}: duplicate key {key!r}")
            pairs[key] = value

    known = {
        "model", "target", "lower", "upper", "offset", "n",
        "replications", "seed", "kappa", "grid_cap", "label",
    }
    unknown = sorted(set(pairs) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")

    if "model" in pairs:
        if not {"target", "lower", "upper", "offset"}.isdisjoint(pairs):
            raise ValueError(
                "'model' excludes explicit distribution keys"
            )
        index = int(pairs["model"])
        spec = benchmark_scenario(index)
        label = pairs.get("label", f"model{index}")
    else:
        if "target" not in pairs or "lower" not in pairs:
            raise ValueError("config needs 'model' or 'target' and 'lower'")
        offset = float(pairs["offset"]) if "offset" in pairs else None
        upper = (
            parse_distribution(pairs["upper"]) if "upper" in pairs else None
        )
        if offset is None and upper is None:
            raise ValueError("config needs 'upper' or 'offset'")
        spec = ScenarioSpec(
            parse_distribution(pairs["target"]),
            parse_distribution(pairs["lower"]),
            upper,
            offset,
        )
        label = pairs.get("label", "custom")

    if "n" not in pairs:
        raise ValueError("config needs 'n' (comma-separated sample sizes)")
    n_grid = tuple(int(part) for part in pairs["n"].split(","))
    if any(n < 4 for n in n_grid):
        raise ValueError(f"sample sizes must be at least 4, got {n_grid}")

    return StudyConfig(
        label=label,
        spec=spec,
        n_grid=n_grid,
        replications=int(pairs.get("replications", "100")),
        seed=int(pairs["seed"]) if "seed" in pairs else None,
        kappa=float(pairs["kappa"]) if "kappa" in pairs else None,
        grid_cap=int(pairs["grid_cap"]) if "grid_cap" in pairs else None,
    )
