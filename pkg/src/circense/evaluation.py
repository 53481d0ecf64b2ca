"""Monte Carlo risk evaluation and parametric fit extraction.

Measures the integrated squared error of estimates against known truths,
runs replicated studies of the adaptive estimator (and of every fixed
order, as an oracle benchmark), and extracts Von Mises parameters from a
fitted density through its trigonometric moments.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import basis
from .circle import TWO_PI, normalize
from .estimator import (
    CensoredSample,
    DensityEstimate,
    GramMatrix,
    evaluate_density,
    truncate_estimate,
)
from .selection import (
    DEFAULT_GRID_CAP,
    EstimationImpossibleError,
    ModelGrid,
    adaptive_estimate,
    scan_models,
)
from .simulate import (
    CircularDistribution,
    Rng,
    ScenarioSpec,
    bessel_i0,
    bessel_i1,
    generate_sample,
    make_rng,
)

__all__ = [
    "QUADRATURE_NODES",
    "FLAT_RESULTANT",
    "FitImpossibleError",
    "MiseRow",
    "MiseReport",
    "OracleRow",
    "OracleScan",
    "VonMisesFit",
    "quadrature_grid",
    "integrate_periodic",
    "integrated_squared_error",
    "run_mise",
    "fixed_m_oracle_scan",
    "bessel_ratio",
    "concentration_from_resultant",
    "fit_von_mises",
    "population_gram",
]

# Node count for all quadrature on [0, 2*pi).  The trapezoid rule on a
# periodic integrand converges spectrally, so this is far beyond the
# accuracy of anything integrated here.
QUADRATURE_NODES = 4096

# Resultant lengths at or below this are treated as "no preferred
# direction": the concentration is reported as exactly zero.
FLAT_RESULTANT = 1e-12

# Beyond this argument the Bessel series overflows; the ratio I1/I0 is
# within 1e-12 of its asymptotic expansion there.
_ASYMPTOTIC_ARG = 700.0


class FitImpossibleError(Exception):
    """No parametric fit can be extracted (the estimate was truncated)."""


@dataclass(frozen=True)
class MiseRow:
    """Aggregated risk of the adaptive estimator at one sample size."""

    n: int
    replications: int
    mise: float
    stderr: float
    censored_frac: float
    mean_dim: float
    failures: int


@dataclass(frozen=True)
class MiseReport:
    """Risk summary of one scenario over a grid of sample sizes."""

    scenario: str
    rows: tuple[MiseRow, ...]


@dataclass(frozen=True)
class OracleRow:
    """Risk of the estimator at one fixed order."""

    m: int
    dim: int
    mise: float
    failures: int


@dataclass(frozen=True)
class OracleScan:
    """Fixed-order risks next to the adaptive risk on the same samples."""

    scenario: str
    n: int
    replications: int
    adaptive_mise: float
    adaptive_failures: int
    rows: tuple[OracleRow, ...]

    @property
    def best_fixed(self) -> OracleRow:
        candidates = [r for r in self.rows if math.isfinite(r.mise)]
        if not candidates:
            raise LookupError("no order produced a finite risk")
        return min(candidates, key=lambda r: (r.mise, r.m))


@dataclass(frozen=True)
class VonMisesFit:
    """Von Mises parameters matched to an estimate's first moments.

    ``flat`` marks estimates without a preferred direction; then the
    concentration is zero and the mean direction is reported as 0 by
    convention.
    """

    mu: float
    kappa: float
    resultant: float
    flat: bool


def quadrature_grid(resolution: int = QUADRATURE_NODES) -> np.ndarray:
    """Uniform nodes ``j * 2*pi / resolution`` for ``j = 0 .. resolution-1``."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    return np.arange(resolution) * (TWO_PI / resolution)


def integrate_periodic(values: np.ndarray) -> float:
    """Integral over [0, 2*pi) of values sampled on the uniform grid.

    On a periodic integrand the composite trapezoid rule collapses to
    the mean of the samples times the period.
    """
    return float(np.mean(values)) * TWO_PI


def integrated_squared_error(
    est: DensityEstimate,
    truth: CircularDistribution,
    resolution: int = QUADRATURE_NODES,
) -> float:
    """Quadrature value of the squared L2 distance between estimate and truth."""
    grid = quadrature_grid(resolution)
    diff = evaluate_density(est, grid) - truth.density(grid)
    return integrate_periodic(diff * diff)


def _sorted_mean(values: Sequence[float]) -> float:
    if not values:
        return math.nan
    return math.fsum(sorted(values)) / len(values)


def _sorted_stderr(values: Sequence[float], mean: float) -> float:
    if len(values) < 2:
        return math.nan
    squares = sorted((v - mean) ** 2 for v in values)
    return math.sqrt(math.fsum(squares) / (len(values) - 1) / len(values))


@dataclass(frozen=True)
class _Replication:
    ise: float
    censored_frac: float
    dim: int
    failed: bool


def _run_replication(
    spec: ScenarioSpec,
    n: int,
    seed: int,
    stream: int,
    kappa: float | None,
    grid_cap: int,
    estimator: Callable[[CensoredSample], DensityEstimate] | None,
) -> _Replication:
    rng = make_rng(seed, stream)
    generated = generate_sample(spec, n, rng)
    try:
        if estimator is None:
            est, trace = adaptive_estimate(generated, kappa, grid_cap)
            dim = basis.dimension(trace.chosen_m)
        else:
            est = estimator(generated)
            dim = basis.dimension(est.coeffs.m)
    except EstimationImpossibleError:
        return _Replication(math.nan, generated.censored_fraction, 0, True)
    ise = integrated_squared_error(est, spec.target)
    return _Replication(ise, generated.censored_fraction, dim, False)


def run_mise(
    spec: ScenarioSpec,
    n_grid: Sequence[int],
    replications: int,
    seed: int,
    scenario: str = "custom",
    kappa: float | None = None,
    grid_cap: int = DEFAULT_GRID_CAP,
    jobs: int | None = None,
    estimator: Callable[[CensoredSample], DensityEstimate] | None = None,
) -> MiseReport:
    """Replicated risk study of the adaptive estimator.

    For each sample size, ``replications`` independent samples are
    generated on separate random streams, estimated (adaptively unless a
    custom ``estimator`` callable is plugged in), and scored against the
    scenario's target.  Replications whose every order is singular are
    counted in ``failures`` and excluded from the risk mean.  Aggregation
    sums in sorted order, so the report is identical however the
    replications were scheduled.
    """
    if replications < 2:
        raise ValueError(
            f"need at least 2 replications, got {replications}"
        )
    if not n_grid:
        raise ValueError("empty sample-size grid")
    rows = []
    for row_index, n in enumerate(n_grid):
        streams = [row_index * replications + r for r in range(replications)]

        def run(stream: int, n: int = n) -> _Replication:
            return _run_replication(
                spec, n, seed, stream, kappa, grid_cap, estimator
            )

        if jobs is not None and jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(run, streams))
        else:
            outcomes = [run(stream) for stream in streams]

        ises = [o.ise for o in outcomes if not o.failed]
        mise = _sorted_mean(ises)
        rows.append(
            MiseRow(
                n=n,
                replications=replications,
                mise=mise,
                stderr=_sorted_stderr(ises, mise),
                censored_frac=_sorted_mean(
                    [o.censored_frac for o in outcomes]
                ),
                mean_dim=_sorted_mean(
                    [float(o.dim) for o in outcomes if not o.failed]
                ),
                failures=sum(o.failed for o in outcomes),
            )
        )
    return MiseReport(scenario, tuple(rows))


def fixed_m_oracle_scan(
    spec: ScenarioSpec,
    n: int,
    replications: int,
    seed: int,
    scenario: str = "custom",
    orders: Sequence[int] | None = None,
    grid_cap: int = DEFAULT_GRID_CAP,
    kappa: float | None = None,
    jobs: int | None = None,
) -> OracleScan:
    """Risk of every fixed order next to the adaptive risk, same samples.

    The streams match :func:`run_mise` with a one-point sample-size grid,
    so adaptive and fixed-order risks are computed on identical data.
    Orders that are singular on a replication are excluded from that
    order's mean and counted as failures.
    """
    if replications < 2:
        raise ValueError(
            f"need at least 2 replications, got {replications}"
        )
    grid = ModelGrid(n, grid_cap)
    if orders is None:
        orders = grid.models
    else:
        orders = tuple(orders)
        missing = [m for m in orders if m not in grid.models]
        if missing:
            raise ValueError(f"orders {missing} exceed the grid for n = {n}")

    def run(stream: int) -> tuple[_Replication, dict[int, float]]:
        rng = make_rng(seed, stream)
        generated = generate_sample(spec, n, rng)
        try:
            est, _ = adaptive_estimate(generated, kappa, grid_cap)
            adaptive = _Replication(
                integrated_squared_error(est, spec.target),
                generated.censored_fraction,
                0,
                False,
            )
        except EstimationImpossibleError:
            adaptive = _Replication(
                math.nan, generated.censored_fraction, 0, True
            )
        fixed = {}
        for record in scan_models(generated, grid):
            if record.m not in orders:
                continue
            if not record.admissible:
                fixed[record.m] = math.nan
                continue
            fixed_est = truncate_estimate(record.coeffs, n)
            fixed[record.m] = integrated_squared_error(
                fixed_est, spec.target
            )
        return adaptive, fixed

    streams = list(range(replications))
    if jobs is not None and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, streams))
    else:
        outcomes = [run(stream) for stream in streams]

    adaptive_ises = [a.ise for a, _ in outcomes if not a.failed]
    rows = []
    for m in orders:
        ises = [
            fixed[m]
            for _, fixed in outcomes
            if math.isfinite(fixed[m])
        ]
        rows.append(
            OracleRow(
                m=m,
                dim=basis.dimension(m),
                mise=_sorted_mean(ises),
                failures=replications - len(ises),
            )
        )
    return OracleScan(
        scenario=scenario,
        n=n,
        replications=replications,
        adaptive_mise=_sorted_mean(adaptive_ises),
        adaptive_failures=replications - len(adaptive_ises),
        rows=tuple(rows),
    )


def bessel_ratio(k: float) -> float:
    """Ratio ``I1(k) / I0(k)``, the mean resultant length of M(mu, k)."""
    if k < 0.0:
        raise ValueError(f"concentration must be non-negative, got {k}")
    if k > _ASYMPTOTIC_ARG:
        inv = 1.0 / k
        return 1.0 - 0.5 * inv - 0.125 * inv**2 - 0.125 * inv**3
    return bessel_i1(k) / bessel_i0(k)


def concentration_from_resultant(rbar: float) -> float:
    """Invert the resultant map: the ``k`` with ``I1(k)/I0(k) = rbar``.

    Safeguarded Newton iteration (falling back to bisection whenever a
    step leaves the bracket), using the derivative identity
    ``A1'(k) = 1 - A1(k)/k - A1(k)^2``; converges to 1e-10.
    """
    if not 0.0 <= rbar <= 1.0:
        raise ValueError(f"resultant length must be in [0, 1], got {rbar}")
    if rbar <= FLAT_RESULTANT:
        return 0.0
    rbar = min(rbar, 1.0 - 1e-15)
    lo = 0.0
    hi = 1.0
    while bessel_ratio(hi) < rbar:
        hi *= 2.0
    # classical starting guess, clipped into the bracket
    k = rbar * (2.0 - rbar**2) / (1.0 - rbar**2)
    k = min(max(k, 1e-12), hi)
    for _ in range(200):
        residual = bessel_ratio(k) - rbar
        if abs(residual) <= 1e-14:
            break
        if residual > 0.0:
            hi = k
        else:
            lo = k
        ratio = bessel_ratio(k)
        derivative = 1.0 - ratio / k - ratio**2
        step = residual / derivative if derivative > 0.0 else math.inf
        candidate = k - step
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        if abs(candidate - k) <= 1e-10 * max(1.0, k):
            k = candidate
            break
        k = candidate
    return k


def fit_von_mises(
    est: DensityEstimate, resolution: int = QUADRATURE_NODES
) -> VonMisesFit:
    """Von Mises parameters whose first moments match the estimate's.

    The trigonometric moments of the estimate are integrated by
    quadrature, the mean direction is their argument, and the
    concentration inverts the resultant map.

    Raises
    ------
    FitImpossibleError
        If the estimate was truncated to zero.
    """
    if est.truncated:
        raise FitImpossibleError(
            "the estimate was truncated to zero; it has no moments to match"
        )
    grid = quadrature_grid(resolution)
    values = evaluate_density(est, grid)
    total = integrate_periodic(values)
    cos_moment = integrate_periodic(np.cos(grid) * values)
    sin_moment = integrate_periodic(np.sin(grid) * values)
    rbar = min(
        1.0, math.hypot(cos_moment, sin_moment) / max(total, 1e-9)
    )
    if rbar <= FLAT_RESULTANT:
        return VonMisesFit(0.0, 0.0, rbar, True)
    return VonMisesFit(
        normalize(math.atan2(sin_moment, cos_moment)),
        concentration_from_resultant(rbar),
        rbar,
        False,
    )


def population_gram(
    spec: ScenarioSpec,
    m: int,
    rng: Rng,
    windows: int = 4096,
    resolution: int = QUADRATURE_NODES,
) -> GramMatrix:
    """Population Gram matrix estimated by integrating against coverage.

    The coverage function (probability that each grid point falls in the
    observation window) is approximated over ``windows`` Monte Carlo
    window draws; the matrix is then the quadrature of basis products
    weighted by it.  A simulation oracle, not part of estimation.
    """
    if spec.fixed_offset is not None:
        lower = spec.lower_law.draw(rng, windows)
        upper = (lower - spec.fixed_offset) % TWO_PI
    else:
        lower = spec.lower_law.draw(rng, windows)
        upper = spec.upper_law.draw(rng, windows)
    grid = quadrature_grid(resolution)
    plain = lower <= upper
    inside_plain = (
        (grid[:, None] >= lower[None, plain])
        & (grid[:, None] <= upper[None, plain])
    )
    wrapped = ~plain
    inside_wrapped = (
        (grid[:, None] >= lower[None, wrapped])
        | (grid[:, None] <= upper[None, wrapped])
    )
    coverage = (
        inside_plain.sum(axis=1) + inside_wrapped.sum(axis=1)
    ) / windows
    phi = basis.basis_matrix(m, grid)
    entries = (phi * coverage[:, None]).T @ phi * (TWO_PI / resolution)
    return GramMatrix(m, 0.5 * (entries + entries.T))
