"""Data-driven model selection by penalized contrast minimization.

The selected order minimizes ``contrast + kappa * |G^-1|_op * D_m / (2 pi n)``
over the grid of admissible orders.  The constant ``kappa`` can be supplied,
or calibrated from the sample by a slope heuristic: the contrast decreases
roughly linearly in the penalty shape once the order exceeds the signal
content, and the minimal penalty is that slope, so twice the fitted slope
is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import basis
from .circle import TWO_PI
from .estimator import (
    CensoredSample,
    DensityEstimate,
    FourierCoefficients,
    GramMatrix,
    IllConditionedModelError,
    MomentVector,
    contrast_value,
    solve_coefficients,
    truncate_estimate,
)

__all__ = [
    "KAPPA_THEORETICAL",
    "KAPPA_MIN",
    "KAPPA_MAX",
    "DEFAULT_GRID_CAP",
    "MIN_MODELS_FOR_CALIBRATION",
    "EstimationImpossibleError",
    "ModelGrid",
    "ModelRecord",
    "SelectionTrace",
    "KappaCalibration",
    "inverse_op_norm",
    "penalty",
    "scan_models",
    "calibrate_kappa",
    "select_model",
    "adaptive_estimate",
]

# Sufficient penalty constant certified by the oracle inequality; used as
# the fallback when too few models are available to calibrate.
KAPPA_THEORETICAL = 32.0

# Clamp range for the calibrated constant.
KAPPA_MIN = 1.0
KAPPA_MAX = 1.0e4

# Orders above this are never scanned: the penalty disqualifies complex
# models long before, so enlarging the grid only wastes work.
DEFAULT_GRID_CAP = 25

# Below this many admissible models the slope fit is too short to trust.
MIN_MODELS_FOR_CALIBRATION = 8


class EstimationImpossibleError(Exception):
    """Every order on the grid is numerically singular.

    This signals censoring windows so sparse that no region of the circle
    is covered often enough to invert even the smallest design.
    """


@dataclass(frozen=True)
class ModelGrid:
    """Orders ``1 .. min(floor(n/2) - 1, cap)`` eligible for selection."""

    n: int
    cap: int = DEFAULT_GRID_CAP

    def __post_init__(self) -> None:
        if self.n < 4:
            raise ValueError(f"sample size {self.n} leaves an empty grid")
        if self.cap < 1:
            raise ValueError(f"grid cap must be positive, got {self.cap}")

    @property
    def models(self) -> tuple[int, ...]:
        return tuple(range(1, min(self.n // 2 - 1, self.cap) + 1))


@dataclass(frozen=True)
class ModelRecord:
    """Diagnostics for one order of the scanned grid.

    ``contrast``, ``op_norm_inv`` and ``penalty`` are NaN and ``coeffs``
    is None when the order is inadmissible.
    """

    m: int
    dim: int
    admissible: bool
    contrast: float
    op_norm_inv: float
    penalty: float
    coeffs: FourierCoefficients | None

    @property
    def score(self) -> float:
        """Penalized contrast, the quantity minimized by selection."""
        return self.contrast + self.penalty


@dataclass(frozen=True)
class SelectionTrace:
    """Per-order diagnostics plus the selected order and constant used.

    ``kappa_source`` is "given" for a user-supplied constant, "slope"
    for a calibrated one, and "fallback" when calibration had too few
    admissible orders and the theoretical constant was used instead.
    """

    records: tuple[ModelRecord, ...]
    chosen_m: int
    kappa: float
    kappa_source: str
    n: int

    @property
    def chosen(self) -> ModelRecord:
        for record in self.records:
            if record.m == self.chosen_m:
                return record
        raise LookupError(f"chosen order {self.chosen_m} missing from trace")


@dataclass(frozen=True)
class KappaCalibration:
    """Outcome of the slope heuristic on one scanned grid."""

    kappa: float
    fallback: bool
    slope: float


def inverse_op_norm(gram: GramMatrix) -> float:
    """Operator norm of the inverse Gram matrix, ``1 / lambda_min``.

    Always ≥ 1 (up to rounding): the Gram matrix averages integrals of a
    sub-probability weight, so its eigenvalues never exceed 1.
    """
    if not gram.admissible:
        raise IllConditionedModelError(
            f"gram matrix at order {gram.m} is numerically singular"
        )
    return 1.0 / float(gram.eigenvalues[0])


def penalty(m: int, n: int, op_norm_inv: float, kappa: float) -> float:
    """Penalty term ``kappa * op_norm_inv * (2m + 1) / (2 pi n)``."""
    if kappa <= 0.0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    return kappa * op_norm_inv * basis.dimension(m) / (TWO_PI * n)


def scan_models(
    sample: CensoredSample, grid: ModelGrid
) -> tuple[ModelRecord, ...]:
    """Fit every order on the grid; penalties are left NaN.

    The trigonometric integral tables and the moment vector are computed
    once at the largest order; each smaller design is its leading block,
    since the basis is nested.
    """
    if grid.n != sample.n:
        raise ValueError(f"grid built for n = {grid.n}, sample has {sample.n}")
    m_max = grid.models[-1]
    c, s = basis.trig_integral_tables(
        sample.arc_starts, sample.arc_ends, sample.arc_lengths, 2 * m_max
    )
    full_gram = basis.gram_from_tables(c, s, m_max) / sample.n
    x = sample.observed_angles
    if x.size:
        full_moments = basis.basis_matrix(m_max, x).sum(axis=0) / sample.n
    else:
        full_moments = np.zeros(basis.dimension(m_max))

    records = []
    for m in grid.models:
        d = basis.dimension(m)
        gram = GramMatrix(m, full_gram[:d, :d])
        moments = MomentVector(m, full_moments[:d])
        try:
            coeffs = solve_coefficients(gram, moments)
        except IllConditionedModelError:
            records.append(
                ModelRecord(m, d, False, math.nan, math.nan, math.nan, None)
            )
            continue
        records.append(
            ModelRecord(
                m,
                d,
                True,
                contrast_value(coeffs, moments),
                inverse_op_norm(gram),
                math.nan,
                coeffs,
            )
        )
    return tuple(records)


def calibrate_kappa(
    records: Sequence[ModelRecord],
    n: int,
    window_fraction: float = 1.0 / 3.0,
) -> KappaCalibration:
    """Slope heuristic: fit ``-contrast ~ slope * penalty_shape`` and double.

    The fit runs over the ``window_fraction`` largest admissible orders,
    where the contrast is dominated by its variance part and grows
    linearly in the penalty shape ``op_norm_inv * D_m / (2 pi n)``.  With
    fewer than ``MIN_MODELS_FOR_CALIBRATION`` admissible orders the line
    is unreliable and the theoretical constant is returned with the
    fallback flag set.
    """
    admissible = [r for r in records if r.admissible]
    if len(admissible) < MIN_MODELS_FOR_CALIBRATION:
        return KappaCalibration(KAPPA_THEORETICAL, True, math.nan)
    count = max(2, math.ceil(len(admissible) * window_fraction))
    window = admissible[-count:]
    shapes = np.array(
        [r.op_norm_inv * r.dim / (TWO_PI * n) for r in window]
    )
    losses = np.array([-r.contrast for r in window])
    slope = float(np.polyfit(shapes, losses, 1)[0])
    if not math.isfinite(slope):
        return KappaCalibration(KAPPA_THEORETICAL, True, slope)
    kappa = min(max(2.0 * slope, KAPPA_MIN), KAPPA_MAX)
    return KappaCalibration(kappa, False, slope)


def select_model(
    sample: CensoredSample, grid: ModelGrid, kappa: float | None = None
) -> SelectionTrace:
    """Select the order minimizing the penalized contrast over the grid.

    ``kappa = None`` triggers the slope heuristic.  Ties break to the
    smallest order.

    Raises
    ------
    EstimationImpossibleError
        If no order on the grid is admissible.
    """
    records = scan_models(sample, grid)
    if not any(r.admissible for r in records):
        raise EstimationImpossibleError(
            f"all {len(records)} orders are numerically singular for this "
            "sample; the censoring windows leave part of the circle "
            "essentially unobserved"
        )
    if kappa is None:
        calibration = calibrate_kappa(records, sample.n)
        kappa = calibration.kappa
        source = "fallback" if calibration.fallback else "slope"
    else:
        if kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {kappa}")
        source = "given"

    records = tuple(
        replace(r, penalty=penalty(r.m, sample.n, r.op_norm_inv, kappa))
        if r.admissible
        else r
        for r in records
    )
    chosen = min(
        (r for r in records if r.admissible),
        key=lambda r: (r.score, r.m),
    )
    return SelectionTrace(records, chosen.m, kappa, source, sample.n)


def adaptive_estimate(
    sample: CensoredSample,
    kappa: float | None = None,
    grid_cap: int = DEFAULT_GRID_CAP,
) -> tuple[DensityEstimate, SelectionTrace]:
    """Full pipeline: scan, select, and truncate on one sample."""
    trace = select_model(sample, ModelGrid(sample.n, grid_cap), kappa)
    coeffs = trace.chosen.coeffs
    assert coeffs is not None
    return truncate_estimate(coeffs, sample.n), trace
