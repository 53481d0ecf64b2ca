"""Projection estimator for the density of an arc-censored circular variable.

From a censored sample the estimator assembles the empirical Gram matrix
of the trigonometric basis under the censoring-weighted inner product and
the empirical moment vector of the observed angles, solves the resulting
symmetric positive-definite system for the Fourier coefficients, and
truncates the estimate to zero when its squared L2 norm exceeds ``n**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import basis
from .circle import TWO_PI, CensoredObservation, arc_length

__all__ = [
    "RCOND_MIN",
    "IllConditionedModelError",
    "CensoredSample",
    "GramMatrix",
    "MomentVector",
    "FourierCoefficients",
    "DensityEstimate",
    "empirical_sigma",
    "build_gram",
    "build_moments",
    "solve_coefficients",
    "contrast_value",
    "truncate_estimate",
    "evaluate_density",
]

# Models whose Gram matrix has a relative eigenvalue spread below this are
# declared inadmissible and skipped, rather than regularized (which would
# bias the coefficients).
RCOND_MIN = 1e-12

# Residual acceptance for the linear solve, relative to max(1, |rhs|_inf).
SOLVE_RESIDUAL_TOL = 1e-8


class IllConditionedModelError(Exception):
    """The empirical Gram matrix is numerically singular at this order."""


@dataclass(frozen=True)
class CensoredSample:
    """Immutable collection of censored observations.

    At least 4 observations are required so that the model grid
    ``{1, ..., floor(n/2) - 1}`` is non-empty.
    """

    observations: tuple[CensoredObservation, ...]

    def __init__(self, observations: Iterable[CensoredObservation]) -> None:
        object.__setattr__(self, "observations", tuple(observations))
        if self.n < 4:
            raise ValueError(f"need at least 4 observations, got {self.n}")

    @property
    def n(self) -> int:
        return len(self.observations)

    @cached_property
    def arc_starts(self) -> np.ndarray:
        return np.array([o.arc.start for o in self.observations])

    @cached_property
    def arc_ends(self) -> np.ndarray:
        return np.array([o.arc.end for o in self.observations])

    @cached_property
    def arc_lengths(self) -> np.ndarray:
        return np.array([arc_length(o.arc) for o in self.observations])

    @cached_property
    def observed_mask(self) -> np.ndarray:
        return np.array([o.observed for o in self.observations])

    @cached_property
    def observed_angles(self) -> np.ndarray:
        return np.array(
            [o.angle for o in self.observations if o.observed]
        )

    @property
    def censored_fraction(self) -> float:
        return 1.0 - float(np.count_nonzero(self.observed_mask)) / self.n


@dataclass(frozen=True)
class GramMatrix:
    """Empirical Gram matrix of order ``m`` (symmetric, PSD, entries <= 1)."""

    m: int
    entries: np.ndarray

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return np.linalg.eigvalsh(self.entries)

    @property
    def admissible(self) -> bool:
        """Whether the matrix is safely invertible in double precision."""
        eig = self.eigenvalues
        return eig[0] > 0.0 and eig[0] >= RCOND_MIN * eig[-1]


@dataclass(frozen=True)
class MomentVector:
    """Averaged basis evaluations over the observed angles, order ``m``."""

    m: int
    entries: np.ndarray


@dataclass(frozen=True)
class FourierCoefficients:
    """Coefficients of the projection estimate in the trigonometric basis."""

    m: int
    coeffs: np.ndarray

    @property
    def squared_l2_norm(self) -> float:
        """Squared L2 norm of the expansion (Parseval)."""
        return float(np.dot(self.coeffs, self.coeffs))


@dataclass(frozen=True)
class DensityEstimate:
    """Projection estimate, possibly truncated to the zero function."""

    coeffs: FourierCoefficients
    truncated: bool
    k_n: float


def empirical_sigma(sample: CensoredSample, x: float) -> float:
    """Fraction of observation windows that contain the angle ``x``."""
    s, e = sample.arc_starts, sample.arc_ends
    plain = (s <= e) & (s <= x) & (x <= e)
    wrapped = (s > e) & ((x >= s) | (x <= e))
    return float(np.count_nonzero(plain | wrapped)) / sample.n


def build_gram(sample: CensoredSample, m: int) -> GramMatrix:
    """Empirical Gram matrix: mean over windows of basis-product integrals."""
    c, s = basis.trig_integral_tables(
        sample.arc_starts, sample.arc_ends, sample.arc_lengths, 2 * m
    )
    return GramMatrix(m, basis.gram_from_tables(c, s, m) / sample.n)


def build_moments(sample: CensoredSample, m: int) -> MomentVector:
    """Moment vector: per-index mean of basis values at observed angles.

    Censored observations contribute zero; their angles are never
    evaluated.
    """
    x = sample.observed_angles
    if x.size == 0:
        return MomentVector(m, np.zeros(basis.dimension(m)))
    totals = basis.basis_matrix(m, x).sum(axis=0)
    return MomentVector(m, totals / sample.n)


def solve_coefficients(
    gram: GramMatrix, moments: MomentVector
) -> FourierCoefficients:
    """Solve the Gram system for the projection coefficients.

    Uses a Cholesky factorization (the admissible Gram matrix is SPD by
    construction), never an explicit inverse, and verifies the residual.

    Raises
    ------
    IllConditionedModelError
        If the smallest eigenvalue is below ``RCOND_MIN`` times the
        largest; callers must exclude such orders from selection.
    """
    if gram.m != moments.m:
        raise ValueError(f"order mismatch: gram {gram.m}, moments {moments.m}")
    if not gram.admissible:
        raise IllConditionedModelError(
            f"gram matrix at order {gram.m} is numerically singular "
            f"(eigenvalue range {gram.eigenvalues[0]:.3e} .. "
            f"{gram.eigenvalues[-1]:.3e})"
        )
    factor = cho_factor(gram.entries, lower=True, check_finite=False)
    coeffs = cho_solve(factor, moments.entries, check_finite=False)
    residual = np.max(np.abs(gram.entries @ coeffs - moments.entries))
    bound = SOLVE_RESIDUAL_TOL * max(1.0, float(np.max(np.abs(moments.entries))))
    if residual > bound:
        raise IllConditionedModelError(
            f"solve residual {residual:.3e} exceeds {bound:.3e} at order {gram.m}"
        )
    return FourierCoefficients(gram.m, coeffs)


def contrast_value(
    coeffs: FourierCoefficients, moments: MomentVector
) -> float:
    """Least-squares contrast at the fitted coefficients: ``-A . U``.

    Non-positive whenever the coefficients solve the Gram system, since
    the value then equals ``-A' G A`` with ``G`` positive semi-definite.
    """
    if coeffs.m != moments.m:
        raise ValueError(
            f"order mismatch: coeffs {coeffs.m}, moments {moments.m}"
        )
    return -float(np.dot(coeffs.coeffs, moments.entries))


def truncate_estimate(
    coeffs: FourierCoefficients, n: int
) -> DensityEstimate:
    """Zero out the estimate when its squared L2 norm exceeds ``n**2``.

    The norm is computed from the coefficients by Parseval; the boundary
    case (norm exactly ``n**2``) is kept.
    """
    k_n = float(n) ** 2
    return DensityEstimate(coeffs, coeffs.squared_l2_norm > k_n, k_n)


def evaluate_density(est: DensityEstimate, x) -> np.ndarray | float:
    """Evaluate the estimate at angle(s) ``x``.

    Returns 0 everywhere for a truncated estimate.  Projection estimates
    carry no sign constraint, so negative values are possible.
    """
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if est.truncated:
        vals = np.zeros(xs.size)
    else:
        vals = basis.basis_matrix(est.coeffs.m, xs) @ est.coeffs.coeffs
    return float(vals[0]) if scalar else vals
