"""Figure rendering for the command-line report paths.

Every figure goes straight to a file through the Agg backend; nothing is
ever shown interactively.  PNG output carries no timestamp metadata, so
re-running a seeded command reproduces identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .circle import TWO_PI
from .estimator import DensityEstimate, evaluate_density
from .evaluation import MiseReport, OracleScan, quadrature_grid
from .selection import SelectionTrace

__all__ = [
    "render_density_figure",
    "render_mise_figure",
    "render_oracle_figure",
]


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Date": None})
    plt.close(fig)


def render_density_figure(
    est: DensityEstimate,
    trace: SelectionTrace,
    resolution: int,
    path,
) -> None:
    """Plot the estimated density over one period."""
    grid = quadrature_grid(resolution)
    values = evaluate_density(est, grid)
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(grid, values, color="tab:blue", lw=1.5)
    ax.axhline(0.0, color="0.7", lw=0.8)
    ax.set_xlim(0.0, TWO_PI)
    ax.set_xlabel("angle (rad)")
    ax.set_ylabel("estimated density")
    ax.set_title(
        f"order m = {trace.chosen_m}, kappa = {trace.kappa:.4g} "
        f"({trace.kappa_source})"
        + (", truncated to 0" if est.truncated else "")
    )
    _save(fig, path)


def render_mise_figure(report: MiseReport, path) -> None:
    """Risk against sample size, with one-standard-error bars."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    sizes = [row.n for row in report.rows]
    risks = [row.mise for row in report.rows]
    errors = [row.stderr for row in report.rows]
    ax.errorbar(sizes, risks, yerr=errors, marker="o", capsize=3.0,
                color="tab:blue")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("sample size n")
    ax.set_ylabel("MISE")
    ax.set_title(f"scenario {report.scenario}")
    ax.grid(True, which="both", ls=":", lw=0.5)
    _save(fig, path)


def render_oracle_figure(scan: OracleScan, path) -> None:
    """Fixed-order risks with the adaptive risk as a reference line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    orders = [row.m for row in scan.rows]
    risks = [row.mise for row in scan.rows]
    ax.plot(orders, risks, marker="o", color="tab:blue",
            label="fixed order")
    ax.axhline(scan.adaptive_mise, color="tab:red", ls="--",
               label="adaptive")
    ax.set_yscale("log")
    ax.set_xlabel("order m")
    ax.set_ylabel("MISE")
    ax.set_title(f"scenario {scan.scenario}, n = {scan.n}")
    ax.legend()
    ax.grid(True, which="both", ls=":", lw=0.5)
    _save(fig, path)
