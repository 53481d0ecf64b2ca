"""Acceptance suite: end-to-end checks of the estimator and its harness.

Each test covers one acceptance criterion and prints a single summary
line; together they certify the desk-scale reproduction of the published
benchmark study, the numerical core against independent oracles, and the
determinism of the command-line reports.
"""

import math
import time

import numpy as np

from circense import (
    TWO_PI,
    CircularArc,
    ModelGrid,
    adaptive_estimate,
    benchmark_scenario,
    build_gram,
    build_moments,
    contrast_value,
    fit_von_mises,
    fixed_m_oracle_scan,
    generate_sample,
    make_rng,
    mean_censoring_stats,
    offset_window_scenario,
    run_mise,
    scan_models,
    select_model,
    solve_coefficients,
)
from circense.basis import arc_inner_product, dimension
from circense.cli import main as cli_main

from _oracles import gauss_solve, quadrature_arc_inner
from _samples import uncensored_sample

SEED = 2026

# published benchmark values: per scenario, MISE at n = 50/100/500, the
# censored percentage, and the mean censoring-arc length
PUBLISHED_RISK = {
    1: (0.038, 0.021, 0.006),
    2: (0.036, 0.025, 0.006),
    3: (0.253, 0.128, 0.055),
    4: (0.043, 0.023, 0.004),
}
PUBLISHED_CENSORING = {
    1: (0.442, 3.46),
    2: (0.555, 2.80),
    3: (0.859, 4.10),
    4: (0.352, 3.15),
}
# published parameter estimates under constant-length windows, for
# censoring-arc lengths 1 and 3 (target mu = 2, kappa = 1)
PUBLISHED_FIT = {1.0: (2.005, 1.044), 3.0: (1.999, 0.986)}

N_GRID = (50, 100, 500)
REPLICATIONS = 100
TIME_BUDGET_SECONDS = 600.0


def _report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_benchmark_risks_within_band():
    # MISE of the adaptive estimator reproduces the published study at
    # desk scale: at most twice the published value in every cell, and
    # strictly decreasing in the sample size, within the time budget.
    # Undershooting is not penalized: the published constant-calibration
    # internals are not recoverable, and the clamp kappa >= 1 already
    # rules out the variance-inflated small-sample fits that produced the
    # largest published values.
    started = time.perf_counter()
    worst_ratio = 0.0
    decreasing = True
    for index, published in PUBLISHED_RISK.items():
        report = run_mise(
            benchmark_scenario(index),
            N_GRID,
            REPLICATIONS,
            seed=SEED,
            scenario=f"model{index}",
        )
        mises = [row.mise for row in report.rows]
        assert all(row.failures == 0 for row in report.rows)
        for mine, reference in zip(mises, published):
            worst_ratio = max(worst_ratio, mine / reference)
        decreasing = decreasing and mises[0] > mises[1] > mises[2]
    elapsed = time.perf_counter() - started
    ok = worst_ratio <= 2.0 and decreasing and elapsed <= TIME_BUDGET_SECONDS
    _report(
        "benchmark risks",
        ok,
        f"max ratio to published {worst_ratio:.2f}, "
        f"monotone {decreasing}, {elapsed:.1f}s",
    )


def test_censoring_geometry_matches_published_stats():
    # censored fraction within 3 points and mean censoring-arc length
    # within 0.1 of the published values, at 10000 draws per scenario
    worst_frac = 0.0
    worst_len = 0.0
    for index, (frac, length) in PUBLISHED_CENSORING.items():
        got_frac, got_len = mean_censoring_stats(
            benchmark_scenario(index), 10_000, make_rng(7, index)
        )
        worst_frac = max(worst_frac, abs(got_frac - frac))
        worst_len = max(worst_len, abs(got_len - length))
    ok = worst_frac <= 0.03 and worst_len <= 0.1
    _report(
        "censoring geometry",
        ok,
        f"max fraction gap {worst_frac:.4f}, max length gap {worst_len:.4f}",
    )


def test_parameter_extraction_matches_published_fits():
    # 200 samples of size 100 under constant-length windows; the average
    # extracted parameters sit within 0.1 (mu) and 0.15 (kappa) of the
    # published estimates
    worst_mu = 0.0
    worst_kappa = 0.0
    for alpha, (mu_ref, kappa_ref) in PUBLISHED_FIT.items():
        spec = offset_window_scenario(alpha)
        mus, kappas = [], []
        for rep in range(200):
            sample = generate_sample(spec, 100, make_rng(SEED, rep))
            est, _ = adaptive_estimate(sample)
            fit = fit_von_mises(est)
            assert not fit.flat
            mus.append(fit.mu)
            kappas.append(fit.kappa)
        worst_mu = max(worst_mu, abs(float(np.mean(mus)) - mu_ref))
        worst_kappa = max(worst_kappa, abs(float(np.mean(kappas)) - kappa_ref))
    ok = worst_mu <= 0.1 and worst_kappa <= 0.15
    _report(
        "parameter extraction",
        ok,
        f"max mu gap {worst_mu:.4f}, max kappa gap {worst_kappa:.4f}",
    )


def test_closed_form_integrals_match_quadrature():
    # 1000 random basis-product integrals against segment-wise
    # Gauss-Legendre quadrature, and the full-circle design matrix
    # against the identity up to order 25
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        start, end = rng.uniform(0.0, TWO_PI, size=2)
        if start == end:
            continue
        arc = CircularArc(float(start), float(end))
        a, b = (int(v) for v in rng.integers(0, dimension(25), size=2))
        worst = max(
            worst,
            abs(arc_inner_product(a, b, arc) - quadrature_arc_inner(a, b, arc)),
        )
    sample = uncensored_sample(8, seed=SEED)
    gram = build_gram(sample, 25).entries
    identity_gap = float(np.max(np.abs(gram - np.eye(dimension(25)))))
    ok = worst <= 1e-8 and identity_gap <= 1e-8
    _report(
        "closed-form integrals",
        ok,
        f"worst quadrature gap {worst:.2e}, identity gap {identity_gap:.2e}",
    )


def test_solver_matches_dense_elimination():
    # 500 random admissible Gram systems solved to within 1e-10 of a
    # from-scratch partial-pivot elimination
    rng = np.random.default_rng(SEED + 1)
    checked = 0
    worst = 0.0
    stream = 0
    while checked < 500:
        index = 1 + stream % 4
        n = int(rng.integers(40, 120))
        sample = generate_sample(
            benchmark_scenario(index), n, make_rng(SEED + 2, stream)
        )
        stream += 1
        m = 1 + stream % 5
        gram = build_gram(sample, m)
        if not gram.admissible:
            continue
        moments = build_moments(sample, m)
        mine = solve_coefficients(gram, moments).coeffs
        reference = gauss_solve(gram.entries, moments.entries)
        scale = max(1.0, float(np.max(np.abs(reference))))
        worst = max(worst, float(np.max(np.abs(mine - reference))) / scale)
        checked += 1
    ok = worst <= 1e-10
    _report(
        "linear solver",
        ok,
        f"{checked} systems, worst relative gap {worst:.2e}",
    )


def test_structural_invariants_of_the_selection_pipeline():
    # on fresh samples from every scenario: Gram spectra in [0, 1],
    # operator norms of the inverse at least 1, the contrast identity,
    # contrast monotonicity along the nested grid, domination of the
    # empirical seminorm by the Euclidean norm, optimality of the
    # selected order, and monotonicity of the dimension in the penalty
    # constant
    rng = np.random.default_rng(SEED + 3)
    identity_worst = 0.0
    for index in (1, 2, 3, 4):
        sample = generate_sample(
            benchmark_scenario(index), 150, make_rng(SEED + 4, index)
        )
        grid = ModelGrid(sample.n)
        records = scan_models(sample, grid)

        contrasts = []
        for record in records:
            gram = build_gram(sample, record.m)
            assert gram.eigenvalues[-1] <= 1.0 + 1e-10
            if not record.admissible:
                continue
            assert record.op_norm_inv >= 1.0 - 1e-10
            moments = build_moments(sample, record.m)
            a = record.coeffs.coeffs
            quadratic = float(a @ gram.entries @ a) - 2.0 * float(
                a @ moments.entries
            )
            identity_worst = max(
                identity_worst, abs(record.contrast - quadratic)
            )
            contrasts.append(record.contrast)
        assert len(contrasts) >= 8
        for later, earlier in zip(contrasts[1:], contrasts[:-1]):
            assert later <= earlier + 1e-10

        gram5 = build_gram(sample, 5).entries
        for _ in range(125):
            t = rng.normal(size=dimension(5))
            assert float(t @ gram5 @ t) <= float(t @ t) + 1e-10

        trace = select_model(sample, grid)
        chosen = trace.chosen
        for record in trace.records:
            if record.admissible:
                assert chosen.score <= record.score + 1e-12
                if record.score == chosen.score:
                    assert chosen.m <= record.m

        dims = [
            select_model(sample, grid, kappa=k).chosen.dim
            for k in (0.5, 1.0, 8.0, 32.0, 1e3)
        ]
        for smaller, larger in zip(dims[1:], dims[:-1]):
            assert smaller <= larger
    ok = identity_worst <= 1e-8
    _report(
        "structural invariants",
        ok,
        f"worst contrast-identity gap {identity_worst:.2e}",
    )


def test_uncensored_data_recovers_plain_projection():
    # with full-circle windows the Gram system is the identity, so the
    # solved coefficients equal the raw moments
    sample = uncensored_sample(1000, seed=SEED + 5)
    worst = 0.0
    for m in range(1, 11):
        coeffs = solve_coefficients(
            build_gram(sample, m), build_moments(sample, m)
        ).coeffs
        moments = build_moments(sample, m).entries
        worst = max(worst, float(np.max(np.abs(coeffs - moments))))
    ok = worst <= 1e-6
    _report(
        "uncensored degeneration",
        ok,
        f"worst coefficient gap {worst:.2e} over orders 1..10",
    )


def test_adaptive_risk_close_to_fixed_order_oracle():
    # at n = 500 over 50 replications, the adaptive risk stays within a
    # factor 2.5 of the best fixed order on the same samples
    worst = 0.0
    for index in (1, 4):
        scan = fixed_m_oracle_scan(
            benchmark_scenario(index), 500, 50, seed=SEED,
            scenario=f"model{index}",
        )
        assert scan.adaptive_failures == 0
        ratio = scan.adaptive_mise / scan.best_fixed.mise
        worst = max(worst, ratio)
    ok = worst <= 2.5
    _report(
        "adaptive vs oracle",
        ok,
        f"worst adaptive/best-fixed ratio {worst:.2f}",
    )


def test_report_files_are_byte_deterministic(tmp_path):
    # the same study command yields byte-identical CSV and PNG outputs,
    # serially and with a thread pool
    config = tmp_path / "study.cfg"
    config.write_text(
        "model = 1\nn = 50, 100\nreplications = 20\nseed = 99\n",
        encoding="utf-8",
    )
    stems = [str(tmp_path / name) for name in ("first", "second", "third")]
    for stem, jobs in zip(stems, (None, None, 3)):
        argv = ["mise", "--config", str(config), "--output", stem]
        if jobs:
            argv += ["--jobs", str(jobs)]
        assert cli_main(argv) == 0
    csv_bytes = [open(f"{stem}.csv", "rb").read() for stem in stems]
    png_bytes = [open(f"{stem}.png", "rb").read() for stem in stems]
    ok = (
        csv_bytes[0] == csv_bytes[1] == csv_bytes[2]
        and png_bytes[0] == png_bytes[1] == png_bytes[2]
    )
    _report(
        "deterministic reports",
        ok,
        f"csv {len(csv_bytes[0])} bytes, png {len(png_bytes[0])} bytes, "
        f"serial and threaded runs identical",
    )
