"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from scratch against the
mathematical definitions (direct trig evaluation, composite
Gauss-Legendre quadrature, textbook Gaussian elimination, power
iteration) so that agreement with the package is meaningful.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def phi(index, x):
    """Evaluate the normalized trigonometric basis function directly."""
    x = np.asarray(x, dtype=float)
    if index == 0:
        return np.full_like(x, 1.0 / math.sqrt(TWO_PI))
    j = (index + 1) // 2
    if index % 2 == 1:
        return np.cos(j * x) / math.sqrt(math.pi)
    return np.sin(j * x) / math.sqrt(math.pi)


def _panel_rule(lo, hi, panels, panel_nodes):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    base_nodes, base_weights = np.polynomial.legendre.leggauss(panel_nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = (edges[1] - edges[0]) / 2.0
    mids = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mids[:, None] + half * base_nodes[None, :]).ravel()
    weights = np.tile(half * base_weights, panels)
    return nodes, weights


def quadrature_arc_inner(index_a, index_b, arc, panels_total=256, panel_nodes=16):
    """Integrate phi_a * phi_b over an oriented arc by segment-wise quadrature.

    The integrand is smooth inside the arc but the arc itself may wrap
    through zero, so the rule is applied separately on each segment;
    uniform-grid rules over the whole circle would stall at O(h) accuracy
    because of the indicator's jumps.
    """
    if arc.end > arc.start:
        segments = [(arc.start, arc.end)]
    else:
        segments = [(arc.start, TWO_PI), (0.0, arc.end)]
    total_length = sum(hi - lo for lo, hi in segments)
    acc = 0.0
    for lo, hi in segments:
        if hi <= lo:
            continue
        panels = max(1, round(panels_total * (hi - lo) / total_length))
        nodes, weights = _panel_rule(lo, hi, panels, panel_nodes)
        acc += float(np.sum(weights * phi(index_a, nodes) * phi(index_b, nodes)))
    return acc


def gauss_solve(matrix, rhs):
    """Solve a dense linear system by partial-pivot Gaussian elimination."""
    a = [[float(v) for v in row] for row in np.asarray(matrix)]
    b = [float(v) for v in np.asarray(rhs)]
    size = len(b)
    for col in range(size):
        pivot = max(range(col, size), key=lambda r: abs(a[r][col]))
        if a[pivot][col] == 0.0:
            raise ZeroDivisionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        b[col], b[pivot] = b[pivot], b[col]
        for row in range(col + 1, size):
            factor = a[row][col] / a[col][col]
            if factor == 0.0:
                continue
            for k in range(col, size):
                a[row][k] -= factor * a[col][k]
            b[row] -= factor * b[col]
    out = [0.0] * size
    for row in reversed(range(size)):
        tail = sum(a[row][k] * out[k] for k in range(row + 1, size))
        out[row] = (b[row] - tail) / a[row][row]
    return np.array(out)


def inverse_operator_norm(matrix, iterations=500, tol=1e-14):
    """Largest eigenvalue of the inverse of an SPD matrix, by power iteration."""
    matrix = np.asarray(matrix, dtype=float)
    vec = np.ones(matrix.shape[0]) / math.sqrt(matrix.shape[0])
    previous = 0.0
    for _ in range(iterations):
        image = gauss_solve(matrix, vec)
        norm = float(np.linalg.norm(image))
        vec = image / norm
        if abs(norm - previous) <= tol * max(1.0, norm):
            break
        previous = norm
    return float(vec @ gauss_solve(matrix, vec))


def circular_mean(angles):
    """Mean direction of a sample of angles, in [0, 2*pi)."""
    angles = np.asarray(angles, dtype=float)
    return math.atan2(float(np.mean(np.sin(angles))),
                      float(np.mean(np.cos(angles)))) % TWO_PI


def rotate_coefficients(values, delta):
    """Coefficients of x -> f(x - delta) given the coefficients of f."""
    values = np.asarray(values, dtype=float)
    out = values.copy()
    order = (len(values) - 1) // 2
    for j in range(1, order + 1):
        a, b = values[2 * j - 1], values[2 * j]
        out[2 * j - 1] = a * math.cos(j * delta) - b * math.sin(j * delta)
        out[2 * j] = a * math.sin(j * delta) + b * math.cos(j * delta)
    return out


def bin_probabilities(distribution, edges, subgrid=4000):
    """Probability mass of each histogram bin under a circular density."""
    probs = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inner = np.linspace(lo, hi, subgrid, endpoint=False)
        probs.append(float(np.mean(distribution.density(inner)) * (hi - lo)))
    probs = np.asarray(probs)
    return probs / probs.sum()


def chi_square_statistic(draws, distribution, bins=20):
    """Goodness-of-fit statistic, skipping zero-mass bins (0/0 -> 0).

    Returns the statistic together with the number of draws that landed
    in zero-mass bins (which must be zero for a correct sampler).
    """
    edges = np.linspace(0.0, TWO_PI, bins + 1)
    counts, _ = np.histogram(np.asarray(draws, dtype=float), bins=edges)
    expected = bin_probabilities(distribution, edges) * len(draws)
    mask = expected > 0.0
    stat = float(np.sum((counts[mask] - expected[mask]) ** 2 / expected[mask]))
    return stat, int(counts[~mask].sum())
