"""Trigonometric orthonormal basis of L2 on the circle and exact arc integrals.

Index convention: index 0 is the constant ``1/sqrt(2*pi)``; index ``2j-1``
is ``cos(j.)/sqrt(pi)`` and index ``2j`` is ``sin(j.)/sqrt(pi)`` for
frequency ``j >= 1``.  The model of order ``m`` spans indices ``0..2m`` and
has dimension ``2m+1``.

Integrals of basis products over arcs are evaluated in closed form via
product-to-sum identities, never by quadrature: Gram assembly needs
``O(n * dim^2)`` of them and quadrature noise would leak into eigenvalues.
"""

from __future__ import annotations

import math

import numpy as np

from .circle import TWO_PI, CircularArc

__all__ = [
    "MAX_ORDER",
    "INV_SQRT_2PI",
    "INV_SQRT_PI",
    "dimension",
    "frequency",
    "is_sine",
    "amplitude",
    "basis_eval",
    "basis_matrix",
    "arc_inner_product",
    "trig_integral_tables",
    "gram_from_tables",
]

INV_SQRT_2PI = 1.0 / math.sqrt(TWO_PI)
INV_SQRT_PI = 1.0 / math.sqrt(math.pi)

# Hard cap on the model order m.  Selection grids never exceed 25 in
# practice; the cap bounds table sizes.
MAX_ORDER = 64


def dimension(m: int) -> int:
    """Dimension 2m+1 of the trigonometric space of order m."""
    return 2 * m + 1


def frequency(index: int) -> int:
    """Frequency j of basis index (0 for the constant)."""
    return (index + 1) // 2


def is_sine(index: int) -> bool:
    """True for sine indices 2j, false for the constant and cosines."""
    return index > 0 and index % 2 == 0


def amplitude(index: int) -> float:
    """Normalizing amplitude of the basis function at ``index``."""
    return INV_SQRT_2PI if index == 0 else INV_SQRT_PI


def basis_eval(index: int, x: float) -> float:
    """Value of the basis function at an angle."""
    if index == 0:
        return INV_SQRT_2PI
    j = frequency(index)
    if is_sine(index):
        return math.sin(j * x) * INV_SQRT_PI
    return math.cos(j * x) * INV_SQRT_PI


def basis_matrix(m: int, x: np.ndarray) -> np.ndarray:
    """Matrix of basis values, shape ``(len(x), 2m+1)``.

    Row ``i`` holds the 2m+1 basis functions evaluated at ``x[i]``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, dimension(m)))
    out[:, 0] = INV_SQRT_2PI
    if m > 0:
        jx = np.outer(x, np.arange(1, m + 1))
        out[:, 1::2] = np.cos(jx) * INV_SQRT_PI
        out[:, 2::2] = np.sin(jx) * INV_SQRT_PI
    return out


def _cos_integral(omega: int, lo: float, hi: float) -> float:
    # integral of cos(omega x) over the plain segment [lo, hi]
    if omega == 0:
        return hi - lo
    return (math.sin(omega * hi) - math.sin(omega * lo)) / omega


def _sin_integral(omega: int, lo: float, hi: float) -> float:
    # integral of sin(omega x) over the plain segment [lo, hi]
    if omega == 0:
        return 0.0
    return (math.cos(omega * lo) - math.cos(omega * hi)) / omega


def _segments(arc: CircularArc) -> list[tuple[float, float]]:
    # wrap-around arcs split at 0: [start, 2*pi) then [0, end]
    if arc.end > arc.start:
        return [(arc.start, arc.end)]
    return [(arc.start, TWO_PI), (0.0, arc.end)]


def arc_inner_product(a: int, b: int, arc: CircularArc) -> float:
    """Exact integral of the product of two basis functions over an arc.

    The product reduces to cosines and sines of the sum and difference
    frequencies; the zero-frequency cases dispatch to the constant and
    vanishing antiderivatives instead of dividing by a zero difference.
    """
    ja, jb = frequency(a), frequency(b)
    sa, sb = is_sine(a), is_sine(b)
    total = 0.0
    for lo, hi in _segments(arc):
        if not sa and not sb:
            val = _cos_integral(ja - jb, lo, hi) + _cos_integral(ja + jb, lo, hi)
        elif sa and sb:
            val = _cos_integral(ja - jb, lo, hi) - _cos_integral(ja + jb, lo, hi)
        elif sa:
            # sin(ja x) cos(jb x)
            val = _sin_integral(ja + jb, lo, hi) + _sin_integral(ja - jb, lo, hi)
        else:
            # cos(ja x) sin(jb x)
            val = _sin_integral(ja + jb, lo, hi) + _sin_integral(jb - ja, lo, hi)
        total += val
    return 0.5 * amplitude(a) * amplitude(b) * total


def trig_integral_tables(
    starts: np.ndarray,
    ends: np.ndarray,
    lengths: np.ndarray,
    max_freq: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Summed arc integrals of cos(w x) and sin(w x) for w = 0..max_freq.

    For integer frequencies the antiderivatives vanish at both 0 and 2*pi,
    so wrap-around arcs need no segment split and the endpoint formula
    applies uniformly.  Returns arrays ``C`` and ``S`` of length
    ``max_freq + 1`` where ``C[w] = sum_i integral_{arc_i} cos(w x) dx``.
    """
    c = np.empty(max_freq + 1)
    s = np.zeros(max_freq + 1)
    c[0] = float(np.sum(lengths))
    if max_freq > 0:
        omega = np.arange(1.0, max_freq + 1.0)
        os_ = np.outer(omega, starts)
        oe = np.outer(omega, ends)
        c[1:] = np.sum(np.sin(oe) - np.sin(os_), axis=1) / omega
        s[1:] = np.sum(np.cos(os_) - np.cos(oe), axis=1) / omega
    return c, s


def gram_from_tables(c: np.ndarray, s: np.ndarray, m: int) -> np.ndarray:
    """Assemble the (unnormalized) Gram matrix of order m from trig tables.

    Entry ``(a, b)`` is the summed arc integral of ``phi_a * phi_b``; the
    caller divides by the sample size.  Requires tables up to frequency
    ``2m``.  The result is exactly symmetric by construction.
    """
    d = dimension(m)
    lam = np.arange(d)
    freq = (lam + 1) // 2
    sine = (lam > 0) & (lam % 2 == 0)
    amp = np.where(lam == 0, INV_SQRT_2PI, INV_SQRT_PI)

    ja = freq[:, None]
    jb = freq[None, :]
    diff = np.abs(ja - jb)
    tot = ja + jb
    cd, ct = c[diff], c[tot]
    sd, st = s[diff], s[tot]

    sin_a = sine[:, None]
    sin_b = sine[None, :]
    sgn = np.sign(ja - jb)
    vals = np.where(
        ~sin_a & ~sin_b,
        cd + ct,
        np.where(
            sin_a & sin_b,
            cd - ct,
            # mixed: rows sin(ja)*cos(jb) carry sgn(ja-jb), transposed
            # entries flip the sign of the difference term
            np.where(sin_a, st + sgn * sd, st - sgn * sd),
        ),
    )
    return 0.5 * np.outer(amp, amp) * vals
