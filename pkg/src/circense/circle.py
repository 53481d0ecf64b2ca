"""Angles and oriented arcs on the unit circle.

The circle is identified with ``[0, 2*pi)``: every angle is reduced to its
unique representative in that interval, and the standard order on the
interval serves as the circular order.  An arc ``[start, end]`` is the set
of points swept anticlockwise from ``start`` to ``end``; when
``start > end`` the arc wraps through 0 and equals
``[start, 2*pi) + [0, end]``.  Arcs are closed at both endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TWO_PI",
    "normalize",
    "normalize_array",
    "CircularArc",
    "CensoredObservation",
    "contains",
    "arc_length",
    "complement",
]

TWO_PI = 2.0 * math.pi


def normalize(raw: float) -> float:
    """Reduce an angle in radians to its representative in [0, 2*pi).

    Uses true mathematical modulo, so the result is non-negative no matter
    the sign of the input.

    Parameters
    ----------
    raw : float
        Angle in radians; must be finite.

    Returns
    -------
    float
        Equivalent angle in ``[0, 2*pi)``.
    """
    if not math.isfinite(raw):
        raise ValueError(f"angle must be finite, got {raw!r}")
    value = math.fmod(raw, TWO_PI)
    if value < 0.0:
        value += TWO_PI
    # adding 2*pi to a tiny negative remainder can round up to 2*pi exactly
    if value >= TWO_PI:
        value -= TWO_PI
    return value


def normalize_array(raw) -> np.ndarray:
    """Vectorized :func:`normalize` for arrays of angles."""
    values = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("angles must be finite")
    out = np.mod(values, TWO_PI)
    # np.mod of a tiny negative can round up to 2*pi exactly
    out[out >= TWO_PI] = 0.0
    return out


@dataclass(frozen=True)
class CircularArc:
    """Closed oriented arc from ``start`` anticlockwise to ``end``.

    Endpoints are normalized into [0, 2*pi) on construction.  A degenerate
    arc with ``start == end`` is rejected: the model assumes the two
    censoring bounds differ almost surely, and a full circle is not
    representable as an arc (use a near-full arc instead).
    """

    start: float
    end: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", normalize(self.start))
        object.__setattr__(self, "end", normalize(self.end))
        if self.start == self.end:
            raise ValueError(
                f"degenerate arc: start == end == {self.start!r}"
            )


def contains(arc: CircularArc, x: float) -> bool:
    """Whether angle ``x`` lies on the closed arc (wrap-around aware)."""
    x = normalize(x)
    if arc.start <= arc.end:
        return arc.start <= x <= arc.end
    return x >= arc.start or x <= arc.end


def arc_length(arc: CircularArc) -> float:
    """Length of the arc, in (0, 2*pi)."""
    if arc.end > arc.start:
        return arc.end - arc.start
    return TWO_PI - (arc.start - arc.end)


def complement(arc: CircularArc) -> CircularArc:
    """The complementary arc (shares both endpoints with ``arc``)."""
    return CircularArc(arc.end, arc.start)


@dataclass(frozen=True)
class CensoredObservation:
    """One triplet of the censoring model.

    ``observed`` tells whether the variable of interest fell inside the
    observation window ``arc``; when it did, ``angle`` carries its value.
    For a censored observation ``angle`` is meaningless and is stored as
    0.0 (the wire sentinel exists only in files, see :mod:`circense.io`).
    """

    observed: bool
    angle: float
    arc: CircularArc

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", normalize(self.angle))
        if self.observed and not contains(self.arc, self.angle):
            raise ValueError(
                f"observed angle {self.angle!r} outside its window "
                f"[{self.arc.start!r}, {self.arc.end!r}]"
            )
