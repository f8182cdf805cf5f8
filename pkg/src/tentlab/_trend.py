"""Verdict labels and the boundary-trend rules used by every limit-type check.

All sup-type quantities in tentlab are sampled level by level on dyadic
circles ``1 - |a| = 2**-j``.  A check then looks at the per-level maxima
``m_0, m_1, ..., m_J`` and decides from the last three levels whether the
quantity decays, stays put or grows toward the boundary.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

DECAY_FACTOR = 1.2
GROWTH_FACTOR = 1.5
FLOOR = 1e-3
WINDOW = 3


class Verdict(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    INCONCLUSIVE = "inconclusive"
    VANISHING = "vanishing"
    NON_VANISHING = "non-vanishing"
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    COMPACT = "compact"
    NON_COMPACT = "non-compact"
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"

    def __str__(self) -> str:
        return self.value


def window_ratio(levels) -> float:
    """``m_{J-2} / m_J``: how much the last three levels shrink (inf if m_J == 0)."""
    m = np.asarray(levels, dtype=float)
    first, last = m[-WINDOW], m[-1]
    if last == 0.0:
        return float("inf") if first > 0.0 else 1.0
    return float(first / last)


def decay_verdict(levels, factor: float = DECAY_FACTOR, floor: float = FLOOR) -> Verdict:
    """Vanishing / non-vanishing / inconclusive from per-level maxima.

    ``levels[0]`` is the value at the origin and ``levels[1]`` is the first
    dyadic level, which serves as the reference for the floor.  Vanishing
    needs a drop by ``factor`` across the last three levels without any
    increase inside the window; non-vanishing needs no such drop while the
    window stays above ``floor * m_1``.
    """
    m = np.asarray(levels, dtype=float)
    if m.size < WINDOW + 1:
        raise ValueError("need at least four levels for a trend verdict")
    tail = m[-WINDOW:]
    if not np.all(np.isfinite(tail)):
        return Verdict.NON_VANISHING
    scale = float(np.max(m[np.isfinite(m)])) if np.any(np.isfinite(m)) else 0.0
    if scale == 0.0 or tail[-1] <= 1e-12 * scale:
        return Verdict.VANISHING
    monotone = bool(np.all(np.diff(tail) <= 1e-9 * scale))
    if tail[0] >= factor * tail[-1] and monotone:
        return Verdict.VANISHING
    ref = m[1]
    if tail[0] < factor * tail[-1] and tail.min() >= floor * ref:
        return Verdict.NON_VANISHING
    return Verdict.INCONCLUSIVE


def growth_verdict(levels, factor: float = GROWTH_FACTOR) -> Verdict:
    """Bounded / unbounded / inconclusive from per-level maxima of a sup test.

    The largest value in the last three levels is compared with the largest
    value before them, so level-to-level fluctuations (atomic measures) do
    not read as growth while a running supremum that keeps rising does.
    """
    m = np.asarray(levels, dtype=float)
    if m.size < WINDOW + 1:
        raise ValueError("need at least four levels for a trend verdict")
    if not np.all(np.isfinite(m)):
        return Verdict.UNBOUNDED
    tail = m[-WINDOW:]
    ref = float(m[:-WINDOW].max())
    if ref == 0.0:
        ref = float(tail[0])
    if ref == 0.0:
        return Verdict.BOUNDED if tail.max() == 0.0 else Verdict.UNBOUNDED
    growth = float(tail.max()) / ref
    if growth >= factor:
        return Verdict.UNBOUNDED
    if growth <= DECAY_FACTOR:
        return Verdict.BOUNDED
    return Verdict.INCONCLUSIVE
