"""Exact arithmetic on finite unions of open rational intervals.

All endpoints are Fractions and all sets are read as subsets of the
rationals, so emptiness, overlap and containment questions are decidable.
An interval is a pair (lo, hi) and denotes {q in Q : lo < q < hi}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Interval = tuple[Fraction, Fraction]


def is_valid(iv: Interval) -> bool:
    return iv[0] < iv[1]


def point_in(q: Fraction, ivs: Iterable[Interval]) -> bool:
    return any(lo < q < hi for lo, hi in ivs)


def pair_overlaps(a: Interval, b: Interval) -> bool:
    # open intervals over a dense order: nonempty intersection iff the
    # interval (max lo, min hi) is nonempty
    return max(a[0], b[0]) < min(a[1], b[1])


def meets(xs: Sequence[Interval], ys: Sequence[Interval]) -> bool:
    return any(pair_overlaps(a, b) for a in xs for b in ys)


def common_point(xs: Sequence[Interval]) -> Fraction | None:
    """A rational in the intersection of all the intervals, or None."""
    lo = max(x[0] for x in xs)
    hi = min(x[1] for x in xs)
    if lo < hi:
        return (lo + hi) / 2
    return None


def subset(xs: Sequence[Interval], ys: Sequence[Interval]) -> bool:
    """Is (union of xs) a subset of (union of ys), as sets of rationals?

    The difference of two finite unions is a finite union of intervals whose
    endpoints come from the inputs, so it is nonempty iff it contains one of
    finitely many candidate rationals: an input endpoint or a midpoint of two
    adjacent endpoints.
    """
    xs = [x for x in xs if is_valid(x)]
    ys = [y for y in ys if is_valid(y)]
    if not xs:
        return True
    endpoints = sorted({e for iv in xs for e in iv} | {e for iv in ys for e in iv})
    candidates = list(endpoints)
    for a, b in zip(endpoints, endpoints[1:]):
        candidates.append((a + b) / 2)
    return not any(point_in(c, xs) and not point_in(c, ys) for c in candidates)
