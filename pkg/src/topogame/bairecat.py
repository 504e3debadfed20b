"""Finite-prefix Baire-space machinery: avoidance sets over indexed cover
tables, nowhere-dense witnesses, diagonal selection, the everywhere-different
property of vector families, padding, and the induced cover tables on a
finite discrete index set.

Desk-scale truncation: the transfinite index sets of the source constructions
become finite prefixes; membership in an avoidance set only constrains the
modeled coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .enumutil import bits_of
from .errors import DimensionError, SearchBoundExceeded, TopogameError
from .space import (
    DEFAULT_BOUND,
    INDETERMINATE,
    CoverFamily,
    OpenSet,
    Space,
    discrete,
)

SeqPrefix = tuple[int, ...]


@dataclass(eq=False)
class CoverTable:
    """Indexed countable subfamilies: row n, member k is an open set.  Rows
    promise a dense union at the working horizon; unlike cover families,
    rows may contain empty members (the index structure is the point)."""

    rows: tuple
    widths: tuple | None = None  # per-row member count, None = infinite

    @classmethod
    def from_lists(cls, rows) -> "CoverTable":
        mats = tuple(tuple(row) for row in rows)
        return cls(rows=tuple((lambda k, _r=row: _r[k]) for row in mats),
                   widths=tuple(len(r) for r in mats))

    @classmethod
    def from_fns(cls, fns, widths=None) -> "CoverTable":
        return cls(rows=tuple(fns),
                   widths=tuple(widths) if widths is not None else None)

    @property
    def depth(self) -> int:
        return len(self.rows)

    def member(self, n: int, k: int) -> OpenSet:
        return self.rows[n](k)

    def width(self, n: int) -> int | None:
        return None if self.widths is None else self.widths[n]


@dataclass(frozen=True)
class VectorFamily:
    """Finite list of natural-valued vectors of a common length, optionally
    with a coordinatewise strict bound."""

    vectors: tuple[tuple[int, ...], ...]
    bound: tuple[int, ...] | None = None

    def __post_init__(self):
        vecs = tuple(tuple(v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not vecs:
            raise ValueError("empty family")
        width = len(vecs[0])
        if any(len(v) != width for v in vecs):
            raise ValueError("vectors must share a length")
        if any(x < 0 for v in vecs for x in v):
            raise ValueError("vectors are natural-valued")
        if self.bound is not None:
            b = tuple(self.bound)
            object.__setattr__(self, "bound", b)
            if len(b) != width:
                raise ValueError("bound length mismatch")
            if any(v[i] >= b[i] for v in vecs for i in range(width)):
                raise ValueError("family is not below its bound")

    @property
    def width(self) -> int:
        return len(self.vectors[0])


# ---------------------------------------------------------------------------
# avoidance sets and the diagonal argument


def _disjoint(s: Space, x: OpenSet, y: OpenSet,
              search_bound: int = DEFAULT_BOUND):
    r = s.opens_meet(x, y)
    if r is not None:
        return not r
    for p in itertools.islice(s.points(), search_bound):
        if s.point_in(p, x) and s.point_in(p, y):
            return False
    return INDETERMINATE


def in_n_alpha(s: Space, pibase_elem: OpenSet, table: CoverTable,
               f: SeqPrefix, search_bound: int = DEFAULT_BOUND):
    """Is f in the avoidance set of the pi-base element: does the f(n)-th
    member of every modeled row miss it?"""
    if len(f) < table.depth:
        raise DimensionError("prefix must cover all modeled rows")
    undecided = False
    for n in range(table.depth):
        r = _disjoint(s, pibase_elem, table.member(n, f[n]), search_bound)
        if r is False:
            return False
        if r is INDETERMINATE:
            undecided = True
    return INDETERMINATE if undecided else True


def nowhere_dense_witness(s: Space, pibase_elem: OpenSet, table: CoverTable,
                          sigma: SeqPrefix,
                          search_bound: int = DEFAULT_BOUND) -> SeqPrefix:
    """Extend the prefix by one coordinate so that no extension of the
    result lies in the avoidance set of the pi-base element: pick the least
    j with row-k member j meeting it, where k is the prefix's length."""
    k = len(sigma)
    if k >= table.depth:
        raise DimensionError("prefix already covers every modeled row")
    width = table.width(k)
    scan = search_bound if width is None else min(width, search_bound)
    for j in range(scan):
        r = _disjoint(s, pibase_elem, table.member(k, j), search_bound)
        if r is False:
            return sigma + (j,)
    raise SearchBoundExceeded(
        f"row {k} member meeting the pi-base element {pibase_elem.parts} "
        "(density promise broken?)", search_bound)


def diagonal_selector(s: Space, pibase_prefix: Sequence[OpenSet],
                      table: CoverTable,
                      search_bound: int = DEFAULT_BOUND) -> SeqPrefix:
    """Chain the nowhere-dense witnesses over the pi-base prefix, one
    coordinate per element, and pad the remaining coordinates with zeros.
    The resulting selection row-n-member-f(n) meets every listed pi-base
    element."""
    m = len(pibase_prefix)
    n_rows = table.depth
    if n_rows < m:
        raise DimensionError(
            f"need at least as many rows ({n_rows}) as targets ({m})")
    f: SeqPrefix = ()
    for alpha in range(m):
        f = nowhere_dense_witness(s, pibase_prefix[alpha], table, f,
                                  search_bound)
    return f + (0,) * (n_rows - m)


def selection_opens(table: CoverTable, f: SeqPrefix) -> list[OpenSet]:
    return [table.member(n, f[n]) for n in range(table.depth)]


# ---------------------------------------------------------------------------
# the everywhere-different property


def has_property_p(fam: VectorFamily, g_value_bound: Sequence[int]) -> bool:
    """Brute force: does every vector g below the bound admit a family
    member differing from it at every coordinate?  The bound must exceed
    every family value so that out-of-range values are represented by one
    sentinel."""
    width = fam.width
    bound = tuple(g_value_bound)
    if len(bound) != width:
        raise DimensionError("bound length mismatch")
    for n in range(width):
        top = max(v[n] for v in fam.vectors)
        if bound[n] <= top:
            raise ValueError(
                f"coordinate {n}: bound {bound[n]} does not dominate the "
                f"family values (max {top}); need a sentinel value")
    for g in itertools.product(*(range(b) for b in bound)):
        if not any(all(v[n] != g[n] for n in range(width))
                   for v in fam.vectors):
            return False
    return True


def pad_family(h_list: Sequence[tuple[Sequence[int], int]],
               b: Sequence[int]) -> VectorFamily:
    """For each (vector h, cut) emit the copies that overwrite the first
    `cut` coordinates with a constant i; i ranges below min(b[:cut]) so the
    output stays below b uniformly (with cut = 0 the vector is emitted
    unchanged).  Rejects inputs whose tail is not below b."""
    b = tuple(b)
    out: list[tuple[int, ...]] = []
    for h, cut in h_list:
        h = tuple(h)
        if len(h) != len(b):
            raise DimensionError("vector/bound length mismatch")
        if not 0 <= cut <= len(h):
            raise ValueError(f"cut {cut} out of range")
        if any(h[n] >= b[n] for n in range(cut, len(h))):
            raise ValueError(f"vector {h} not below bound beyond its cut")
        if cut == 0:
            out.append(h)
            continue
        i_range = min(b[:cut])
        for i in range(i_range):
            out.append(tuple(i if n < cut else h[n] for n in range(len(h))))
    return VectorFamily(tuple(out), bound=b)


def discrete_cover_family(fam: VectorFamily) -> tuple[Space, CoverTable]:
    """Cover table on the discrete space whose points index the family:
    row n, member k collects the vectors with value k at coordinate n.
    Each row partitions the index set into at most bound-many clopen
    pieces (some possibly empty)."""
    size = len(fam.vectors)
    s = discrete(size)
    width = fam.width
    bound = fam.bound or tuple(
        max(v[n] for v in fam.vectors) + 1 for n in range(width))
    rows = []
    for n in range(width):
        mat = []
        for k in range(bound[n]):
            parts = tuple(xi for xi, v in enumerate(fam.vectors) if v[n] == k)
            mat.append(OpenSet(parts))
        rows.append(mat)
    return s, CoverTable.from_lists(rows)


def covering_selection_exists(fam: VectorFamily) -> bool:
    """Is there a selection g (one member per row of the induced discrete
    table) whose union covers the whole index set?  Equivalent to the
    failure of the everywhere-different property."""
    _s, table = discrete_cover_family(fam)
    size = len(fam.vectors)
    full = set(range(size))
    widths = table.widths
    for g in itertools.product(*(range(w) for w in widths)):
        covered = set()
        for n, k in enumerate(g):
            covered |= set(table.member(n, k).parts)
        if covered == full:
            return True
    return False
