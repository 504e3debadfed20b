"""Countably-presented topological spaces with decidable base membership.

A Space is a point universe (indices 0,1,2,...) together with an enumerated
base; the only primitive is the decidable predicate "point p lies in base
element b".  Open sets are canonical finite unions of base elements, so all
player moves and cover members stay decidable.  Density and covering are
horizon-bounded on infinite spaces, with an explicit INDETERMINATE outcome
when a bounded search cannot decide.

Built-in spaces: the rationals with dyadic-interval base, finite Alexandrov
spaces from preorders (opens are up-sets), Alexandroff doubles, products,
open subspaces, a finite-union closure wrapper, and trace subspaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from . import intervals
from .enumutil import (
    LazySeq,
    MemoSeq,
    bits_of,
    cantor_pair,
    cantor_unpair,
    code_of_bits,
    zigzag,
)
from .errors import SearchBoundExceeded, TopogameError

DEFAULT_BOUND = 10_000


class _Indeterminate:
    """Horizon-bounded checks return this when a search bound ran out on an
    infinite space: distinct from False, falsy for convenience."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "INDETERMINATE"


INDETERMINATE = _Indeterminate()


# ---------------------------------------------------------------------------
# set-like values


@dataclass(frozen=True)
class OpenSet:
    """Canonical finite union of base elements: an ascending duplicate-free
    tuple of base indices.  Two OpenSets are equal iff their parts are."""

    parts: tuple[int, ...]

    def __post_init__(self):
        p = self.parts
        if not isinstance(p, tuple):
            object.__setattr__(self, "parts", tuple(p))
            p = self.parts
        if any(b < 0 for b in p):
            raise ValueError("negative base index")
        if any(p[i] >= p[i + 1] for i in range(len(p) - 1)):
            raise ValueError("parts must be ascending and duplicate-free")

    @classmethod
    def empty(cls) -> "OpenSet":
        return cls(())

    @classmethod
    def of(cls, *parts: int) -> "OpenSet":
        return cls(tuple(sorted(set(parts))))

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def union(self, other: "OpenSet") -> "OpenSet":
        return OpenSet(tuple(sorted(set(self.parts) | set(other.parts))))


def union_of(opens) -> OpenSet:
    parts: set[int] = set()
    for o in opens:
        parts |= set(o.parts)
    return OpenSet(tuple(sorted(parts)))


@dataclass(frozen=True)
class FiniteSet:
    """Finite set of point indices, ascending and duplicate-free."""

    elements: tuple[int, ...]

    def __post_init__(self):
        e = self.elements
        if not isinstance(e, tuple):
            object.__setattr__(self, "elements", tuple(e))
            e = self.elements
        if any(x < 0 for x in e):
            raise ValueError("negative point index")
        if any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
            raise ValueError("elements must be ascending and duplicate-free")

    @classmethod
    def of(cls, *elements: int) -> "FiniteSet":
        return cls(tuple(sorted(set(elements))))

    def __contains__(self, p: int) -> bool:
        return p in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def union(self, other: "FiniteSet") -> "FiniteSet":
        return FiniteSet(tuple(sorted(set(self.elements) | set(other.elements))))

    def issubset(self, other: "FiniteSet") -> bool:
        return set(self.elements) <= set(other.elements)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Set of points given by a decidable membership predicate plus an
    enumeration of members (possibly with repeats)."""

    contains: Callable[[int], bool]
    enumerate: Callable[[int], int]
    label: str = ""


@dataclass(eq=False)
class CoverFamily:
    """Lazily enumerated family of open sets.  size=None means the
    enumeration is (promised) infinite."""

    at: Callable[[int], OpenSet]
    size: int | None = None
    label: str = ""
    members: tuple[OpenSet, ...] | None = None

    @classmethod
    def from_list(cls, opens, label: str = "") -> "CoverFamily":
        members = tuple(opens)
        if any(o.is_empty for o in members):
            raise ValueError("cover families exclude the empty open set")
        return cls(at=lambda n: members[n], size=len(members), label=label,
                   members=members)

    @classmethod
    def from_fn(cls, fn: Callable[[int], OpenSet], size: int | None = None,
                label: str = "") -> "CoverFamily":
        return cls(at=MemoSeq(fn), size=size, label=label)

    def iter_members(self) -> Iterator[OpenSet]:
        if self.size is None:
            raise TopogameError("cannot iterate an infinite family")
        return (self.at(k) for k in range(self.size))

    def fingerprint(self) -> tuple:
        if self.size is None:
            raise TopogameError("cannot fingerprint an infinite family")
        return tuple(self.at(k).parts for k in range(self.size))


# ---------------------------------------------------------------------------
# the space itself


def _unknown_meets(bs: tuple[int, ...]):
    return None


def _unknown_subset(x: OpenSet, y: OpenSet):
    return None


@dataclass(frozen=True, eq=False)
class Space:
    """Point universe + enumerated base + decidable membership.

    point_count / base_count are None for countably infinite universes.
    meets_all(bs) decides whether the base elements bs have a common point
    (None = no exact oracle); subset_of compares open sets as point sets.
    """

    label: str
    point_count: int | None
    base_count: int | None
    member: Callable[[int, int], bool]
    base_witness: Callable[[int], int]
    meets_all: Callable[[tuple[int, ...]], bool | None] = _unknown_meets
    subset_of: Callable[[OpenSet, OpenSet], bool | None] = _unknown_subset
    meta: dict = field(default_factory=dict)

    def point_in(self, p: int, o: OpenSet) -> bool:
        return any(self.member(p, b) for b in o.parts)

    def opens_meet(self, x: OpenSet, y: OpenSet) -> bool | None:
        """Do x and y intersect?  Exact when meets_all is."""
        if x.is_empty or y.is_empty:
            return False
        saw_unknown = False
        for a in x.parts:
            for b in y.parts:
                r = self.meets_all((a, b)) if a != b else True
                if r is True:
                    return True
                if r is None:
                    saw_unknown = True
        return None if saw_unknown else False

    def points(self, limit: int | None = None) -> Iterator[int]:
        n = self.point_count if limit is None else (
            limit if self.point_count is None else min(limit, self.point_count))
        if n is None:
            return iter(itertools.count())
        return iter(range(n))

    def whole_space_open(self) -> OpenSet:
        """All base elements as one open; only sensible on finite bases."""
        if self.base_count is None:
            raise TopogameError(f"{self.label}: infinite base")
        return OpenSet(tuple(range(self.base_count)))


def all_points(s: Space) -> PointSet:
    n = s.point_count
    if n is not None:
        return PointSet(contains=lambda p: 0 <= p < n,
                        enumerate=lambda i: i % n, label="all")
    return PointSet(contains=lambda p: p >= 0, enumerate=lambda i: i, label="all")


def point_set_of(indices, label: str = "") -> PointSet:
    elems = tuple(sorted(set(indices)))
    if not elems:
        raise ValueError("empty point set has no enumeration")
    member = frozenset(elems)
    return PointSet(contains=lambda p: p in member,
                    enumerate=lambda i: elems[min(i, len(elems) - 1)],
                    label=label)


def cofinite_points(s: Space, excluded, extra=(), label: str = "") -> PointSet:
    """All points except `excluded`, plus the points in `extra` regardless."""
    exc = frozenset(excluded) - frozenset(extra)
    keep = tuple(sorted(extra))

    def contains(p: int) -> bool:
        return p not in exc

    def enum(i: int) -> int:
        if i < len(keep):
            return keep[i]
        i -= len(keep)
        j = 0
        seen = 0
        while True:
            if j not in exc:
                if seen == i:
                    return j
                seen += 1
            j += 1

    return PointSet(contains=contains, enumerate=MemoSeq(enum), label=label)


def canonical_finite_set(s: Space, n: int) -> FiniteSet:
    """n-th finite set of points in the canonical bit-coded enumeration."""
    fs = FiniteSet(bits_of(n))
    if s.point_count is not None and any(p >= s.point_count for p in fs.elements):
        raise ValueError(f"finite-set code {n} out of range for {s.label}")
    return fs


def finite_set_code(fs: FiniteSet) -> int:
    return code_of_bits(fs.elements)


# ---------------------------------------------------------------------------
# horizon-bounded predicates


def _cap(m: int, count: int | None) -> int:
    return m if count is None else min(m, count)


def dense_at_horizon(s: Space, d: PointSet, m: int,
                     search_bound: int = DEFAULT_BOUND):
    """Does d meet every base element below m?  Exact on finite spaces;
    True or INDETERMINATE on infinite ones (a bounded enumeration search
    cannot refute density)."""
    if search_bound <= 0:
        raise ValueError("search_bound must be positive")
    m = _cap(m, s.base_count)
    if s.point_count is not None:
        return all(
            any(d.contains(p) and s.member(p, b) for p in range(s.point_count))
            for b in range(m))
    for b in range(m):
        if not any(s.member(d.enumerate(i), b) for i in range(search_bound)):
            return INDETERMINATE
    return True


def open_dense_at_horizon(s: Space, o: OpenSet, m: int,
                          search_bound: int = DEFAULT_BOUND):
    """Density of an open set below horizon m, via the exact intersection
    oracle when available."""
    m = _cap(m, s.base_count)
    if o.is_empty:
        return m == 0
    undecided = False
    for b in range(m):
        r = s.opens_meet(OpenSet((b,)), o)
        if r is False:
            return False
        if r is None:
            if not any(s.member(p, b) and s.point_in(p, o)
                       for p in itertools.islice(s.points(), search_bound)):
                undecided = True
    return INDETERMINATE if undecided else True


def is_cover_at_horizon(s: Space, fam: CoverFamily, m: int,
                        search_bound: int = DEFAULT_BOUND):
    """Does every point below m lie in some family member found within
    search_bound enumeration steps?"""
    if search_bound <= 0:
        raise ValueError("search_bound must be positive")
    m = _cap(m, s.point_count)
    scan = search_bound if fam.size is None else min(fam.size, search_bound)
    exhaustive = fam.size is not None and fam.size <= search_bound
    undecided = False
    for p in range(m):
        if not any(s.point_in(p, fam.at(k)) for k in range(scan)):
            if exhaustive:
                return False
            undecided = True
    return INDETERMINATE if undecided else True


def dense_union_at_horizon(s: Space, opens, m: int,
                           search_bound: int = DEFAULT_BOUND):
    """Is the union of finitely many opens dense below horizon m?"""
    return open_dense_at_horizon(s, union_of(opens), m, search_bound)


# ---------------------------------------------------------------------------
# the rationals with the dyadic-interval base


def _rational_gen() -> Iterator[Fraction]:
    # diagonal over (zigzag numerator, denominator), skipping fractions that
    # are not in lowest terms: 0, 1, 1/2, -1, 1/3, -1/2, 2, 1/4, ...
    for c in itertools.count():
        i, j = cantor_unpair(c)
        num, den = zigzag(i), j + 1
        q = Fraction(num, den)
        if q.denominator == den:
            yield q


_RATIONALS: LazySeq[Fraction] = LazySeq(_rational_gen())


def _dyadic_gen() -> Iterator[Fraction]:
    for c in itertools.count():
        a, k = cantor_unpair(c)
        z = zigzag(a)
        if k > 0 and z % 2 == 0:
            continue  # not in lowest terms
        yield Fraction(z, 2 ** k)


_DYADICS: LazySeq[Fraction] = LazySeq(_dyadic_gen())


def _interval_gen() -> Iterator[tuple[Fraction, Fraction]]:
    for c in itertools.count():
        i, j = cantor_unpair(c)
        lo, hi = _DYADICS(i), _DYADICS(j)
        if lo < hi:
            yield (lo, hi)


_INTERVALS: LazySeq[tuple[Fraction, Fraction]] = LazySeq(_interval_gen())


def rational_value(n: int) -> Fraction:
    return _RATIONALS(n)


def rational_index(q, scan_limit: int = 10**6) -> int:
    return _RATIONALS.index_of(Fraction(q), scan_limit)


def dyadic_interval(b: int) -> tuple[Fraction, Fraction]:
    return _INTERVALS(b)


def dyadic_interval_index(lo, hi, scan_limit: int = 10**6) -> int:
    return _INTERVALS.index_of((Fraction(lo), Fraction(hi)), scan_limit)


def rationals_intervals_of(o: OpenSet) -> list[tuple[Fraction, Fraction]]:
    return [dyadic_interval(b) for b in o.parts]


def rationals() -> Space:
    """The rational line: points enumerate Q, base elements enumerate the
    open intervals with dyadic endpoints; all arithmetic is exact."""

    def member(p: int, b: int) -> bool:
        lo, hi = _INTERVALS(b)
        q = _RATIONALS(p)
        return lo < q < hi

    witness = MemoSeq(lambda b: rational_index(sum(_INTERVALS(b)) / 2))

    def meets_all(bs: tuple[int, ...]):
        ivs = [_INTERVALS(b) for b in bs]
        return max(iv[0] for iv in ivs) < min(iv[1] for iv in ivs)

    def subset_of(x: OpenSet, y: OpenSet):
        return intervals.subset(rationals_intervals_of(x), rationals_intervals_of(y))

    return Space(label="rationals", point_count=None, base_count=None,
                 member=member, base_witness=witness,
                 meets_all=meets_all, subset_of=subset_of,
                 meta={"kind": "rationals"})


# ---------------------------------------------------------------------------
# finite Alexandrov spaces (opens are up-sets of a preorder)


def finite_space(n: int, pairs, label: str | None = None) -> Space:
    """Finite space from a preorder on n points given as pairs (i, j)
    meaning i <= j; reflexive pairs may be omitted.  Base element b is the
    minimal open neighbourhood of point b (its up-set).  Rejects relations
    that are not transitive."""
    if n <= 0:
        raise ValueError("need at least one point")
    rel = {(i, i) for i in range(n)}
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"pair ({i},{j}) out of range")
        rel.add((i, j))
    for (a, b) in list(rel):
        for (c, d) in list(rel):
            if b == c and (a, d) not in rel:
                raise ValueError(f"not transitive: ({a},{b}) and ({c},{d}) "
                                 f"but ({a},{d}) missing")
    upsets = tuple(tuple(sorted(j for j in range(n) if (b, j) in rel))
                   for b in range(n))

    def member(p: int, b: int) -> bool:
        return (b, p) in rel

    def meets_all(bs: tuple[int, ...]):
        return any(all((b, p) in rel for b in bs) for p in range(n))

    def subset_of(x: OpenSet, y: OpenSet):
        xs = {p for b in x.parts for p in upsets[b]}
        ys = {p for b in y.parts for p in upsets[b]}
        return xs <= ys

    return Space(label=label or f"finite{n}", point_count=n, base_count=n,
                 member=member, base_witness=lambda b: b,
                 meets_all=meets_all, subset_of=subset_of,
                 meta={"kind": "finite", "n": n,
                       "relation": frozenset(rel), "upsets": upsets})


def discrete(n: int) -> Space:
    return finite_space(n, [], label=f"discrete:{n}")


def chain(n: int) -> Space:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return finite_space(n, pairs, label=f"chain:{n}")


def sierpinski() -> Space:
    return finite_space(2, [(0, 1)], label="sierpinski")


def indiscrete(n: int) -> Space:
    pairs = [(i, j) for i in range(n) for j in range(n)]
    return finite_space(n, pairs, label=f"indiscrete:{n}")


# ---------------------------------------------------------------------------
# Alexandroff double


def _double_decode(s: Space, idx: int):
    """Base index -> ("sing", x) or ("split", b, removed_points)."""
    n, m = s.point_count, s.base_count
    if n is not None:
        if idx < n:
            return ("sing", idx)
        j = idx - n
        b, f = divmod(j, 2 ** n)
        if b >= (m or 0):
            raise IndexError(idx)
        return ("split", b, bits_of(f))
    if idx % 2 == 0:
        return ("sing", idx // 2)
    b, f = cantor_unpair((idx - 1) // 2)
    return ("split", b, bits_of(f))


def alexandroff_double(s: Space) -> Space:
    """Double of s: two copies of the point universe, the second copy
    isolated, with split neighbourhoods B x {0} + (B \\ F) x {1} around the
    first copy (F any finite set of points)."""
    n = s.point_count

    def member(p: int, idx: int) -> bool:
        x, copy = divmod(p, 2)
        kind = _double_decode(s, idx)
        if kind[0] == "sing":
            return copy == 1 and x == kind[1]
        _, b, removed = kind
        if not s.member(x, b):
            return False
        return copy == 0 or x not in removed

    def witness(idx: int) -> int:
        kind = _double_decode(s, idx)
        if kind[0] == "sing":
            return 2 * kind[1] + 1
        return 2 * s.base_witness(kind[1])

    def meets_all(bs: tuple[int, ...]):
        decoded = [_double_decode(s, b) for b in bs]
        sing = [d for d in decoded if d[0] == "sing"]
        if sing:
            p = 2 * sing[0][1] + 1
            return all(member(p, b) for b in bs)
        # splits only: the un-deleted bottom copies intersect iff the
        # underlying base elements do
        return s.meets_all(tuple(d[1] for d in decoded))

    if n is not None:
        base_count = n + s.base_count * (2 ** n)
        pc = 2 * n
    else:
        base_count = None
        pc = None
    return Space(label=f"double:{s.label}", point_count=pc, base_count=base_count,
                 member=member, base_witness=witness, meets_all=meets_all,
                 meta={"kind": "double", "parent": s})


# ---------------------------------------------------------------------------
# products


def _grid_pair(count_x: int | None, count_y: int | None, i: int, j: int) -> int:
    if count_x is not None and count_y is not None:
        return i * count_y + j
    if count_x is not None:
        return j * count_x + i
    if count_y is not None:
        return i * count_y + j
    return cantor_pair(i, j)


def _grid_unpair(count_x: int | None, count_y: int | None, n: int) -> tuple[int, int]:
    if count_x is not None and count_y is not None:
        return divmod(n, count_y)
    if count_x is not None:
        j, i = divmod(n, count_x)
        return i, j
    if count_y is not None:
        return divmod(n, count_y)
    return cantor_unpair(n)


def product_point(sx: Space, sy: Space, i: int, j: int) -> int:
    return _grid_pair(sx.point_count, sy.point_count, i, j)


def product_unpoint(sx: Space, sy: Space, n: int) -> tuple[int, int]:
    return _grid_unpair(sx.point_count, sy.point_count, n)


def product_base(sx: Space, sy: Space, a: int, b: int) -> int:
    return _grid_pair(sx.base_count, sy.base_count, a, b)


def product_unbase(sx: Space, sy: Space, r: int) -> tuple[int, int]:
    return _grid_unpair(sx.base_count, sy.base_count, r)


def product(sx: Space, sy: Space) -> Space:
    """Product space with the rectangle base."""

    def member(p: int, r: int) -> bool:
        i, j = product_unpoint(sx, sy, p)
        a, b = product_unbase(sx, sy, r)
        return sx.member(i, a) and sy.member(j, b)

    def witness(r: int) -> int:
        a, b = product_unbase(sx, sy, r)
        return product_point(sx, sy, sx.base_witness(a), sy.base_witness(b))

    def meets_all(rs: tuple[int, ...]):
        rects = [product_unbase(sx, sy, r) for r in rs]
        mx = sx.meets_all(tuple(a for a, _ in rects))
        my = sy.meets_all(tuple(b for _, b in rects))
        if mx is False or my is False:
            return False
        if mx is True and my is True:
            return True
        return None

    pc = (sx.point_count * sy.point_count
          if sx.point_count is not None and sy.point_count is not None else None)
    bc = (sx.base_count * sy.base_count
          if sx.base_count is not None and sy.base_count is not None else None)
    return Space(label=f"product:{sx.label},{sy.label}", point_count=pc,
                 base_count=bc, member=member, base_witness=witness,
                 meets_all=meets_all,
                 meta={"kind": "product", "factors": (sx, sy)})


# ---------------------------------------------------------------------------
# subspaces


def _filtered_points(s: Space, keep: Callable[[int], bool]):
    """(point fn, reverse lookup fn, count) for the subspace points."""
    if s.point_count is not None:
        pts = tuple(p for p in range(s.point_count) if keep(p))
        rev = {p: i for i, p in enumerate(pts)}
        return (lambda i: pts[i]), (lambda p: rev.get(p)), len(pts)
    seq = LazySeq(p for p in itertools.count() if keep(p))

    def rev_lookup(p: int, bound: int = DEFAULT_BOUND):
        # the filtered enumeration is ascending, so we can stop early
        for i in range(bound):
            q = seq(i)
            if q == p:
                return i
            if q > p:
                return None
        return None

    return seq, rev_lookup, None


def open_subspace(s: Space, u: OpenSet) -> Space:
    """Subspace on the points of the open set u; the base consists of the
    nonempty traces of the parent base elements.  Needs an exact meets
    oracle on the parent to skip empty traces."""
    if u.is_empty:
        raise ValueError("open_subspace needs a nonempty open set")

    def trace_nonempty(b: int):
        return s.opens_meet(OpenSet((b,)), u)

    point_fn, rev_point, pc = _filtered_points(s, lambda p: s.point_in(p, u))

    if s.base_count is not None:
        kept = []
        for b in range(s.base_count):
            r = trace_nonempty(b)
            if r is None:
                raise TopogameError(
                    f"{s.label}: cannot decide trace emptiness (no meets oracle)")
            if r:
                kept.append(b)
        kept_t = tuple(kept)
        base_fn = lambda i: kept_t[i]
        rev_base = {b: i for i, b in enumerate(kept_t)}.get
        bc = len(kept_t)
    else:
        def base_gen():
            for b in itertools.count():
                r = trace_nonempty(b)
                if r is None:
                    raise TopogameError(
                        f"{s.label}: cannot decide trace emptiness")
                if r:
                    yield b
        base_seq = LazySeq(base_gen())
        base_fn = base_seq

        def rev_base(b: int, bound: int = DEFAULT_BOUND):
            for i in range(bound):
                q = base_seq(i)
                if q == b:
                    return i
                if q > b:
                    return None
            return None
        bc = None

    def member(p: int, b: int) -> bool:
        return s.member(point_fn(p), base_fn(b))

    witness_cache = MemoSeq(lambda b: _find_sub_witness(b))

    def _find_sub_witness(b: int) -> int:
        pb = base_fn(b)
        limit = pc if pc is not None else DEFAULT_BOUND
        for i in range(limit):
            if s.member(point_fn(i), pb):
                return i
        raise SearchBoundExceeded(f"witness for trace of base {pb}", limit)

    def meets_all(bs: tuple[int, ...]):
        parent_bs = tuple(base_fn(b) for b in bs)
        saw_unknown = False
        for w in u.parts:
            r = s.meets_all(parent_bs + (w,))
            if r is True:
                return True
            if r is None:
                saw_unknown = True
        return None if saw_unknown else False

    return Space(label=f"opensub:{s.label}", point_count=pc, base_count=bc,
                 member=member, base_witness=witness_cache, meets_all=meets_all,
                 meta={"kind": "opensub", "parent": s, "open": u,
                       "point_to_parent": point_fn, "parent_to_point": rev_point,
                       "base_to_parent": base_fn, "parent_to_base": rev_base})


def subset_space(s: Space, pts: FiniteSet, label: str = "") -> Space:
    """Trace topology on an arbitrary finite subset of a finite space."""
    if s.point_count is None:
        raise TopogameError("subset_space needs a finite parent")
    if not pts.elements:
        raise ValueError("empty subset")
    elems = pts.elements
    rev = {p: i for i, p in enumerate(elems)}
    kept = tuple(b for b in range(s.base_count)
                 if any(s.member(p, b) for p in elems))
    rev_base = {b: i for i, b in enumerate(kept)}

    def member(p: int, b: int) -> bool:
        return s.member(elems[p], kept[b])

    def witness(b: int) -> int:
        for i, p in enumerate(elems):
            if s.member(p, kept[b]):
                return i
        raise AssertionError("kept base with empty trace")

    def meets_all(bs: tuple[int, ...]):
        return any(all(s.member(p, kept[b]) for b in bs) for p in elems)

    def subset_of(x: OpenSet, y: OpenSet):
        xs = {p for b in x.parts for p in elems if s.member(p, kept[b])}
        ys = {p for b in y.parts for p in elems if s.member(p, kept[b])}
        return xs <= ys

    return Space(label=label or f"subset:{s.label}", point_count=len(elems),
                 base_count=len(kept), member=member, base_witness=witness,
                 meets_all=meets_all, subset_of=subset_of,
                 meta={"kind": "subset", "parent": s, "points": elems,
                       "point_to_parent": lambda i: elems[i],
                       "parent_to_point": rev.get,
                       "base_to_parent": lambda i: kept[i],
                       "parent_to_base": rev_base.get})


def trace_space(s: Space, d: PointSet, label: str = "") -> Space:
    """Trace topology on a dense subset of a countable space: the base keeps
    the parent indexing (density promises every trace nonempty)."""
    if s.point_count is not None:
        pts = FiniteSet.of(*(p for p in range(s.point_count) if d.contains(p)))
        return subset_space(s, pts, label=label or f"trace:{s.label}")

    def gen():
        seen = set()
        for i in itertools.count():
            p = d.enumerate(i)
            if p not in seen:
                seen.add(p)
                yield p

    seq = LazySeq(gen())

    def rev_point(p: int, bound: int = DEFAULT_BOUND):
        for i in range(bound):
            if seq(i) == p:
                return i
        return None

    def member(p: int, b: int) -> bool:
        return s.member(seq(p), b)

    def witness(b: int) -> int:
        for i in range(DEFAULT_BOUND):
            if s.member(seq(i), b):
                return i
        raise SearchBoundExceeded(f"dense-trace witness in base {b}",
                                  DEFAULT_BOUND)

    return Space(label=label or f"trace:{s.label}", point_count=None,
                 base_count=s.base_count, member=member,
                 base_witness=MemoSeq(witness),
                 meta={"kind": "trace", "parent": s,
                       "point_to_parent": seq, "parent_to_point": rev_point,
                       "base_to_parent": lambda b: b,
                       "parent_to_base": lambda b: b})


# ---------------------------------------------------------------------------
# finite-union closure of the base


def union_closed(s: Space) -> Space:
    """Same space, base re-enumerated as all nonempty finite unions of the
    parent base elements (so the base is closed under finite unions)."""

    if s.base_count is not None:
        bc = 2 ** s.base_count - 1

        def decode(j: int) -> tuple[int, ...]:
            if j >= bc:
                raise IndexError(j)
            return bits_of(j + 1)
    else:
        bc = None

        def decode(j: int) -> tuple[int, ...]:
            return bits_of(j + 1)

    def member(p: int, j: int) -> bool:
        return any(s.member(p, b) for b in decode(j))

    def witness(j: int) -> int:
        return s.base_witness(decode(j)[0])

    def meets_all(js: tuple[int, ...]):
        groups = [decode(j) for j in js]
        saw_unknown = False
        for choice in itertools.product(*groups):
            r = s.meets_all(choice)
            if r is True:
                return True
            if r is None:
                saw_unknown = True
        return None if saw_unknown else False

    def subset_of(x: OpenSet, y: OpenSet):
        xs = sorted({b for j in x.parts for b in decode(j)})
        ys = sorted({b for j in y.parts for b in decode(j)})
        return s.subset_of(OpenSet(tuple(xs)), OpenSet(tuple(ys)))

    return Space(label=f"unions:{s.label}", point_count=s.point_count,
                 base_count=bc, member=member, base_witness=witness,
                 meets_all=meets_all, subset_of=subset_of,
                 meta={"kind": "union_closed", "parent": s, "decode": decode})


def union_closed_index(parent_parts) -> int:
    """Base index of a given nonempty set of parent base indices."""
    code = code_of_bits(parent_parts)
    if code == 0:
        raise ValueError("empty union")
    return code - 1


# ---------------------------------------------------------------------------
# validation


def validate_space(s: Space, horizon: int = 8,
                   search_bound: int = DEFAULT_BOUND) -> dict:
    """Check the base axioms: nonempty witnesses, covering, and refinement of
    intersections.  Exact on finite spaces, spot-checked to the horizon on
    countable ones."""
    problems: list[str] = []
    indet = False
    finite = s.point_count is not None
    mb = _cap(horizon, s.base_count)
    mp = _cap(horizon, s.point_count)
    if finite:
        mb, mp = s.base_count, s.point_count

    for b in range(mb):
        if not s.member(s.base_witness(b), b):
            problems.append(f"base {b}: witness not a member")

    for p in range(mp):
        limit = s.base_count if finite else search_bound
        if not any(s.member(p, b) for b in range(limit)):
            if finite:
                problems.append(f"point {p} not covered by the base")
            else:
                indet = True

    for b1 in range(mb):
        for b2 in range(mb):
            if finite:
                common = [p for p in range(s.point_count)
                          if s.member(p, b1) and s.member(p, b2)]
                for p in common:
                    ok = any(
                        s.member(p, b3)
                        and all(not s.member(q, b3) or
                                (s.member(q, b1) and s.member(q, b2))
                                for q in range(s.point_count))
                        for b3 in range(s.base_count))
                    if not ok:
                        problems.append(
                            f"refinement fails at point {p} in {b1}&{b2}")
            else:
                if s.subset_of is _unknown_subset:
                    indet = True
                    continue
                for p in (q for q in range(mp)
                          if s.member(q, b1) and s.member(q, b2)):
                    found = False
                    for b3 in range(search_bound):
                        if not s.member(p, b3):
                            continue
                        if (s.subset_of(OpenSet((b3,)), OpenSet((b1,)))
                                and s.subset_of(OpenSet((b3,)), OpenSet((b2,)))):
                            found = True
                            break
                    if not found:
                        indet = True
    ok: object = not problems
    if ok and indet:
        ok = INDETERMINATE
    return {"ok": ok, "problems": problems}
