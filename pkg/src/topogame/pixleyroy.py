"""Hyperspaces of finite sets and the double-cover calculus.

The hyperspace of a space s has the finite point sets of s as points
(canonical bit-code enumeration) and the sets [F,U] = {G : F <= G <= U} as
base elements, where F is a finite set inside the open set U.  Families of
such (F,U) pairs are DoubleCovers; the horizon-bounded class predicate asks
that every tested pair (G,V) with G <= V admits a member with F <= V and
G <= U.  Open parts of pairs are always nonempty (covers exclude the empty
open set throughout the package).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .enumutil import LazySeq, MemoSeq, bits_of, cantor_pair, cantor_unpair, code_of_bits
from .errors import SearchBoundExceeded, TopogameError
from .space import (
    DEFAULT_BOUND,
    INDETERMINATE,
    CoverFamily,
    FiniteSet,
    OpenSet,
    Space,
    _cap,
    canonical_finite_set,
    finite_set_code,
)


class OmegaCover(CoverFamily):
    """Open family promised to contain a superset of every finite point set."""


@dataclass(eq=False)
class DoubleCover:
    """Lazily enumerated family of (FiniteSet, OpenSet) pairs with F <= U,
    checked on access.  The only pair with an empty open part is the
    degenerate (emptyset, emptyset)."""

    space: Space
    at_raw: Callable[[int], tuple[FiniteSet, OpenSet]]
    size: int | None = None
    label: str = ""

    def at(self, n: int) -> tuple[FiniteSet, OpenSet]:
        f, u = self.at_raw(n)
        if not all(self.space.point_in(p, u) for p in f.elements):
            raise TopogameError(f"{self.label}: pair {n} violates F <= U")
        return f, u

    @classmethod
    def from_pairs(cls, space: Space, pairs, label: str = "") -> "DoubleCover":
        pairs = tuple(pairs)
        return cls(space=space, at_raw=lambda n: pairs[n], size=len(pairs),
                   label=label)

    @classmethod
    def from_fn(cls, space: Space, fn, size: int | None = None,
                label: str = "") -> "DoubleCover":
        return cls(space=space, at_raw=MemoSeq(fn), size=size, label=label)

    def iter_pairs(self) -> Iterator[tuple[FiniteSet, OpenSet]]:
        if self.size is None:
            raise TopogameError("cannot iterate an infinite double cover")
        return (self.at(n) for n in range(self.size))


# ---------------------------------------------------------------------------
# the hyperspace construction


def pixley_roy(s: Space) -> Space:
    """Hyperspace of finite subsets of s: point g is the finite set with
    bit-code g; base elements enumerate the valid pairs [F,U].

    The open part ranges over every canonical open set including the empty
    one, which admits exactly the pair [emptyset, emptyset] = {emptyset};
    without it the traces around the empty set would violate the base
    axiom."""
    n, m = s.point_count, s.base_count

    def pair_valid(fcode: int, parts: tuple[int, ...]) -> bool:
        u = OpenSet(parts)
        return all(s.point_in(p, u) for p in bits_of(fcode))

    if n is not None:
        pairs = []
        for fcode in range(1 << n):
            for ucode in range(1 << m):
                parts = bits_of(ucode)
                if pair_valid(fcode, parts):
                    pairs.append((fcode, parts))
        pair_of = lambda idx: pairs[idx]
        base_count = len(pairs)
        pair_index = {pr: i for i, pr in enumerate(pairs)}.get
        point_count = 1 << n
    else:
        def gen():
            for c in itertools.count():
                fcode, ucode = cantor_unpair(c)
                parts = bits_of(ucode)
                if pair_valid(fcode, parts):
                    yield (fcode, parts)
        seq = LazySeq(gen())
        pair_of = seq
        base_count = None

        def pair_index(pr, bound: int = 10**6):
            for i in range(bound):
                got = pair_of(i)
                if got == pr:
                    return i
                if cantor_pair(got[0], code_of_bits(got[1])) > \
                        cantor_pair(pr[0], code_of_bits(pr[1])):
                    return None
            return None
        point_count = None

    def member(g: int, idx: int) -> bool:
        fcode, parts = pair_of(idx)
        if fcode & ~g:
            return False
        u = OpenSet(parts)
        return all(s.point_in(p, u) for p in bits_of(g & ~fcode))

    def witness(idx: int) -> int:
        return pair_of(idx)[0]

    def meets_all(idxs: tuple[int, ...]):
        decoded = [pair_of(i) for i in idxs]
        union_f = 0
        for fcode, _ in decoded:
            union_f |= fcode
        return all(s.point_in(p, OpenSet(parts))
                   for p in bits_of(union_f)
                   for _, parts in decoded)

    return Space(label=f"pr:{s.label}", point_count=point_count,
                 base_count=base_count, member=member, base_witness=witness,
                 meets_all=meets_all,
                 meta={"kind": "pr", "parent": s, "pair_of": pair_of,
                       "pair_index": pair_index})


def pr_pair(pr_space: Space, idx: int) -> tuple[FiniteSet, OpenSet]:
    fcode, parts = pr_space.meta["pair_of"](idx)
    return FiniteSet(bits_of(fcode)), OpenSet(parts)


def pr_base_index(pr_space: Space, f: FiniteSet, u: OpenSet) -> int:
    """Base index of the pair [F,U] in the hyperspace; exact part match."""
    got = pr_space.meta["pair_index"]((finite_set_code(f), u.parts))
    if got is None:
        raise KeyError((f, u))
    return got


# ---------------------------------------------------------------------------
# class predicates


def tested_pairs(s: Space, m: int) -> Iterator[tuple[FiniteSet, OpenSet]]:
    """The horizon-m test universe: the first m canonical finite sets G and
    every union V of base elements below m (including the empty union,
    which only pairs with the empty G), with G <= V."""
    mf = m if s.point_count is None else min(m, 1 << s.point_count)
    mb = _cap(m, s.base_count)
    for gcode in range(mf):
        g = FiniteSet(bits_of(gcode))
        for vcode in range(1 << mb):
            v = OpenSet(bits_of(vcode))
            if all(s.point_in(p, v) for p in g.elements):
                yield g, v


def is_double_cover_at_horizon(s: Space, dc: DoubleCover, m: int,
                               search_bound: int = DEFAULT_BOUND):
    """Does every tested pair (G,V) admit a member (F,U) with F <= V and
    G <= U within search_bound enumeration steps?"""
    scan = search_bound if dc.size is None else min(dc.size, search_bound)
    exhaustive = dc.size is not None and dc.size <= search_bound
    undecided = False
    for g, v in tested_pairs(s, m):
        found = False
        for k in range(scan):
            f, u = dc.at(k)
            if (all(s.point_in(p, v) for p in f.elements)
                    and all(s.point_in(p, u) for p in g.elements)):
                found = True
                break
        if not found:
            if exhaustive:
                return False
            undecided = True
    return INDETERMINATE if undecided else True


def is_omega_cover_at_horizon(s: Space, oc: CoverFamily, m: int,
                              search_bound: int = DEFAULT_BOUND):
    """Does some member contain each of the first m canonical finite sets?"""
    mf = m if s.point_count is None else min(m, 1 << s.point_count)
    scan = search_bound if oc.size is None else min(oc.size, search_bound)
    exhaustive = oc.size is not None and oc.size <= search_bound
    undecided = False
    for gcode in range(mf):
        g = bits_of(gcode)
        if not any(all(s.point_in(p, oc.at(k)) for p in g)
                   for k in range(scan)):
            if exhaustive:
                return False
            undecided = True
    return INDETERMINATE if undecided else True


# ---------------------------------------------------------------------------
# translations


def embed_omega_cover(s: Space, oc: CoverFamily, label: str = "") -> DoubleCover:
    """View an omega-cover as a double cover by pairing every member with
    the empty finite set; enumeration order is preserved."""
    empty = FiniteSet(())
    return DoubleCover(space=s, at_raw=lambda n: (empty, oc.at(n)),
                       size=oc.size, label=label or f"embed:{oc.label}")


def doublecover_to_hyperspace_family(pr_space: Space, dc: DoubleCover,
                                     ) -> CoverFamily:
    """Pair family -> family of basic opens of the hyperspace (one part per
    pair)."""
    def at(n: int) -> OpenSet:
        f, u = dc.at(n)
        return OpenSet((pr_base_index(pr_space, f, u),))

    return CoverFamily(at=MemoSeq(at), size=dc.size,
                       label=f"hyper:{dc.label}")


def hyperspace_family_to_doublecover(pr_space: Space, fam: CoverFamily,
                                     ) -> DoubleCover:
    """Family of basic hyperspace opens -> pair family; rejects members that
    are not single basic sets."""
    parent = pr_space.meta["parent"]

    def at(n: int) -> tuple[FiniteSet, OpenSet]:
        o = fam.at(n)
        if len(o.parts) != 1:
            raise TopogameError(f"member {n} is not a basic hyperspace open")
        return pr_pair(pr_space, o.parts[0])

    return DoubleCover(space=parent, at_raw=MemoSeq(at), size=fam.size,
                       label=f"pairs:{fam.label}")


# ---------------------------------------------------------------------------
# selectors


def omega_selector_countable(s: Space, covers, search_bound: int = DEFAULT_BOUND,
                             ) -> CoverFamily:
    """Effective witness that countable spaces select from omega-covers:
    selection(n) is the first member of covers(n) containing the n-th
    canonical finite point set, so every finite set is eventually served."""
    if s.point_count is not None:
        raise TopogameError("omega_selector_countable expects a countable space")
    cov = covers if callable(covers) else (lambda n, _c=tuple(covers): _c[n])

    def at(n: int) -> OpenSet:
        target = canonical_finite_set(s, n)
        oc = cov(n)
        scan = search_bound if oc.size is None else min(oc.size, search_bound)
        for k in range(scan):
            u = oc.at(k)
            if all(s.point_in(p, u) for p in target.elements):
                return u
        raise SearchBoundExceeded(
            f"omega-cover member containing finite set {target.elements} "
            f"in cover {n}", search_bound)

    return CoverFamily(at=MemoSeq(at), size=None, label="omega-selection")


def partition_block(n: int) -> tuple[int, int]:
    """Block/position of inning n in the fixed diagonal partition:
    n = diag(k, j) with diag(k, j) = (k+j)(k+j+1)/2 + k."""
    return cantor_unpair(n)


def diag(k: int, j: int) -> int:
    return cantor_pair(k, j)


def base_point_enumeration(s: Space, b: int,
                           search_bound: int = DEFAULT_BOUND):
    """Sub-enumeration of the points lying in base element b, as a pair
    (fn, count) with count None when the space is countable."""
    cache = s.meta.setdefault("_base_points", {})
    got = cache.get(b)
    if got is None:
        if s.point_count is None:
            def gen():
                hits = 0
                for p in itertools.count():
                    if s.member(p, b):
                        hits += 1
                        yield p
                    if p > search_bound * (hits + 1):
                        raise SearchBoundExceeded(
                            f"points of base element {b}", search_bound)
            got = (LazySeq(gen()), None)
        else:
            pts = tuple(p for p in range(s.point_count) if s.member(p, b))
            got = ((lambda i, _t=pts: _t[i]), len(pts))
        cache[b] = got
    return got


def second_countable_double_selector(s: Space, dcs,
                                     search_bound: int = DEFAULT_BOUND,
                                     ) -> DoubleCover:
    """Selection from a sequence of double covers on a space whose base is
    closed under finite unions.

    Inning n belongs to block k of the diagonal partition; the selector
    searches dcs(n) for the first pair whose open part lies inside base
    element k and contains the j-th canonical finite subset of that base
    element's points, where j is n's position within the block.  On a
    finite base the blocks wrap around modulo the base count."""
    seq = dcs if callable(dcs) else (lambda n, _c=tuple(dcs): _c[n])

    def at(n: int) -> tuple[FiniteSet, OpenSet]:
        k, j = partition_block(n)
        if s.base_count is not None:
            k %= s.base_count
        block_open = OpenSet((k,))
        pts, count = base_point_enumeration(s, k, search_bound)
        if count is not None:
            j %= 1 << count
        target = FiniteSet.of(*(pts(i) for i in bits_of(j)))
        dc = seq(n)
        scan = search_bound if dc.size is None else min(dc.size, search_bound)
        for idx in range(scan):
            f, u = dc.at(idx)
            inside = s.subset_of(u, block_open)
            if inside is None:
                raise TopogameError(
                    f"{s.label}: no exact subset oracle for the selector")
            if not inside:
                continue
            if all(s.point_in(p, u) for p in target.elements):
                return f, u
        raise SearchBoundExceeded(
            f"pair with open part inside base {k} containing "
            f"{target.elements} in cover {n}", search_bound)

    return DoubleCover(space=s, at_raw=MemoSeq(at), size=None,
                       label="double-selection")
