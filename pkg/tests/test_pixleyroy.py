import itertools
from fractions import Fraction

import pytest

from topogame.enumutil import bits_of, cantor_pair
from topogame.errors import SearchBoundExceeded, TopogameError
from topogame.finsolve import all_finite_spaces, fin_context
from topogame.games import family_dense_union_at_horizon
from topogame.pixleyroy import (
    DoubleCover,
    diag,
    doublecover_to_hyperspace_family,
    embed_omega_cover,
    hyperspace_family_to_doublecover,
    is_double_cover_at_horizon,
    is_omega_cover_at_horizon,
    omega_selector_countable,
    partition_block,
    pixley_roy,
    pr_base_index,
    pr_pair,
    second_countable_double_selector,
)
from topogame.space import (
    INDETERMINATE,
    CoverFamily,
    FiniteSet,
    OpenSet,
    discrete,
    dyadic_interval,
    open_subspace,
    rationals,
    sierpinski,
    union_closed,
    union_closed_index,
    validate_space,
)

RAT = rationals()
D2 = discrete(2)
PR2 = pixley_roy(D2)


def pr_members(pr, idx):
    """All hyperspace points inside base element idx (finite spaces)."""
    return {g for g in range(pr.point_count) if pr.member(g, idx)}


def fs(*elements):
    return FiniteSet.of(*elements)


# ---------------------------------------------------------------------------
# the construction


def test_pr_of_two_point_discrete_has_four_points():
    assert PR2.point_count == 4
    assert validate_space(PR2)["ok"] is True


def test_empty_set_lies_in_every_empty_rooted_base():
    for idx in range(PR2.base_count):
        f, _u = pr_pair(PR2, idx)
        if f.elements == ():
            assert PR2.member(0, idx)  # code 0 is the empty set


def test_bracket_singleton_whole_space():
    whole = OpenSet((0, 1))
    idx = pr_base_index(PR2, fs(0), whole)
    # exhaustive oracle: all G with {0} <= G <= X
    oracle = {g for g in range(4)
              if all(D2.point_in(p, whole) for p in bits_of(g)) and g & 0b01}
    assert pr_members(PR2, idx) == oracle == {0b01, 0b11}


def test_full_set_is_isolated():
    whole = OpenSet((0, 1))
    idx = pr_base_index(PR2, fs(0, 1), whole)
    assert pr_members(PR2, idx) == {0b11}


def test_pair_validity_checked_on_access():
    bad = DoubleCover.from_pairs(D2, [(fs(0), OpenSet((1,)))])
    with pytest.raises(TopogameError):
        bad.at(0)
    with pytest.raises(TopogameError):
        DoubleCover.from_pairs(D2, [(fs(0), OpenSet(()))]).at(0)
    # the degenerate empty/empty pair is the one admissible empty-open pair
    assert DoubleCover.from_pairs(D2, [(fs(), OpenSet(()))]).at(0) == \
        (fs(), OpenSet(()))


def test_empty_bracket_is_a_base_element():
    idx = pr_base_index(PR2, fs(), OpenSet(()))
    assert pr_members(PR2, idx) == {0}


# ---------------------------------------------------------------------------
# the double-cover predicate


def all_valid_pairs(s):
    n, m = s.point_count, s.base_count
    out = []
    for ucode in range(1 << m):
        u = OpenSet(bits_of(ucode))
        for fcode in range(1 << n):
            if all(s.point_in(p, u) for p in bits_of(fcode)):
                out.append((FiniteSet(bits_of(fcode)), u))
    return out


def test_empty_rooted_whole_space_pair_is_double_cover():
    dc = DoubleCover.from_pairs(D2, [(fs(), OpenSet((0, 1)))])
    assert is_double_cover_at_horizon(D2, dc, 4) is True


def test_rooted_pair_fails_on_small_test_open():
    dc = DoubleCover.from_pairs(D2, [(fs(0), OpenSet((0, 1)))])
    # the tested pair (emptyset, {1}) has no witness with F <= {1}
    assert is_double_cover_at_horizon(D2, dc, 4) is False


def test_wide_interval_pairs_cover_rationals_horizon_six():
    # pairs (F, single dyadic interval of length >= 1/8) with F inside it
    from topogame.enumutil import cantor_unpair

    def pair_at(k, _cache={}):
        # k-th valid (F, interval) pair with interval length >= 1/8
        seen = _cache.setdefault("list", [])
        c = _cache.get("next", 0)
        while len(seen) <= k:
            fcode, iidx = cantor_unpair(c)
            c += 1
            lo, hi = dyadic_interval(iidx)
            if hi - lo < Fraction(1, 8):
                continue
            u = OpenSet((iidx,))
            if all(RAT.point_in(p, u) for p in bits_of(fcode)):
                seen.append((FiniteSet(bits_of(fcode)), u))
        _cache["next"] = c
        return seen[k]

    dc = DoubleCover.from_fn(RAT, pair_at, size=None, label="wide-intervals")
    assert is_double_cover_at_horizon(RAT, dc, 6, search_bound=4000) is True


def test_double_cover_indeterminate_when_witness_never_found():
    from topogame.space import dyadic_interval_index

    # constant pair whose open part misses the rational 0, while the tested
    # universe at m=6 includes (G={0}, V=(-1,1)); the infinite enumeration
    # can never be refuted, so the check is indeterminate
    half = dyadic_interval_index(0, Fraction(1, 2))
    dc = DoubleCover.from_fn(RAT, lambda n: (fs(), OpenSet((half,))),
                             size=None)
    assert is_double_cover_at_horizon(RAT, dc, 6, search_bound=50) \
        is INDETERMINATE


# ---------------------------------------------------------------------------
# embedding omega-covers


def test_embed_constant_whole_space():
    oc = CoverFamily.from_list([OpenSet((0, 1))], label="whole")
    dc = embed_omega_cover(D2, oc)
    assert dc.at(0) == (fs(), OpenSet((0, 1)))
    assert is_double_cover_at_horizon(D2, dc, 4) is True


def test_embed_preserves_enumeration_order():
    oc = CoverFamily.from_list([OpenSet((0, 1)), OpenSet((0,))])
    dc = embed_omega_cover(D2, oc)
    for n in range(2):
        assert dc.at(n)[1] == oc.at(n)


def test_embed_omega_cover_gives_double_cover_finite_exhaustive():
    # every omega-cover of a small finite space embeds to a double cover at
    # the same horizon
    for s in all_finite_spaces(2):
        full = 1 << s.point_count
        opens = [OpenSet(bits_of(c)) for c in range(1, 1 << s.base_count)]
        for r in (1, 2):
            for members in itertools.combinations(opens, r):
                oc = CoverFamily.from_list(members)
                if is_omega_cover_at_horizon(s, oc, full) is True:
                    dc = embed_omega_cover(s, oc)
                    assert is_double_cover_at_horizon(s, dc, full) is True


# ---------------------------------------------------------------------------
# translations (the hyperspace equivalence)


def pr_dense(pr, fam):
    return family_dense_union_at_horizon(pr, fam, pr.base_count,
                                         search_bound=10000)


def test_all_pairs_family_has_dense_union():
    pairs = all_valid_pairs(D2)
    dc = DoubleCover.from_pairs(D2, pairs)
    fam = doublecover_to_hyperspace_family(PR2, dc)
    assert pr_dense(PR2, fam) is True


def test_whole_pair_family_is_whole_hyperspace():
    dc = DoubleCover.from_pairs(D2, [(fs(), OpenSet((0, 1)))])
    fam = doublecover_to_hyperspace_family(PR2, dc)
    assert pr_members(PR2, fam.at(0).parts[0]) == {0, 1, 2, 3}
    assert pr_dense(PR2, fam) is True


def test_rooted_pair_family_misses_empty_bracket():
    dc = DoubleCover.from_pairs(D2, [(fs(0), OpenSet((0, 1)))])
    fam = doublecover_to_hyperspace_family(PR2, dc)
    miss = pr_base_index(PR2, fs(), OpenSet((1,)))
    member_set = pr_members(PR2, fam.at(0).parts[0])
    assert not member_set & pr_members(PR2, miss)
    assert pr_dense(PR2, fam) is False


def test_round_trip_identity_on_pairs():
    pairs = all_valid_pairs(D2)
    dc = DoubleCover.from_pairs(D2, pairs)
    fam = doublecover_to_hyperspace_family(PR2, dc)
    back = hyperspace_family_to_doublecover(PR2, fam)
    for n in range(len(pairs)):
        assert back.at(n) == dc.at(n)


def test_translation_rejects_non_basic_members():
    fam = CoverFamily.from_list([OpenSet((0, 1))])
    back = hyperspace_family_to_doublecover(PR2, fam)
    with pytest.raises(TopogameError):
        back.at(0)


def test_equivalence_dense_iff_double_cover_two_point_spaces():
    # the hyperspace translation preserves the class in both directions:
    # exhaustive over all spaces on <= 2 points and families of <= 2 basics
    for s in all_finite_spaces(2):
        pr = pixley_roy(s)
        full = 1 << s.point_count
        pairs = all_valid_pairs(s)
        for r in (1, 2):
            for chosen in itertools.combinations(pairs, r):
                dc = DoubleCover.from_pairs(s, chosen)
                fam = doublecover_to_hyperspace_family(pr, dc)
                dense = pr_dense(pr, fam)
                isdc = is_double_cover_at_horizon(s, dc, full)
                assert dense == isdc, (s.label, chosen)
                back = hyperspace_family_to_doublecover(pr, fam)
                assert is_double_cover_at_horizon(s, back, full) == dense


# ---------------------------------------------------------------------------
# open subspaces of hyperspaces


def test_pr_of_open_subspace_matches_subspace_of_pr():
    for s in (sierpinski(), discrete(2)):
        for ucode in range(1, 1 << s.base_count):
            u = OpenSet(bits_of(ucode))
            sub = open_subspace(s, u)
            lhs = pixley_roy(sub)
            bracket = pr_base_index(pixley_roy(s), fs(), u)
            rhs = open_subspace(pixley_roy(s), OpenSet((bracket,)))
            # canonical point bijection: a finite set of subspace points
            # maps to the same set of parent points
            to_parent = sub.meta["point_to_parent"]
            rhs_rev = rhs.meta["parent_to_point"]

            def lhs_to_rhs(g):
                parent_code = sum(1 << to_parent(p) for p in bits_of(g))
                r = rhs_rev(parent_code)
                assert r is not None
                return r

            assert lhs.point_count == rhs.point_count
            mapping = [lhs_to_rhs(g) for g in range(lhs.point_count)]
            assert sorted(mapping) == list(range(rhs.point_count))
            # identical membership tables: each lhs base element appears in
            # the rhs base with the same column
            rhs_base_rev = rhs.meta["parent_to_base"]
            pr_s = pixley_roy(s)
            for idx in range(lhs.base_count):
                f_sub, u_sub = pr_pair(lhs, idx)
                f_par = fs(*(to_parent(p) for p in f_sub.elements))
                u_par_parts = tuple(sorted(
                    sub.meta["base_to_parent"](b) for b in u_sub.parts))
                parent_idx = pr_base_index(pr_s, f_par, OpenSet(u_par_parts))
                rhs_idx = rhs_base_rev(parent_idx)
                assert rhs_idx is not None
                for g in range(lhs.point_count):
                    assert lhs.member(g, idx) == rhs.member(mapping[g], rhs_idx)
            # and the full open-set lattices agree under the bijection
            lhs_opens = {
                frozenset(mapping[p] for p in bits_of(m))
                for m in fin_context(lhs).topo.opens}
            rhs_opens = {frozenset(bits_of(m))
                         for m in fin_context(rhs).topo.opens}
            assert lhs_opens == rhs_opens


# ---------------------------------------------------------------------------
# selectors


def big_interval_cover(n):
    """Omega-cover of the rationals: all dyadic intervals, widest first into
    the enumeration (every finite set fits in some interval)."""
    return CoverFamily.from_fn(
        lambda k: OpenSet((k,)), size=None, label=f"intervals:{n}")


def test_omega_selector_serves_canonical_finite_sets():
    sel = omega_selector_countable(RAT, big_interval_cover, search_bound=20000)
    for n in range(8):
        u = sel.at(n)
        from topogame.space import canonical_finite_set
        target = canonical_finite_set(RAT, n)
        assert all(RAT.point_in(p, u) for p in target.elements)


def test_omega_selector_output_is_omega_cover_at_horizon():
    sel = omega_selector_countable(RAT, big_interval_cover, search_bound=20000)
    assert is_omega_cover_at_horizon(RAT, sel, 8, search_bound=10000) is True


def test_omega_selector_rejects_finite_space():
    with pytest.raises(TopogameError):
        omega_selector_countable(D2, lambda n: big_interval_cover(n))


def test_partition_diagonal_values():
    assert diag(0, 0) == 0 and diag(0, 1) == 1 and diag(1, 0) == 2
    assert partition_block(0) == (0, 0)
    assert partition_block(1) == (0, 1)
    assert partition_block(2) == (1, 0)


def single_base_pair_family(s, search_hint=None):
    """All valid pairs (F, single base element), diagonal enumeration."""
    from topogame.enumutil import cantor_unpair

    def pair_at(k, _cache={}):
        seen = _cache.setdefault("list", [])
        c = _cache.get("next", 0)
        while len(seen) <= k:
            fcode, b = cantor_unpair(c)
            c += 1
            u = OpenSet((b,))
            if all(s.point_in(p, u) for p in bits_of(fcode)):
                seen.append((FiniteSet(bits_of(fcode)), u))
        _cache["next"] = c
        return seen[k]

    return DoubleCover.from_fn(s, pair_at, size=None, label="single-base-pairs")


def test_double_selector_one_point_space():
    s = discrete(1)
    dcs = lambda n: DoubleCover.from_pairs(
        s, [(fs(), OpenSet((0,))), (fs(0), OpenSet((0,)))])
    out = second_countable_double_selector(s, dcs)
    for n in range(6):
        f, u = out.at(n)
        assert u == OpenSet((0,))
        assert f.elements in ((), (0,))
    assert is_double_cover_at_horizon(s, out, 2, search_bound=8) is True


def test_double_selector_smoke_on_union_closed_rationals():
    s = union_closed(RAT)
    fam = single_base_pair_family(s)
    out = second_countable_double_selector(s, lambda n: fam,
                                           search_bound=30000)
    f0, u0 = out.at(0)
    assert s.subset_of(u0, OpenSet((0,))) is True
    assert is_double_cover_at_horizon(s, out, 3, search_bound=3000) is True
