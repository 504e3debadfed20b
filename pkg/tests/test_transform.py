from fractions import Fraction

import pytest

from topogame.bairecat import SeqPrefix  # noqa: F401  (shared alias)
from topogame.enumutil import cantor_pair, cantor_unpair
from topogame.errors import ClaimViolation, TopogameError
from topogame.finsolve import (
    closure,
    cover_family_moves,
    enumerate_covers,
    enumerate_memoryless_strategies,
    fin_context,
    int_closure,
    solve_game,
    solver_strategy,
    verify_strategy,
)
from topogame.games import (
    COVER,
    DENSE,
    DGAME,
    OPEN_PICKING,
    POINT_OPEN,
    SPLUS,
    SPLUS_FIN,
    FamilyMove,
    OpenMove,
    PickManyMove,
    PickMove,
    PointMove,
    PointSetMove,
    Strategy,
    evaluate,
    greedy_splus_strategy,
    legal,
    play,
    random_cover_adversary,
    random_dense_open_adversary,
    random_open_answer_adversary,
    scripted_strategy,
    selcover,
    witness_pointing_strategy,
)
from topogame.space import (
    CoverFamily,
    FiniteSet,
    OpenSet,
    PointSet,
    all_points,
    discrete,
    dyadic_interval,
    open_subspace,
    point_set_of,
    product,
    rational_value,
    rationals,
    sierpinski,
    subset_space,
    trace_space,
)
from topogame.transform import (
    OP_DD,
    PO_OD,
    DualPair,
    dual_backward_finite,
    dual_backward_ii,
    dual_forward,
    dual_forward_ii,
    lift_dense_strategy,
    product_pointing_strategy,
    restrict_splus_strategy,
    trace_open,
    union_fin_strategy,
    union_selection,
    union_splus_strategy,
)

RAT = rationals()
SEL = selcover(COVER, DENSE)


def test_dual_pair_validation():
    with pytest.raises(ValueError):
        DualPair(OPEN_PICKING, DGAME)
    with pytest.raises(ValueError):
        DualPair(POINT_OPEN, SEL)


# ---------------------------------------------------------------------------
# dual_forward


def test_dual_forward_constant_on_one_point_space():
    s = discrete(1)
    tau = scripted_strategy(OPEN_PICKING, "I", [PointMove(0)])
    sigma = dual_forward(s, PO_OD, tau)
    fam = CoverFamily.from_list([OpenSet((0,))], label="whole")
    strat_i = scripted_strategy(SEL, "I", [FamilyMove(fam)])
    t = play(s, SEL, strat_i, sigma, innings=1, legality_horizon=1)
    assert t.innings[0][1] == PickMove(0)
    v = evaluate(s, SEL, t, m=1)
    assert v.win_ii and v.inning == 1


def test_dual_forward_witness_pointing_on_rationals_seeded():
    tau = witness_pointing_strategy(RAT)
    sigma = dual_forward(RAT, PO_OD, tau)
    adversary = random_cover_adversary(RAT, seed=3)
    t = play(RAT, SEL, adversary, sigma, innings=16, legality_horizon=16,
             search_bound=2000)
    v = evaluate(RAT, SEL, t, m=16)
    assert v.win_ii and v.inning <= 16
    # the n-th pick contains the witness of base element n
    for n, (fam_mv, pick) in enumerate(t.innings):
        assert RAT.point_in(RAT.base_witness(n), fam_mv.family.at(pick.index))


def test_dual_forward_alternating_tau_exhaustive_small_covers():
    s = discrete(2)
    tau = Strategy(OPEN_PICKING, "I", lambda h: PointMove((len(h) // 2) % 2))
    sigma = dual_forward(s, PO_OD, tau)
    fams = [f for f in enumerate_covers(fin_context(s).topo, COVER)
            if len(f) <= 2]
    moves = cover_family_moves(s, fams)
    for mv1 in moves:
        for mv2 in moves:
            strat_i = scripted_strategy(SEL, "I", [mv1, mv2])
            t = play(s, SEL, strat_i, sigma, innings=2, legality_horizon=2)
            v = evaluate(s, SEL, t, m=2)
            assert v.win_ii and v.inning <= 2


def test_dual_forward_dgame_pairing():
    # pointing strategy for I in the point-open game on the rationals:
    # play base element n at inning n; the dual picks points inside it
    tau = Strategy(POINT_OPEN, "I",
                   lambda h: OpenMove(OpenSet((len(h) // 2,))))
    sigma = dual_forward(RAT, OP_DD, tau)
    d = all_points(RAT)
    strat_i = scripted_strategy(DGAME, "I", [PointSetMove(d)])
    t = play(RAT, DGAME, strat_i, sigma, innings=8, legality_horizon=8,
             search_bound=2000)
    v = evaluate(RAT, DGAME, t, m=8)
    assert v.win_ii and v.inning <= 8
    for n, (_d, pick) in enumerate(t.innings):
        assert RAT.member(pick.point, n)


def test_dual_forward_from_state_agrees_with_history_path():
    s = discrete(2)
    taus = enumerate_memoryless_strategies(s, OPEN_PICKING, "I", cap=10000)
    tau = taus[3]
    sigma = dual_forward(s, PO_OD, tau)
    assert sigma.memoryless and sigma.from_state is not None
    fam_moves = cover_family_moves(s, enumerate_covers(fin_context(s).topo, COVER))
    mv = fam_moves[0]
    by_history = sigma.next_move((mv,))
    by_state = sigma.from_state(0, mv)
    assert by_history == by_state


# ---------------------------------------------------------------------------
# dual_backward_finite


def test_dual_backward_sierpinski_always_pick_whole():
    s = sierpinski()

    def pick_whole(history):
        fam = history[-1].family
        ctx = fin_context(s)
        for k in range(fam.size):
            if ctx.mask_of_open(fam.at(k)) == ctx.topo.full:
                return PickMove(k)
        raise AssertionError("cover without the whole space?")

    sigma = Strategy(SEL, "II", pick_whole, label="always-X")
    # hand derivation: the only never-answered nonempty open is {1}, whose
    # union misses point 0
    assert dual_backward_finite(s, PO_OD, sigma) == 0


def test_dual_backward_point_satisfies_claim_property():
    s = discrete(2)
    sigma = Strategy(SEL, "II", lambda h: PickMove(0), label="first")
    x = dual_backward_finite(s, PO_OD, sigma)
    ctx = fin_context(s)
    fams = cover_family_moves(s, enumerate_covers(ctx.topo, COVER))
    answered = {ctx.mask_of_open(mv.family.at(sigma.next_move((mv,)).index))
                for mv in fams}
    for u in ctx.topo.nonempty_opens:
        if u >> x & 1:
            assert u in answered


def test_dual_backward_one_point_space():
    s = discrete(1)
    sigma = Strategy(SEL, "II", lambda h: PickMove(0))
    assert dual_backward_finite(s, PO_OD, sigma) == 0


def test_dual_backward_claim_holds_for_assorted_strategies():
    # the never-answered opens can never cover the space for any genuine
    # (in-range, deterministic) strategy: check a spread of picking rules
    s = discrete(3)
    ctx = fin_context(s)
    rules = [lambda h: PickMove(0),
             lambda h: PickMove((h[-1].family.size - 1)),
             lambda h: PickMove(min(2, h[-1].family.size - 1))]
    for rule in rules:
        sigma = Strategy(SEL, "II", rule)
        x = dual_backward_finite(s, PO_OD, sigma)
        fams = cover_family_moves(s, enumerate_covers(ctx.topo, COVER))
        answered = {
            ctx.mask_of_open(mv.family.at(sigma.next_move((mv,)).index))
            for mv in fams}
        for u in ctx.topo.nonempty_opens:
            if u >> x & 1:
                assert u in answered


# ---------------------------------------------------------------------------
# dual_forward_ii / dual_backward_ii


def test_dual_forward_ii_one_point_space():
    s = discrete(1)
    tau = Strategy(OPEN_PICKING, "II", lambda h: OpenMove(OpenSet((0,))))
    sigma = dual_forward_ii(s, PO_OD, tau)
    mv = sigma.next_move(())
    assert mv.family.size == 1
    assert mv.family.at(0) == OpenSet((0,))


def test_dual_forward_ii_singleton_answers_give_cover():
    s = discrete(2)
    tau = Strategy(OPEN_PICKING, "II",
                   lambda h: OpenMove(OpenSet((h[-1].point,))))
    sigma = dual_forward_ii(s, PO_OD, tau)
    mv = sigma.next_move(())
    members = [mv.family.at(k) for k in range(mv.family.size)]
    assert members == [OpenSet((0,)), OpenSet((1,))]
    assert legal(s, SEL, "I", (), mv, m=2)


def test_dual_forward_ii_families_are_covers_exhaustive_chain3():
    from topogame.space import chain

    s = chain(3)
    taus = enumerate_memoryless_strategies(s, OPEN_PICKING, "II", cap=100000)
    for tau in taus[::7]:  # deterministic thinning; full scan in acceptance
        sigma = dual_forward_ii(s, PO_OD, tau)
        mv = sigma.next_move(())
        assert legal(s, SEL, "I", (), mv, m=3)
        back = dual_backward_ii(s, PO_OD, sigma)
        answer = back.next_move((PointMove(1),))
        assert s.point_in(1, answer.open_set)


def test_dual_backward_ii_constant_whole_family():
    s = sierpinski()
    whole = OpenSet((0, 1))
    fam = CoverFamily.from_list([whole], label="whole-only")
    sigma = scripted_strategy(SEL, "I", [FamilyMove(fam)])
    back = dual_backward_ii(s, PO_OD, sigma)
    for p in range(2):
        assert back.next_move((PointMove(p),)) == OpenMove(whole)


def test_dual_backward_ii_all_dyadic_cover_on_rationals():
    fam = CoverFamily.from_fn(lambda k: OpenSet((k,)), size=None,
                              label="all-intervals")
    sigma = scripted_strategy(SEL, "I", [FamilyMove(fam)])
    back = dual_backward_ii(RAT, PO_OD, sigma)
    for p in range(8):
        mv = back.next_move((PointMove(p),))
        # oracle: first dyadic interval containing the rational
        q = rational_value(p)
        expected = next(b for b in range(1000)
                        if dyadic_interval(b)[0] < q < dyadic_interval(b)[1])
        assert mv.open_set == OpenSet((expected,))


def test_dual_backward_ii_dgame_pairing_structural():
    s = discrete(2)
    dense = point_set_of([0, 1], label="everything")
    sigma = scripted_strategy(DGAME, "I", [PointSetMove(dense)])
    back = dual_backward_ii(s, OP_DD, sigma)
    for b in range(2):
        probe = OpenMove(OpenSet((b,)))
        mv = back.next_move((probe,))
        assert s.point_in(mv.point, probe.open_set)
        assert dense.contains(mv.point)


# ---------------------------------------------------------------------------
# products


def test_partition_blocks_match_pairing():
    i0 = [cantor_pair(0, j) for j in range(5)]
    i1 = [cantor_pair(1, j) for j in range(3)]
    assert i0 == [0, 1, 3, 6, 10]
    assert i1 == [2, 4, 7]
    assert cantor_unpair(0) == (0, 0)


def test_product_strategy_first_inning_uses_first_dense_point():
    sx = sy = RAT
    dense_y = all_points(RAT)
    tau = product_pointing_strategy(sx, sy, witness_pointing_strategy(sx),
                                    dense_y)
    mv = tau.next_move(())
    from topogame.space import product_unpoint
    x, y = product_unpoint(sx, sy, mv.point)
    assert y == dense_y.enumerate(0)
    assert x == sx.base_witness(0)


def test_product_strategy_one_point_second_factor():
    sy = discrete(1)
    prod = product(RAT, sy)
    dense_y = point_set_of([0])
    tau = product_pointing_strategy(RAT, sy, witness_pointing_strategy(RAT),
                                    dense_y)
    adversary = random_open_answer_adversary(prod, seed=2)
    t = play(prod, OPEN_PICKING, tau, adversary, innings=6,
             legality_horizon=4, search_bound=4000)
    from topogame.space import product_unpoint
    xs = [product_unpoint(RAT, sy, mv.point)[0] for mv, _a in t.innings]
    # blocks all map to k=0 pieces of the pairing; the X-coordinates follow
    # the witness strategy along block 0 innings
    blocks = [cantor_unpair(i) for i in range(6)]
    expected = {i: j for i, (k, j) in enumerate(blocks) if k == 0}
    for i, j in expected.items():
        assert xs[i] == RAT.base_witness(j)


def test_product_strategy_meets_all_rectangles_oracle_bound():
    # oracle: rectangle (a, b) is served at inning diag(k_b, a) where k_b is
    # the first enumeration index of a rational inside interval b
    sx = sy = RAT
    prod = product(sx, sy)
    dense_y = all_points(sy)
    k_of_interval = []
    for b in range(4):
        lo, hi = dyadic_interval(b)
        k_of_interval.append(next(i for i in range(10000)
                                  if lo < rational_value(i) < hi))
    innings_needed = 1 + max(cantor_pair(k_of_interval[b], a)
                             for a in range(4) for b in range(4))
    tau = product_pointing_strategy(sx, sy, witness_pointing_strategy(sx),
                                    dense_y)
    adversary = random_open_answer_adversary(prod, seed=11)
    t = play(prod, OPEN_PICKING, tau, adversary, innings=innings_needed,
             legality_horizon=2, search_bound=20000, check_legality=False)
    answered = [mv.open_set for _i, mv in t.innings]
    from topogame.space import product_base
    for a in range(4):
        for b in range(4):
            rect = OpenSet((product_base(sx, sy, a, b),))
            assert any(prod.opens_meet(rect, o) is True for o in answered), \
                (a, b)


# ---------------------------------------------------------------------------
# unions


def piece_strategy(s, piece_points, kind=SPLUS):
    """Solver-certified point-game strategy on the relativized piece."""
    rel = subset_space(s, FiniteSet.of(*piece_points))
    res = solve_game(fin_context(rel).topo, kind)
    return rel, solver_strategy(rel, res)


def relativizer(s, piece_points):
    """Int(cl(piece)) & piece, computed exactly on the finite lattice."""
    ctx = fin_context(s)
    mask = sum(1 << p for p in piece_points)
    rel = int_closure(ctx.topo, mask) & mask
    return [p for p in range(s.point_count) if rel >> p & 1]


def test_union_splus_two_point_discrete_alternates():
    s = discrete(2)
    rel_a = relativizer(s, [0])
    rel_b = relativizer(s, [1])
    assert rel_a == [0] and rel_b == [1]
    sub_a, sig_a = piece_strategy(s, rel_a)
    sub_b, sig_b = piece_strategy(s, rel_b)
    combined = union_splus_strategy(s, sub_a, sig_a, sub_b, sig_b)
    whole = OpenSet((0, 1))
    strat_i = scripted_strategy(SPLUS, "I", [OpenMove(whole)])
    t = play(s, SPLUS, strat_i, combined, innings=2, legality_horizon=2)
    assert [mv.point for _o, mv in t.innings] == [0, 1]
    v = evaluate(s, SPLUS, t, m=2)
    assert v.win_ii and v.inning == 2


def test_union_splus_nowhere_dense_piece_delegates():
    s = sierpinski()
    rel_a = relativizer(s, [0])
    assert rel_a == []  # {0} is nowhere dense in the up-set topology
    rel_b = relativizer(s, [1])
    sub_b, sig_b = piece_strategy(s, rel_b)
    combined = union_splus_strategy(s, None, None, sub_b, sig_b)
    strat_i = scripted_strategy(SPLUS, "I", [OpenMove(OpenSet((1,)))])
    t = play(s, SPLUS, strat_i, combined, innings=2, legality_horizon=2)
    assert all(mv.point == 1 for _o, mv in t.innings)
    v = evaluate(s, SPLUS, t, m=2)
    assert v.win_ii


def test_union_splus_verifies_on_small_decompositions():
    for s in (discrete(2), sierpinski(), discrete(3)):
        n = s.point_count
        ctx = fin_context(s)
        for a_mask in range(1, 1 << n):
            b_mask = (ctx.topo.full & ~a_mask) or 1
            pieces = []
            for mask in (a_mask, b_mask):
                pts = relativizer(s, [p for p in range(n) if mask >> p & 1])
                pieces.append(piece_strategy(s, pts) if pts else (None, None))
            combined = union_splus_strategy(s, pieces[0][0], pieces[0][1],
                                            pieces[1][0], pieces[1][1])
            # the interleave doubles the worst component bound
            ok, cex = verify_strategy(s, SPLUS, combined, "II",
                                      bound=2 * s.point_count)
            assert ok, (s.label, a_mask, b_mask)


def test_union_fin_identity_for_single_piece():
    s = discrete(2)
    sub = subset_space(s, FiniteSet.of(0, 1))
    res = solve_game(fin_context(sub).topo, SPLUS_FIN)
    sig = solver_strategy(sub, res)
    combined = union_fin_strategy(s, [sub], [sig])
    strat_i = scripted_strategy(SPLUS_FIN, "I", [OpenMove(OpenSet((0, 1)))])
    t = play(s, SPLUS_FIN, strat_i, combined, innings=1, legality_horizon=2)
    v = evaluate(s, SPLUS_FIN, t, m=2)
    assert v.win_ii and v.inning == 1


def test_union_fin_three_pieces_of_discrete3():
    s = discrete(3)
    subs, sigs = [], []
    for p in range(3):
        sub, sig = piece_strategy(s, [p], kind=SPLUS_FIN)
        subs.append(sub)
        sigs.append(sig)
    combined = union_fin_strategy(s, subs, sigs)
    whole = OpenSet((0, 1, 2))
    strat_i = scripted_strategy(SPLUS_FIN, "I", [OpenMove(whole)])
    t = play(s, SPLUS_FIN, strat_i, combined, innings=3, legality_horizon=3)
    v = evaluate(s, SPLUS_FIN, t, m=3)
    assert v.win_ii and v.inning == 3
    # structural: inning i's selection comes from piece i
    for i, (_o, mv) in enumerate(t.innings):
        assert mv.indices == (i,)


def test_union_selection_routes_round_robin():
    s = discrete(2)
    subs = [subset_space(s, FiniteSet.of(0)), subset_space(s, FiniteSet.of(1))]

    def selector(opens):
        return [0 for _ in opens]  # sub-point 0 of the singleton piece

    opens = [OpenSet((0, 1))] * 4
    picks = union_selection(s, subs, [selector, selector], opens)
    assert picks == [0, 1, 0, 1]


# ---------------------------------------------------------------------------
# restriction and lifting


def test_restrict_whole_space_is_identity():
    s = discrete(2)
    sub = open_subspace(s, OpenSet((0, 1)))
    res = solve_game(fin_context(s).topo, SPLUS)
    tau = solver_strategy(s, res)
    restricted = restrict_splus_strategy(sub, OpenSet.empty(), tau)
    whole_sub = OpenSet((0, 1))
    strat_i = scripted_strategy(SPLUS, "I", [OpenMove(whole_sub)])
    t = play(sub, SPLUS, strat_i, restricted, innings=2, legality_horizon=2)
    v = evaluate(sub, SPLUS, t, m=2)
    assert v.win_ii


def test_restrict_sierpinski_to_top():
    s = sierpinski()
    sub = open_subspace(s, OpenSet((1,)))
    res = solve_game(fin_context(s).topo, SPLUS)
    tau = solver_strategy(s, res)
    int_compl = OpenSet.empty()  # interior of {0} is empty
    restricted = restrict_splus_strategy(sub, int_compl, tau)
    strat_i = scripted_strategy(SPLUS, "I", [OpenMove(OpenSet((0,)))])
    t = play(sub, SPLUS, strat_i, restricted, innings=1, legality_horizon=1)
    assert t.innings[0][1].point == 0  # the single subspace point
    assert evaluate(sub, SPLUS, t, m=1).win_ii


def test_restrict_verifies_on_small_opens():
    for s in (discrete(2), sierpinski(), discrete(3)):
        ctx = fin_context(s)
        res = solve_game(ctx.topo, SPLUS)
        tau = solver_strategy(s, res)
        from topogame.finsolve import interior
        for u_mask in ctx.topo.nonempty_opens:
            u = ctx.openset_of_mask(u_mask)
            sub = open_subspace(s, u)
            compl_mask = interior(ctx.topo, ctx.topo.full & ~u_mask)
            int_compl = ctx.openset_of_mask(compl_mask)
            restricted = restrict_splus_strategy(sub, int_compl, tau)
            # the whole-space strategy may spend innings outside u, so the
            # parent certified bound governs
            ok, cex = verify_strategy(sub, SPLUS, restricted, "II",
                                      bound=res.bound)
            assert ok, (s.label, u_mask)


def test_lift_identity_when_dense_set_is_everything():
    s = discrete(2)
    tr = trace_space(s, point_set_of([0, 1]))
    res = solve_game(fin_context(tr).topo, SPLUS)
    tau = solver_strategy(tr, res)
    lifted = lift_dense_strategy(tr, tau)
    strat_i = scripted_strategy(SPLUS, "I", [OpenMove(OpenSet((0, 1)))])
    t = play(s, SPLUS, strat_i, lifted, innings=2, legality_horizon=2)
    assert evaluate(s, SPLUS, t, m=2).win_ii


def test_lift_dyadic_rationals_dense_picks():
    dyadics = PointSet(
        contains=lambda p: (rational_value(p).denominator
                            & (rational_value(p).denominator - 1)) == 0,
        enumerate=None, label="dyadic")
    # enumeration: filter the global enumeration
    def enum(i, _cache=[]):
        while len(_cache) <= i:
            p = len(_cache) and _cache[-1] + 1
            while not dyadics.contains(p):
                p += 1
            _cache.append(p)
        return _cache[i]
    dyadics = PointSet(contains=dyadics.contains, enumerate=enum,
                       label="dyadic")
    tr = trace_space(RAT, dyadics)
    tau = greedy_splus_strategy(tr, search_bound=4000)
    lifted = lift_dense_strategy(tr, tau)
    adversary = random_dense_open_adversary(RAT, seed=5, m=16)
    t = play(RAT, SPLUS, adversary, lifted, innings=16, legality_horizon=16,
             search_bound=4000)
    for _o, mv in t.innings:
        assert dyadics.contains(mv.point)
    v = evaluate(RAT, SPLUS, t, m=16)
    assert v.win_ii and v.inning <= 16


def test_lift_verifies_on_small_dense_subsets():
    for s in (discrete(2), sierpinski(), discrete(3)):
        ctx = fin_context(s)
        for mask in range(1, 1 << s.point_count):
            if closure(ctx.topo, mask) != ctx.topo.full:
                continue
            pts = [p for p in range(s.point_count) if mask >> p & 1]
            tr = trace_space(s, point_set_of(pts))
            res = solve_game(fin_context(tr).topo, SPLUS)
            tau = solver_strategy(tr, res)
            lifted = lift_dense_strategy(tr, tau)
            ok, cex = verify_strategy(s, SPLUS, lifted, "II")
            assert ok, (s.label, mask)
