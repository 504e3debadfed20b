"""Strategy transformers: duality between pointing and selection games,
products, finite unions, open restriction, and dense lifting.

Each transformer is a pure combinator: the output strategy replays its
inputs on a reconstructed history, so equal inputs and histories give equal
moves.  Choices of the form "any open such that ..." are resolved as "first
in enumeration order" throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from .enumutil import bits_of, cantor_unpair
from .errors import ClaimViolation, StrategyFailure, TopogameError
from .finsolve import cover_family_moves, enumerate_covers, fin_context
from .games import (
    COVER,
    DENSE,
    DGAME,
    OPEN_PICKING,
    POINT_OPEN,
    SPLUS,
    SPLUS_FIN,
    FamilyMove,
    GameKind,
    OpenMove,
    PickManyMove,
    PickMove,
    PointMove,
    PointSetMove,
    Strategy,
    selcover,
)
from .space import (
    DEFAULT_BOUND,
    CoverFamily,
    OpenSet,
    PointSet,
    Space,
    union_of,
)


@dataclass(frozen=True)
class DualPair:
    """A pointing game paired with the selection game it is dual to."""

    pointing_game: GameKind
    selection_game: GameKind

    def __post_init__(self):
        ok = ((self.pointing_game, self.selection_game) in (
            (OPEN_PICKING, selcover(COVER, DENSE)),
            (POINT_OPEN, DGAME),
        ))
        if not ok:
            raise ValueError(
                "legal pairings: openpicking with selcover:cover,dense and "
                "pointopen with dgame")


PO_OD = DualPair(OPEN_PICKING, selcover(COVER, DENSE))
OP_DD = DualPair(POINT_OPEN, DGAME)


def _pair_history(history) -> list:
    return [(history[i], history[i + 1]) for i in range(0, len(history) - 1, 2)]


def _first_member_containing(s: Space, fam: CoverFamily, x: int,
                             search_bound: int) -> int:
    cache = getattr(fam, "_contains_cache", None)
    if cache is None:
        cache = {}
        fam._contains_cache = cache
    hit = cache.get(x)
    if hit is not None:
        return hit
    scan = search_bound if fam.size is None else min(fam.size, search_bound)
    for k in range(scan):
        if s.point_in(x, fam.at(k)):
            cache[x] = k
            return k
    raise StrategyFailure(
        f"no family member contains point {x} within {search_bound}")


def _first_enumerated_point_in(s: Space, d: PointSet, o: OpenSet,
                               search_bound: int) -> int:
    for i in range(search_bound):
        p = d.enumerate(i)
        if s.point_in(p, o):
            return p
    raise StrategyFailure(
        f"dense set missed the open set {o.parts} within {search_bound}")


# ---------------------------------------------------------------------------
# duality, forward directions


def dual_forward(s: Space, pair: DualPair, tau: Strategy,
                 search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Winning strategy for player I in the pointing game -> strategy for
    player II in the dual selection game.

    At each inning the pointing strategy's next target is computed from the
    reconstructed pointing history (II's previous selections serve as the
    pointing-game answers), and II selects the first element of player I's
    family / dense set that serves the target."""
    open_picking = pair.pointing_game.tag == "openpicking"

    def reconstruct(innings) -> list:
        hist: list = []
        for move_i, move_ii in innings:
            hist.append(tau.next_move(tuple(hist)))
            if open_picking:
                hist.append(OpenMove(move_i.family.at(move_ii.index)))
            else:
                hist.append(PointMove(move_ii.point))
        return hist

    def next_move(history):
        hist = reconstruct(_pair_history(history))
        target = tau.next_move(tuple(hist))
        current = history[-1]
        if open_picking:
            k = _first_member_containing(s, current.family, target.point,
                                         search_bound)
            return PickMove(k)
        p = _first_enumerated_point_in(s, current.pointset, target.open_set,
                                       search_bound)
        return PointMove(p)

    from_state = None
    if tau.memoryless and tau.from_state is not None:
        # the pointing-game accumulation equals the selection-game one
        def from_state(acc, current):
            target = tau.from_state(acc, None)
            if open_picking:
                return PickMove(_first_member_containing(
                    s, current.family, target.point, search_bound))
            return PointMove(_first_enumerated_point_in(
                s, current.pointset, target.open_set, search_bound))

    return Strategy(pair.selection_game, "II", next_move,
                    label=f"dual-forward({tau.label})",
                    memoryless=bool(from_state), from_state=from_state)


def dual_forward_ii(s: Space, pair: DualPair, tau: Strategy,
                    search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Winning strategy for player II in the pointing game -> strategy for
    player I in the dual selection game: player I plays the family of all of
    II's possible answers, indexed by the probe that provokes them."""
    open_picking = pair.pointing_game.tag == "openpicking"

    def probes(k: int):
        if open_picking:
            if s.point_count is not None and k >= s.point_count:
                raise IndexError(k)
            return PointMove(k)
        if s.base_count is not None and k >= (1 << s.base_count) - 1:
            raise IndexError(k)
        return OpenMove(OpenSet(bits_of(k + 1)))

    def probe_count():
        if open_picking:
            return s.point_count
        return None if s.base_count is None else (1 << s.base_count) - 1

    def reconstruct(innings) -> list:
        hist: list = []
        for move_i, move_ii in innings:
            if open_picking:
                k = move_ii.index
                hist.append(probes(k))
                hist.append(OpenMove(move_i.family.at(k)))
            else:
                hist.append(probes(_probe_of_point(move_i, move_ii)))
                hist.append(PointMove(move_ii.point))
        return hist

    def _probe_of_point(move_i, move_ii):
        # recover which probe generated the picked point: first probe whose
        # answer is that point
        d = move_i.pointset
        meta = getattr(d, "_probe_index", None)
        if meta is None or move_ii.point not in meta:
            raise StrategyFailure("pick does not come from the played family")
        return meta[move_ii.point]

    def family_at_inning(innings):
        hist = tuple(reconstruct(innings))
        if open_picking:
            def at(k: int) -> OpenSet:
                return tau.next_move(hist + (probes(k),)).open_set
            return FamilyMove(CoverFamily.from_fn(
                at, size=probe_count(), label=f"dualII:{len(innings)}"))
        probe_index: dict[int, int] = {}

        def enum(i: int) -> int:
            p = tau.next_move(hist + (probes(i),)).point
            probe_index.setdefault(p, i)
            return p

        def contains(p: int, bound: int = search_bound) -> bool:
            limit = probe_count()
            limit = bound if limit is None else min(limit, bound)
            return any(enum(i) == p for i in range(limit))

        d = PointSet(contains=contains, enumerate=enum,
                     label=f"dualII:{len(innings)}")
        d._probe_index = probe_index
        return PointSetMove(d)

    def next_move(history):
        return family_at_inning(_pair_history(history))

    return Strategy(pair.selection_game, "I", next_move,
                    label=f"dual-forward-ii({tau.label})")


# ---------------------------------------------------------------------------
# duality, backward directions


def dual_backward_finite(s: Space, pair: DualPair, sigma: Strategy,
                         history=()) -> int:
    """The nonconstructive core of the duality, exact on finite spaces: a
    point such that every open set containing it is one of sigma's possible
    answers to some cover played after `history` (a tuple of FamilyMoves).

    Computes the set of opens that are never answered, checks its union
    misses a point, and returns the least such point."""
    if pair.pointing_game.tag != "openpicking":
        raise TopogameError("the finite backward direction applies to the "
                            "open-picking pairing")
    ctx = fin_context(s)
    flat: list = []
    for fam_move in history:
        flat.append(fam_move)
        flat.append(sigma.next_move(tuple(flat)))
    answered: set[int] = set()
    for fam_move in cover_family_moves(s, enumerate_covers(ctx.topo, COVER)):
        pick = sigma.next_move(tuple(flat) + (fam_move,))
        answered.add(ctx.mask_of_open(fam_move.family.at(pick.index)))
    never = [o for o in ctx.topo.nonempty_opens if o not in answered]
    union = 0
    for o in never:
        union |= o
    if union == ctx.topo.full:
        raise ClaimViolation(
            "every point is covered by never-answered opens; the supplied "
            "strategy cannot be a genuine selection strategy")
    for p in range(s.point_count):
        if not union & (1 << p):
            return p
    raise AssertionError("unreachable")


def dual_backward_ii(s: Space, pair: DualPair, sigma: Strategy,
                     search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Strategy for player I in the selection game -> strategy for player II
    in the dual pointing game: answer the probe with the first element of
    sigma's current family / dense set that serves it."""
    open_picking = pair.pointing_game.tag == "openpicking"

    def next_move(history):
        innings = _pair_history(history)
        current_probe = history[-1]
        sel_hist: list = []
        for probe, my_answer in innings:
            mine = sigma.next_move(tuple(sel_hist))
            sel_hist.append(mine)
            if open_picking:
                k = _first_member_containing(s, mine.family, probe.point,
                                             search_bound)
                sel_hist.append(PickMove(k))
            else:
                p = _first_enumerated_point_in(s, mine.pointset,
                                               probe.open_set, search_bound)
                sel_hist.append(PointMove(p))
        mine = sigma.next_move(tuple(sel_hist))
        if open_picking:
            k = _first_member_containing(s, mine.family, current_probe.point,
                                         search_bound)
            return OpenMove(mine.family.at(k))
        p = _first_enumerated_point_in(s, mine.pointset,
                                       current_probe.open_set, search_bound)
        return PointMove(p)

    return Strategy(pair.pointing_game, "II", next_move,
                    label=f"dual-backward-ii({sigma.label})")


# ---------------------------------------------------------------------------
# products


def product_pointing_strategy(sx: Space, sy: Space, sigma_x: Strategy,
                              dense_y: PointSet,
                              search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Pointing strategy on the product: inning n = diag(k, j) plays the
    point (x, d_k) where x is sigma_x's move against the X-projections of
    the opponent's rectangle answers along block k."""
    from .space import product_point, product_unbase, product_unpoint

    def refine_to_rectangle(my_point: int, answer: OpenSet) -> int:
        i, j = product_unpoint(sx, sy, my_point)
        for r in answer.parts:
            a, b = product_unbase(sx, sy, r)
            if sx.member(i, a) and sy.member(j, b):
                return r
        raise StrategyFailure("answer does not contain the played point")

    def next_move(history):
        innings = _pair_history(history)
        n = len(innings)
        k, _j = cantor_unpair(n)
        hist_x: list = []
        for i, (my_move, their_move) in enumerate(innings):
            if cantor_unpair(i)[0] != k:
                continue
            rect = refine_to_rectangle(my_move.point, their_move.open_set)
            a, _b = product_unbase(sx, sy, rect)
            xi, _yi = product_unpoint(sx, sy, my_move.point)
            hist_x.append(PointMove(xi))
            hist_x.append(OpenMove(OpenSet((a,))))
        x = sigma_x.next_move(tuple(hist_x)).point
        y = dense_y.enumerate(k)
        return PointMove(product_point(sx, sy, x, y))

    return Strategy(OPEN_PICKING, "I", next_move,
                    label=f"product({sigma_x.label})")


# ---------------------------------------------------------------------------
# subspace plumbing shared by the union / restrict / lift transformers


def trace_open(sub: Space, parent_open: OpenSet) -> OpenSet:
    to_sub = sub.meta["parent_to_base"]
    parts = sorted({sb for b in parent_open.parts
                    if (sb := to_sub(b)) is not None})
    return OpenSet(tuple(parts))


def lift_open(sub: Space, sub_open: OpenSet) -> OpenSet:
    to_parent = sub.meta["base_to_parent"]
    return OpenSet(tuple(sorted({to_parent(b) for b in sub_open.parts})))


def _sub_point(sub: Space, i: int) -> int:
    return sub.meta["point_to_parent"](i)


def _parent_point(sub: Space, p: int):
    return sub.meta["parent_to_point"](p)


# ---------------------------------------------------------------------------
# finite unions (dense-open point games)


def union_splus_strategy(s: Space, sub_a: Space | None, sigma_a: Strategy | None,
                         sub_b: Space | None, sigma_b: Strategy | None,
                         ) -> Strategy:
    """Combine winning point-picking strategies on the two somewhere-dense
    relativized pieces into one on the whole space: even innings consult the
    A-strategy on the A-trace of the played dense open, odd innings the
    B-strategy.  A degenerate piece (None) routes every inning to the other
    strategy."""
    if sub_a is None and sub_b is None:
        raise TopogameError("at least one piece must be somewhere dense")

    def component(inning: int):
        if sub_a is None:
            return sub_b, sigma_b
        if sub_b is None:
            return sub_a, sigma_a
        return (sub_a, sigma_a) if inning % 2 == 0 else (sub_b, sigma_b)

    def owns(inning: int, sub: Space) -> bool:
        return component(inning)[0] is sub

    def next_move(history):
        innings = _pair_history(history)
        n = len(innings)
        sub, sigma = component(n)
        hist: list = []
        for i, (open_move, _mine) in enumerate(innings):
            if not owns(i, sub):
                continue
            hist.append(OpenMove(trace_open(sub, open_move.open_set)))
            hist.append(sigma.next_move(tuple(hist)))
        hist.append(OpenMove(trace_open(sub, history[-1].open_set)))
        pick = sigma.next_move(tuple(hist))
        return PointMove(_sub_point(sub, pick.point))

    return Strategy(SPLUS, "II", next_move, label="union-splus")


def union_fin_strategy(s: Space, subs, sigmas) -> Strategy:
    """n-way round-robin version for the finite-selection point game; each
    inning's finite selection comes from the piece owning the turn."""
    subs = list(subs)
    sigmas = list(sigmas)
    if not subs or len(subs) != len(sigmas):
        raise TopogameError("need matching pieces and strategies")

    def next_move(history):
        innings = _pair_history(history)
        n = len(innings)
        w = n % len(subs)
        sub, sigma = subs[w], sigmas[w]
        hist: list = []
        for i, (open_move, _mine) in enumerate(innings):
            if i % len(subs) != w:
                continue
            hist.append(OpenMove(trace_open(sub, open_move.open_set)))
            hist.append(sigma.next_move(tuple(hist)))
        hist.append(OpenMove(trace_open(sub, history[-1].open_set)))
        picks = sigma.next_move(tuple(hist))
        parents = sorted({_sub_point(sub, i) for i in picks.indices})
        return PickManyMove(tuple(parents))

    return Strategy(SPLUS_FIN, "II", next_move, label="union-splus-fin")


def union_selection(s: Space, subs, selectors, opens, fin: bool = False):
    """Selection-principle combinator: dense opens are routed round-robin to
    the pieces; each piece's selector sees its trace subsequence and its
    choices are mapped back to parent points.  Returns one point (or point
    tuple, when fin) per input open."""
    subs = list(subs)
    selectors = list(selectors)
    k = len(subs)
    routed: list[list[OpenSet]] = [[] for _ in range(k)]
    slots: list[tuple[int, int]] = []
    for idx, o in enumerate(opens):
        w = idx % k
        slots.append((w, len(routed[w])))
        routed[w].append(trace_open(subs[w], o))
    answers = [list(selectors[w](routed[w])) for w in range(k)]
    out = []
    for w, pos in slots:
        a = answers[w][pos]
        if fin:
            out.append(tuple(sorted(_sub_point(subs[w], i) for i in a)))
        else:
            out.append(_sub_point(subs[w], a))
    return out


# ---------------------------------------------------------------------------
# open restriction and dense lift


def restrict_splus_strategy(sub: Space, int_compl: OpenSet, tau: Strategy,
                            search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Restriction of a whole-space point-picking strategy to an open
    subspace: a dense open O of the subspace is answered with tau's pick on
    O joined with the interior of the complement; when that pick misses O
    the fallback is the first enumerated point of O (flagged on the move)."""
    parent: Space = sub.meta["parent"]

    def lifted(sub_open: OpenSet) -> OpenSet:
        return union_of((lift_open(sub, sub_open), int_compl))

    def tau_pick(innings, current_open: OpenSet) -> int:
        hist: list = []
        for open_move, _mine in innings:
            hist.append(OpenMove(lifted(open_move.open_set)))
            hist.append(tau.next_move(tuple(hist)))
        hist.append(OpenMove(lifted(current_open)))
        return tau.next_move(tuple(hist)).point

    def next_move(history):
        innings = _pair_history(history)
        current = history[-1].open_set
        x = tau_pick(innings, current)
        in_sub = _parent_point(sub, x)
        if in_sub is not None and sub.point_in(in_sub, current):
            return PointMove(in_sub)
        limit = sub.point_count if sub.point_count is not None else search_bound
        for i in range(limit):
            if sub.point_in(i, current):
                return PointMove(i, note="fallback")
        raise StrategyFailure("played open set is empty in the subspace")

    return Strategy(SPLUS, "II", next_move, label=f"restrict({tau.label})")


def lift_dense_strategy(trace: Space, tau: Strategy,
                        search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Lift a winning point-picking strategy from a dense subspace to the
    whole space: answer a dense open O of X with tau's pick on the trace of
    O; picks land in the subspace and are mapped back to parent points."""
    parent: Space = trace.meta["parent"]

    def next_move(history):
        innings = _pair_history(history)
        hist: list = []
        for open_move, _mine in innings:
            hist.append(OpenMove(trace_open(trace, open_move.open_set)))
            hist.append(tau.next_move(tuple(hist)))
        hist.append(OpenMove(trace_open(trace, history[-1].open_set)))
        pick = tau.next_move(tuple(hist))
        return PointMove(_sub_point(trace, pick.point))

    return Strategy(SPLUS, "II", next_move, label=f"lift({tau.label})")
