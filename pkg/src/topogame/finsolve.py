"""Exact topology and exact game solving on finite spaces.

Open sets are n-bit point masks.  Games are solved by a backward fixpoint
over the monotone accumulation lattice: a state is the union (mask) of what
the densifying player has collected so far, and the solver computes the
least inning count at which the densifier can force the target predicate.
Two families that pick out the same set of opens are identified, since the
games only depend on membership.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .enumutil import bits_of
from .errors import CapExceeded, TopogameError
from .games import (
    COVER,
    DENSE,
    FamilyMove,
    GameKind,
    OpenMove,
    PickManyMove,
    PickMove,
    PointMove,
    PointSetMove,
    Strategy,
    Transcript,
    accumulated_opens,
    accumulated_points,
)
from .space import CoverFamily, FiniteSet, OpenSet, PointSet, Space


@dataclass(frozen=True)
class FinTopology:
    """Complete finite topology: point count and every open as a bit mask."""

    n: int
    opens: tuple[int, ...]

    def __post_init__(self):
        full = (1 << self.n) - 1
        opens = set(self.opens)
        if 0 not in opens or full not in opens:
            raise ValueError("topology must contain the empty set and the space")
        for a in opens:
            for b in opens:
                if a | b not in opens or a & b not in opens:
                    raise ValueError("not closed under union/intersection")
        object.__setattr__(self, "opens", tuple(sorted(opens)))

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def nonempty_opens(self) -> tuple[int, ...]:
        return tuple(o for o in self.opens if o)


def closure(t: FinTopology, mask: int) -> int:
    avoid = 0
    for o in t.opens:
        if o & mask == 0:
            avoid |= o
    return t.full & ~avoid


def interior(t: FinTopology, mask: int) -> int:
    out = 0
    for o in t.opens:
        if o & ~mask == 0:
            out |= o
    return out


def int_closure(t: FinTopology, mask: int) -> int:
    return interior(t, closure(t, mask))


def is_dense(t: FinTopology, mask: int) -> bool:
    return closure(t, mask) == t.full


def dense_masks(t: FinTopology) -> tuple[int, ...]:
    return tuple(m for m in range(1 << t.n) if is_dense(t, m))


def dense_opens(t: FinTopology) -> tuple[int, ...]:
    return tuple(o for o in t.nonempty_opens if is_dense(t, o))


# ---------------------------------------------------------------------------
# bridging Space <-> masks


@dataclass(eq=False)
class FinContext:
    space: Space
    topo: FinTopology
    base_masks: tuple[int, ...]
    caches: dict = field(default_factory=dict)

    def mask_of_open(self, o: OpenSet) -> int:
        m = 0
        for b in o.parts:
            m |= self.base_masks[b]
        return m

    def openset_of_mask(self, mask: int) -> OpenSet:
        """Canonical (maximal) representation: every base element inside."""
        parts = tuple(b for b, bm in enumerate(self.base_masks)
                      if bm & ~mask == 0)
        o = OpenSet(parts)
        if self.mask_of_open(o) != mask:
            raise ValueError(f"mask {mask:b} is not open")
        return o

    def mask_of_points(self, pts) -> int:
        m = 0
        for p in pts:
            m |= 1 << p
        return m

    def point_set_of_mask(self, mask: int, label: str = "") -> PointSet:
        elems = tuple(bits_of(mask))
        member = frozenset(elems)
        return PointSet(contains=lambda p: p in member,
                        enumerate=lambda i: elems[min(i, len(elems) - 1)],
                        label=label or f"mask:{mask}")


def fin_context(s: Space) -> FinContext:
    if s.point_count is None or s.base_count is None:
        raise TopogameError(f"{s.label} is not finite")
    ctx = s.meta.get("_fin")
    if ctx is not None:
        return ctx
    base_masks = tuple(
        sum(1 << p for p in range(s.point_count) if s.member(p, b))
        for b in range(s.base_count))
    if any(bm == 0 for bm in base_masks):
        raise TopogameError(f"{s.label}: empty base element")
    opens = {0}
    for bm in base_masks:
        opens |= {o | bm for o in opens}
    topo = FinTopology(s.point_count, tuple(sorted(opens)))
    ctx = FinContext(s, topo, base_masks)
    s.meta["_fin"] = ctx
    return ctx


# ---------------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class SolveResult:
    kind: GameKind
    n: int
    winner: str
    densifier: str
    stage: dict  # acc mask -> least innings to force the target
    bound: int | None  # stage of the empty accumulation when densifier wins
    i_choice: dict  # acc mask -> forcing move payload for densifier I


def _target_fn(t: FinTopology, kind: GameKind) -> Callable[[int], bool]:
    if kind.tag in ("selcover", "selcoverfin") and kind.b == COVER:
        return lambda acc: acc == t.full
    return lambda acc: closure(t, acc) == t.full


def solve_game(t: FinTopology, kind: GameKind) -> SolveResult:
    """Backward-reachability solve over accumulation masks.

    For the selection games the opponent's family choice is quotiented to
    its set of members; the opponent's strongest family is the set of all
    opens whose pick would NOT progress, legal only if it still satisfies
    the family class, which is what the fixpoint tests."""
    target = _target_fn(t, kind)
    full = t.full
    tag = kind.tag
    densifier = kind.densifier
    class_pred = None
    if tag in ("selcover", "selcoverfin"):
        if kind.a == COVER:
            class_pred = lambda mask: mask == full
        else:
            class_pred = lambda mask: closure(t, mask) == full

    all_accs = range(1 << t.n)
    stage: dict[int, int] = {acc: 0 for acc in all_accs if target(acc)}
    i_choice: dict[int, object] = {}
    d_opens = dense_opens(t)
    d_masks = dense_masks(t)
    points = range(t.n)

    def forced(acc: int) -> object:
        """Truthy when the densifier can force progress into the current W
        from acc; for densifier I returns the forcing move payload."""
        in_w = lambda a: a in stage
        if tag == "selcover":
            bad = 0
            for o in t.nonempty_opens:
                if not in_w(acc | o):
                    bad |= o
            return not class_pred(bad)
        if tag == "selcoverfin":
            return all(in_w(acc | u) for u in t.opens if u and class_pred(u))
        if tag == "splus":
            return all(any(in_w(acc | (1 << p)) for p in bits_of(o))
                       for o in d_opens)
        if tag == "splusfin":
            return all(in_w(acc | o) for o in d_opens)
        if tag == "dgame":
            return all(any(in_w(acc | (1 << p)) for p in bits_of(d))
                       for d in d_masks)
        if tag == "pointopen":
            for o in t.nonempty_opens:
                if all(in_w(acc | (1 << p)) for p in bits_of(o)):
                    return ("open", o)
            return False
        if tag == "openpicking":
            for p in points:
                if all(in_w(acc | u) for u in t.nonempty_opens
                       if u & (1 << p)):
                    return ("point", p)
            return False
        raise TopogameError(f"solver does not implement {tag}")

    level = 1
    while True:
        added = []
        for acc in all_accs:
            if acc in stage:
                continue
            f = forced(acc)
            if f:
                added.append((acc, f))
        if not added:
            break
        for acc, f in added:
            stage[acc] = level
            if isinstance(f, tuple):
                i_choice[acc] = f
        level += 1

    won = 0 in stage
    winner = densifier if won else ("I" if densifier == "II" else "II")
    return SolveResult(kind=kind, n=t.n, winner=winner, densifier=densifier,
                       stage=stage, bound=stage.get(0), i_choice=i_choice)


# ---------------------------------------------------------------------------
# solver-certified strategies at the referee level


def _acc_mask(ctx: FinContext, kind: GameKind, innings) -> int:
    tag = kind.tag
    if tag in ("selcover", "selcoverfin", "openpicking"):
        return ctx.mask_of_points(
            p for o in accumulated_opens(kind, innings)
            for b in o.parts for p in bits_of(ctx.base_masks[b]))
    return ctx.mask_of_points(accumulated_points(kind, innings))


def _pair_history(history) -> list:
    pairs = []
    for i in range(0, len(history) - 1, 2):
        pairs.append((history[i], history[i + 1]))
    return pairs


def solver_strategy(s: Space, result: SolveResult) -> Strategy:
    """Referee-level strategy realizing the solver's win, for the winning
    (densifying) side.  Deterministic: always the first progressing move."""
    ctx = fin_context(s)
    kind = result.kind
    stage = result.stage
    if result.winner != result.densifier:
        raise TopogameError("only densifier strategies are certified")
    tag = kind.tag

    def best_from(acc: int, current) -> object:
        here = stage.get(acc)
        if tag == "selcover":
            fam = current.family
            best = None
            for k in range(fam.size):
                nxt = acc | ctx.mask_of_open(fam.at(k))
                st = stage.get(nxt)
                if st is None:
                    continue
                if here is not None and here > 0 and st < here:
                    return PickMove(k)
                if best is None:
                    best = PickMove(k)
            if best is None:
                raise TopogameError("no progressing pick (solver mismatch)")
            return best
        if tag == "selcoverfin":
            return PickManyMove(tuple(range(current.family.size)))
        if tag in ("splus", "dgame"):
            o = (current.open_set if tag == "splus" else None)
            pts = (bits_of(ctx.mask_of_open(o)) if o is not None
                   else [current.pointset.enumerate(i)
                         for i in range(s.point_count)])
            best = None
            seen = set()
            for p in pts:
                if p in seen:
                    continue
                seen.add(p)
                st = stage.get(acc | (1 << p))
                if st is None:
                    continue
                if here is not None and here > 0 and st < here:
                    return PointMove(p)
                if best is None:
                    best = PointMove(p)
            if best is None:
                raise TopogameError("no progressing point (solver mismatch)")
            return best
        if tag == "splusfin":
            pts = bits_of(ctx.mask_of_open(current.open_set))
            return PickManyMove(tuple(pts))
        if tag == "pointopen":
            payload = result.i_choice.get(acc)
            mask = payload[1] if payload else ctx.topo.nonempty_opens[0]
            return OpenMove(ctx.openset_of_mask(mask))
        if tag == "openpicking":
            payload = result.i_choice.get(acc)
            p = payload[1] if payload else 0
            return PointMove(p)
        raise TopogameError(tag)

    player = result.densifier

    def next_move(history):
        if player == "II":
            acc = _acc_mask(ctx, kind, _pair_history(history))
            return best_from(acc, history[-1])
        acc = _acc_mask(ctx, kind, _pair_history(history))
        return best_from(acc, None)

    return Strategy(kind, player, next_move,
                    label=f"solver:{kind}:{s.label}", memoryless=True,
                    from_state=best_from)


# ---------------------------------------------------------------------------
# exhaustive enumerations


def enumerate_covers(t: FinTopology, klass: str = COVER,
                     cap: int = 1 << 20) -> list[tuple[int, ...]]:
    """All families of nonempty opens (as sorted mask tuples) whose union
    passes the class predicate; quotiented by the set of members."""
    opens = t.nonempty_opens
    k = len(opens)
    if 2 ** k > cap:
        raise CapExceeded(2 ** k, cap, "family enumeration")
    pred = ((lambda m: m == t.full) if klass == COVER
            else (lambda m: is_dense(t, m)))
    out = []
    for code in range(1, 1 << k):
        members = tuple(opens[i] for i in bits_of(code))
        union = 0
        for m in members:
            union |= m
        if pred(union):
            out.append(members)
    return out


def cover_family_moves(s: Space, fams) -> list[FamilyMove]:
    """Referee-level family moves for solver-enumerated mask families,
    cached on the space so strategy-side caches stay warm."""
    ctx = fin_context(s)
    cache = ctx.caches.setdefault("family_moves", {})
    out = []
    for members in fams:
        mv = cache.get(members)
        if mv is None:
            fam = CoverFamily.from_list(
                [ctx.openset_of_mask(m) for m in members],
                label=f"enum:{members}")
            mv = FamilyMove(fam)
            cache[members] = mv
        out.append(mv)
    return out


def _reachable_accs(t: FinTopology, kind: GameKind) -> tuple[int, ...]:
    tag = kind.tag
    seen = {0}
    frontier = [0]
    while frontier:
        acc = frontier.pop()
        if tag in ("selcover", "selcoverfin", "splusfin", "openpicking"):
            nxts = {acc | o for o in t.nonempty_opens}
        else:
            nxts = {acc | (1 << p) for p in range(t.n)}
        for nxt in nxts:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return tuple(sorted(seen))


def enumerate_memoryless_strategies(s: Space, kind: GameKind, player: str,
                                    cap: int = 100_000) -> list[Strategy]:
    """All strategies that look only at the accumulation state (and, for
    player II, the opponent's current move).  Capped; deterministic order."""
    ctx = fin_context(s)
    t = ctx.topo
    tag = kind.tag
    accs = _reachable_accs(t, kind)

    if player == "I":
        if tag == "openpicking":
            choices = [(acc, tuple(PointMove(p) for p in range(t.n)))
                       for acc in accs]
        elif tag == "pointopen":
            choices = [(acc, tuple(OpenMove(ctx.openset_of_mask(o))
                                   for o in t.nonempty_opens))
                       for acc in accs]
        elif tag == "splus":
            choices = [(acc, tuple(OpenMove(ctx.openset_of_mask(o))
                                   for o in dense_opens(t)))
                       for acc in accs]
        elif tag == "dgame":
            choices = [(acc, tuple(PointSetMove(ctx.point_set_of_mask(d))
                                   for d in dense_masks(t)))
                       for acc in accs]
        else:
            raise TopogameError(f"no memoryless enumeration for I in {tag}")
    else:
        if tag == "openpicking":
            states = [(acc, p) for acc in accs for p in range(t.n)]
            choices = [((acc, p),
                        tuple(OpenMove(ctx.openset_of_mask(o))
                              for o in t.nonempty_opens if o & (1 << p)))
                       for acc, p in states]
        elif tag in ("splus", "pointopen"):
            states = [(acc, o) for acc in accs
                      for o in (dense_opens(t) if tag == "splus"
                                else t.nonempty_opens)]
            choices = [((acc, o), tuple(PointMove(p) for p in bits_of(o)))
                       for acc, o in states]
        elif tag == "dgame":
            states = [(acc, d) for acc in accs for d in dense_masks(t)]
            choices = [((acc, d), tuple(PointMove(p) for p in bits_of(d)))
                       for acc, d in states]
        else:
            raise TopogameError(f"no memoryless enumeration for II in {tag}")

    total = 1
    for _, opts in choices:
        total *= len(opts)
        if total > cap:
            raise CapExceeded(total, cap, "memoryless strategy enumeration")

    keys = [key for key, _ in choices]
    option_lists = [opts for _, opts in choices]

    def current_key(ctx_, acc, current):
        if player == "I":
            return acc
        if tag == "openpicking":
            return (acc, current.point)
        if tag in ("splus", "pointopen"):
            return (acc, ctx_.mask_of_open(current.open_set))
        return (acc, ctx_.mask_of_points(
            current.pointset.enumerate(i) for i in range(t.n * 2)))

    out = []
    for idx, assignment in enumerate(itertools.product(*option_lists)):
        table = dict(zip(keys, assignment))

        def from_state(acc, current, table=table):
            return table[current_key(ctx, acc, current)]

        def next_move(history, table=table):
            acc = _acc_mask(ctx, kind, _pair_history(history))
            current = history[-1] if player == "II" else None
            return table[current_key(ctx, acc, current)]

        out.append(Strategy(kind, player, next_move,
                            label=f"mless:{idx}", memoryless=True,
                            from_state=from_state))
    return out


# ---------------------------------------------------------------------------
# exhaustive verification


def verify_strategy(s: Space, kind: GameKind, strat: Strategy, player: str,
                    bound: int | None = None, cap: int = 1 << 20):
    """Exhaustively traverse all opposing moves: does the strategy force the
    target predicate within `bound` innings on every branch?  Returns
    (True, None) or (False, counterexample Transcript), the counterexample
    being the first failing branch in enumeration order."""
    ctx = fin_context(s)
    t = ctx.topo
    tag = kind.tag
    if kind.densifier != player:
        raise TopogameError("verify_strategy certifies the densifying side")
    if bound is None:
        res = solve_game(t, kind)
        bound = res.bound if res.bound is not None else t.n * len(t.opens)
    target = _target_fn(t, kind)

    if player == "II":
        if tag in ("selcover", "selcoverfin"):
            opposing = cover_family_moves(
                s, enumerate_covers(t, kind.a, cap))
        elif tag in ("splus", "splusfin"):
            opposing = [OpenMove(ctx.openset_of_mask(o))
                        for o in dense_opens(t)]
        elif tag == "dgame":
            opposing = [PointSetMove(ctx.point_set_of_mask(d))
                        for d in dense_masks(t)]
        else:
            raise TopogameError(tag)
    else:
        if tag == "openpicking":
            opposing = None  # depends on I's point
        elif tag == "pointopen":
            opposing = None  # depends on I's open
        else:
            raise TopogameError(tag)

    def responses(move_mine):
        if tag == "openpicking":
            p = move_mine.point
            return [OpenMove(ctx.openset_of_mask(o))
                    for o in t.nonempty_opens if o & (1 << p)]
        o = ctx.mask_of_open(move_mine.open_set)
        return [PointMove(p) for p in bits_of(o)]

    def contribution(acc, move_i, move_ii):
        if tag in ("selcover", "selcoverfin", "openpicking"):
            opens = accumulated_opens(kind, [(move_i, move_ii)])
            return acc | ctx.mask_of_points(
                p for o in opens for b in o.parts
                for p in bits_of(ctx.base_masks[b]))
        return acc | ctx.mask_of_points(
            accumulated_points(kind, [(move_i, move_ii)]))

    use_memo = bool(strat.memoryless and strat.from_state)
    memo: dict[int, object] = {}
    INF = float("inf")

    def worst_depth(acc) -> float:
        """Innings the strategy needs from acc, worst case over opposition;
        infinite when the opponent can stall forever."""
        if target(acc):
            return 0
        got = memo.get(acc)
        if got is not None:
            return got
        memo[acc] = INF
        worst = 0.0
        if player == "II":
            branches = [(mv_i, strat.from_state(acc, mv_i)) for mv_i in opposing]
        else:
            my_move = strat.from_state(acc, None)
            branches = [(my_move, mv_ii) for mv_ii in responses(my_move)]
        for mv_i, mv_ii in branches:
            nxt = contribution(acc, mv_i, mv_ii)
            worst = max(worst, INF if nxt == acc else 1 + worst_depth(nxt))
            if worst == INF:
                break
        memo[acc] = worst
        return worst

    def counterexample_path() -> Transcript:
        """Greedy worst-case walk: the opponent always takes the branch with
        the largest certified continuation."""
        innings = []
        acc = 0
        while len(innings) < bound and not target(acc):
            if player == "II":
                branches = [(mv_i, strat.from_state(acc, mv_i))
                            for mv_i in opposing]
            else:
                mv_i = strat.from_state(acc, None)
                branches = [(mv_i, mv_ii) for mv_ii in responses(mv_i)]
            best = None
            for mv_i, mv_ii in branches:
                nxt = contribution(acc, mv_i, mv_ii)
                rank = INF if nxt == acc else worst_depth(nxt)
                if best is None or rank > best[0]:
                    best = (rank, mv_i, mv_ii, nxt)
                if rank == INF:
                    break
            _, mv_i, mv_ii, acc = best
            innings.append((mv_i, mv_ii))
        return Transcript(kind=kind, innings=tuple(innings),
                          space_label=s.label)

    if use_memo:
        d = worst_depth(0)
        if d is not INF and d <= bound:
            return True, None
        return False, counterexample_path()

    # history-based strategy: plain exhaustive recursion to the bound
    fail: list[Transcript] = []

    def walk(history: tuple, acc: int, depth: int) -> bool:
        if target(acc):
            return True
        if depth == bound:
            fail.append(Transcript(kind=kind,
                                   innings=tuple(_pair_history(list(history))),
                                   space_label=s.label))
            return False
        if player == "II":
            for mv_i in opposing:
                mv_ii = strat.next_move(history + (mv_i,))
                nxt = contribution(acc, mv_i, mv_ii)
                if not walk(history + (mv_i, mv_ii), nxt, depth + 1):
                    return False
            return True
        mv_i = strat.next_move(history)
        for mv_ii in responses(mv_i):
            nxt = contribution(acc, mv_i, mv_ii)
            if not walk(history + (mv_i, mv_ii), nxt, depth + 1):
                return False
        return True

    ok = walk((), 0, 0)
    return (True, None) if ok else (False, fail[0])


# ---------------------------------------------------------------------------
# preorder universes


def _is_transitive(rel: frozenset, n: int) -> bool:
    succ = {i: {j for (a, j) in rel if a == i} for i in range(n)}
    return all(k in succ[i] for i in range(n) for j in succ[i] for k in succ[j])


def all_preorders(n: int) -> Iterator[frozenset]:
    """All reflexive transitive relations on n labeled points."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    refl = frozenset((i, i) for i in range(n))
    for code in range(1 << len(pairs)):
        rel = refl | {pairs[k] for k in bits_of(code)}
        if _is_transitive(frozenset(rel), n):
            yield frozenset(rel)


def is_t0(rel: frozenset, n: int) -> bool:
    return not any((i, j) in rel and (j, i) in rel
                   for i in range(n) for j in range(i + 1, n))


def all_finite_spaces(max_points: int, t0_only: bool = False) -> Iterator[Space]:
    from .space import finite_space
    for n in range(1, max_points + 1):
        for rel in all_preorders(n):
            if t0_only and not is_t0(rel, n):
                continue
            nonrefl = sorted((i, j) for (i, j) in rel if i != j)
            yield finite_space(n, nonrefl,
                               label=f"pre{n}:{nonrefl}")
