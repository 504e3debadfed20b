"""Two-player selection and point-picking games: kinds, moves, strategies,
a referee with horizon-bounded legality, and win evaluation.

All games run for finitely many recorded innings; the win predicate is
evaluated at a horizon m (see `evaluate`).  In the selection games player II
is the densifier; in the point-open and open-picking games the target set
favours player I, and the Verdict reports whether that target was met.
"""

from __future__ import annotations

import itertools
import random
import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .enumutil import MemoSeq
from .errors import IllegalMove, SearchBoundExceeded, StrategyFailure, TopogameError
from .space import (
    DEFAULT_BOUND,
    INDETERMINATE,
    CoverFamily,
    OpenSet,
    PointSet,
    Space,
    cofinite_points,
    dense_at_horizon,
    dense_union_at_horizon,
    is_cover_at_horizon,
    open_dense_at_horizon,
    _cap,
)

COVER = "cover"
DENSE = "dense"

_TAGS = ("selcover", "selcoverfin", "splus", "splusfin", "dgame",
         "pointopen", "openpicking")


@dataclass(frozen=True)
class GameKind:
    tag: str
    a: str | None = None
    b: str | None = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown game tag {self.tag!r}")
        if self.tag in ("selcover", "selcoverfin"):
            if self.a not in (COVER, DENSE) or self.b not in (COVER, DENSE):
                raise ValueError("selection games need family classes")
        elif self.a is not None or self.b is not None:
            raise ValueError(f"{self.tag} takes no family classes")

    @property
    def densifier(self) -> str:
        """The player whose accumulated set the win predicate favours."""
        return "I" if self.tag in ("pointopen", "openpicking") else "II"

    def __str__(self) -> str:
        if self.a is not None:
            return f"{self.tag}:{self.a},{self.b}"
        return self.tag

    @classmethod
    def parse(cls, text: str) -> "GameKind":
        if ":" in text:
            tag, rest = text.split(":", 1)
            a, b = rest.split(",")
            return cls(tag, a, b)
        return cls(text)


def selcover(a: str = COVER, b: str = DENSE) -> GameKind:
    return GameKind("selcover", a, b)


def selcoverfin(a: str = COVER, b: str = DENSE) -> GameKind:
    return GameKind("selcoverfin", a, b)


SPLUS = GameKind("splus")
SPLUS_FIN = GameKind("splusfin")
DGAME = GameKind("dgame")
POINT_OPEN = GameKind("pointopen")
OPEN_PICKING = GameKind("openpicking")


# ---------------------------------------------------------------------------
# moves


@dataclass(frozen=True)
class PickMove:
    index: int
    note: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PickManyMove:
    indices: tuple[int, ...]
    note: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PointMove:
    point: int
    note: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class OpenMove:
    open_set: OpenSet
    note: str | None = field(default=None, compare=False)


@dataclass(frozen=True, eq=False)
class FamilyMove:
    family: CoverFamily
    note: str | None = field(default=None, compare=False)


@dataclass(frozen=True, eq=False)
class PointSetMove:
    pointset: PointSet
    note: str | None = field(default=None, compare=False)


Move = object  # union of the six move dataclasses


@dataclass(eq=False)
class Strategy:
    """Deterministic move oracle.  next_move sees the flat history of moves
    so far (for player II the last entry is player I's current move).

    Strategies flagged memoryless additionally expose from_state(acc, current)
    where acc is the accumulated-target point mask on a finite space; the
    solver's verifier uses it to memoize."""

    kind: GameKind
    player: str
    next_move: Callable[[tuple], Move]
    label: str = ""
    memoryless: bool = False
    from_state: Callable | None = None
    seed: int | None = None


@dataclass(frozen=True)
class Transcript:
    kind: GameKind
    innings: tuple[tuple[Move, Move], ...]
    seed: int | None = None
    space_label: str = ""


TARGET_MET = "target_met"
NOT_YET = "not_yet"
VERDICT_INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Verdict:
    horizon: int
    outcome: str
    inning: int | None
    beneficiary: str

    @property
    def win_ii(self) -> bool:
        return self.outcome == TARGET_MET and self.beneficiary == "II"

    @property
    def win_i(self) -> bool:
        return self.outcome == TARGET_MET and self.beneficiary == "I"


# ---------------------------------------------------------------------------
# legality


def family_dense_union_at_horizon(s: Space, fam: CoverFamily, m: int,
                                  search_bound: int = DEFAULT_BOUND):
    """Does the union of the (possibly infinite) family meet every base
    element below m?"""
    m = _cap(m, s.base_count)
    scan = search_bound if fam.size is None else min(fam.size, search_bound)
    exhaustive = fam.size is not None and fam.size <= search_bound
    undecided = False
    for b in range(m):
        basic = OpenSet((b,))
        found = False
        for k in range(scan):
            r = s.opens_meet(basic, fam.at(k))
            if r is True:
                found = True
                break
            if r is None:
                w = s.base_witness(b)
                if s.point_in(w, fam.at(k)):
                    found = True
                    break
        if not found:
            if exhaustive:
                return False
            undecided = True
    return INDETERMINATE if undecided else True


def _family_class_ok(s: Space, fam: CoverFamily, klass: str, m: int,
                     bound: int) -> bool:
    if klass == COVER:
        return is_cover_at_horizon(s, fam, m, bound) is True
    return family_dense_union_at_horizon(s, fam, m, bound) is True


def _valid_point(s: Space, p: int) -> bool:
    return p >= 0 and (s.point_count is None or p < s.point_count)


def _valid_open(s: Space, o: OpenSet) -> bool:
    if o.is_empty:
        return False
    if s.base_count is not None and any(b >= s.base_count for b in o.parts):
        return False
    return True


def legal(s: Space, kind: GameKind, player: str, history: tuple, move: Move,
          m: int = 8, search_bound: int = DEFAULT_BOUND) -> bool:
    """Total legality predicate; promised classes (cover, dense) are only
    enforced at the given horizon."""
    try:
        return _legal(s, kind, player, history, move, m, search_bound)
    except TopogameError:
        return False


def _legal(s, kind, player, history, move, m, bound) -> bool:
    tag = kind.tag
    current = history[-1] if player == "II" and history else None
    if player == "II" and current is None:
        return False
    if tag in ("selcover", "selcoverfin"):
        if player == "I":
            return (isinstance(move, FamilyMove)
                    and _family_class_ok(s, move.family, kind.a, m, bound))
        fam = current.family
        if tag == "selcover":
            return (isinstance(move, PickMove) and move.index >= 0
                    and (fam.size is None or move.index < fam.size))
        return (isinstance(move, PickManyMove)
                and len(move.indices) > 0
                and all(i >= 0 and (fam.size is None or i < fam.size)
                        for i in move.indices)
                and tuple(sorted(set(move.indices))) == move.indices)
    if tag in ("splus", "splusfin"):
        if player == "I":
            return (isinstance(move, OpenMove) and _valid_open(s, move.open_set)
                    and open_dense_at_horizon(s, move.open_set, m, bound) is True)
        o = current.open_set
        if tag == "splus":
            return (isinstance(move, PointMove) and _valid_point(s, move.point)
                    and s.point_in(move.point, o))
        return (isinstance(move, PickManyMove)
                and len(move.indices) > 0
                and tuple(sorted(set(move.indices))) == move.indices
                and all(_valid_point(s, p) and s.point_in(p, o)
                        for p in move.indices))
    if tag == "dgame":
        if player == "I":
            return (isinstance(move, PointSetMove)
                    and dense_at_horizon(s, move.pointset, m, bound) is True)
        return (isinstance(move, PointMove) and _valid_point(s, move.point)
                and current.pointset.contains(move.point))
    if tag == "pointopen":
        if player == "I":
            return isinstance(move, OpenMove) and _valid_open(s, move.open_set)
        return (isinstance(move, PointMove) and _valid_point(s, move.point)
                and s.point_in(move.point, current.open_set))
    if tag == "openpicking":
        if player == "I":
            return isinstance(move, PointMove) and _valid_point(s, move.point)
        return (isinstance(move, OpenMove) and _valid_open(s, move.open_set)
                and s.point_in(current.point, move.open_set))
    raise AssertionError(tag)


# ---------------------------------------------------------------------------
# referee


def play(s: Space, kind: GameKind, strat_i: Strategy, strat_ii: Strategy,
         innings: int, legality_horizon: int = 8,
         search_bound: int = DEFAULT_BOUND, seed: int | None = None,
         check_legality: bool = True) -> Transcript:
    """Run the game for the given number of innings, recording every move;
    raises IllegalMove naming the offender, or propagates StrategyFailure."""
    history: list = []
    recorded = []
    for inning in range(innings):
        move_i = strat_i.next_move(tuple(history))
        if check_legality and not legal(s, kind, "I", tuple(history), move_i,
                                        legality_horizon, search_bound):
            raise IllegalMove("I", inning)
        history.append(move_i)
        move_ii = strat_ii.next_move(tuple(history))
        if check_legality and not legal(s, kind, "II", tuple(history), move_ii,
                                        legality_horizon, search_bound):
            raise IllegalMove("II", inning)
        history.append(move_ii)
        recorded.append((move_i, move_ii))
    return Transcript(kind=kind, innings=tuple(recorded), seed=seed,
                      space_label=s.label)


def accumulated_opens(kind: GameKind, innings) -> list[OpenSet]:
    """Player II's picked opens (or I's target opens) so far."""
    tag = kind.tag
    out: list[OpenSet] = []
    for move_i, move_ii in innings:
        if tag == "selcover":
            out.append(move_i.family.at(move_ii.index))
        elif tag == "selcoverfin":
            out.extend(move_i.family.at(k) for k in move_ii.indices)
        elif tag == "openpicking":
            out.append(move_ii.open_set)
        else:
            raise TopogameError(f"{tag} accumulates points, not opens")
    return out


def accumulated_points(kind: GameKind, innings) -> list[int]:
    tag = kind.tag
    out: list[int] = []
    for _move_i, move_ii in innings:
        if tag in ("splus", "dgame", "pointopen"):
            out.append(move_ii.point)
        elif tag == "splusfin":
            out.extend(move_ii.indices)
        else:
            raise TopogameError(f"{tag} accumulates opens, not points")
    return out


def _target_met(s: Space, kind: GameKind, innings, m: int, bound: int):
    tag = kind.tag
    if tag in ("selcover", "selcoverfin"):
        opens = accumulated_opens(kind, innings)
        if kind.b == COVER:
            mp = _cap(m, s.point_count)
            return all(any(s.point_in(p, o) for o in opens) for p in range(mp))
        return dense_union_at_horizon(s, opens, m, bound)
    if tag == "openpicking":
        return dense_union_at_horizon(s, accumulated_opens(kind, innings), m, bound)
    pts = accumulated_points(kind, innings)
    mb = _cap(m, s.base_count)
    return all(any(s.member(p, b) for p in pts) for b in range(mb))


def evaluate(s: Space, kind: GameKind, t: Transcript, m: int,
             search_bound: int = DEFAULT_BOUND) -> Verdict:
    """Earliest inning at which the densifier's target predicate holds at
    horizon m, or NOT_YET / INDETERMINATE."""
    beneficiary = kind.densifier
    saw_indet = False
    for n in range(1, len(t.innings) + 1):
        r = _target_met(s, kind, t.innings[:n], m, search_bound)
        if r is True:
            return Verdict(m, TARGET_MET, n, beneficiary)
        if r is INDETERMINATE:
            saw_indet = True
    outcome = VERDICT_INDETERMINATE if saw_indet else NOT_YET
    return Verdict(m, outcome, len(t.innings), beneficiary)


# ---------------------------------------------------------------------------
# canned strategies


def scripted_strategy(kind: GameKind, player: str, moves: Sequence,
                      label: str = "scripted") -> Strategy:
    moves = list(moves)

    def next_move(history):
        n = len(history) // 2
        return moves[n % len(moves)]

    return Strategy(kind, player, next_move, label=label)


def pibase_strategy_dgame(s: Space, pibase, search_bound: int = DEFAULT_BOUND,
                          ) -> Strategy:
    """Player II in the dense-set selection game on a space with a countable
    pi-base: at inning n pick the first enumerated point of the played dense
    set that lies inside pibase(n)."""
    pb = (pibase if callable(pibase)
          else (lambda n, _seq=tuple(pibase): _seq[n % len(_seq)]))

    def next_move(history):
        n = len(history) // 2
        target = pb(n)
        if target.is_empty:
            raise StrategyFailure("pi-base member is empty")
        d = history[-1].pointset
        for i in range(search_bound):
            p = d.enumerate(i)
            if s.point_in(p, target):
                return PointMove(p)
        raise StrategyFailure(
            f"dense set never met pi-base member {target.parts} "
            f"within {search_bound} steps")

    return Strategy(DGAME, "II", next_move, label="pibase")


def enumeration_cover_strategy(s: Space, targets: PointSet,
                               kind: GameKind | None = None,
                               search_bound: int = DEFAULT_BOUND) -> Strategy:
    """Player II in a cover selection game: at inning n pick the first
    member of player I's cover containing targets.enumerate(n)."""
    kind = kind or selcover(COVER, DENSE)

    def next_move(history):
        n = len(history) // 2
        x = targets.enumerate(n)
        fam = history[-1].family
        scan = search_bound if fam.size is None else min(fam.size, search_bound)
        for k in range(scan):
            if s.point_in(x, fam.at(k)):
                return PickMove(k)
        raise StrategyFailure(
            f"played family does not contain target point {x} "
            f"within {search_bound} members")

    return Strategy(kind, "II", next_move, label="enum-cover")


def greedy_splus_strategy(s: Space, search_bound: int = DEFAULT_BOUND,
                          ) -> Strategy:
    """Player II in the dense-open point game: at inning n pick the first
    enumerated point of the played dense open set lying in base element n
    (density guarantees the intersection is inhabited)."""

    def next_move(history):
        n = len(history) // 2
        if s.base_count is not None:
            n %= s.base_count
        o = history[-1].open_set
        for p in itertools.islice(s.points(), search_bound):
            if s.member(p, n) and s.point_in(p, o):
                return PointMove(p)
        raise StrategyFailure(
            f"dense open set missed base element {n} within {search_bound}")

    return Strategy(SPLUS, "II", next_move, label="greedy-splus")


def witness_pointing_strategy(s: Space) -> Strategy:
    """Player I in the open-picking game: play the witness of base element n
    at inning n, forcing II's opens to meet every base element."""

    def next_move(history):
        n = len(history) // 2
        if s.base_count is not None:
            n %= s.base_count
        return PointMove(s.base_witness(n))

    return Strategy(OPEN_PICKING, "I", next_move, label="witness-pointing")


# ---------------------------------------------------------------------------
# seeded adversaries


def _move_fingerprint(move) -> str:
    if isinstance(move, PickMove):
        return f"k{move.index}"
    if isinstance(move, PickManyMove):
        return "K" + ",".join(map(str, move.indices))
    if isinstance(move, PointMove):
        return f"p{move.point}"
    if isinstance(move, OpenMove):
        return "o" + ",".join(map(str, move.open_set.parts))
    if isinstance(move, FamilyMove):
        return "F" + move.family.label
    if isinstance(move, PointSetMove):
        return "D" + move.pointset.label
    return "?"


def _position_rng(seed: int, history: tuple) -> random.Random:
    fp = zlib.crc32(";".join(_move_fingerprint(mv) for mv in history).encode())
    return random.Random((seed * 2654435761 + len(history) * 97 + fp)
                         % (2 ** 63))


def random_adversary(s: Space, kind: GameKind, player: str, seed: int,
                     move_pool: Callable[[tuple], list]) -> Strategy:
    """Seeded reproducible strategy drawing uniformly from move_pool(history);
    the same history always produces the same move."""

    def next_move(history):
        pool = move_pool(history)
        if not pool:
            raise StrategyFailure("empty move pool")
        return pool[_position_rng(seed, history).randrange(len(pool))]

    return Strategy(kind, player, next_move, label=f"random:{seed}", seed=seed)


def bases_containing(s: Space, p: int, count: int = 4,
                     scan: int = DEFAULT_BOUND) -> tuple[int, ...]:
    """First `count` base indices whose element contains point p."""
    limit = s.base_count if s.base_count is not None else scan
    out = []
    for b in range(limit):
        if s.member(p, b):
            out.append(b)
            if len(out) >= count:
                break
    if not out:
        raise SearchBoundExceeded(f"a base element containing point {p}", limit)
    return tuple(out)


def _mix_seed(*parts: int) -> int:
    return zlib.crc32(",".join(map(str, parts)).encode())


def _bases_containing_cached(s: Space, p: int) -> tuple[int, ...]:
    cache = s.meta.setdefault("_bases_containing", {})
    hit = cache.get(p)
    if hit is None:
        hit = bases_containing(s, p)
        cache[p] = hit
    return hit


def seeded_cover_family(s: Space, seed: int, inning: int,
                        variant: int = 0) -> CoverFamily:
    """A genuine cover: member 2i is a seeded choice of base element
    containing point i, member 2i+1 is chaff."""

    def at(k: int) -> OpenSet:
        rng = random.Random(_mix_seed(seed, inning, variant, k))
        i, r = divmod(k, 2)
        if r == 0:
            return OpenSet((rng.choice(_bases_containing_cached(s, i)),))
        choices = _bases_containing_cached(s, rng.randrange(i + 1))
        parts = sorted({rng.choice(choices), rng.choice(choices)})
        return OpenSet(tuple(parts))

    size = 2 * s.point_count if s.point_count is not None else None
    return CoverFamily(at=MemoSeq(at), size=size,
                       label=f"seeded-cover:{seed}:{inning}:{variant}")


def random_cover_adversary(s: Space, seed: int,
                           kind: GameKind | None = None,
                           variants: int = 3) -> Strategy:
    """Player I adversary for cover selection games, playing seeded random
    basic covers."""
    kind = kind or selcover(COVER, DENSE)

    def pool(history):
        inning = len(history) // 2
        return [FamilyMove(seeded_cover_family(s, seed, inning, v))
                for v in range(variants)]

    return random_adversary(s, kind, "I", seed, pool)


def random_dense_set_adversary(s: Space, seed: int, max_excluded: int = 4,
                               exclusion_range: int = 64) -> Strategy:
    """Player I adversary for the dense-set game: plays cofinite point sets
    (dense on spaces without isolated points)."""

    def pool(history):
        inning = len(history) // 2
        out = []
        for v in range(3):
            rng = random.Random(_mix_seed(seed, inning, v))
            excluded = sorted({rng.randrange(exclusion_range)
                               for _ in range(rng.randrange(max_excluded + 1))})
            label = f"cofinite:{seed}:{inning}:{v}"
            out.append(PointSetMove(cofinite_points(s, excluded, label=label)))
        return out

    return random_adversary(s, DGAME, "I", seed, pool)


def random_open_answer_adversary(s: Space, seed: int, count: int = 4) -> Strategy:
    """Player II adversary for open-picking: answers I's point with a seeded
    choice of basic open containing it."""

    def pool(history):
        p = history[-1].point
        return [OpenMove(OpenSet((b,)))
                for b in _bases_containing_cached(s, p)[:count]]

    return random_adversary(s, OPEN_PICKING, "II", seed, pool)


def random_dense_open_adversary(s: Space, seed: int, m: int,
                                sub_choices: int = 3,
                                scan: int = 512) -> Strategy:
    """Player I adversary for the dense-open point games: plays an open set
    assembled from one seeded piece inside each base element below m (so it
    is dense at horizon m by construction).  Needs an exact subset oracle to
    offer proper subintervals; otherwise falls back to the base elements
    themselves."""

    def pieces_inside(b: int) -> tuple[int, ...]:
        cache = s.meta.setdefault("_pieces_inside", {})
        hit = cache.get(b)
        if hit is None:
            found = [b]
            target = OpenSet((b,))
            limit = scan if s.base_count is None else min(scan, s.base_count)
            for j in range(limit):
                if len(found) > sub_choices:
                    break
                if j != b and s.subset_of(OpenSet((j,)), target) is True:
                    found.append(j)
            hit = tuple(found)
            cache[b] = hit
        return hit

    def pool(history):
        inning = len(history) // 2
        out = []
        for v in range(3):
            rng = random.Random(_mix_seed(seed, inning, v))
            parts = sorted({rng.choice(pieces_inside(b)) for b in range(m)})
            out.append(OpenMove(OpenSet(tuple(parts))))
        return out

    return random_adversary(s, SPLUS, "I", seed, pool)


def random_pick_adversary(s: Space, kind: GameKind, seed: int,
                          window: int = 8) -> Strategy:
    """Player II adversary for selection games: picks a seeded member index."""

    def pool(history):
        fam = history[-1].family
        hi = window if fam.size is None else min(fam.size, window)
        return [PickMove(j) for j in range(hi)]

    return random_adversary(s, kind, "II", seed, pool)
