"""Exception types shared across the package."""


class TopogameError(Exception):
    """Base class for all package-specific errors."""


class SearchBoundExceeded(TopogameError):
    """A bounded witness search ran out of budget before deciding."""

    def __init__(self, what: str, bound: int):
        super().__init__(f"search bound {bound} exhausted while looking for {what}")
        self.what = what
        self.bound = bound


class StrategyFailure(TopogameError):
    """A strategy's internal oracle search failed (usually a broken promise
    by the opponent, e.g. a 'cover' that misses the needed point)."""


class IllegalMove(TopogameError):
    def __init__(self, player: str, inning: int, reason: str = ""):
        msg = f"illegal move by player {player} at inning {inning}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.player = player
        self.inning = inning
        self.reason = reason


class ClaimViolation(TopogameError):
    """The exhaustively-checked neighbourhood claim failed; signals a bug in
    the supplied strategy rather than in the caller's data."""


class DimensionError(TopogameError):
    """Mismatched finite dimensions (e.g. more targets than coordinates)."""


class CapExceeded(TopogameError):
    def __init__(self, count: int, cap: int, what: str = "enumeration"):
        super().__init__(f"{what} has {count} elements, exceeding cap {cap}")
        self.count = count
        self.cap = cap
