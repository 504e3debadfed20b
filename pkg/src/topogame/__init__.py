"""topogame: countably-presented topological spaces, selection-principle
games, and the paper-free machinery to run and verify them."""

from .space import (
    INDETERMINATE,
    CoverFamily,
    FiniteSet,
    OpenSet,
    PointSet,
    Space,
    alexandroff_double,
    chain,
    dense_at_horizon,
    discrete,
    finite_space,
    indiscrete,
    is_cover_at_horizon,
    open_subspace,
    product,
    rationals,
    sierpinski,
    union_closed,
)

__all__ = [
    "INDETERMINATE", "CoverFamily", "FiniteSet", "OpenSet", "PointSet",
    "Space", "alexandroff_double", "chain", "dense_at_horizon", "discrete",
    "finite_space", "indiscrete", "is_cover_at_horizon", "open_subspace",
    "product", "rationals", "sierpinski", "union_closed",
]

__version__ = "0.1.0"
