"""Deterministic enumeration plumbing: pairing functions, integer zigzags,
bit-coded finite sets, and thread-safe memoized sequences.

Every enumeration in the package is pinned to these codices so that indices
are reproducible across runs (and, in principle, across implementations).
"""

from __future__ import annotations

import threading
from typing import Callable, Generic, Iterator, TypeVar

T = TypeVar("T")


def triangle(n: int) -> int:
    return n * (n + 1) // 2


def cantor_pair(i: int, j: int) -> int:
    """Diagonal pairing; cantor_pair(0,0)=0, (0,1)=1, (1,0)=2, (0,2)=3, ..."""
    return triangle(i + j) + i


def cantor_unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("negative code")
    s = 0
    while triangle(s + 1) <= n:
        s += 1
    i = n - triangle(s)
    return i, s - i


def zigzag(n: int) -> int:
    """0, 1, -1, 2, -2, ... (bijection naturals -> integers)."""
    if n == 0:
        return 0
    k, r = divmod(n + 1, 2)
    return k if r == 0 else -k


def zigzag_index(z: int) -> int:
    if z == 0:
        return 0
    return 2 * z - 1 if z > 0 else -2 * z


def bits_of(code: int) -> tuple[int, ...]:
    """Finite set of naturals encoded by the binary digits of `code`.

    This is the canonical finite-set enumeration used everywhere: sets are
    ordered by largest element first, then by the code of the remainder.
    """
    out = []
    i = 0
    while code:
        if code & 1:
            out.append(i)
        code >>= 1
        i += 1
    return tuple(out)


def code_of_bits(elems) -> int:
    code = 0
    for e in elems:
        if e < 0:
            raise ValueError("negative element")
        code |= 1 << e
    return code


class MemoSeq(Generic[T]):
    """Thread-safe memoized view of `fn: index -> value`."""

    def __init__(self, fn: Callable[[int], T]):
        self._fn = fn
        self._cache: list[T] = []
        self._lock = threading.Lock()

    def __call__(self, n: int) -> T:
        if n < 0:
            raise IndexError(n)
        if n < len(self._cache):
            return self._cache[n]
        with self._lock:
            while len(self._cache) <= n:
                self._cache.append(self._fn(len(self._cache)))
            return self._cache[n]


class LazySeq(Generic[T]):
    """Thread-safe memoized view of a (possibly infinite) iterator."""

    def __init__(self, it: Iterator[T]):
        self._it = it
        self._cache: list[T] = []
        self._lock = threading.Lock()

    def __call__(self, n: int) -> T:
        if n < 0:
            raise IndexError(n)
        if n < len(self._cache):
            return self._cache[n]
        with self._lock:
            while len(self._cache) <= n:
                self._cache.append(next(self._it))
            return self._cache[n]

    def index_of(self, value: T, scan_limit: int = 10**6) -> int:
        """Index of `value`, scanning (and caching) up to scan_limit entries."""
        for n in range(scan_limit):
            if self(n) == value:
                return n
        raise KeyError(value)
