"""Almost periodic sequences from a ladder of nested periods.

A ladder ``n_0 | n_1 | ... | n_{t-1}`` makes positions ``i`` and
``i + k*n_{s+1}`` equivalent for every ``i < n_s``.  Writing a position in
mixed radix (``d_0`` in base ``n_0``, ``d_j`` in base ``n_j / n_{j-1}``),
its *rank* is the index of the lowest nonzero-indexed digit equal to zero,
and its class is its residue modulo ``n_rank``.  Positions with no zero
digit among the configured ones get rank ``t + 1`` and stand alone.

The leftmost member of each class is *primary* and takes the next bit of
the source; every other member copies it.  ``source_index`` is computed by
digit counting in O(t), as is its inverse :func:`primary_position`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

__all__ = [
    "LadderError",
    "PeriodLadder",
    "PositionInfo",
    "WindowDecomposition",
    "fast_ladder",
    "classify_position",
    "classify_array",
    "density_D",
    "fresh_count",
    "primary_position",
    "build_sequence",
    "decompose_window",
    "recover_a",
]


class LadderError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodLadder:
    periods: tuple[int, ...]

    def __post_init__(self):
        periods = tuple(int(n) for n in self.periods)
        object.__setattr__(self, "periods", periods)
        if not periods:
            raise LadderError("a ladder needs at least one period")
        if periods[0] < 1:
            raise LadderError(f"n_0={periods[0]} must be positive")
        for j, (a, b) in enumerate(zip(periods, periods[1:])):
            if b % a or b // a < 2:
                raise LadderError(
                    f"n_{j + 1}={b} must be a multiple of n_{j}={a} with ratio >= 2"
                )

    @classmethod
    def parse(cls, text: str) -> "PeriodLadder":
        try:
            return cls(tuple(int(p) for p in text.split(",") if p.strip()))
        except ValueError as exc:
            if isinstance(exc, LadderError):
                raise
            raise LadderError(f"bad ladder literal {text!r}") from None

    def __str__(self):
        return ",".join(map(str, self.periods))

    @property
    def depth(self) -> int:
        return len(self.periods)

    @property
    def radices(self) -> tuple[int, ...]:
        n = self.periods
        return (n[0],) + tuple(b // a for a, b in zip(n, n[1:]))

    @cached_property
    def _counts(self):
        # Z[j]: z < n_j whose digits d_1..d_j are all nonzero
        # A[j]: primary positions in [0, n_j)
        r = self.radices
        Z = [self.periods[0]]
        A = [self.periods[0]]
        for j in range(1, self.depth):
            A.append(A[-1] + (r[j] - 1) * Z[-1])
            Z.append(Z[-1] * (r[j] - 1))
        return tuple(A), tuple(Z)

    def digits(self, x: int) -> tuple[list[int], int]:
        """Mixed-radix digits ``d_0..d_{t-1}`` of ``x`` and the part above ``n_{t-1}``."""
        n, r = self.periods, self.radices
        ds = [x % n[0]]
        for j in range(1, self.depth):
            ds.append((x // n[j - 1]) % r[j])
        return ds, x // n[-1]


@dataclass(frozen=True)
class PositionInfo:
    position: int
    rank: int
    is_primary: bool
    representative: int
    source_index: int


@dataclass(frozen=True)
class WindowDecomposition:
    m: int
    k: int
    cutoff: int
    intervals: tuple[tuple[int, int], ...]
    starts: tuple[int, ...]  # window position holding v[a_t]
    ends: tuple[int, ...]    # window position holding v[b_t - 1]
    small_rank_count: int
    density_bound: Fraction

    @property
    def s(self) -> int:
        return len(self.intervals)

    @property
    def total_length(self) -> int:
        return sum(b - a for a, b in self.intervals)

    @property
    def density_ok(self) -> bool:
        return Fraction(self.small_rank_count, self.k) <= self.density_bound


def fast_ladder(eps, depth: int, n0: int = 2) -> PeriodLadder:
    """Ladder with a constant radix chosen so that ``sum n_{j-1}/n_j < eps``."""
    eps = Fraction(eps)
    if depth < 1 or eps <= 0:
        raise ValueError("need depth >= 1 and eps > 0")
    r = max(2, int((depth - 1) / eps) + 1)
    return PeriodLadder(tuple(n0 * r**j for j in range(depth)))


def density_D(ladder: PeriodLadder) -> Fraction:
    """``prod (1 - n_i / n_{i+1})`` over consecutive periods (1 for a single period)."""
    D = Fraction(1)
    for a, b in zip(ladder.periods, ladder.periods[1:]):
        D *= 1 - Fraction(a, b)
    return D


def _rank_rep(x: int, ladder: PeriodLadder) -> tuple[int, int]:
    n, r = ladder.periods, ladder.radices
    for j in range(1, ladder.depth):
        if (x // n[j - 1]) % r[j] == 0:
            return j, x % n[j]
    return ladder.depth + 1, x


def _nonzero_below(ladder: PeriodLadder, j: int, y: int) -> int:
    n = ladder.periods
    _, Z = ladder._counts
    total = 0
    while j > 0:
        c, y = divmod(y, n[j - 1])
        if c == 0:
            return total
        total += (c - 1) * Z[j - 1]
        j -= 1
    return total + y


def fresh_count(ladder: PeriodLadder, N: int) -> int:
    """Number of primary positions in ``[0, N)``."""
    if N <= 0:
        return 0
    n = ladder.periods
    A, Z = ladder._counts
    t = ladder.depth
    H, y = divmod(N, n[-1])
    if H:
        return A[-1] + (H - 1) * Z[-1] + _nonzero_below(ladder, t - 1, y)
    j = t - 1
    while j > 0:
        if y > n[j - 1]:
            c, rest = divmod(y, n[j - 1])
            return A[j - 1] + (c - 1) * Z[j - 1] + _nonzero_below(ladder, j - 1, rest)
        j -= 1
    return y


def classify_position(x: int, ladder: PeriodLadder) -> PositionInfo:
    """Rank, class representative and source index of position ``x``.

    >>> classify_position(9, PeriodLadder((2, 8, 32)))
    PositionInfo(position=9, rank=1, is_primary=False, representative=1, source_index=1)
    """
    if x < 0:
        raise ValueError("positions are nonnegative")
    rank, rep = _rank_rep(x, ladder)
    return PositionInfo(x, rank, rep == x, rep, fresh_count(ladder, rep))


def _nonzero_nth(ladder: PeriodLadder, j: int, r: int) -> int:
    n = ladder.periods
    _, Z = ladder._counts
    z = 0
    while j > 0:
        q, r = divmod(r, Z[j - 1])
        z += (q + 1) * n[j - 1]
        j -= 1
    return z + r


def primary_position(ladder: PeriodLadder, idx: int) -> int:
    """The primary position whose source index is ``idx`` (inverse of :func:`fresh_count`)."""
    if idx < 0:
        raise ValueError("source indices are nonnegative")
    n = ladder.periods
    A, Z = ladder._counts
    if idx >= A[-1]:
        q, r = divmod(idx - A[-1], Z[-1])
        return (q + 1) * n[-1] + _nonzero_nth(ladder, ladder.depth - 1, r)
    j = ladder.depth - 1
    while j > 0 and idx < A[j - 1]:
        j -= 1
    if j == 0:
        return idx
    q, r = divmod(idx - A[j - 1], Z[j - 1])
    return (q + 1) * n[j - 1] + _nonzero_nth(ladder, j - 1, r)


# -- vectorised forms -------------------------------------------------------

def _nonzero_below_np(ladder, j, y):
    n = ladder.periods
    _, Z = ladder._counts
    total = np.zeros_like(y)
    alive = np.ones(y.shape, dtype=bool)
    for level in range(j, 0, -1):
        c, y = np.divmod(y, n[level - 1])
        alive &= c != 0
        total += np.where(alive, (c - 1) * Z[level - 1], 0)
    return total + np.where(alive, y, 0)


def _fresh_count_np(ladder, N):
    n = ladder.periods
    A, Z = ladder._counts
    t = ladder.depth
    H, y = np.divmod(N, n[-1])
    out = np.where(H > 0, A[-1] + (H - 1) * Z[-1] + _nonzero_below_np(ladder, t - 1, y), 0)
    done = H > 0
    for j in range(t - 1, 0, -1):
        act = ~done & (y > n[j - 1])
        if act.any():
            c, rest = np.divmod(y[act], n[j - 1])
            out[act] = A[j - 1] + (c - 1) * Z[j - 1] + _nonzero_below_np(ladder, j - 1, rest)
        done |= act
    out[~done] = y[~done]
    return out


def classify_array(xs, ladder: PeriodLadder):
    """Vectorised :func:`classify_position`: arrays ``(rank, rep, is_primary, source_index)``."""
    xs = np.asarray(xs, dtype=np.int64)
    n, r = ladder.periods, ladder.radices
    rank = np.full(xs.shape, ladder.depth + 1, dtype=np.int64)
    rep = xs.copy()
    open_ = np.ones(xs.shape, dtype=bool)
    for j in range(1, ladder.depth):
        hit = open_ & ((xs // n[j - 1]) % r[j] == 0)
        rank[hit] = j
        rep[hit] = xs[hit] % n[j]
        open_ &= ~hit
    return rank, rep, rep == xs, _fresh_count_np(ladder, rep)


# -- construction -----------------------------------------------------------

def build_sequence(source: Iterable, ladder: PeriodLadder, N: int):
    """Fill ``N`` positions, primaries drawing from ``source`` left to right.

    Returns a string when ``source`` is a string, otherwise a list of the
    source's items (handy for marker sources when checking which source
    element lands where).
    """
    it = iter(source)
    out = []
    for x in range(N):
        _, rep = _rank_rep(x, ladder)
        if rep == x:
            try:
                out.append(next(it))
            except StopIteration:
                raise ValueError(
                    f"source exhausted after {fresh_count(ladder, x)} items (position {x})"
                ) from None
        else:
            out.append(out[rep])
    return "".join(out) if isinstance(source, str) else out


def decompose_window(m: int, k: int, ladder: PeriodLadder) -> WindowDecomposition:
    """Map the window ``[m, m+k)`` back to runs of source indices.

    Positions of rank below the cutoff ``i`` (least ``i`` with
    ``n_i >= k``) are counted and dropped; the source indices of the rest,
    read left to right, split into maximal runs of consecutive integers.
    Runs are returned sorted by their first index.
    """
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    n = ladder.periods
    if n[-1] < k:
        raise LadderError(f"ladder top n_{ladder.depth - 1}={n[-1]} is shorter than k={k}")
    cutoff = next(i for i, p in enumerate(n) if p >= k)
    xs = np.arange(m, m + k, dtype=np.int64)
    rank, _, _, src = classify_array(xs, ladder)
    small = rank < cutoff
    keep_pos = xs[~small]
    keep_src = src[~small]
    runs = []
    if keep_src.size:
        breaks = np.flatnonzero(np.diff(keep_src) != 1) + 1
        lo = np.concatenate(([0], breaks))
        hi = np.concatenate((breaks, [keep_src.size]))
        for a, b in zip(lo, hi):
            runs.append((int(keep_src[a]), int(keep_src[b - 1]) + 1,
                         int(keep_pos[a]), int(keep_pos[b - 1])))
    runs.sort()
    bound = 2 * sum((Fraction(n[j - 1], n[j]) for j in range(1, cutoff)), Fraction(0))
    return WindowDecomposition(
        m, k, cutoff,
        tuple((a, b) for a, b, _, _ in runs),
        tuple(p for _, _, p, _ in runs),
        tuple(q for _, _, _, q in runs),
        int(small.sum()),
        bound,
    )


def recover_a(a_next: int, offset: int, ladder: PeriodLadder) -> int:
    """Source index found ``offset`` positions away from the first copy of ``v[a_next]``.

    Works without knowing where the window sits: classes of lower source
    index repeat with a period dividing that of ``a_next``'s class.
    """
    y = primary_position(ladder, a_next) + offset
    if y < 0:
        raise ValueError(f"offset {offset} leads to negative position {y}")
    return fresh_count(ladder, _rank_rep(y, ladder)[1])
