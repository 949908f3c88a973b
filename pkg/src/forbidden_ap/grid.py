"""d-dimensional almost periodic configurations.

Level ``j`` of a :class:`GridLadder` copies the centred cube
``[-n_{j-1}, n_{j-1})^d`` to every shift in ``(n_j Z)^d``.  A point's rank
is the first level whose copies cover it; its representative is its
reduction into that level's centred cube.  Points no level covers get rank
``t + 1`` and are their own representatives.

Fill order: ranked representatives by rank, then lexicographically by
coordinates; after them the unranked points, tile by tile (tiles are the
cells of ``(n_{t-1} Z)^d``, visited along a square spiral when ``d == 2``
and shell by shell otherwise), lexicographically inside a tile.  All index
arithmetic is inclusion-exclusion over the levels, using per-axis periodic
counts, so nothing is enumerated.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

__all__ = [
    "GridLadder",
    "GridPositionInfo",
    "CubeDecomposition",
    "MAX_DIM",
    "MAX_VOLUME",
    "spiral_index",
    "spiral_point",
    "shell_index",
    "classify_point",
    "classify_points",
    "level_member",
    "build_grid",
    "required_source_length",
    "decompose_cube",
    "write_grid",
    "parse_grid",
    "parse_region",
]

MAX_DIM = 3
MAX_VOLUME = 1 << 24


@dataclass(frozen=True)
class GridLadder:
    periods: tuple[int, ...]
    d: int = 2

    def __post_init__(self):
        periods = tuple(int(n) for n in self.periods)
        object.__setattr__(self, "periods", periods)
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not periods or periods[0] < 1:
            raise ValueError("periods must be a nonempty list of positive integers")
        for j, (a, b) in enumerate(zip(periods, periods[1:])):
            if b % a or b < 2 * a:
                raise ValueError(
                    f"n_{j + 1}={b} must be a multiple of n_{j}={a} and at least {2 * a}"
                )

    @property
    def depth(self) -> int:
        return len(self.periods)

    @property
    def tile(self) -> int:
        return self.periods[-1]

    def _axis_member(self, c, levels):
        n = self.periods
        ok = np.ones(np.shape(c), dtype=bool)
        for j in levels:
            ok &= (c + n[j - 1]) % n[j] < 2 * n[j - 1]
        return ok

    def _axis_counter(self, levels):
        """``G`` with ``G(b) - G(a)`` = number of axis values in ``[a, b)`` lying in every level window."""
        n = self.periods
        period = n[max(levels)] if levels else 1
        cs = np.concatenate(([0], np.cumsum(self._axis_member(np.arange(period), levels))))
        cs = cs.astype(np.int64)

        def G(x):
            q, r = np.divmod(x, period)
            return q * cs[period] + cs[r]
        return G

    @cached_property
    def _offsets(self):
        # rank j (1..t-1) representatives occupy [O[j], O[j] + Q[j]) of the source
        d, n = self.d, self.periods
        O = {1: 0}
        for j in range(1, self.depth):
            half = n[j - 1]
            q = 0
            for S in _subsets(range(1, j)):
                G = self._axis_counter(S)
                q += (-1) ** len(S) * int(G(half) - G(-half)) ** d
            O[j + 1] = O[j] + q
        U = 0
        for S in _subsets(range(1, self.depth)):
            G = self._axis_counter(S)
            U += (-1) ** len(S) * int(G(self.tile) - G(0)) ** d
        return O, U


def _subsets(levels):
    levels = list(levels)
    for size in range(len(levels) + 1):
        yield from itertools.combinations(levels, size)


@dataclass(frozen=True)
class GridPositionInfo:
    point: tuple[int, ...]
    rank: int
    is_primary: bool
    representative: tuple[int, ...]
    source_index: int


@dataclass(frozen=True)
class CubeDecomposition:
    origin: tuple[int, ...]
    k: int
    cutoff: int
    intervals: tuple[tuple[int, int], ...]
    starts: tuple[tuple[int, ...], ...]
    ends: tuple[tuple[int, ...], ...]
    small_rank_count: int
    density_bound: Fraction

    @property
    def s(self) -> int:
        return len(self.intervals)

    @property
    def s_bound(self) -> int:
        return 4 * self.k ** (len(self.origin) - 1)

    @property
    def total_length(self) -> int:
        return sum(b - a for a, b in self.intervals)

    @property
    def density_ok(self) -> bool:
        return Fraction(self.small_rank_count, self.k ** len(self.origin)) <= self.density_bound


# -- tile orders ------------------------------------------------------------

def spiral_index(p) -> int:
    """Position of ``p`` on the counterclockwise square spiral around the origin.

    Ring ``r`` holds indices ``(2r-1)^2 .. (2r+1)^2 - 1`` and is entered at ``(r, 1-r)``.
    """
    x, y = (int(c) for c in p)
    r = max(abs(x), abs(y))
    if r == 0:
        return 0
    base = (2 * r - 1) ** 2
    if x == r and y > -r:
        return base + y + r - 1
    if y == r:
        return base + 2 * r + (r - 1 - x)
    if x == -r:
        return base + 4 * r + (r - 1 - y)
    return base + 6 * r + x + r - 1


def spiral_point(idx: int) -> tuple[int, int]:
    if idx < 0:
        raise ValueError("spiral indices are nonnegative")
    if idx == 0:
        return (0, 0)
    r = (math.isqrt(idx) + 1) // 2
    seg, o = divmod(idx - (2 * r - 1) ** 2, 2 * r)
    return [
        (r, 1 - r + o),
        (r - 1 - o, r),
        (-r, r - 1 - o),
        (1 - r + o, -r),
    ][seg]


def shell_index(z) -> int:
    """Order ``Z^d`` by sup-norm shell, then lexicographically inside a shell."""
    z = tuple(int(c) for c in z)
    d = len(z)
    r = max((abs(c) for c in z), default=0)
    if r == 0:
        return 0
    idx = (2 * r - 1) ** d
    wide, narrow = 2 * r + 1, 2 * r - 1
    touched = False
    for i, c in enumerate(z):
        rest = d - i - 1
        below = c + r  # values -r .. c-1
        if below:
            # the value -r touches the shell by itself
            idx += wide**rest
            others = below - 1
            idx += others * (wide**rest if touched else wide**rest - narrow**rest)
        touched = touched or abs(c) == r
    return idx


def _tile_order(z) -> int:
    return spiral_index(z) if len(z) == 2 else shell_index(z)


# -- classification ---------------------------------------------------------

def _lex_count(pts, lo, G, member, per_axis):
    """Points of the product set ``B^d`` (``B`` counted from ``lo``) lexicographically below each row of ``pts``."""
    d = pts.shape[1]
    total = np.zeros(len(pts), dtype=np.int64)
    prefix = np.ones(len(pts), dtype=bool)
    g_lo = G(lo)
    for i in range(d):
        below = G(pts[:, i]) - g_lo
        total += np.where(prefix, below * per_axis ** (d - i - 1), 0)
        prefix &= member(pts[:, i])
    return total


def level_member(points, ladder: GridLadder, j: int):
    """Boolean mask: which points lie in a copy of the level-``j`` cube."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
    return ladder._axis_member(pts, (j,)).all(axis=1)


def classify_points(points, ladder: GridLadder):
    """Vectorised classification of an ``(N, d)`` array: ``(rank, rep, is_primary, source_index)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
    if pts.shape[1] != ladder.d:
        raise ValueError(f"points must have {ladder.d} coordinates")
    n, t = ladder.periods, ladder.depth
    rank = np.full(len(pts), t + 1, dtype=np.int64)
    rep = pts.copy()
    open_ = np.ones(len(pts), dtype=bool)
    for j in range(1, t):
        hit = open_ & level_member(pts, ladder, j)
        rank[hit] = j
        rep[hit] = (pts[hit] + n[j - 1]) % n[j] - n[j - 1]
        open_ &= ~hit
    primary = (rep == pts).all(axis=1)

    O, U = ladder._offsets
    src = np.zeros(len(pts), dtype=np.int64)
    for j in range(1, t):
        sel = rank == j
        if not sel.any():
            continue
        r = rep[sel]
        acc = np.full(len(r), O[j], dtype=np.int64)
        half = n[j - 1]
        for S in _subsets(range(1, j)):
            G = ladder._axis_counter(S)
            per_axis = int(G(half) - G(-half))
            member = lambda c, S=S: ladder._axis_member(c, S)
            acc += (-1) ** len(S) * _lex_count(r, -half, G, member, per_axis)
        src[sel] = acc
    sel = rank == t + 1
    if sel.any():
        p = pts[sel]
        z, y = np.divmod(p, ladder.tile)
        acc = np.full(len(p), O[t], dtype=np.int64)
        for S in _subsets(range(1, t)):
            G = ladder._axis_counter(S)
            per_axis = int(G(ladder.tile) - G(0))
            member = lambda c, S=S: ladder._axis_member(c, S)
            acc += (-1) ** len(S) * _lex_count(y, 0, G, member, per_axis)
        tiles, inv = np.unique(z, axis=0, return_inverse=True)
        order = np.array([_tile_order(tuple(row)) for row in tiles], dtype=np.int64)
        src[sel] = acc + order[inv.reshape(-1)] * U
    return rank, rep, primary, src


def classify_point(p, ladder: GridLadder) -> GridPositionInfo:
    """
    >>> classify_point((8, 0), GridLadder((2, 8, 32))).representative
    (0, 0)
    """
    rank, rep, primary, src = classify_points([tuple(p)], ladder)
    return GridPositionInfo(
        tuple(int(c) for c in p), int(rank[0]), bool(primary[0]),
        tuple(int(c) for c in rep[0]), int(src[0]),
    )


# -- regions and grids -------------------------------------------------------

def _region(region, d):
    region = tuple((int(lo), int(hi)) for lo, hi in region)
    if len(region) != d:
        raise ValueError(f"region needs {d} axis ranges")
    if any(hi <= lo for lo, hi in region):
        raise ValueError("empty region")
    if d > MAX_DIM:
        raise ValueError(f"dimension above desk-scale cap {MAX_DIM}")
    if math.prod(hi - lo for lo, hi in region) > MAX_VOLUME:
        raise ValueError(f"region volume above desk-scale cap {MAX_VOLUME}")
    return region


def _region_points(region):
    axes = [np.arange(lo, hi, dtype=np.int64) for lo, hi in region]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def required_source_length(ladder: GridLadder, region) -> int:
    """Source items :func:`build_grid` consumes for ``region``."""
    _, _, _, src = classify_points(_region_points(_region(region, ladder.d)), ladder)
    return int(src.max()) + 1


def build_grid(source, ladder: GridLadder, region):
    """Grid of source items over ``region`` (one half-open ``(lo, hi)`` per axis).

    A string source yields a ``uint8`` bit array; any other sequence or
    iterable yields an array of its items, which is convenient with
    distinct markers.
    """
    region = _region(region, ladder.d)
    shape = tuple(hi - lo for lo, hi in region)
    _, _, _, src = classify_points(_region_points(region), ladder)
    need = int(src.max()) + 1
    if isinstance(source, str):
        if len(source) < need:
            raise ValueError(f"source exhausted: {need} items needed, {len(source)} given")
        bits = np.frombuffer(source[:need].encode(), dtype=np.uint8) - ord("0")
        return bits[src].reshape(shape)
    if not hasattr(source, "__getitem__"):
        source = list(itertools.islice(source, need))
    if len(source) < need:
        raise ValueError(f"source exhausted: {need} items needed, {len(source)} given")
    return np.asarray(source[:need])[src].reshape(shape)


def decompose_cube(origin, k: int, ladder: GridLadder) -> CubeDecomposition:
    """Runs of consecutive source indices along vertical lines of the cube.

    Points of rank below the cutoff ``i`` (least ``i`` with ``n_i >= k``)
    are counted and skipped.  Each line parallel to the last axis is read
    bottom to top.  Runs are returned sorted by first index.
    """
    origin = tuple(int(m) for m in origin)
    d = ladder.d
    if len(origin) != d or k < 1:
        raise ValueError(f"need a {d}-dimensional origin and k >= 1")
    n = ladder.periods
    if n[-1] < k:
        raise ValueError(f"ladder top n_{ladder.depth - 1}={n[-1]} is shorter than k={k}")
    cutoff = next(i for i, p in enumerate(n) if p >= k)
    pts = _region_points(tuple((m, m + k) for m in origin))
    rank, _, _, src = classify_points(pts, ladder)
    small = rank < cutoff
    line = np.arange(len(pts)) // k
    keep = ~small
    src_k, line_k, pts_k = src[keep], line[keep], pts[keep]
    runs = []
    if src_k.size:
        cut = np.flatnonzero((np.diff(src_k) != 1) | (np.diff(line_k) != 0)) + 1
        lo = np.concatenate(([0], cut))
        hi = np.concatenate((cut, [src_k.size]))
        for a, b in zip(lo, hi):
            runs.append((int(src_k[a]), int(src_k[b - 1]) + 1,
                         tuple(int(c) for c in pts_k[a]), tuple(int(c) for c in pts_k[b - 1])))
    runs.sort()
    bound = 4 * sum((Fraction(n[j - 1], n[j]) for j in range(1, cutoff)), Fraction(0))
    return CubeDecomposition(
        origin, k, cutoff,
        tuple((a, b) for a, b, _, _ in runs),
        tuple(p for _, _, p, _ in runs),
        tuple(q for _, _, _, q in runs),
        int(small.sum()),
        bound,
    )


def parse_region(text: str):
    """``"-16..16x-16..16"`` -> ``((-16, 16), (-16, 16))``; upper ends are exclusive."""
    out = []
    for part in text.split("x"):
        m = re.fullmatch(r"\s*(-?\d+)\.\.(-?\d+)\s*", part)
        if not m:
            raise ValueError(f"bad region axis {part!r}")
        out.append((int(m.group(1)), int(m.group(2))))
    return tuple(out)


def write_grid(grid, region) -> str:
    grid = np.asarray(grid)
    region = tuple(region)
    header = "d={} region={}".format(len(region), "x".join(f"{lo}..{hi}" for lo, hi in region))
    rows = grid.reshape(-1, grid.shape[-1]).astype(np.uint8) + ord("0")
    return header + "\n" + "".join(r.tobytes().decode() + "\n" for r in rows)


def parse_grid(text):
    """Inverse of :func:`write_grid`: returns ``(region, uint8 array)``."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode()
    lines = text.split()
    if not lines:
        raise ValueError("empty grid file")
    m = re.fullmatch(r"d=(\d+)", lines[0])
    if not m or len(lines) < 2 or not lines[1].startswith("region="):
        raise ValueError("missing 'd=<d> region=...' header")
    d = int(m.group(1))
    region = parse_region(lines[1][len("region="):])
    if len(region) != d:
        raise ValueError(f"header says d={d} but region has {len(region)} axes")
    shape = tuple(hi - lo for lo, hi in region)
    body = lines[2:]
    if len(body) != math.prod(shape[:-1]) or any(len(r) != shape[-1] for r in body):
        raise ValueError("grid body does not match the region")
    if any(set(r) - {"0", "1"} for r in body):
        raise ValueError("grid body must be 0/1")
    flat = np.frombuffer("".join(body).encode(), dtype=np.uint8) - ord("0")
    return region, flat.reshape(shape)
