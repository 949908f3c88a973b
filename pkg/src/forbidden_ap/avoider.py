"""Resampling construction of strings and grids with no forbidden words.

The sampler starts from fair coin flips and, while some window holds a
forbidden word, redraws every bit of one such window (Moser-Tardos style).
After a redraw only windows that can touch the new bits are rescanned.

:func:`sft_feasible` is the exact answer for small explicit families: an
infinite avoiding sequence exists iff the de Bruijn-style graph of allowed
words contains a cycle.
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .family import ForbiddenFamily

__all__ = [
    "SamplerConfig",
    "SampleTrace",
    "PatternScanner",
    "scan_violations",
    "resample_run",
    "resample_grid",
    "scan_grid_violations",
    "sft_feasible",
    "SFT_CAP",
]

SFT_CAP = 22


@dataclass(frozen=True)
class SamplerConfig:
    N: int
    seed: int
    min_len: int | None = None
    selection: Literal["leftmost", "random"] = "leftmost"
    max_rounds: int = 1_000_000

    def __post_init__(self):
        if self.selection not in ("leftmost", "random"):
            raise ValueError(f"unknown selection rule {self.selection!r}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.min_len is not None and not 1 <= self.min_len <= self.N:
            raise ValueError("need 1 <= min_len <= N")


@dataclass(frozen=True)
class SampleTrace:
    result: object  # str for sequences, tuple of row strings for grids
    rounds: int
    violations_initial: int
    converged: bool

    def stats(self) -> dict:
        return {
            "rounds": self.rounds,
            "violations_initial": self.violations_initial,
            "converged": str(self.converged).lower(),
        }


def _resolve_min_len(family: ForbiddenFamily, config: SamplerConfig) -> int:
    if config.min_len is not None:
        return config.min_len
    from .lll import make_grid_plan

    return make_grid_plan(family.alpha, family.dim).L


class PatternScanner:
    """Aho-Corasick automaton over the binary alphabet.

    Nodes are trie prefixes; ``delta[node][bit]`` is the full transition
    table and ``out[node]`` lists the lengths of all forbidden words that are
    suffixes of the node's prefix.
    """

    def __init__(self, family: ForbiddenFamily, min_len: int = 1):
        if family.dim != 1:
            raise ValueError("PatternScanner handles one-dimensional families")
        children = [[-1, -1]]
        own: list[list[int]] = [[]]
        lengths = [n for n in family.entries if n >= min_len]
        for n in lengths:
            for w in family.entries[n]:
                node = 0
                for c in w:
                    b = c == "1"
                    if children[node][b] < 0:
                        children[node][b] = len(children)
                        children.append([-1, -1])
                        own.append([])
                    node = children[node][b]
                own[node].append(n)
        size = len(children)
        fail = [0] * size
        delta = [[0, 0] for _ in range(size)]
        out: list[tuple[int, ...]] = [()] * size
        out[0] = tuple(own[0])
        queue = deque()
        for b in (0, 1):
            child = children[0][b]
            if child < 0:
                delta[0][b] = 0
            else:
                delta[0][b] = child
                fail[child] = 0
                queue.append(child)
        while queue:
            node = queue.popleft()
            out[node] = tuple(sorted(set(own[node]) | set(out[fail[node]])))
            for b in (0, 1):
                child = children[node][b]
                if child < 0:
                    delta[node][b] = delta[fail[node]][b]
                else:
                    delta[node][b] = child
                    fail[child] = delta[fail[node]][b]
                    queue.append(child)
        self.delta = delta
        self.out = out
        self.max_len = max(lengths, default=0)
        self.empty = not lengths

    def scan(self, bits, lo: int = 0, hi: int | None = None) -> list[tuple[int, int]]:
        """Matches lying entirely inside ``bits[lo:hi]``, sorted by (start, length)."""
        if self.empty:
            return []
        hi = len(bits) if hi is None else hi
        delta, out = self.delta, self.out
        node = 0
        found = []
        for i in range(lo, hi):
            node = delta[node][bits[i]]
            for n in out[node]:
                found.append((i - n + 1, n))
        found.sort()
        return found

    def scan_touching(self, bits, a: int, b: int) -> list[tuple[int, int]]:
        """Matches that intersect ``[a, b)``."""
        lo = max(0, a - self.max_len + 1)
        hi = min(len(bits), b + self.max_len - 1)
        return [(s, n) for s, n in self.scan(bits, lo, hi) if s < b and s + n > a]


def _to_bits(x) -> list[int]:
    if isinstance(x, str):
        return [1 if c == "1" else 0 for c in x]
    return [int(b) for b in x]


def scan_violations(x, family: ForbiddenFamily, min_len: int = 1) -> list[tuple[int, int]]:
    """All ``(start, length)`` windows of ``x`` holding a forbidden word of length >= ``min_len``."""
    return PatternScanner(family, min_len).scan(_to_bits(x))


def _draw_bits(rng: random.Random, n: int) -> list[int]:
    v = rng.getrandbits(n) if n else 0
    return [(v >> i) & 1 for i in range(n)]


class _ViolationSet:
    """Current violations with leftmost or seeded-random extraction.

    ``items``/``index`` give O(1) uniform picks with swap-removal; the heap
    (lazily cleaned) serves the leftmost rule.
    """

    def __init__(self, items, rng, rule):
        self.items = []
        self.index = {}
        self.heap = []
        self.rng = rng
        self.rule = rule
        for v in items:
            self.add(v)

    def __len__(self):
        return len(self.items)

    def add(self, v):
        if v in self.index:
            return
        self.index[v] = len(self.items)
        self.items.append(v)
        if self.rule == "leftmost":
            heapq.heappush(self.heap, v)

    def discard(self, v):
        i = self.index.pop(v, None)
        if i is None:
            return
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.index[last] = i

    def pick(self):
        if self.rule == "random":
            return self.items[self.rng.randrange(len(self.items))]
        while self.heap[0] not in self.index:
            heapq.heappop(self.heap)
        return self.heap[0]


def resample_run(family: ForbiddenFamily, config: SamplerConfig) -> SampleTrace:
    """Redraw violated windows until none remain or ``max_rounds`` is hit.

    Deterministic in ``(family, config)``.  ``converged`` is False when the
    round budget runs out, which is an expected outcome below the certified
    length.
    """
    min_len = _resolve_min_len(family, config)
    scanner = PatternScanner(family, min_len)
    rng = random.Random(config.seed)
    bits = _draw_bits(rng, config.N)
    viol = _ViolationSet(scanner.scan(bits), rng, config.selection)
    initial = len(viol)
    lengths = sorted({n for n in family.entries if n >= min_len})
    rounds = 0
    while viol and rounds < config.max_rounds:
        start, n = viol.pick()
        bits[start:start + n] = _draw_bits(rng, n)
        rounds += 1
        end = start + n
        for s in range(max(0, start - scanner.max_len + 1), end):
            for m in lengths:
                if s + m > start:
                    viol.discard((s, m))
        for v in scanner.scan_touching(bits, start, end):
            viol.add(v)
    result = "".join("1" if b else "0" for b in bits)
    return SampleTrace(result, rounds, initial, not viol)


# -- the subshift oracle ---------------------------------------------------

def _good_words(family: ForbiddenFamily, min_len: int, M: int) -> np.ndarray:
    """Boolean mask over all M-bit words: no forbidden factor of length >= min_len."""
    words = np.arange(1 << M, dtype=np.int64)
    good = np.ones(1 << M, dtype=bool)
    for n, ws in family.entries.items():
        if n < min_len:
            continue
        table = np.zeros(1 << n, dtype=bool)
        table[[int(w, 2) for w in ws]] = True
        mask = (1 << n) - 1
        for off in range(M - n + 1):
            good &= ~table[(words >> (M - n - off)) & mask]
    return good


def sft_feasible(family: ForbiddenFamily, min_len: int = 1, cap: int = SFT_CAP) -> bool:
    """Whether some infinite sequence avoids every forbidden word of length >= ``min_len``.

    With ``M = max_len`` a sequence avoids the family iff each of its M-bit
    windows does.  Good M-words are edges between their (M-1)-bit prefix
    and suffix; an infinite walk exists iff this graph has a cycle, i.e. a
    self-loop or a strongly connected component with more than one node.
    """
    if family.dim != 1:
        raise ValueError("sft_feasible handles one-dimensional families")
    active = family.restricted(min_len)
    if not active.entries:
        return True
    M = max(active.max_len, 2)
    if M > cap:
        raise ValueError(f"max_len {M} exceeds the enumeration cap {cap}")
    good = np.flatnonzero(_good_words(active, min_len, M))
    if good.size == 0:
        return False
    half = (1 << (M - 1)) - 1
    src = good >> 1
    dst = good & half
    if np.any(src == dst):
        return True
    n = 1 << (M - 1)
    graph = coo_matrix((np.ones(good.size, dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    return bool(np.bincount(labels).max() > 1)


# -- grids -------------------------------------------------------------------

def _grid_codes(grid: np.ndarray, s: int) -> np.ndarray:
    """Row-major integer code of every s x s block (top-left indexed)."""
    win = sliding_window_view(grid, (s, s)).reshape(grid.shape[0] - s + 1, grid.shape[1] - s + 1, s * s)
    weights = np.left_shift(np.uint64(1), np.arange(s * s - 1, -1, -1, dtype=np.uint64))
    return (win.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


class _GridScanner:
    def __init__(self, family: ForbiddenFamily, min_len: int):
        if family.dim != 2:
            raise ValueError("grid sampling needs a dim=2 family")
        self.codes = {
            s: np.array(sorted(int(w, 2) for w in ws), dtype=np.uint64)
            for s, ws in family.entries.items() if s >= min_len
        }
        if any(s > 8 for s in self.codes):
            raise ValueError("grid families are limited to sides <= 8")
        self.max_side = max(self.codes, default=0)

    def scan(self, grid, r0=0, r1=None, c0=0, c1=None):
        """Violations lying inside rows [r0, r1) x cols [c0, c1), as (row, col, side)."""
        r1 = grid.shape[0] if r1 is None else r1
        c1 = grid.shape[1] if c1 is None else c1
        sub = grid[r0:r1, c0:c1]
        found = []
        for s, codes in self.codes.items():
            if sub.shape[0] < s or sub.shape[1] < s:
                continue
            hit = np.isin(_grid_codes(sub, s), codes)
            for r, c in zip(*np.nonzero(hit)):
                found.append((int(r) + r0, int(c) + c0, s))
        found.sort()
        return found


def scan_grid_violations(grid, family: ForbiddenFamily, min_len: int = 1):
    grid = np.asarray([[int(c) for c in row] if isinstance(row, str) else row for row in grid],
                      dtype=np.uint8)
    return _GridScanner(family, min_len).scan(grid)


def resample_grid(family: ForbiddenFamily, config: SamplerConfig) -> SampleTrace:
    """Grid version of :func:`resample_run` on an ``N x N`` board of bits."""
    min_len = _resolve_min_len(family, config)
    scanner = _GridScanner(family, min_len)
    rng = random.Random(config.seed)
    N = config.N
    grid = np.array(_draw_bits(rng, N * N), dtype=np.uint8).reshape(N, N)
    viol = _ViolationSet(scanner.scan(grid), rng, config.selection)
    initial = len(viol)
    sides = sorted(scanner.codes)
    reach = scanner.max_side - 1
    rounds = 0
    while viol and rounds < config.max_rounds:
        r, c, s = viol.pick()
        grid[r:r + s, c:c + s] = np.array(_draw_bits(rng, s * s), dtype=np.uint8).reshape(s, s)
        rounds += 1
        for rr in range(max(0, r - reach), r + s):
            for cc in range(max(0, c - reach), c + s):
                for m in sides:
                    if rr + m > r and cc + m > c:
                        viol.discard((rr, cc, m))
        r0, c0 = max(0, r - reach), max(0, c - reach)
        for v in scanner.scan(grid, r0, min(N, r + s + reach), c0, min(N, c + s + reach)):
            vr, vc, vs = v
            if vr < r + s and vr + vs > r and vc < c + s and vc + vs > c:
                viol.add(v)
    rows = tuple("".join("1" if b else "0" for b in row) for row in grid)
    return SampleTrace(rows, rounds, initial, not viol)
