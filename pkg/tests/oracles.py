"""Reference implementations that share no code with the package.

Each one is the slow, obvious way to compute something the package does
cleverly.
"""

from __future__ import annotations

import itertools
from decimal import Decimal, getcontext
from fractions import Fraction


# -- strings -----------------------------------------------------------------

def naive_scan(x: str, entries: dict, min_len: int = 1):
    out = []
    for start in range(len(x)):
        for n in sorted(entries):
            if n >= min_len and start + n <= len(x) and x[start:start + n] in entries[n]:
                out.append((start, n))
    return out


def avoiding_strings_exist(entries: dict, min_len: int, N: int) -> bool:
    """Is there a string of length ``N`` with no forbidden word of length >= ``min_len``?

    Plain breadth-first growth over suffixes of length ``max_len - 1``.
    """
    active = {n: w for n, w in entries.items() if n >= min_len and w}
    if not active:
        return True
    M = max(active)

    def bad_suffix(s):
        return any(len(s) >= n and s[-n:] in w for n, w in active.items())

    states = {""}
    for _ in range(N):
        nxt = set()
        for s in states:
            for b in "01":
                t = s + b
                if not bad_suffix(t):
                    nxt.add(t[-(M - 1):] if M > 1 else "")
        states = nxt
        if not states:
            return False
    return True


def sft_nonempty(entries: dict, min_len: int) -> bool:
    """A path longer than the number of (M-1)-words must repeat one, giving a cycle."""
    active = {n: w for n, w in entries.items() if n >= min_len and w}
    if not active:
        return True
    M = max(active)
    return avoiding_strings_exist(entries, min_len, 2 ** (M - 1) + M)


def naive_grid_scan(rows, entries: dict, min_len: int = 1):
    out = []
    h = len(rows)
    for r in range(h):
        for c in range(len(rows[0])):
            for s in sorted(entries):
                if s >= min_len and r + s <= h and c + s <= len(rows[0]):
                    block = "".join(rows[r + i][c:c + s] for i in range(s))
                    if block in entries[s]:
                        out.append((r, c, s))
    return out


def lz78_trie(x: str) -> int:
    """LZ78 via an explicit dictionary of phrase indices; a trailing partial phrase counts."""
    table = {"": 0}
    phrases = 0
    cur = ""
    for c in x:
        if cur + c in table:
            cur += c
        else:
            table[cur + c] = len(table)
            phrases += 1
            cur = ""
    return phrases + (1 if cur else 0)


# hand-traced parses
LZ78_TABLE = {
    "": 0,
    "0": 1,
    "00": 2,     # 0 | 0(partial)
    "000": 2,    # 0 | 00
    "0000": 3,   # 0 | 00 | 0(partial)
    "0101": 3,   # 0 | 1 | 01
    "1100": 3,   # 1 | 10 | 0
    "010110": 4,  # 0 | 1 | 01 | 10
    "111111": 3,  # 1 | 11 | 111
    "0110100": 4,  # 0 | 1 | 10 | 100
}


# -- local-lemma products ----------------------------------------------------

def decimal_log_factors(delta: Fraction, L: int, K: int, d: int = 1, digits: int = 80):
    """``[(k, ln(1 - 2**(-delta k**d)))]`` for ``L <= k <= K`` at ``digits`` significant digits."""
    getcontext().prec = digits
    ln2 = Decimal(2).ln()
    dd = Decimal(delta.numerator) / Decimal(delta.denominator)
    out = []
    for k in range(L, K + 1):
        x = (-(dd * Decimal(k**d)) * ln2).exp()
        out.append((k, (1 - x).ln()))
    return out


def decimal_ln(q: Fraction, digits: int = 80) -> Decimal:
    getcontext().prec = digits
    return (Decimal(q.numerator) / Decimal(q.denominator)).ln()


# -- ladders -----------------------------------------------------------------

class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def ladder_classes(periods, N):
    """Positions ``< N`` grouped by the repetition rule ``i ~ i + k n_{s+1}`` for ``i < n_s``.

    Returns ``(rep, src)``: leftmost class member and its index among
    leftmost members in increasing order.
    """
    dsu = _DSU(N)
    for s in range(len(periods) - 1):
        for i in range(min(periods[s], N)):
            for j in range(i + periods[s + 1], N, periods[s + 1]):
                dsu.union(i, j)
    rep = [dsu.find(x) for x in range(N)]
    order = {}
    for x in range(N):
        if rep[x] == x:
            order[x] = len(order)
    return rep, [order[r] for r in rep]


def grid_rank(p, periods):
    """First level whose periodic copies of the centred cube cover ``p`` (``t + 1`` if none)."""
    for j in range(1, len(periods)):
        h, P = periods[j - 1], periods[j]
        if all(-h <= ((c + h) % P) - h < h for c in p):
            return j
    return len(periods) + 1


def grid_fill_order(periods, d):
    """Ranked representatives in fill order: by rank, then lexicographically."""
    t = len(periods)
    if t < 2:
        return []
    h = periods[t - 2]
    reps = []
    for p in itertools.product(range(-h, h), repeat=d):
        j = grid_rank(p, periods)
        if j <= t - 1 and all(-periods[j - 1] <= c < periods[j - 1] for c in p):
            reps.append((j, p))
    reps.sort()
    return [p for _, p in reps]
