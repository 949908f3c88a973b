"""Independent verifiers and empirical diagnostics.

Everything here is deliberately naive: these functions are the reference
oracles for the optimised scanners in :mod:`forbidden_ap.avoider` and the
index arithmetic in :mod:`forbidden_ap.scaffold`, so they share no code
with either.

The LZ78 phrase count is a computable *proxy* for incompressibility.  It
says nothing certain about Kolmogorov complexity and is only ever used to
compare strings with each other.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

__all__ = [
    "AvoidanceResult",
    "RecurrenceReport",
    "ProfileRow",
    "verify_avoidance",
    "recurrence_gap",
    "verify_ladder_periodicity",
    "ladder_periodicity_violation",
    "lz78_phrase_estimate",
    "complexity_profile",
    "profile_csv",
    "recurrence_csv",
]


class AvoidanceResult(NamedTuple):
    ok: bool
    counterexample: tuple | None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class RecurrenceReport:
    pattern: str
    occurrences: tuple[int, ...]
    max_gap: int | None
    window_k: int | None


@dataclass(frozen=True)
class ProfileRow:
    length: int
    min_estimate: int
    mean_estimate: Fraction


def _as_rows(grid) -> list[str]:
    if isinstance(grid, str):
        return grid.split()
    rows = []
    for row in grid:
        rows.append(row if isinstance(row, str) else "".join(str(int(b)) for b in row))
    return rows


def verify_avoidance(x, family, min_len: int = 1) -> AvoidanceResult:
    """Check that no forbidden word of length >= ``min_len`` occurs in ``x``.

    ``x`` is a bitstring for one-dimensional families, or a square grid
    (list of row strings, nested lists or a 2-D array) for ``dim == 2``.
    The first violation is reported as ``(start, length)`` for strings and
    ``(row, col, side)`` for grids, in lexicographic order of those tuples.
    """
    if family.dim == 1:
        x = x if isinstance(x, str) else "".join(str(int(b)) for b in x)
        for start in range(len(x)):
            for n, words in family.entries.items():
                if n >= min_len and start + n <= len(x) and x[start:start + n] in words:
                    return AvoidanceResult(False, (start, n))
        return AvoidanceResult(True, None)
    if family.dim != 2:
        raise ValueError("grid verification supports dim 2 only")
    rows = _as_rows(x)
    h = len(rows)
    w = len(rows[0]) if rows else 0
    for r in range(h):
        for c in range(w):
            for s, words in family.entries.items():
                if s < min_len or r + s > h or c + s > w:
                    continue
                block = "".join(rows[r + i][c:c + s] for i in range(s))
                if block in words:
                    return AvoidanceResult(False, (r, c, s))
    return AvoidanceResult(True, None)


def recurrence_gap(prefix: str, x: str) -> RecurrenceReport:
    """All (possibly overlapping) occurrences of ``x`` in ``prefix`` and their spacing.

    ``window_k = max_gap + len(x)``: every window of that length lying
    between the first and last occurrence contains a full copy of ``x``.
    """
    if len(x) > len(prefix):
        raise ValueError("pattern longer than prefix")
    occ = []
    i = prefix.find(x)
    while i != -1:
        occ.append(i)
        i = prefix.find(x, i + 1)
    if len(occ) < 2:
        return RecurrenceReport(x, tuple(occ), None, None)
    gap = max(b - a for a, b in zip(occ, occ[1:]))
    return RecurrenceReport(x, tuple(occ), gap, gap + len(x))


def _periods(ladder) -> tuple[int, ...]:
    return tuple(getattr(ladder, "periods", ladder))


def ladder_periodicity_violation(omega: str, ladder, s: int) -> int | None:
    """First position ``p + i`` where the length-``n_s`` prefix fails to repeat.

    Checks every multiple ``p`` of ``n_{s+1}`` with ``p + n_s <= len(omega)``.
    Returns None when all copies agree (vacuously so if none fits).
    """
    periods = _periods(ladder)
    if not 0 <= s < len(periods) - 1:
        raise ValueError(f"level s={s} needs s+1 < ladder depth {len(periods)}")
    width, step = periods[s], periods[s + 1]
    head = omega[:width]
    for p in range(step, len(omega) - width + 1, step):
        if omega[p:p + width] != head:
            for i in range(width):
                if omega[p + i] != head[i]:
                    return p + i
    return None


def verify_ladder_periodicity(omega: str, ladder, s: int) -> bool:
    return ladder_periodicity_violation(omega, ladder, s) is None


def lz78_phrase_estimate(x: str) -> int:
    """Number of phrases in the LZ78 incremental parse of ``x``.

    Each phrase is the longest previously seen phrase extended by one
    symbol.  A trailing partial phrase counts as one phrase, so
    ``"0000"`` parses as ``0|00|0`` and scores 3.
    """
    seen = set()
    count = 0
    w = ""
    for c in x:
        w += c
        if w not in seen:
            seen.add(w)
            count += 1
            w = ""
    return count + (1 if w else 0)


def complexity_profile(omega: str, lengths: Sequence[int]) -> list[ProfileRow]:
    """Min and mean LZ78 estimate over every window of each requested length."""
    rows = []
    for n in lengths:
        if not 0 < n <= len(omega):
            raise ValueError(f"window length {n} outside 1..{len(omega)}")
        scores = [lz78_phrase_estimate(omega[i:i + n]) for i in range(len(omega) - n + 1)]
        rows.append(ProfileRow(n, min(scores), Fraction(sum(scores), len(scores))))
    return rows


def profile_csv(rows: Sequence[ProfileRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["length", "min_estimate", "mean_estimate"])
    for r in rows:
        w.writerow([r.length, r.min_estimate, f"{float(r.mean_estimate):.6f}"])
    return buf.getvalue()


def recurrence_csv(reports: Sequence[RecurrenceReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pattern", "occurrences", "max_gap", "window_k"])
    for r in reports:
        w.writerow([
            r.pattern,
            len(r.occurrences),
            "" if r.max_gap is None else r.max_gap,
            "" if r.window_k is None else r.window_k,
        ])
    return buf.getvalue()
