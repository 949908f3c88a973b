"""Families of forbidden binary strings (or square/cubic blocks).

A family maps a length ``n`` to a set of forbidden words.  In one dimension
a word under key ``n`` is a bitstring of length ``n``; in ``dim`` dimensions
it is a cube of side ``n`` flattened row-major into ``n**dim`` bits.  The
budget exponent ``alpha`` is kept as an exact :class:`~fractions.Fraction`
so that the size test ``|F_n| <= 2**(alpha * n**dim)`` never touches floating
point.
"""

from __future__ import annotations

import itertools
import random
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import gmpy2

__all__ = [
    "BudgetWarning",
    "TruncationWarning",
    "FamilyFormatError",
    "ForbiddenFamily",
    "as_alpha",
    "budget_cap",
    "within_budget",
    "parse_family",
    "write_family",
    "read_family",
    "gen_random_family",
    "gen_lz_family",
    "contains",
    "LZ_ENUMERATION_CAP",
]

LZ_ENUMERATION_CAP = 22

_BITS = re.compile(r"^[01]+$")


class BudgetWarning(UserWarning):
    """A family holds more words of some length than its alpha allows."""


class TruncationWarning(UserWarning):
    """A generated family was cut down to its budget."""


class FamilyFormatError(ValueError):
    pass


def as_alpha(value) -> Fraction:
    """Coerce ``value`` (``"p/q"``, Fraction, int pair) to a Fraction in (0, 1)."""
    if isinstance(value, tuple):
        value = Fraction(*value)
    alpha = Fraction(value)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    return alpha


def budget_cap(alpha: Fraction, n: int, dim: int = 1) -> int:
    """``floor(2 ** (alpha * n**dim))`` computed with an exact integer root."""
    p, q = alpha.numerator, alpha.denominator
    root, _ = gmpy2.iroot(gmpy2.mpz(1) << (p * n**dim), q)
    return int(root)


def within_budget(alpha: Fraction, n: int, count: int, dim: int = 1) -> bool:
    """Exact test of ``count <= 2 ** (alpha * n**dim)``, i.e. ``count**q <= 2**(p*n**dim)``."""
    p, q = alpha.numerator, alpha.denominator
    return count**q <= 1 << (p * n**dim)


@dataclass(frozen=True)
class ForbiddenFamily:
    alpha: Fraction
    entries: Mapping[int, frozenset] = field(default_factory=dict)
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        clean = {}
        for n, words in self.entries.items():
            n = int(n)
            if n < 1:
                raise ValueError(f"lengths must be positive, got {n}")
            words = frozenset(words)
            size = n**self.dim
            for w in words:
                if len(w) != size or not _BITS.match(w):
                    raise ValueError(f"{w!r} is not a {size}-bit word for length {n}")
            if words:
                clean[n] = words
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.alpha, self.dim, tuple(self.entries.items())))

    @property
    def min_len(self) -> int | None:
        return next(iter(self.entries), None)

    @property
    def max_len(self) -> int | None:
        return next(reversed(self.entries), None)

    @property
    def lengths(self) -> list[int]:
        return list(self.entries)

    def __len__(self):
        return sum(len(v) for v in self.entries.values())

    def __contains__(self, word: str) -> bool:
        return contains(self, word)

    def cap(self, n: int) -> int:
        return budget_cap(self.alpha, n, self.dim)

    def budget_violations(self) -> list[int]:
        """Lengths whose word count exceeds the alpha budget."""
        return [
            n for n, words in self.entries.items()
            if not within_budget(self.alpha, n, len(words), self.dim)
        ]

    def restricted(self, min_len: int) -> "ForbiddenFamily":
        return ForbiddenFamily(
            self.alpha, {n: w for n, w in self.entries.items() if n >= min_len}, self.dim
        )


def contains(family: ForbiddenFamily, x: str) -> bool:
    """True iff ``x`` is one of the forbidden words of its own length."""
    if family.dim == 1:
        return x in family.entries.get(len(x), ())
    side = round(len(x) ** (1 / family.dim))
    for s in (side - 1, side, side + 1):
        if s > 0 and s**family.dim == len(x):
            return x in family.entries.get(s, ())
    return False


def parse_family(text) -> ForbiddenFamily:
    """Parse the text family format.

    Lines starting with ``#`` and blank lines are skipped.  The first
    remaining line must be ``alpha=p/q``; an optional ``dim=d`` line may
    follow.  Sections open with ``length n`` and list one word per line.
    Over-budget lengths raise a :class:`BudgetWarning` instead of failing.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    lines = [
        (no, ln.strip()) for no, ln in enumerate(text.splitlines(), 1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise FamilyFormatError("missing 'alpha=p/q' header")
    no, head = lines[0]
    m = re.fullmatch(r"alpha\s*=\s*(\d+)\s*/\s*(\d+)", head)
    if not m:
        raise FamilyFormatError(f"line {no}: malformed header {head!r}")
    try:
        alpha = as_alpha(Fraction(int(m.group(1)), int(m.group(2))))
    except (ValueError, ZeroDivisionError) as exc:
        raise FamilyFormatError(f"line {no}: {exc}") from None
    rest = lines[1:]
    dim = 1
    if rest and rest[0][1].startswith("dim"):
        no, ln = rest[0]
        m = re.fullmatch(r"dim\s*=\s*(\d+)", ln)
        if not m or int(m.group(1)) < 1:
            raise FamilyFormatError(f"line {no}: malformed dim line {ln!r}")
        dim = int(m.group(1))
        rest = rest[1:]

    entries: dict[int, set] = {}
    current = None
    for no, ln in rest:
        m = re.fullmatch(r"length\s+(\d+)", ln)
        if m:
            current = int(m.group(1))
            if current < 1:
                raise FamilyFormatError(f"line {no}: length must be positive")
            entries.setdefault(current, set())
            continue
        if current is None:
            raise FamilyFormatError(f"line {no}: word before any 'length' section")
        if not _BITS.match(ln):
            raise FamilyFormatError(f"line {no}: non-bit characters in {ln!r}")
        if len(ln) != current**dim:
            raise FamilyFormatError(
                f"line {no}: word of {len(ln)} bits in section 'length {current}'"
            )
        entries[current].add(ln)

    family = ForbiddenFamily(alpha, entries, dim)
    over = family.budget_violations()
    if over:
        warnings.warn(f"over budget at lengths {over}", BudgetWarning, stacklevel=2)
    return family


def write_family(family: ForbiddenFamily) -> str:
    a = family.alpha
    out = [f"alpha={a.numerator}/{a.denominator}"]
    if family.dim != 1:
        out.append(f"dim={family.dim}")
    for n, words in family.entries.items():
        out.append(f"length {n}")
        out.extend(sorted(words))
    return "\n".join(out) + "\n"


def read_family(path) -> ForbiddenFamily:
    with open(path, "rb") as fh:
        return parse_family(fh.read())


def _lengths(lengths) -> list[int]:
    if isinstance(lengths, int):
        lengths = [lengths]
    out = sorted(set(int(n) for n in lengths))
    if not out:
        raise ValueError("lengths must be nonempty")
    if out[0] < 1:
        raise ValueError("lengths must be positive")
    return out


def gen_random_family(alpha, lengths: Iterable[int], seed: int, dim: int = 1) -> ForbiddenFamily:
    """Uniform random family filling every length to its budget.

    For each ``n`` exactly ``min(cap(n), 2**size - 1)`` distinct words are
    drawn, where ``size = n**dim``.  The output is a pure function of the
    arguments.
    """
    alpha = as_alpha(alpha)
    rng = random.Random(seed)
    entries = {}
    for n in _lengths(lengths):
        size = n**dim
        count = min(budget_cap(alpha, n, dim), 2**size - 1)
        picks = rng.sample(range(2**size), count)
        entries[n] = frozenset(format(v, f"0{size}b") for v in picks)
    return ForbiddenFamily(alpha, entries, dim)


def gen_lz_family(alpha, lengths: Iterable[int], cap: int = LZ_ENUMERATION_CAP) -> ForbiddenFamily:
    """Forbid the words that look compressible to LZ78.

    A word ``x`` of length ``n`` is a candidate when its LZ78 phrase count is
    below ``alpha * n``.  This is a heuristic stand-in for "low complexity"
    only.  Candidates beyond the budget are dropped, keeping the lowest
    counts first (ties broken lexicographically) and issuing a
    :class:`TruncationWarning`.
    """
    from .analysis import lz78_phrase_estimate

    alpha = as_alpha(alpha)
    p, q = alpha.numerator, alpha.denominator
    entries = {}
    truncated = {}
    for n in _lengths(lengths):
        if n > cap:
            raise ValueError(f"length {n} exceeds the enumeration cap {cap}")
        scored = []
        for bits in itertools.product("01", repeat=n):
            x = "".join(bits)
            est = lz78_phrase_estimate(x)
            if est * q < p * n:
                scored.append((est, x))
        scored.sort()
        limit = budget_cap(alpha, n)
        if len(scored) > limit:
            truncated[n] = (len(scored), limit)
            scored = scored[:limit]
        entries[n] = frozenset(x for _, x in scored)
    if truncated:
        detail = ", ".join(f"n={n}: {a}->{b}" for n, (a, b) in truncated.items())
        warnings.warn(f"LZ78 candidates truncated to budget ({detail})", TruncationWarning,
                      stacklevel=2)
    return ForbiddenFamily(alpha, entries)
