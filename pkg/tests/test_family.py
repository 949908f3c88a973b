import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from forbidden_ap.analysis import lz78_phrase_estimate
from forbidden_ap.family import (
    BudgetWarning,
    FamilyFormatError,
    ForbiddenFamily,
    TruncationWarning,
    budget_cap,
    contains,
    gen_lz_family,
    gen_random_family,
    parse_family,
    within_budget,
    write_family,
)

alphas = st.builds(
    lambda q, p: Fraction(p % (q - 1) + 1, q), st.integers(2, 12), st.integers(0, 100)
)


def test_parse_single_entry():
    f = parse_family("alpha=1/2\nlength 2\n11\n")
    assert f.alpha == Fraction(1, 2)
    assert f.entries == {2: frozenset({"11"})}
    assert f.min_len == f.max_len == 2


def test_parse_empty_family():
    f = parse_family(b"alpha=1/2\n")
    assert len(f) == 0 and f.min_len is None and f.max_len is None


def test_parse_budget_warning_only_above_cap():
    ok = "alpha=1/2\nlength 4\n0000\n0001\n0010\n"
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_family(ok)
    over = ok + "0011\n0100\n"
    with pytest.warns(BudgetWarning):
        f = parse_family(over)
    assert f.budget_violations() == [4]


def test_parse_comments_blank_lines_and_dim():
    f = parse_family("# demo\n\nalpha=1/2\ndim=2\n\nlength 2\n# square\n1111\n")
    assert f.dim == 2 and f.entries == {2: frozenset({"1111"})}


@pytest.mark.parametrize("text", [
    "",
    "alpha=1/2 extra\n",
    "alpha=3/2\n",
    "alpha=1/0\n",
    "alpha=1/2\n11\n",
    "alpha=1/2\nlength 2\n1a\n",
    "alpha=1/2\nlength 3\n11\n",
    "alpha=1/2\nlength 0\n",
    "alpha=1/2\ndim=x\n",
])
def test_parse_errors(text):
    with pytest.raises(FamilyFormatError):
        parse_family(text)


@given(st.integers(1, 40), alphas)
def test_budget_cap_is_exact_floor(n, alpha):
    cap = budget_cap(alpha, n)
    p, q = alpha.numerator, alpha.denominator
    assert cap**q <= 2 ** (p * n) < (cap + 1) ** q
    assert cap < 2**n
    assert budget_cap(alpha, n + 1) >= cap


@given(st.integers(1, 60))
def test_half_budget_matches_integer_sqrt(n):
    assert budget_cap(Fraction(1, 2), n) == math.isqrt(2**n)


def test_within_budget_boundary():
    assert within_budget(Fraction(1, 2), 4, 4)
    assert not within_budget(Fraction(1, 2), 4, 5)
    assert within_budget(Fraction(1, 3), 3, 2) and not within_budget(Fraction(1, 3), 3, 3)


def test_gen_random_examples():
    assert len(gen_random_family("1/2", [4], seed=7).entries[4]) == 4
    for seed in range(5):
        assert len(gen_random_family("1/2", [2], seed=seed).entries[2]) == 2
    assert gen_random_family("1/2", range(3, 9), 11) == gen_random_family("1/2", range(3, 9), 11)


@given(alphas, st.integers(1, 10), st.integers(0, 3), st.integers(0, 2**64 - 1))
def test_gen_random_fills_budget_exactly(alpha, lo, span, seed):
    f = gen_random_family(alpha, range(lo, lo + span + 1), seed)
    assert f.budget_violations() == []
    for n in range(lo, lo + span + 1):
        assert len(f.entries.get(n, ())) == min(budget_cap(alpha, n), 2**n - 1)


def test_gen_random_grid_family():
    f = gen_random_family("1/2", [2, 3], seed=1, dim=2)
    assert f.dim == 2
    assert all(len(w) == 9 for w in f.entries[3])
    assert len(f.entries[2]) == budget_cap(Fraction(1, 2), 2, 2) == 4


def _lz_oracle(alpha, n):
    out = []
    for v in range(2**n):
        x = format(v, f"0{n}b")
        if lz78_phrase_estimate(x) < alpha * n:
            out.append((lz78_phrase_estimate(x), x))
    out.sort()
    return {x for _, x in out[:budget_cap(alpha, n)]}


@pytest.mark.parametrize("alpha,n", [("1/2", 4), ("1/2", 8), ("3/4", 8), ("2/3", 10)])
def test_gen_lz_matches_exhaustive_oracle(alpha, n):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        f = gen_lz_family(alpha, [n])
    assert set(f.entries.get(n, ())) == _lz_oracle(Fraction(alpha), n)
    assert f.budget_violations() == []


def test_gen_lz_n4_half_is_empty():
    # every 4-bit string parses into at least 2 phrases
    assert gen_lz_family("1/2", [4]).entries == {}


def test_gen_lz_tiny_alpha_empty_and_cap():
    assert len(gen_lz_family("1/100", range(1, 12))) == 0
    with pytest.raises(ValueError):
        gen_lz_family("1/2", [23])


def test_gen_lz_truncation_warns():
    with pytest.warns(TruncationWarning):
        f = gen_lz_family("9/10", [10])
    assert len(f.entries[10]) == budget_cap(Fraction(9, 10), 10)


def test_contains():
    f = ForbiddenFamily(Fraction(1, 2), {2: {"11"}})
    assert contains(f, "11") and not contains(f, "10")
    assert "11" in f
    assert not contains(ForbiddenFamily(Fraction(1, 2)), "0")
    g = ForbiddenFamily(Fraction(1, 2), {2: {"1111"}}, dim=2)
    assert contains(g, "1111") and not contains(g, "11")


def test_family_validation():
    with pytest.raises(ValueError):
        ForbiddenFamily(Fraction(1, 2), {2: {"111"}})
    with pytest.raises(ValueError):
        ForbiddenFamily(Fraction(1, 1), {})
    f = ForbiddenFamily(Fraction(1, 2), {3: set(), 2: {"01"}})
    assert f.lengths == [2]


words = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.text("01", min_size=n, max_size=n), max_size=4))
)


@given(alphas, st.lists(words, max_size=4))
def test_write_parse_round_trip(alpha, sections):
    f = ForbiddenFamily(alpha, dict(sections))
    text = write_family(f)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetWarning)
        g = parse_family(text)
    assert g == f
    assert write_family(g) == text


def test_write_is_canonical():
    f = ForbiddenFamily(Fraction(1, 2), {3: {"110", "001"}, 1: {"1"}})
    assert write_family(f) == "alpha=1/2\nlength 1\n1\nlength 3\n001\n110\n"
