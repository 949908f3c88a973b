import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from forbidden_ap.analysis import verify_ladder_periodicity
from forbidden_ap.scaffold import (
    LadderError,
    PeriodLadder,
    build_sequence,
    classify_array,
    classify_position,
    decompose_window,
    density_D,
    fast_ladder,
    fresh_count,
    primary_position,
    recover_a,
)
from oracles import ladder_classes

L8 = PeriodLadder((2, 8, 32))
LADDERS = [
    PeriodLadder((2, 8, 32)),
    PeriodLadder((4, 64, 4096)),
    PeriodLadder((1, 2)),
    PeriodLadder((3,)),
    PeriodLadder((2, 4, 8, 16)),
    PeriodLadder((3, 9, 27, 81)),
    fast_ladder(Fraction(1, 8), 3),
]

ladders = st.lists(st.integers(2, 5), min_size=0, max_size=3).flatmap(
    lambda rs: st.integers(1, 4).map(
        lambda n0: PeriodLadder(tuple(n0 * math.prod(rs[:i]) for i in range(len(rs) + 1)))
    )
)


def test_ladder_validation_names_pair():
    with pytest.raises(LadderError, match="n_1=7.*n_0=2"):
        PeriodLadder((2, 7))
    with pytest.raises(LadderError, match="n_2=8.*n_1=8"):
        PeriodLadder((2, 8, 8))
    with pytest.raises(LadderError):
        PeriodLadder(())
    with pytest.raises(LadderError):
        PeriodLadder.parse("2,x")
    assert PeriodLadder.parse("2,8,32") == L8 and str(L8) == "2,8,32"
    assert L8.radices == (2, 4, 4)


def test_classify_examples():
    a = classify_position(0, L8)
    assert (a.rank, a.is_primary, a.representative, a.source_index) == (1, True, 0, 0)
    b = classify_position(9, L8)
    assert L8.digits(9) == ([1, 0, 1], 0)
    assert (b.rank, b.is_primary, b.representative, b.source_index) == (1, False, 1, 1)
    c = classify_position(3, L8)
    assert L8.digits(3) == ([1, 1, 0], 0)
    assert (c.rank, c.is_primary, c.representative) == (2, True, 3)


@pytest.mark.parametrize("ladder", LADDERS, ids=str)
def test_classify_matches_repetition_rule(ladder):
    N = min(3 * ladder.periods[-1] + 17, 12000)
    rep, src = ladder_classes(ladder.periods, N)
    rank, crep, prim, csrc = classify_array(np.arange(N), ladder)
    assert crep.tolist() == rep and csrc.tolist() == src
    for x in range(0, N, max(1, N // 300)):
        info = classify_position(x, ladder)
        assert (info.representative, info.source_index, info.rank) == (rep[x], src[x], rank[x])
        assert info.is_primary == (rep[x] == x) and info.representative <= x


def test_density_examples():
    assert density_D(L8) == Fraction(9, 16)
    assert density_D(PeriodLadder((5,))) == 1
    assert density_D(PeriodLadder((1, 7))) == Fraction(6, 7)


def test_fresh_count_examples():
    assert fresh_count(L8, 16) == 14
    assert fresh_count(L8, 10) == 8
    assert fresh_count(L8, 0) == 0
    assert density_D(L8) * 16 == 9


@pytest.mark.parametrize("ladder", LADDERS, ids=str)
def test_fresh_count_against_prefix_sums(ladder):
    N = 20000
    _, _, prim, _ = classify_array(np.arange(N), ladder)
    cs = np.concatenate(([0], np.cumsum(prim)))
    for n in list(range(200)) + random.Random(1).sample(range(N), 300):
        assert fresh_count(ladder, n) == cs[n]


@given(ladders, st.integers(0, 10**7))
def test_primary_position_inverts_fresh_count(ladder, idx):
    x = primary_position(ladder, idx)
    assert classify_position(x, ladder).is_primary
    assert fresh_count(ladder, x) == idx
    assert classify_position(x, ladder).source_index == idx


@given(ladders, st.integers(0, 5000))
def test_bijectivity_on_prefixes(ladder, N):
    _, _, prim, src = classify_array(np.arange(N), ladder)
    assert sorted(src[prim].tolist()) == list(range(fresh_count(ladder, N)))


def test_build_sequence_examples():
    assert build_sequence("0" * 100, L8, 40) == "0" * 40
    v = list(range(100))
    w = build_sequence(v, L8, 16)
    assert w[:8] == v[:8] and w[8:10] == [0, 1] and w[10:16] == v[8:14]
    with pytest.raises(ValueError, match="exhausted"):
        build_sequence("0" * 13, L8, 16)
    build_sequence("0" * 14, L8, 16)


def test_build_sequence_streams_iterators():
    it = iter(range(10**9))
    w = build_sequence(it, L8, 64)
    assert next(it) == fresh_count(L8, 64) == max(w) + 1


@given(ladders, st.integers(1, 3000), st.integers(0, 2**32))
def test_equivalent_positions_share_bits(ladder, N, seed):
    rng = random.Random(seed)
    bits = "".join(rng.choice("01") for _ in range(fresh_count(ladder, N)))
    w = build_sequence(bits, ladder, N)
    markers = build_sequence(list(range(N)), ladder, N)
    for _ in range(50):
        x = rng.randrange(N)
        info = classify_position(x, ladder)
        assert w[x] == w[info.representative]
        assert markers[x] == info.source_index


@given(ladders, st.integers(0, 2**32))
def test_rank_repetition(ladder, seed):
    N = 3 * ladder.periods[-1]
    rng = random.Random(seed)
    w = build_sequence(format(rng.getrandbits(N), f"0{N}b"), ladder, N)
    n = ladder.periods
    for s in range(ladder.depth - 1):
        for x in range(n[s]):
            for y in range(x + n[s + 1], N, n[s + 1]):
                assert w[x] == w[y]
        assert verify_ladder_periodicity(w, ladder, s)


@pytest.mark.parametrize("ladder", LADDERS, ids=str)
def test_density_bound_every_prefix(ladder):
    N = 10**5
    _, _, prim, _ = classify_array(np.arange(N), ladder)
    cs = np.concatenate(([0], np.cumsum(prim)))
    D = density_D(ladder)
    Ns = np.arange(N + 1)
    # cs[N] >= ceil(D N)  <=>  cs[N] * den >= num * N
    assert (cs * D.denominator >= D.numerator * Ns).all()


def test_fast_ladder():
    for eps in (Fraction(1, 8), Fraction(1, 3), Fraction(1, 100)):
        for depth in (1, 2, 3, 5):
            lad = fast_ladder(eps, depth)
            total = sum(Fraction(a, b) for a, b in zip(lad.periods, lad.periods[1:]))
            assert total < eps and lad.depth == depth


# -- window decomposition ---------------------------------------------------

def test_decompose_example():
    d = decompose_window(4, 6, L8)
    assert d.cutoff == 1 and d.small_rank_count == 0
    assert d.intervals == ((0, 2), (4, 8)) and d.s == 2 and d.total_length == 6
    assert d.starts == (8, 4) and d.ends == (9, 7)


def test_decompose_prefix_inside_first_block():
    for k in (1, 2):
        d = decompose_window(0, k, L8)
        assert d.intervals == ((0, k),) and d.small_rank_count == 0


def test_decompose_errors():
    with pytest.raises(LadderError):
        decompose_window(0, 33, L8)
    with pytest.raises(ValueError):
        decompose_window(0, 0, L8)


@given(ladders, st.data())
def test_decompose_properties(ladder, data):
    top = ladder.periods[-1]
    k = data.draw(st.integers(1, top))
    m = data.draw(st.integers(0, 4 * top))
    d = decompose_window(m, k, ladder)
    assert d.s <= 3
    assert d.small_rank_count + d.total_length == k
    assert all(a < b for a, b in d.intervals)
    assert all(b0 <= a1 for (_, b0), (a1, _) in zip(d.intervals, d.intervals[1:]))
    assert d.density_ok
    markers = build_sequence(list(range(m + k)), ladder, m + k)
    kept = [x for x in range(m, m + k) if classify_position(x, ladder).rank >= d.cutoff]
    for (a, b), p, q in zip(d.intervals, d.starts, d.ends):
        # small-rank positions may sit between p and q; they are skipped
        run = [markers[x] for x in kept if p <= x <= q]
        assert run == list(range(a, b))


def test_recover_examples():
    assert recover_a(4, 0, L8) == 4
    assert recover_a(4, 4, L8) == 0
    with pytest.raises(ValueError):
        recover_a(0, -1, L8)


@given(ladders, st.data())
def test_recover_agrees_with_decomposition(ladder, data):
    top = ladder.periods[-1]
    d = decompose_window(data.draw(st.integers(0, 4 * top)), data.draw(st.integers(1, top)), ladder)
    for j in range(d.s - 1):
        assert recover_a(d.intervals[j + 1][0], d.starts[j] - d.starts[j + 1], ladder) == d.intervals[j][0]
