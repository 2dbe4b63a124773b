from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsgx import _codec
from bsgx.additive_stats import difference_set, energy, rep_table
from bsgx.generators import gen_ap, gen_axis, gen_random
from bsgx.groups import AdditiveSet, GroupSpec, neg, sub

Z = GroupSpec((0,))


def zset(*vals):
    return AdditiveSet.from_elements(Z, [(v,) for v in vals])


def test_rep_table_012():
    rep = rep_table(zset(0, 1, 2))
    table = dict(rep.items())
    assert table == {(-2,): 1, (-1,): 2, (0,): 3, (1,): 2, (2,): 1}
    assert rep.count((1,)) == 2
    assert rep.count((5,)) == 0  # not a difference at all
    assert rep.total_pairs() == 9


def test_rep_table_01():
    assert dict(rep_table(zset(0, 1)).items()) == {(-1,): 1, (0,): 2, (1,): 1}


def test_rep_table_singleton():
    assert dict(rep_table(zset(42)).items()) == {(0,): 1}


def test_items_are_lex_sorted():
    rep = rep_table(zset(0, 3, 7))
    keys = [d for d, _ in rep.items()]
    assert keys == sorted(keys)


def test_energy_small_examples():
    r = energy(zset(0, 1))
    assert (r.set_size, r.energy, r.diff_size) == (2, 6, 3)
    assert r.K == Fraction(4, 3)

    r = energy(zset(0, 1, 2))
    assert r.energy == 19
    assert r.K == Fraction(27, 19)

    r = energy(zset(9))
    assert r.energy == 1 and r.K == 1


@pytest.mark.parametrize("n", [1, 2, 3, 7, 25, 60])
def test_ap_energy_closed_form(n):
    # consecutive integers: E = (2n^3 + n) / 3
    assert energy(gen_ap(n)).energy == (2 * n**3 + n) // 3


def test_difference_set():
    d = difference_set(zset(0, 1, 3))
    assert d.elements == tuple((v,) for v in (-3, -2, -1, 0, 1, 2, 3))
    assert difference_set(zset(5)).elements == ((0,),)
    # full group is closed under subtraction
    full = AdditiveSet.from_elements(GroupSpec((5,)), [(i,) for i in range(5)])
    assert difference_set(full) == full


def test_rep_invariants_on_a_structured_set():
    a = gen_axis(7, 2)
    rep = rep_table(a)
    n = len(a)
    total = 0
    for d, c in rep.items():
        assert 1 <= c <= n
        assert rep.count(neg(a.spec, d)) == c  # r(d) = r(-d)
        total += c
    assert total == n * n
    assert rep.count(a.spec.zero()) == n


def test_energy_accepts_precomputed_table():
    a = gen_random(20, 101, 3)
    rep = rep_table(a)
    assert energy(a, rep=rep) == energy(a)


def test_threads_do_not_change_anything():
    a = gen_random(40, 211, 11)
    assert energy(a, threads=3) == energy(a, threads=1)
    assert dict(rep_table(a, threads=4).items()) == dict(rep_table(a).items())


def test_dict_fallback_agrees_with_fast_path(monkeypatch):
    sets = [
        gen_random(25, 64, 5),
        gen_axis(5, 3),
        AdditiveSet.from_elements(GroupSpec((0, 6)), [(i, i * i) for i in range(9)]),
    ]
    fast = [energy(a) for a in sets]
    monkeypatch.setattr(_codec, "build_codec", lambda a: None)
    import bsgx.additive_stats as stats

    monkeypatch.setattr(stats, "build_codec", lambda a: None)
    slow = [energy(a) for a in sets]
    assert fast == slow


def test_huge_free_coordinates_fall_back():
    # coordinates beyond the packing cap force the dict path implicitly
    big = 1 << 62
    a = AdditiveSet.from_elements(Z, [(0,), (big,), (2 * big,), (3 * big + 1,)])
    r = energy(a)
    # {0, b, 2b, 3b+1}: r(b) = 2 (two adjacent pairs), ten other nonzero
    # differences occur once, so E = 16 + 2*4 + 8 and |A-A| = 11
    assert r.energy == 32
    assert r.diff_size == 11
    assert r.energy == sum(c * c for _, c in rep_table(a).items())


@st.composite
def small_sets(draw):
    m = draw(st.sampled_from([0, 0, 7, 24, 101]))
    spec = GroupSpec((m,))
    hi = 10**6 if m == 0 else m - 1
    elems = draw(
        st.lists(
            st.integers(min_value=0, max_value=hi), min_size=1, max_size=25
        )
    )
    return AdditiveSet.from_elements(spec, [(v,) for v in elems])


@given(small_sets())
@settings(max_examples=120, deadline=None)
def test_energy_report_invariants(a):
    n = len(a)
    r = energy(a)
    assert n * n <= r.energy <= n**3
    assert 1 <= r.K <= n
    assert r.K == Fraction(n**3, r.energy)
    # Cauchy-Schwarz: E * |A-A| >= |A|^4
    assert r.energy * r.diff_size >= n**4


@given(small_sets(), st.integers(min_value=-(10**4), max_value=10**4))
@settings(max_examples=60, deadline=None)
def test_translation_invariance(a, t):
    shifted = a.translate((t,) if a.spec.moduli[0] == 0 else (t % a.spec.moduli[0],))
    assert energy(shifted).energy == energy(a).energy


@given(small_sets())
@settings(max_examples=60, deadline=None)
def test_rep_table_matches_difference_set(a):
    rep = rep_table(a)
    diff = difference_set(a)
    assert set(d for d, _ in rep.items()) == set(diff.elements)
    # and every difference really occurs
    for d, c in rep.items():
        brute = sum(1 for x in a for y in a if sub(a.spec, x, y) == d)
        assert brute == c


def test_freiman_rescaling_preserves_energy():
    # {0, 3, 6, ...} has the same additive structure as {0, 1, 2, ...}
    assert energy(gen_ap(10, 0, 3)).energy == energy(gen_ap(10)).energy
    assert energy(gen_ap(10, 5, -2)).energy == energy(gen_ap(10)).energy
