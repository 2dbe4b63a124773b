import json
from fractions import Fraction

import pytest

from bsgx.bsg import (
    ExtractionReport,
    Params,
    PWitness,
    QWitness,
    case_select,
    extract,
    extract_p,
    extract_q,
    partition_pq,
)
from bsgx.errors import InvariantViolation
from bsgx.generators import gen_ap, gen_random
from bsgx.groups import AdditiveSet, GroupSpec
from bsgx.oracle import verify_extraction, verify_report_dict

F = Fraction
Z = GroupSpec((0,))


def zset(*vals):
    return AdditiveSet.from_elements(Z, [(v,) for v in vals])


A012 = zset(0, 1, 2)


def test_params_validation():
    Params(eps=F(1, 10))
    Params(eps=F(49, 100), run_both=True)
    for bad in (F(0), F(1, 2), F(-1, 10), F(3, 4)):
        with pytest.raises(ValueError):
            Params(eps=bad)


def test_partition_012():
    pq = partition_pq(A012)
    # popular test: r(d)^2 * 3 >= 19 needs r(d) >= 3, i.e. only d = 0
    assert [d for d, _ in pq.p_items] == [(0,)]
    assert pq.p_mass == 9
    assert pq.q_mass == 10
    assert pq.q_size == 4
    assert pq.energy == 19
    assert sorted(pq.q_counts()) == [1, 1, 2, 2]
    assert list(pq.q_items()) == [
        ((-2,), 1),
        ((-1,), 2),
        ((1,), 2),
        ((2,), 1),
    ]


def test_partition_full_group_is_all_popular():
    full = AdditiveSet.from_elements(GroupSpec((5,)), [(i,) for i in range(5)])
    pq = partition_pq(full)
    assert pq.q_size == 0
    assert pq.q_mass == 0
    assert pq.p_mass == pq.energy == 125
    assert len(pq.p_items) == 5


def test_case_select_threshold():
    pq = partition_pq(A012)
    # 4 * p_mass = 36 vs eps * 19
    assert case_select(pq, F(1, 5)) == "P"
    assert case_select(pq, F(2, 5)) == "P"
    with pytest.raises(ValueError):
        case_select(pq, F(0))
    with pytest.raises(ValueError):
        case_select(pq, F(1, 2))


def test_extract_p_example():
    pq = partition_pq(A012)
    rep = extract_p(A012, pq, F(1, 5))
    w = rep.witness
    assert isinstance(w, PWitness)
    assert rep.case == "P"
    assert w.d_star == (0,)
    assert w.thin_threshold == 0  # floor(eps^2 * E / (16 n^2)) = 0
    assert w.thin_pairs_in_a_star == 0
    assert rep.a_prime == A012
    assert rep.a_prime_size == 3
    assert rep.diff_size == 5
    assert rep.K == F(27, 19)
    assert all(ok for _, ok in rep.checks)


def test_extract_p_requires_its_hypothesis():
    a = gen_random(63, 127, 7)
    pq = partition_pq(a)
    # at eps = 1/4 the popular mass is too small for the P route
    assert case_select(pq, F(1, 4)) == "Q"
    with pytest.raises(ValueError):
        extract_p(a, pq, F(1, 4))


def test_extract_q_requires_its_hypothesis():
    pq = partition_pq(A012)
    with pytest.raises(ValueError):
        extract_q(A012, pq, F(1, 5))


def test_extract_q_random_fixture():
    a = gen_random(63, 127, 7)
    rep = extract(a, Params(eps=F(1, 4)))
    assert rep.case == "Q"
    assert rep.energy == 125903
    assert rep.a_prime_size == 47
    assert rep.diff_size == 127
    w = rep.witness
    assert isinstance(w, QWitness)
    assert w.tv.xi == F(1, 8)
    assert len(w.q_prime) == len(w.selection.index_set)
    assert verify_extraction(a, rep).ok


def test_singleton_extracts_itself():
    rep = extract(zset(7), Params(eps=F(1, 4)))
    assert rep.case == "P"
    assert rep.a_prime == zset(7)
    assert rep.diff_size == 1


def test_run_both_at_the_exact_boundary():
    # for this set 4 * p_mass == eps * E at eps = 15876/125903, so both
    # routes' hypotheses hold simultaneously
    a = gen_random(63, 127, 7)
    pq = partition_pq(a)
    eps = F(4 * pq.p_mass, pq.energy)
    assert F(0) < eps < F(1, 2)
    assert pq.q_mass == (1 - eps / 4) * pq.energy
    single = extract(a, Params(eps=eps))
    both = extract(a, Params(eps=eps, run_both=True))
    assert single.case == "P"  # ties prefer the popular route
    assert both.case in ("P", "Q")
    # the dual run may only improve the achieved ratio
    assert F(both.diff_size, both.a_prime_size) <= F(
        single.diff_size, single.a_prime_size
    )
    assert verify_extraction(a, both).ok


def test_run_both_off_boundary_is_single_run():
    a = gen_random(63, 127, 7)
    plain = extract(a, Params(eps=F(1, 4)))
    boosted = extract(a, Params(eps=F(1, 4), run_both=True))
    assert plain.case == boosted.case == "Q"
    assert plain.a_prime == boosted.a_prime


def test_report_json_shape():
    rep = extract(A012, Params(eps=F(1, 5)))
    doc = json.loads(rep.to_json())
    assert doc["version"] == "0.1.0"
    assert doc["params"] == {"eps": "1/5", "run_both": False}
    assert doc["input"] == {"n": 3, "energy": 19, "K": "27/19"}
    assert doc["case"] == "P"
    assert doc["witness"]["d_star"] == [0]
    assert doc["achieved"] == {"a_prime_size": 3, "diff_size": 5}
    assert doc["a_prime"].startswith("aset 1\n")
    assert set(doc["bounds"]) == {"size_bound_sq", "diff_bound", "diff_bound_p"}
    for chk in doc["checks"]:
        assert chk["pass"] is True
    assert verify_report_dict(A012, doc).ok


def test_report_json_q_case_embeds_q_prime():
    a = gen_random(40, 79, 12)
    rep = extract(a, Params(eps=F(2, 5)))
    assert rep.case == "Q"
    assert (rep.a_prime_size, rep.diff_size) == (31, 79)
    doc = rep.to_json_dict()
    assert doc["witness"]["q_prime"].startswith("aset 1\n")
    assert doc["witness"]["delta"].count("/") <= 1
    assert doc["bounds"].keys() == {"size_bound_sq", "diff_bound"}
    assert verify_report_dict(a, doc).ok


def test_reports_are_deterministic_objects():
    a = gen_random(50, 101, 5)
    r1 = extract(a, Params(eps=F(1, 4)), threads=1)
    r2 = extract(a, Params(eps=F(1, 4)), threads=3)
    assert r1 == r2
    assert r1.to_json() == r2.to_json()


def test_theorem_bounds_recorded_exactly():
    n = 10
    a = gen_ap(n)
    eps = F(1, 10)
    rep = extract(a, Params(eps=eps))
    e = rep.energy
    assert rep.size_bound_sq == (1 - eps) ** 2 * F(e, n)
    k = F(n**3, e)
    assert rep.diff_bound == 2**33 * eps**-9 * k**4 * rep.a_prime_size
    # the P route strengthening is recorded only in case P
    if rep.case == "P":
        assert rep.diff_bound_p == 2**10 * eps**-4 * k**3 * rep.a_prime_size
