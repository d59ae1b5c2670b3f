from collections import Counter
from math import gcd

import pytest

from nilbal.classify import (
    NotCoprime, SweepReport, abelianization_isomorphic, catalog, check_not_balanced,
    finite_kernel_betti, h2_vanishing_certificate, metabelian_torsion_group, metacyclic_presentation,
    multiplicative_order, partial3_parameters, q8k_group, q8k_parameter, q8k_presentation, record,
    run_items, semidirect_nilpotent, semidirect_nilpotent_bruteforce, semidirect_presentation,
    semidirect_quotient_presentation, verify_catalog, verify_cycboth, verify_oracle,
    verify_partial3, verify_semidirect, verify_theorem_h1, wang_identity_catalog,
)
from nilbal.fingroup import coset_enumerate
from nilbal.presentation import parse
from oracles import quaternion_times_cyclic


def _nilpotent_by_powers(m, n):
    x = 1 % m
    for _ in range(m + 1):
        if x == 0:
            return True
        x = x * (n - 1) % m
    return x == 0


@pytest.mark.parametrize("m, n, expected", [
    (1, 7, (True, 0)), (4, -1, (True, 2)), (9, 4, (True, 2)), (8, 5, (True, 2)),
    (3, 2, (False, None)), (12, 7, (True, 2)), (12, 5, (False, None)), (27, 10, (True, 2)),
    (16, 3, (True, 4)), (2, 1, (True, 1)),
])
def test_semidirect_nilpotent_examples(m, n, expected):
    assert semidirect_nilpotent(m, n) == expected
    assert semidirect_nilpotent_bruteforce(m, n) == expected[0]
    assert _nilpotent_by_powers(m, n) == expected[0]


def test_semidirect_agrees_with_power_search():
    for m in range(1, 40):
        for n in range(-20, 21):
            if gcd(m, n) == 1:
                assert semidirect_nilpotent(m, n)[0] == _nilpotent_by_powers(m, n), (m, n)


def test_semidirect_not_coprime():
    with pytest.raises(NotCoprime):
        semidirect_nilpotent(6, 4)
    with pytest.raises(NotCoprime):
        semidirect_nilpotent_bruteforce(9, 3)


def test_multiplicative_order_and_quotient():
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(-1, 4) == 2
    Q = coset_enumerate(semidirect_quotient_presentation(7, 2))
    assert Q.order == 21
    assert not Q.lower_central_series().is_nilpotent
    assert coset_enumerate(semidirect_quotient_presentation(9, 4)).lower_central_series().is_nilpotent


def test_semidirect_presentation_negative_n():
    assert semidirect_presentation(4, -1).name == "Zm_x_Z"


def test_semidirect_sweep_small():
    rep = verify_semidirect(mmax=20, nmax=10)
    assert rep.ok, rep.summary()
    assert rep.stats["pairs"] == sum(1 for m in range(1, 21) for n in range(-10, 11) if gcd(m, n) == 1)


# -- finite presentations

def test_metacyclic_orders():
    for args, order in [((3, 1, 0, 0), 27), ((3, 1, 0, 1), 81), ((2, 2, 0, 0), 64)]:
        assert coset_enumerate(metacyclic_presentation(*args)).order == order
    with pytest.raises(ValueError):
        metacyclic_presentation(3, 0, 0, 0)


@pytest.mark.parametrize("k, a, s", [(1, 1, -1), (1, 3, -5), (2, 1, -1), (1, 5, -9)])
def test_q8k_parameter(k, a, s):
    assert q8k_parameter(k, a) == s
    assert coset_enumerate(q8k_presentation(k, a)).order == 8 * k * a


def test_q8k_parameter_not_coprime():
    with pytest.raises(NotCoprime):
        q8k_parameter(1, 2)


def test_q8_times_z3_matches_table():
    G = coset_enumerate(q8k_presentation(1, 3))
    table = quaternion_times_cyclic(3)

    def profile(t):
        out = []
        for g in range(len(t)):
            k, x = 1, g
            while x:
                x, k = t[x][g], k + 1
            out.append(k)
        return Counter(out)
    assert Counter(G.element_orders.tolist()) == profile(table)


def test_h2_certificate():
    assert h2_vanishing_certificate(q8k_presentation(1, 1))
    assert h2_vanishing_certificate(metacyclic_presentation(3, 1, 0, 0))
    assert not h2_vanishing_certificate(parse("< a, b | a^2, b^2, [a,b] >"))
    assert not h2_vanishing_certificate(parse("< a, b | [a,b] >"))


def test_abelianization_isomorphic():
    assert abelianization_isomorphic(parse("< a | a^6 >"), parse("< a, b | a^2, b^3, [a,b] >"))
    assert not abelianization_isomorphic(parse("< a | a^4 >"), parse("< a, b | a^2, b^2 >"))


# -- finite kernels extended by Z

@pytest.mark.parametrize("k", [1, 2])
def test_q8k_kernel_betti(k):
    K, psi = q8k_group(k)
    assert K.order == 8 * k
    w = finite_kernel_betti(K, psi, 2)
    assert (w.beta1, w.beta2) == (2, 2)


@pytest.mark.parametrize("m", [2, 3])
def test_metabelian_kernel_betti(m):
    K, psi = metabelian_torsion_group(m)
    assert K.order == m ** 3
    w = finite_kernel_betti(K, psi, m)
    assert (w.beta1, w.beta2) == (2, 2)


# -- catalog

def test_catalog_entries_have_bases():
    entries = catalog()
    assert len({e.name for e in entries}) == len(entries)
    for e in entries:
        assert all(v.basis in ("stated", "derived", "elementary") for v in e.expected.values())


@pytest.mark.parametrize("name, verdict, witness", [
    ("Heis mod 2", "not-homologically-balanced", 2),
    ("Heis mod 5", "not-homologically-balanced", 5),
    ("G(8,2,5)", "not-homologically-balanced", 2),
    ("Gamma_4", "balanced-consistent", None),
    ("Omega", "balanced-consistent", None),
    ("Z^2 x Z/2", "not-homologically-balanced", 2),
])
def test_check_not_balanced(name, verdict, witness):
    entry = next(e for e in catalog() if e.name == name)
    rep, ok = check_not_balanced(entry)
    assert ok
    assert (rep.verdict, rep.witness) == (verdict, witness)


def test_verify_catalog():
    rep = verify_catalog()
    assert rep.ok, rep.summary()
    assert rep.stats["z2_balanced_families"] == ["Gamma", "Omega", "Z^2"]
    assert any("Z^3" in n for n in rep.notes)


def test_wang_identity_catalog():
    rep = wang_identity_catalog()
    assert rep.ok and len(rep.records) > 50


# -- small sweeps

def test_small_sweeps():
    assert verify_oracle(bound=12).ok
    rep = verify_cycboth(bound=16)
    assert rep.ok and rep.records
    rep = verify_theorem_h1(bound=16)
    assert rep.ok, rep.summary()
    assert rep.stats["balanced"] > 0


def test_partial3_parameters():
    params = partial3_parameters(16)
    assert (8, 1, 5) in params and (16, 16, 13) in params
    assert all(l % 4 == 1 and 1 < l < k and k % f == 0 for k, f, l in params)
    assert len(params) == 4 * 1 + 5 * 3
    assert verify_partial3(kmax=8).ok


# -- reports

def test_record_and_report():
    r = record("G", {"a": 1}, 2, 2, 3)
    assert r["verdict"] == "not-homologically-balanced" and r["witness"] == 2
    a = SweepReport("x", [record("A", {}, 2, 1, 1)], stats={"n": 1})
    b = SweepReport("x", [record("B", {}, 2, 1, 1)], stats={"n": 2})
    a.merge(b)
    assert a.stats["n"] == 3 and len(a.records) == 2 and a.ok


def _square_item(n):
    return SweepReport("sq", [{"n": n, "sq": n * n}])


def test_run_items_deterministic_across_jobs():
    items = [(n,) for n in range(10, 0, -1)]
    one = run_items(_square_item, items, "sq", jobs=1)
    two = run_items(_square_item, items, "sq", jobs=2)
    assert one.jsonl() == two.jsonl()
