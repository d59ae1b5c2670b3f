from collections import Counter

import numpy as np
import pytest

from nilbal import linalg
from nilbal.abelian import AbHom, FinAbGroup, unipotent_class_representatives
from nilbal.fingroup import (
    CosetLimitExceeded, FiniteGroup, GrpAutomorphism, SizeLimit, bar_homology, coset_enumerate,
    fixed_H2_dim, fixed_H2_homology_dim, integral_H2_bar,
)
from nilbal.presentation import parse
from oracles import abelian_h2_fp_dim, quaternion_times_cyclic, symmetric_group_table

Q8 = "< x, y | x^2 = y^2, y*x*y^-1 = x^-1 >"
D8 = "< r, s | r^4, s^2, s*r*s^-1*r >"


def enum(text, **params):
    return coset_enumerate(parse(text, params))


def _order_profile(table):
    n = len(table)
    prof = []
    for g in range(n):
        k, x = 1, g
        while x != 0:
            x = table[x][g]
            k += 1
        prof.append(k)
    return Counter(prof)


# -- coset enumeration

def test_metacyclic_orders():
    text = "< a, b | b^(p^(r+s+t)) = a^(p^(r+s)), b*a*b^-1 = a^(1+p^r) >"
    assert enum(text, p=3, r=1, s=0, t=0).order == 27
    assert enum(text, p=3, r=1, s=1, t=0).order == 243


def test_quaternion_times_cyclic_matches_table():
    G = enum("< x, y | x^6 = y^2, y*x*y^-1 = x^-5 >")
    table = quaternion_times_cyclic(3)
    assert G.order == len(table) == 24
    assert Counter(G.element_orders.tolist()) == _order_profile(table)
    G.validate()


def test_symmetric_group_matches_table():
    G = enum("< a, b | a^3, b^2, b*a*b^-1*a >")
    table = symmetric_group_table(3)
    assert G.order == 6
    assert Counter(G.element_orders.tolist()) == _order_profile(table)
    assert not G.is_abelian()


def test_cyclic_and_trivial():
    assert enum("< a | a^5 >").order == 5
    assert enum("< a, b | a, b >").order == 1


def test_infinite_group_hits_limit():
    with pytest.raises(CosetLimitExceeded):
        coset_enumerate(parse("< a | >"), max_cosets=500)


def test_from_table_round_trip():
    table = symmetric_group_table(3)
    G = FiniteGroup.from_table(table)
    assert G.order == 6
    assert (G.mult == np.array(table)).all()


# -- lower central series and nilpotency

def test_lower_central_series_examples():
    lcs = enum(Q8).lower_central_series()
    assert lcs.is_nilpotent and lcs.nilpotency_class == 2
    assert [len(t) for t in lcs.terms] == [8, 2, 1]
    s3 = enum("< a, b | a^3, b^2, b*a*b^-1*a >").lower_central_series()
    assert not s3.is_nilpotent
    assert [len(t) for t in s3.terms] == [6, 3]
    z6 = enum("< a | a^6 >").lower_central_series()
    assert z6.is_nilpotent and z6.nilpotency_class == 1


def test_sylow_product_check():
    assert enum("< x, y | x^6 = y^2, y*x*y^-1 = x^-5 >").sylow_product_check()
    assert not enum("< a, b | a^3, b^2, b*a*b^-1*a >").sylow_product_check()


# -- bar complex over F_p

@pytest.mark.parametrize("orders", [(2,), (6,), (2, 2), (2, 4), (3, 3), (2, 2, 2), (4, 4), (2, 8)])
def test_bar_homology_abelian_matches_kunneth(orders):
    A = FinAbGroup.from_orders(orders)
    G = FiniteGroup.from_abelian(A)
    for p in (2, 3):
        b0, b1, b2 = bar_homology(G, p).dims
        assert b0 == 1
        assert b1 == sum(1 for d in A.invariant_factors if d % p == 0)
        assert b2 == abelian_h2_fp_dim(A.invariant_factors, p)


def test_bar_homology_nonabelian():
    assert bar_homology(enum(Q8), 2).dims == (1, 2, 2)
    assert bar_homology(enum(D8), 2).dims == (1, 2, 3)
    s3 = enum("< a, b | a^3, b^2, b*a*b^-1*a >")
    assert bar_homology(s3, 2).dims == (1, 1, 1)
    assert bar_homology(s3, 3).dims == (1, 0, 0)


def test_bar_limit():
    with pytest.raises(SizeLimit):
        bar_homology(FiniteGroup.from_abelian(FinAbGroup.cyclic(64)), 2, limit=48)


@pytest.mark.parametrize("text, expected", [
    (Q8, ()),
    (D8, (2,)),
    ("< a, b | a^2, b^2, [a,b] >", (2,)),
    ("< a, b | a^2, b^4, [a,b] >", (2,)),
    ("< a, b | a^3, b^3, [a,b] >", (3,)),
    ("< a, b | a^3, b^2, b*a*b^-1*a >", ()),
    ("< a | a^6 >", ()),
])
def test_integral_h2(text, expected):
    assert integral_H2_bar(enum(text)) == FinAbGroup(0, expected)


def test_integral_h2_universal_coefficients():
    # dim H_2(G; F_p) = d_p(H_2(G; Z)) + d_p(H_1(G; Z))
    for text, h1 in [(Q8, (2, 2)), (D8, (2, 2)), ("< a, b | a^2, b^4, [a,b] >", (2, 4))]:
        G = enum(text)
        H2 = integral_H2_bar(G)
        for p in (2, 3):
            dp = sum(1 for d in H2.invariant_factors if d % p == 0)
            tor = sum(1 for d in h1 if d % p == 0)
            assert bar_homology(G, p).dims[2] == dp + tor


def test_integral_limit():
    with pytest.raises(SizeLimit):
        integral_H2_bar(FiniteGroup.from_abelian(FinAbGroup.cyclic(32)), limit=24)


# -- automorphisms and induced maps

def _aut_from_matrix(A, m):
    G = FiniteGroup.from_abelian(A)
    return G, GrpAutomorphism.from_abhom(G, AbHom(A, A, m))


def test_automorphism_validation():
    G = FiniteGroup.from_abelian(FinAbGroup.cyclic(4))
    with pytest.raises(ValueError):
        GrpAutomorphism(G, [0, 2, 1, 3])
    inv = GrpAutomorphism(G, [0, 3, 2, 1])
    assert inv.compose(inv).image.tolist() == [0, 1, 2, 3]
    assert not inv.is_inner()


def test_inner_automorphism_of_q8():
    G = enum(Q8)
    x, y = G.generator_elements
    conj = GrpAutomorphism(G, [G.mul(G.mul(y, g), G.inv(y)) for g in range(G.order)])
    assert conj.is_inner()
    via_gens = GrpAutomorphism.from_generator_images(G, [conj(x), conj(y)])
    assert (via_gens.image == conj.image).all()


def test_fixed_h2_dims_examples():
    A = FinAbGroup.from_orders([2, 2])
    G, swap = _aut_from_matrix(A, [[0, 1], [1, 0]])
    # fixed classes: the product class and the sum of the two squares
    assert fixed_H2_dim(G, [swap], 2) == 2
    A = FinAbGroup.from_orders([3, 3])
    G, sh = _aut_from_matrix(A, [[1, 1], [0, 1]])
    assert fixed_H2_dim(G, [sh], 3) == 2


@pytest.mark.parametrize("orders, p", [((2, 2), 2), ((2, 4), 2), ((3, 3), 3), ((2, 2, 2), 2)])
def test_unipotent_automorphisms_act_unipotently_on_h2(orders, p):
    A = FinAbGroup.from_orders(orders)
    G = FiniteGroup.from_abelian(A)
    bh = bar_homology(G, p)
    d = bh.dims[2]
    for f in unipotent_class_representatives(A):
        M = bh.h2_induced(GrpAutomorphism.from_abhom(G, f))
        N = (M - np.eye(d, dtype=np.int64)) % p
        assert linalg.nilpotency_index_mod_p(N, p) is not None
        # kernel and cokernel of M - 1 have equal dimension, in both dualities
        assert fixed_H2_dim(G, [GrpAutomorphism.from_abhom(G, f)], p) == \
            fixed_H2_homology_dim(G, [GrpAutomorphism.from_abhom(G, f)], p)
        # on H_1 the induced map is similar to the action on A/pA
        H1 = np.asarray(bh.h1_induced(GrpAutomorphism.from_abhom(G, f))) % p
        F = f.mod_p_matrix(p)
        n = F.shape[0]
        for k in range(1, n + 1):
            a = np.linalg.matrix_power(H1 - np.eye(n, dtype=np.int64), k) % p
            b = np.linalg.matrix_power(F - np.eye(n, dtype=np.int64), k) % p
            assert linalg.rank_mod_p(a, p) == linalg.rank_mod_p(b, p)
