import itertools
import random

import pytest
from hypothesis import given, strategies as st

from nilbal import linalg
from nilbal.abelian import (
    AbHom, FinAbGroup, NotAutomorphism, NotUnipotent, abelianize, automorphisms_bruteforce,
    finite_abelian_groups, fixed_subgroup_mod_p, functor_dims, is_unipotent,
    unipotent_automorphisms_bruteforce, unipotent_class_representatives, unipotent_filtration,
)
from nilbal.presentation import parse
from oracles import det, determinantal_invariant_factors, mat_mul

small_ints = st.integers(-9, 9)


@st.composite
def int_matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [[draw(small_ints) for _ in range(c)] for _ in range(r)]


# -- Smith normal form

def test_snf_example():
    U, D, V = linalg.smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert [D[i][i] for i in range(3)] == [2, 6, 12]


@given(int_matrices())
def test_snf_against_minors(m):
    U, D, V = linalg.smith_normal_form(m)
    assert mat_mul(mat_mul(U, m), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert nonzero == determinantal_invariant_factors(m)


@pytest.mark.parametrize("n", [6, 8])
def test_snf_against_minors_larger(n):
    rng = random.Random(n)
    for _ in range(3):
        m = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n - 1)]
        nonzero = [d for d in linalg.smith_diagonal(m)]
        assert nonzero == determinantal_invariant_factors(m)


# -- groups and abelianization

def test_from_orders_normalizes():
    A = FinAbGroup.from_orders([2, 3, 4, 0])
    assert A.free_rank == 1
    assert A.invariant_factors == (2, 12)
    assert A.order is None
    assert FinAbGroup.from_orders([6, 10]).invariant_factors == (2, 30)


@pytest.mark.parametrize("text, expected", [
    ("< a, b | b^9 = a^3, b*a*b^-1 = a^4 >", FinAbGroup(0, (3, 9))),
    ("< x, y | [x,[x,y]], [y,[x,y]], [x,y]^5 >", FinAbGroup(2, ())),
    ("< x, y, z | [x,y] = z^4, [x,z], [y,z] >", FinAbGroup(2, (4,))),
    ("< a, t | a^4, t*a*t^-1*a >", FinAbGroup(1, (2,))),
    ("< a, b | a^3, b^2, b*a*b^-1*a >", FinAbGroup(0, (2,))),
])
def test_abelianize_examples(text, expected):
    assert abelianize(parse(text)) == expected


def test_functor_dims():
    A = FinAbGroup(1, (2, 4, 12))
    d = functor_dims(A, 2)
    assert (d.tensor, d.tor, d.hom, d.ext) == (4, 3, 4, 3)
    d = functor_dims(A, 3)
    assert (d.tensor, d.tor, d.hom, d.ext) == (2, 1, 2, 1)
    d = functor_dims(A, 5)
    assert (d.tensor, d.tor) == (1, 0)


@pytest.mark.parametrize("orders", [(2, 2), (3, 9), (2, 4, 4), (5,), (0, 6)])
def test_tensor_equals_tor_on_torsion(orders):
    A = FinAbGroup.from_orders(orders)
    for p in (2, 3, 5):
        d = functor_dims(A, p)
        assert d.tensor - d.tor == A.free_rank


def test_finite_abelian_group_counts():
    # number of abelian groups of order n is a product of partition numbers
    counts = {}
    for A in finite_abelian_groups(32):
        counts[A.order] = counts.get(A.order, 0) + 1
    assert counts[16] == 5 and counts[32] == 7 and counts[12] == 2 and counts[1] == 1

    def partitions(n, largest=None):
        largest = n if largest is None else largest
        if n == 0:
            return 1
        return sum(partitions(n - k, k) for k in range(1, min(n, largest) + 1))

    for n in range(1, 33):
        expected, m, d = 1, n, 2
        while m > 1:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            expected *= partitions(e)
            d += 1
        assert counts[n] == expected


# -- automorphisms and unipotence

def test_is_unipotent_examples():
    Z4 = FinAbGroup.cyclic(4)
    assert is_unipotent(AbHom.identity(Z4)) == (True, 0)
    assert is_unipotent(AbHom(Z4, Z4, [[-1]])) == (True, 2)
    Z3 = FinAbGroup.cyclic(3)
    assert is_unipotent(AbHom(Z3, Z3, [[-1]]))[0] is False
    Z2 = FinAbGroup(2, ())
    assert is_unipotent(AbHom(Z2, Z2, [[1, 1], [0, 1]])) == (True, 2)
    Z9 = FinAbGroup.cyclic(9)
    assert is_unipotent(AbHom(Z9, Z9, [[4]])) == (True, 2)
    assert is_unipotent(AbHom(Z9, Z9, [[7]])) == (True, 2)


def test_not_automorphism_raises():
    Z4 = FinAbGroup.cyclic(4)
    with pytest.raises(NotAutomorphism):
        is_unipotent(AbHom(Z4, Z4, [[2]]))
    Z = FinAbGroup(1, ())
    with pytest.raises(NotAutomorphism):
        is_unipotent(AbHom(Z, Z, [[3]]))


def test_bad_homomorphism_rejected():
    Z2, Z4 = FinAbGroup.cyclic(2), FinAbGroup.cyclic(4)
    with pytest.raises(ValueError):
        AbHom(Z2, Z4, [[1]])
    assert AbHom(Z2, Z4, [[2]])((1,)) == (2,)


def _brute_unipotent_count(A):
    # count unipotents by iterating the map on every element
    n = 0
    elems = list(A.elements())
    for f in automorphisms_bruteforce(A):
        g = lambda v: tuple((a - b) % d for a, b, d in zip(f(v), v, A.invariant_factors))
        ok = True
        for v in elems:
            w = v
            for _ in range(len(elems)):
                w = g(w)
            if any(w):
                ok = False
                break
        n += ok
    return n


@pytest.mark.parametrize("orders", [(2, 2), (2, 4), (3, 3), (4,), (9,), (2, 6)])
def test_unipotent_count_matches_bruteforce(orders):
    A = FinAbGroup.from_orders(orders)
    assert len(list(unipotent_automorphisms_bruteforce(A))) == _brute_unipotent_count(A)


def _conjugacy_classes(A):
    autos = list(automorphisms_bruteforce(A))
    unis = [f for f in autos if is_unipotent(f)[0]]
    seen = set()
    classes = []
    for f in unis:
        key = tuple(map(tuple, f.matrix))
        if key in seen:
            continue
        cls = set()
        for g in autos:
            ginv = next(h for h in autos if h.compose(g) == AbHom.identity(A))
            cls.add(tuple(map(tuple, g.compose(f).compose(ginv).matrix)))
        seen |= cls
        classes.append(cls)
    return classes


@pytest.mark.parametrize("orders", [(2, 2), (2, 4), (3, 3), (2, 2, 2), (4, 4), (2, 6)])
def test_class_representatives_meet_every_class(orders):
    A = FinAbGroup.from_orders(orders)
    reps = unipotent_class_representatives(A)
    assert all(is_unipotent(f)[0] for f in reps)
    keys = {tuple(map(tuple, f.matrix)) for f in reps}
    for cls in _conjugacy_classes(A):
        assert cls & keys


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 3))
def test_commuting_unipotent_products(a, b, c):
    # upper unitriangular maps on Z/8 + Z/8 + Z/8 commute when they are powers
    A = FinAbGroup.from_orders([8, 8, 8])
    f = AbHom(A, A, [[1, a, c], [0, 1, b], [0, 0, 1]])
    g = f.power(3)
    assert f.compose(g) == g.compose(f)
    assert is_unipotent(f.compose(g))[0]


def test_filtration_mod_p():
    A = FinAbGroup(0, (2, 2, 2))
    f = AbHom(A, A, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    filt = unipotent_filtration(A, [f], 2)
    assert [F.shape[0] for F in filt] == [3, 2, 1]
    assert fixed_subgroup_mod_p(A, [f], 2).shape[0] == 1
    g = AbHom(A, A, [[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    with pytest.raises(NotUnipotent):
        # a transposition is unipotent mod 2, but composing with the cyclic
        # shift of order 3 is not
        h = AbHom(A, A, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
        unipotent_filtration(A, [g, h], 2)


def test_filtration_integral():
    A = FinAbGroup.cyclic(8)
    f = AbHom(A, A, [[3]])
    filt = unipotent_filtration(A, [f])
    assert len(filt) >= 2
