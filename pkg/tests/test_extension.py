import random

import numpy as np
import pytest

from nilbal.abelian import FinAbGroup
from nilbal.classify import (
    catalog, free_abelian_tower, gamma_tower, heisenberg_tower, omega_tower, semidirect_tower,
)
from nilbal.extension import (
    InvalidTower, NonCommuting, NotUnipotentMap, ParameterInvalid, PcTower, betti, euler_dims,
    fox_lyndon_check, gkfl_presentation, gkfl_tower, integral_homology, random_commuting_unipotents,
    resolution_betti, subtower_homology, wang_identity_check, wang_resolution,
)
from nilbal.abelian import abelianize
from oracles import mat_mul, mat_pow


def unitriangular(t, a, b, c, mod=None):
    """x = I + a E12, y = I + b E23, z = I + c E13; monomial is x^e2 y^e1 z^e0."""
    X = [[1, a, 0], [0, 1, 0], [0, 0, 1]]
    Y = [[1, 0, 0], [0, 1, b], [0, 0, 1]]
    Z = [[1, 0, c], [0, 1, 0], [0, 0, 1]]

    def ev(m):
        M = mat_mul(mat_mul(mat_pow(X, m[2]), mat_pow(Y, m[1])), mat_pow(Z, m[0]))
        return [[v % mod for v in row] for row in M] if mod else M
    return ev


def affine(m, n):
    """a -> (u -> u + 1), t -> (u -> n u) on Z/m, with the t-exponent tracked."""
    def ev(mono):
        c, e = mono
        # a^c first, then t^e: u -> n^e (u + c)
        return (e, pow(n, e, m) if e >= 0 else pow(pow(n, -1, m), -e, m), (pow(n, e, m) if e >= 0
                else pow(pow(n, -1, m), -e, m)) * c % m)

    def compose(f, g):
        # (f g)(u) = f(g(u)); maps are (t-exp, scale, shift)
        return (f[0] + g[0], f[1] * g[1] % m, (f[1] * g[2] + f[2]) % m)
    return ev, compose


# -- arithmetic

def test_collect_examples():
    t = gkfl_tower(8, 1, 5)
    assert t.monomial("z*x") == (7, 0, 1)
    assert t.monomial("z*y") == (5, 1, 0)
    assert t.render(t.monomial("z*x")) == "x*z^7"
    assert t.monomial("z^8") == t.identity()


@pytest.mark.parametrize("q", [1, 2, 5])
def test_gamma_matches_unitriangular_matrices(q):
    t = gamma_tower(q)
    ev = unitriangular(t, q, 1, 1)
    rng = random.Random(q)
    for _ in range(300):
        a, b = t.random_element(rng), t.random_element(rng)
        assert ev(t.mul(a, b)) == mat_mul(ev(a), ev(b))
        assert ev(t.inverse(a)) == mat_pow(ev(a), -1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_heisenberg_matches_matrices_mod_p(p):
    t = heisenberg_tower(p)
    ev = unitriangular(t, 1, 1, 1, mod=p)
    rng = random.Random(p)
    for _ in range(300):
        a, b = t.random_element(rng), t.random_element(rng)
        prod = [[v % p for v in row] for row in mat_mul(ev(a), ev(b))]
        assert ev(t.mul(a, b)) == prod


@pytest.mark.parametrize("m, n", [(9, 4), (8, 5), (4, -1), (3, 2), (7, 3)])
def test_semidirect_matches_affine_maps(m, n):
    t = semidirect_tower(m, n)
    ev, compose = affine(m, n)
    rng = random.Random(m * 100 + n)
    for _ in range(300):
        a, b = t.random_element(rng, 6), t.random_element(rng, 6)
        assert ev(t.mul(a, b)) == compose(ev(a), ev(b))


TOWERS = [free_abelian_tower(3), gamma_tower(3), heisenberg_tower(3), omega_tower(),
          semidirect_tower(9, 4), gkfl_tower(8, 2, 5), gkfl_tower(16, 1, 5)]


@pytest.mark.parametrize("t", TOWERS, ids=lambda t: t.name)
def test_associativity_random_triples(t):
    rng = random.Random(7)
    e = t.identity()
    for _ in range(10 ** 4):
        a, b, c = (t.random_element(rng) for _ in range(3))
        assert t.mul(t.mul(a, b), c) == t.mul(a, t.mul(b, c))
    for _ in range(200):
        a = t.random_element(rng)
        assert t.mul(a, t.inverse(a)) == e
        assert t.power(a, 3) == t.mul(a, t.mul(a, a))


def test_invalid_towers():
    with pytest.raises(InvalidTower):
        PcTower.from_spec(0, [("y", {"w": "z"})])
    with pytest.raises(InvalidTower):
        PcTower(-1, [])
    with pytest.raises(InvalidTower):
        # z -> z^2 is not an automorphism of Z
        PcTower.from_spec(0, [("y", {"z": "z^2"})])


def test_tower_presentation_abelianization():
    for t in TOWERS:
        A, _, _ = t.abelianization()
        assert abelianize(t.presentation()) == A


# -- resolutions and Betti numbers

def test_resolution_ranks():
    assert wang_resolution(free_abelian_tower(1)).ranks[:3] == [1, 1, 0]
    assert wang_resolution(free_abelian_tower(2)).ranks == [1, 2, 1, 0]
    assert wang_resolution(free_abelian_tower(3)).ranks == [1, 3, 3, 1]
    assert wang_resolution(semidirect_tower(4, -1)).ranks == [1, 2, 2, 2]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_heisenberg_betti(p):
    r = betti(heisenberg_tower(p))
    assert r.beta[0] == (2, 1)
    assert r.beta[p] == (2, 3)
    assert r.verdict == "not-homologically-balanced" and r.witness == p
    assert r.integral_H1 == FinAbGroup(2, ())
    assert r.integral_H2 == FinAbGroup(1, (p, p))


def test_betti_universal_coefficients():
    # beta_2(F_p) = rank H_2 + d_p(tors H_2) + d_p(tors H_1)
    for t in TOWERS:
        r = betti(t)
        H1, H2 = r.integral_H1, r.integral_H2
        for p, (b1, b2) in r.beta.items():
            if p == 0:
                assert (b1, b2) == (H1.free_rank, H2.free_rank)
                continue
            dp = lambda A: sum(1 for d in A.invariant_factors if d % p == 0)
            assert b1 == H1.free_rank + dp(H1)
            assert b2 == H2.free_rank + dp(H2) + dp(H1)


def test_balanced_examples():
    for q in (1, 2, 7):
        r = betti(gamma_tower(q))
        assert r.verdict == "balanced-consistent"
        assert (r.beta1_Q, r.beta2_Q) == (2, 2)
    r = betti(semidirect_tower(4, -1))
    assert r.beta[2] == (2, 2) and r.integral_H2 == FinAbGroup(0, (2,))


def test_integral_homology_of_z3():
    H1, H2 = integral_homology(wang_resolution(free_abelian_tower(3)))
    assert H1 == FinAbGroup(3, ()) and H2 == FinAbGroup(3, ())


# -- Wang identity

def test_wang_identity_check_examples():
    w = wang_identity_check((2, 1), ([[1, 1], [0, 1]], [[1]]), 2)
    assert (w.beta1, w.beta2) == (2, 2)
    assert w.h2_cyclic is True
    w = wang_identity_check((0, 0), ([], []), 3)
    assert (w.beta1, w.beta2) == (1, 0)
    with pytest.raises(NotUnipotentMap):
        wang_identity_check((1, 0), ([[2]], []), 3)
    w = wang_identity_check((1, 0), ([[2]], []), 3, require_unipotent=False)
    assert not w.unipotent and (w.beta1, w.beta2) == (1, 0)


@pytest.mark.parametrize("t", TOWERS, ids=lambda t: t.name)
def test_wang_identity_matches_resolution(t):
    res = wang_resolution(t)
    for p in (2, 3, 5):
        dims, maps = subtower_homology(res, p)
        w = wang_identity_check(dims, maps, p, require_unipotent=False)
        b1, b2 = resolution_betti(res, p)
        assert (w.beta1, w.beta2) == (b1, b2)
        assert b2 - b1 + 1 == w.coker2


# -- modules over Z^2

def test_euler_dims_examples():
    I = np.eye(3, dtype=np.int64)
    assert euler_dims(2, 3, I, I) == euler_dims(2, 3, I, I)
    d = euler_dims(2, 3, I, I)
    assert (d.b0, d.b1, d.b2) == (3, 6, 3) and d.duality_holds
    X = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]
    Y = [[1, 0, 1], [0, 1, 0], [0, 0, 1]]
    d = euler_dims(2, 3, X, Y)
    assert (d.b0, d.b1, d.b2) == (2, 3, 1)
    assert d.euler_characteristic == 0 and not d.duality_holds


def test_euler_dims_non_commuting():
    with pytest.raises(NonCommuting):
        euler_dims(2, 2, [[1, 1], [0, 1]], [[1, 0], [1, 1]])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_random_commuting_unipotents(p):
    rng = random.Random(p)
    for _ in range(50):
        n = rng.randint(1, 6)
        X, Y = random_commuting_unipotents(p, n, rng)
        assert ((X @ Y - Y @ X) % p == 0).all()
        I = np.eye(n, dtype=np.int64)
        for M in (X, Y):
            assert (np.linalg.matrix_power((M - I) % p, n) % p == 0).all()
        assert euler_dims(p, n, X, Y).euler_characteristic == 0


# -- the three-generator family

@pytest.mark.parametrize("k, f, l", [(8, 1, 5), (8, 2, 5), (8, 8, 5), (16, 1, 13), (16, 4, 9)])
def test_fox_lyndon_examples(k, f, l):
    rec = fox_lyndon_check(k, f, l)
    assert rec.ok, rec.checks
    assert rec.beta1 == (2 if f == 1 else 3)
    assert rec.kernel_dim == rec.beta1 + 1
    b1, b2 = betti(gkfl_tower(k, f, l), primes=[2]).beta[2]
    assert (b1, b2) == (rec.beta1, rec.beta1 + 1)


@pytest.mark.parametrize("k, f, l", [(8, 1, 3), (12, 1, 5), (8, 3, 5), (8, 1, 9)])
def test_fox_lyndon_rejects_bad_parameters(k, f, l):
    with pytest.raises(ParameterInvalid):
        fox_lyndon_check(k, f, l)


def test_gkfl_tower_matches_presentation():
    for k, f, l in [(8, 2, 5), (16, 1, 13)]:
        assert abelianize(gkfl_presentation(k, f, l)) == gkfl_tower(k, f, l).abelianization()[0]


# -- nilpotency propagation

def test_nilpotency_of_catalog_towers():
    for entry in catalog():
        if entry.tower is not None:
            assert entry.tower.is_nilpotent() == (entry.name != "Z/3 x|_2 Z"), entry.name
    assert not semidirect_tower(3, 2).is_nilpotent()
    assert semidirect_tower(8, 5).is_nilpotent()
