import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilbal.abelian import abelianize, cokernel
from nilbal.classify import catalog
from nilbal.presentation import (
    FreeRingElement, ParseError, Presentation, Word, balance_accounting, commutator,
    epsilon_p_jacobian, fox_derivative, parse, parse_integer, parse_word,
)
from oracles import rank_mod_p_bruteforce

NGENS = 3
letters = st.lists(st.tuples(st.integers(0, NGENS - 1), st.sampled_from([-2, -1, 1, 2])),
                   max_size=8)
words = letters.map(Word)


def x(i, e=1):
    return Word.gen(i, e)


# -- words and parsing

def test_word_reduction_and_inverse():
    w = Word([(0, 2), (0, -2), (1, 1)])
    assert w == x(1)
    u = x(0) * x(1, 3) * x(2, -1)
    assert (u * u.inverse()) == Word()
    assert len(u) == 5
    assert u.exponent_sum(1) == 3


def test_parse_basic_presentation():
    p = parse("group s3 = < a, b | a^3, b^2, b*a*b^-1*a >")
    assert p.name == "s3"
    assert p.generator_names == ("a", "b")
    assert p.relators[0] == x(0, 3)
    assert p.relators[2] == x(1) * x(0) * x(1, -1) * x(0)


def test_parse_relations_and_commutators():
    p = parse("< x, y | [x, y] = y^2, x = y = 1 >")
    assert p.relators[0] == commutator(x(0), x(1)) * x(1, -2)
    assert p.relators[1] == x(0) * x(1, -1)
    assert p.relators[2] == x(1)


def test_parse_parameters_and_arithmetic():
    p = parse("< a, b | b^(p^(r+s)) = a^(1+p^r) >", {"p": 3, "r": 1, "s": 1})
    assert p.relators[0] == x(1, 9) * x(0, -4)
    assert parse_integer("2*k*a - 1", {"k": 2, "a": 3}) == 11


def test_parse_word_over_names():
    w = parse_word("x y^-1 [x,y]", ["x", "y"])
    assert w == x(0) * x(1, -1) * commutator(x(0), x(1))
    assert parse_word("", ["x"]) == Word()


@pytest.mark.parametrize("text, fragment, line", [
    ("< x | y >", "unknown generator", 1),
    ("< | x >", "empty generator list", 1),
    ("< x, x | x >", "duplicate generator", 1),
    ("< x | x^n >", "unbound parameter", 1),
    ("< x |\n x^2, \n x^(3/2) >", "inexact division", 3),
    ("< x | x^2 > extra", "trailing input", 1),
])
def test_parse_errors_report_position(text, fragment, line):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert fragment in str(err.value)
    assert err.value.line == line
    assert err.value.col >= 1


@given(words)
def test_render_round_trip(w):
    names = ["a", "b", "c"]
    assert parse_word(w.render(names), names) == w


# -- Fox calculus

def _word_elem(w):
    return FreeRingElement.word(w)


def test_fox_examples():
    a, b = x(0), x(1)
    one = Word()
    assert fox_derivative(a * a * a, 0) == FreeRingElement({one: 1, a: 1, a * a: 1})
    assert fox_derivative(a.inverse(), 0) == FreeRingElement({a.inverse(): -1})
    c = commutator(a, b)
    assert fox_derivative(c, 0) == FreeRingElement({one: 1, a * b * a.inverse(): -1})
    assert fox_derivative(c, 1) == FreeRingElement({a: 1, c: -1})


@given(words, words, st.integers(0, NGENS - 1))
def test_fox_product_rule(u, v, j):
    lhs = fox_derivative(u * v, j)
    rhs = fox_derivative(u, j) + fox_derivative(v, j).left_mul(u)
    assert lhs == rhs


@given(words)
def test_fox_fundamental_formula(w):
    # w - 1 = sum_j (d w / d x_j)(x_j - 1)
    total = FreeRingElement()
    for j in range(NGENS):
        total = total + fox_derivative(w, j) * (_word_elem(x(j)) - _word_elem(Word()))
    assert total == _word_elem(w) - _word_elem(Word())


@given(words, st.integers(0, NGENS - 1))
def test_fox_augmentation_is_exponent_sum(w, j):
    assert fox_derivative(w, j).augmentation() == w.exponent_sum(j)


# -- accounting and the augmented Jacobian

def test_balance_accounting():
    acc = balance_accounting(parse("< x, y | [x,[x,y]], [y,[x,y]], [x,y]^3 >"))
    assert (acc.generators, acc.relators, acc.deficiency, acc.balanced) == (2, 3, -1, False)
    assert balance_accounting(parse("< a, t | a^4, t*a*t^-1*a >")).balanced


def partial3(k, f, l):
    return parse("< x, y, z | z^f*y*x*y^-1*x^-1, z^k, z*x*z*x^-1, z^l*y*z^-1*y^-1 >",
                 {"k": k, "f": f, "l": l})


def test_epsilon_jacobian_partial3_vanishes_mod_2():
    m = epsilon_p_jacobian(partial3(8, 2, 5), 2)
    assert m.shape == (4, 3)
    assert not m.any()
    # 3 generators, rank 0: the kernel of the row space is 4-dimensional
    assert 4 - rank_mod_p_bruteforce(m.T.tolist(), 2) == 4


def test_epsilon_jacobian_partial3_f1_single_entry():
    m = epsilon_p_jacobian(partial3(8, 1, 5), 2)
    assert int(np.count_nonzero(m)) == 1
    assert m[0, 2] == 1


def test_epsilon_jacobian_cyclic():
    m = epsilon_p_jacobian(parse("< a | a^6 >"), 3)
    assert m.tolist() == [[0]]
    assert epsilon_p_jacobian(parse("< a | a^6 >"), 0).tolist() == [[6]]


@pytest.mark.parametrize("p", [0, 2, 3, 5, 7, 11, 13])
def test_epsilon_cokernel_matches_abelianization(p):
    for entry in catalog():
        pres = entry.presentation
        A = abelianize(pres)
        m = epsilon_p_jacobian(pres, p)
        if p == 0:
            assert cokernel(m.tolist(), pres.ngens) == A
            continue
        assert p ** pres.ngens <= 5000
        rank = rank_mod_p_bruteforce(m.tolist(), p)
        dim = A.free_rank + sum(1 for d in A.invariant_factors if d % p == 0)
        assert pres.ngens - rank == dim, entry.name


def test_presentation_rejects_bad_generator_index():
    with pytest.raises(ValueError):
        Presentation(("a",), (x(1),))
