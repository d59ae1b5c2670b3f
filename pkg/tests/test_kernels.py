import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilbal import _pure, kernels
from nilbal.presentation import parse
from oracles import rank_mod_p_bruteforce

compiled = pytest.importorskip("nilbal._kernels")

PRESENTATIONS = [
    "< a, b | b^9 = a^3, b*a*b^-1 = a^4 >",
    "< x, y | x^6 = y^2, y*x*y^-1 = x^-5 >",
    "< a, b | a^3, b^2, b*a*b^-1*a >",
    "< a, b | a^8, b^4, [a,b] >",
    "< x, y | x^4 = y^4, y*x*y^-1 = x^5 >",
    "< a | a^7 >",
]


def _rels(pres):
    return [[2 * g + (0 if s > 0 else 1) for g, s in r.syllables()] for r in pres.relators]


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "pure")


@pytest.mark.parametrize("text", PRESENTATIONS)
def test_coset_tables_agree(text):
    pres = parse(text)
    a = compiled.coset_enumerate(pres.ngens, _rels(pres), 100000)
    b = _pure.coset_enumerate(pres.ngens, _rels(pres), 100000)
    assert a.shape == b.shape
    assert (a == b).all()


def test_both_backends_raise_on_limit():
    pres = parse("< a, b | [a,b] >")
    for impl in (compiled, _pure):
        with pytest.raises(kernels.CosetLimitExceeded):
            impl.coset_enumerate(2, _rels(pres), 300)


def _csr(m):
    indptr, indices, data = [0], [], []
    for row in m:
        for j, v in enumerate(row):
            if v:
                indices.append(j)
                data.append(v)
        indptr.append(len(indices))
    return (np.array(indptr, dtype=np.int64), np.array(indices, dtype=np.int64),
            np.array(data, dtype=np.int64))


@st.composite
def sparse_mats(draw):
    p = draw(st.sampled_from([2, 3, 5, 7]))
    rows = draw(st.integers(1, 7))
    cols = draw(st.integers(1, 5))
    m = [[draw(st.integers(-3, 3)) if draw(st.booleans()) else 0 for _ in range(cols)]
         for _ in range(rows)]
    return m, p


@given(sparse_mats())
def test_rref_agrees_with_oracle(mp):
    m, p = mp
    cols = len(m[0])
    Ra, pa = compiled.rref_sparse_mod_p(*_csr(m), cols, p)
    Rb, pb = _pure.rref_sparse_mod_p(*_csr(m), cols, p, block=2)
    assert list(pa) == list(pb)
    assert (np.asarray(Ra)[:len(pa)] % p == np.asarray(Rb) % p).all()
    assert len(pa) == rank_mod_p_bruteforce([[x % p for x in row] for row in m], p)
