"""Second (co)homology of finitely generated abelian groups with F_p coefficients.

The cohomology model uses explicit 2-cocycles on the standard coordinates.
Let ``I`` be the coordinates that survive in ``A/pA`` (free ones and torsion
ones with ``p | d_i``).  The basis of ``H^2(A; F_p)`` is

* ``wedge(i, j)`` for ``i < j`` in ``I``: the bilinear cocycle ``x_i y_j``;
* ``ext(i)`` for torsion ``i`` in ``I``: the carry cocycle, 1 when
  ``x_i + y_i >= d_i`` (representatives in ``[0, d_i)``).

A class is read off by antisymmetrizing on pairs of basis vectors (the
wedge coordinates) and by summing ``c(k e_i, e_i)`` over ``k < d_i`` (the
ext coordinates).  Both readouts kill coboundaries and send the basis to the
standard basis, so together they identify ``H^2`` with ``F_p^N``; the matrix
of an automorphism is obtained by pulling the basis cocycles back and
reading them off again.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .abelian import (AbHom, FinAbGroup, NotUnipotent, functor_dims, is_unipotent,
                      mod_p_coordinates)


def _v2(n: int) -> int:
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


@dataclass(frozen=True)
class H2Decomposition:
    p: int
    wedge_dim: int
    tor_dim: int
    ext_dim: int
    regime: str
    # exponent-two regime only: dims of the canonical submodules
    # image of B* . A* under cup product, and image of the squaring map
    cup_image_dim: Optional[int] = None
    sq_image_dim: Optional[int] = None
    cup_injective: Optional[bool] = None

    @property
    def total(self) -> int:
        """dim H_2(A; F_p) = dim H^2(A; F_p)."""
        return self.wedge_dim + self.tor_dim


def exponent_two_coordinates(A: FinAbGroup) -> List[int]:
    r = A.free_rank
    return [r + i for i, d in enumerate(A.invariant_factors) if _v2(d) == 1]


def regime(A: FinAbGroup, p: int) -> str:
    if p != 2 or not exponent_two_coordinates(A):
        return "split"
    return "exponent-two"


def h2_split_dims(A: FinAbGroup, p: int) -> H2Decomposition:
    fd = functor_dims(A, p)
    n = fd.tensor
    wedge = comb(n, 2)
    reg = regime(A, p)
    if reg == "split":
        return H2Decomposition(p, wedge, fd.tor, fd.ext, reg)
    e = len(exponent_two_coordinates(A))
    return H2Decomposition(p, wedge, fd.tor, fd.ext, reg,
                           cup_image_dim=wedge - comb(e, 2),
                           sq_image_dim=e,
                           cup_injective=(e == n))


# ---------------------------------------------------------------------------
# explicit cocycle model


class CohomologyModel:
    """Explicit basis of H^2(A; F_p) and induced matrices of endomorphisms."""

    def __init__(self, A: FinAbGroup, p: int):
        self.A = A
        self.p = p
        self.coords = mod_p_coordinates(A, p)
        r = A.free_rank
        self.torsion_coords = [i for i in self.coords if i >= r]
        self.pairs = list(combinations(self.coords, 2))
        self.dim = len(self.pairs) + len(self.torsion_coords)
        self.orders = A.orders

    # basis cocycles as functions of two coordinate vectors
    def cocycle(self, k: int) -> Callable[[Sequence[int], Sequence[int]], int]:
        p = self.p
        if k < len(self.pairs):
            i, j = self.pairs[k]
            return lambda x, y: (x[i] * y[j]) % p
        i = self.torsion_coords[k - len(self.pairs)]
        d = self.orders[i]
        return lambda x, y: 1 if (x[i] % d) + (y[i] % d) >= d else 0

    def _unit(self, i: int, k: int = 1) -> List[int]:
        v = [0] * self.A.ngens
        v[i] = k
        return v

    def readout(self, c: Callable[[Sequence[int], Sequence[int]], int],
                f: Optional[AbHom] = None) -> List[int]:
        """Coordinates of the class of ``c o (f x f)`` (``f`` defaults to id)."""
        p = self.p
        ev = (lambda v: f(v)) if f is not None else (lambda v: self.A.reduce(v))
        out = []
        for i, j in self.pairs:
            ei, ej = ev(self._unit(i)), ev(self._unit(j))
            out.append((c(ei, ej) - c(ej, ei)) % p)
        for i in self.torsion_coords:
            d = self.orders[i]
            e = ev(self._unit(i))
            s = 0
            for k in range(d):
                s += c(ev(self._unit(i, k)), e)
            out.append(s % p)
        return out

    def induced(self, f: AbHom) -> np.ndarray:
        """Matrix of the pullback ``f^*`` on H^2 (column convention)."""
        cols = [self.readout(self.cocycle(k), f) for k in range(self.dim)]
        return np.array(cols, dtype=np.int64).T.reshape(self.dim, self.dim)

    # canonical submodules in the exponent-two regime
    def cup_product(self, a: Sequence[int], b: Sequence[int]) -> List[int]:
        """Class of the cup product of two functionals on A/pA (given on the
        surviving coordinates)."""
        idx = {c: t for t, c in enumerate(self.coords)}
        p = self.p

        def c(x, y):
            return (sum(a[idx[i]] * x[i] for i in self.coords)
                    * sum(b[idx[j]] * y[j] for j in self.coords)) % p
        return self.readout(c)

    def cup_image(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        vecs = [self.cup_product(a, b) for a in left for b in right]
        if not vecs:
            return np.zeros((0, self.dim), dtype=np.int64)
        R, _ = linalg.rref_mod_p(np.array(vecs), self.p)
        return R

    def square_image(self) -> np.ndarray:
        n = len(self.coords)
        eye = np.eye(n, dtype=np.int64)
        vecs = [self.cup_product(eye[t], eye[t]) for t in range(n)]
        if not vecs:
            return np.zeros((0, self.dim), dtype=np.int64)
        R, _ = linalg.rref_mod_p(np.array(vecs), self.p)
        return R

    def b_star(self) -> np.ndarray:
        """Functionals factoring through Z/4 (rows, on the surviving coordinates)."""
        rows = []
        for t, i in enumerate(self.coords):
            d = self.orders[i]
            if d == 0 or d % 4 == 0:
                v = np.zeros(len(self.coords), dtype=np.int64)
                v[t] = 1
                rows.append(v)
        return np.array(rows, dtype=np.int64).reshape(len(rows), len(self.coords))


def fixed_space_dim(mats: Sequence[np.ndarray], dim: int, p: int) -> int:
    if dim == 0:
        return 0
    if not mats:
        return dim
    stacked = np.concatenate([(np.asarray(M) - np.eye(dim, dtype=np.int64)) % p for M in mats])
    return dim - linalg.rank_mod_p(stacked, p)


def fixed_h2_dim_formula(A: FinAbGroup, autos: Sequence[AbHom], p: int) -> int:
    """dim H^2(A; F_p)^N for the group N generated by unipotent ``autos``."""
    for f in autos:
        if not is_unipotent(f)[0]:
            raise NotUnipotent("automorphism is not unipotent")
    model = CohomologyModel(A, p)
    return fixed_space_dim([model.induced(f) for f in autos], model.dim, p)


# ---------------------------------------------------------------------------
# homology in the split regime


def wedge_square(M: np.ndarray, p: int) -> np.ndarray:
    """Second exterior power of a matrix (column convention, pairs a < b)."""
    n = M.shape[0]
    pairs = list(combinations(range(n), 2))
    W = np.zeros((len(pairs), len(pairs)), dtype=np.int64)
    for col, (a, b) in enumerate(pairs):
        for row, (c, d) in enumerate(pairs):
            W[row, col] = M[c, a] * M[d, b] - M[d, a] * M[c, b]
    return W % p


def p_torsion_action(A: FinAbGroup, f: AbHom, p: int) -> np.ndarray:
    """Matrix of ``f`` restricted to Ker(p) on the basis ``(d_i/p) e_i``."""
    r = A.free_rank
    tc = [i for i, d in enumerate(A.invariant_factors) if d % p == 0]
    M = np.zeros((len(tc), len(tc)), dtype=np.int64)
    for col, i in enumerate(tc):
        v = [0] * A.ngens
        v[r + i] = A.invariant_factors[i] // p
        img = f(v)
        for row, j in enumerate(tc):
            q = A.invariant_factors[j] // p
            x = img[r + j]
            assert x % q == 0
            M[row, col] = (x // q) % p
    return M


def homology_split_action(A: FinAbGroup, f: AbHom, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """``(wedge part, Ker(p) part)`` of the action on H_2(A; F_p) in the split regime."""
    if regime(A, p) != "split":
        raise ValueError("no natural splitting in the exponent-two regime")
    return wedge_square(f.mod_p_matrix(p), p), p_torsion_action(A, f, p)


def homology_fixed_dim_split(A: FinAbGroup, autos: Sequence[AbHom], p: int) -> int:
    parts = [homology_split_action(A, f, p) for f in autos]
    d = h2_split_dims(A, p)
    return (fixed_space_dim([w for w, _ in parts], d.wedge_dim, p)
            + fixed_space_dim([t for _, t in parts], d.tor_dim, p))


def wedge_fixed_dim(A: FinAbGroup, autos: Sequence[AbHom], p: int) -> int:
    """Kernel dimension of (wedge action - I) on (A/pA) ^ (A/pA)."""
    d = comb(len(mod_p_coordinates(A, p)), 2)
    return fixed_space_dim([wedge_square(f.mod_p_matrix(p), p) for f in autos], d, p)
