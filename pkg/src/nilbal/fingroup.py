"""Explicit finite groups and a bar-complex (co)homology oracle.

Elements are indices ``0 .. order-1`` with the identity at 0.  A group
stores, for each generator, the permutation of element indices given by
right multiplication; products of arbitrary elements go through a lazily
built multiplication table when the order is small, and through composed
permutations otherwise.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels, linalg
from .abelian import AbHom, FinAbGroup, prime_factors
from .kernels import CosetLimitExceeded
from .presentation import Presentation

DEFAULT_MAX_COSETS = 10 ** 6
BAR_LIMIT = 48
INTEGRAL_BAR_LIMIT = 24
TABLE_LIMIT = 4096


class SizeLimit(ValueError):
    pass


class FiniteGroup:
    """A finite group given by right-regular generator permutations."""

    def __init__(self, gen_perms: Sequence[Sequence[int]], name: str = "",
                 gen_names: Optional[Sequence[str]] = None):
        perms = np.array(gen_perms, dtype=np.int64)
        if perms.ndim != 2:
            perms = perms.reshape(len(gen_perms), -1)
        self.gen_perms = perms
        self.order = int(perms.shape[1]) if perms.size else 1
        self.name = name
        self.gen_names = list(gen_names) if gen_names else ["g%d" % i for i in range(len(perms))]
        self._perm_cache: Dict[int, np.ndarray] = {}
        self._bar: Dict[int, "BarHomology"] = {}
        for g in range(len(perms)):
            if sorted(perms[g].tolist()) != list(range(self.order)):
                raise ValueError("generator %d does not act as a permutation" % g)

    # -- constructors
    @classmethod
    def from_coset_table(cls, table: np.ndarray, pres: Optional[Presentation] = None) -> "FiniteGroup":
        ngens = table.shape[1] // 2
        G = cls([table[:, 2 * g] for g in range(ngens)],
                name=pres.name if pres else "",
                gen_names=pres.generator_names if pres else None)
        return G

    @classmethod
    def from_table(cls, mult: Sequence[Sequence[int]], generators: Optional[Sequence[int]] = None,
                   name: str = "") -> "FiniteGroup":
        """Group from a full multiplication table with identity at index 0."""
        M = np.array(mult, dtype=np.int64)
        n = M.shape[0]
        if generators is None:
            generators = _greedy_generators(M)
        G = cls([M[:, g] for g in generators], name=name)
        G.__dict__["mult"] = M
        G.validate()
        return G

    @classmethod
    def from_abelian(cls, A: FinAbGroup) -> "FiniteGroup":
        """Elements in mixed radix over the invariant factors."""
        if A.free_rank:
            raise ValueError("infinite group")
        dims = list(A.invariant_factors)
        n = A.torsion_order
        idx = np.arange(n)
        coords = np.array(np.unravel_index(idx, dims)) if dims else np.zeros((0, 1), dtype=np.int64)
        perms = []
        for g in range(len(dims)):
            c = coords.copy()
            c[g] = (c[g] + 1) % dims[g]
            perms.append(np.ravel_multi_index(tuple(c), dims))
        G = cls(perms if perms else np.zeros((0, 1), dtype=np.int64), name=str(A))
        G.abelian_invariants = tuple(dims)
        return G

    @property
    def ngens(self) -> int:
        return len(self.gen_perms)

    @property
    def generator_elements(self) -> List[int]:
        return [int(p[0]) for p in self.gen_perms]

    # -- words and multiplication
    @cached_property
    def _tree(self) -> Tuple[np.ndarray, np.ndarray]:
        """Spanning tree: parent element and generator column (2g or 2g+1)."""
        n = self.order
        parent = np.full(n, -1, dtype=np.int64)
        col = np.full(n, -1, dtype=np.int64)
        parent[0] = 0
        inv = self.inverse_gen_perms
        cols = []
        for g in range(self.ngens):
            cols += [(2 * g, self.gen_perms[g]), (2 * g + 1, inv[g])]
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        order = [frontier]
        while frontier.size:
            level = []
            for c, perm in cols:
                y = perm[frontier]
                fresh = ~seen[y]
                if not fresh.any():
                    continue
                y, first = np.unique(y[fresh], return_index=True)
                src = frontier[fresh][first]
                keep = np.argsort(first, kind="stable")
                y, src = y[keep], src[keep]
                seen[y] = True
                parent[y] = src
                col[y] = c
                level.append(y)
            frontier = np.concatenate(level) if level else np.zeros(0, dtype=np.int64)
            order.append(frontier)
        order = np.concatenate(order)
        if len(order) != n:
            raise ValueError("generators do not generate the group")
        self._bfs_order = np.array(order, dtype=np.int64)
        return parent, col

    @cached_property
    def inverse_gen_perms(self) -> np.ndarray:
        out = np.empty_like(self.gen_perms)
        for g in range(self.ngens):
            out[g][self.gen_perms[g]] = np.arange(self.order)
        return out

    def _col_perm(self, c: int) -> np.ndarray:
        return self.gen_perms[c // 2] if c % 2 == 0 else self.inverse_gen_perms[c // 2]

    @cached_property
    def mult(self) -> np.ndarray:
        """Full multiplication table ``mult[x, y] = x*y`` (small groups only)."""
        n = self.order
        if n > TABLE_LIMIT:
            raise SizeLimit("multiplication table limited to order %d" % TABLE_LIMIT)
        parent, col = self._tree
        M = np.empty((n, n), dtype=np.int64)
        M[:, 0] = np.arange(n)
        for y in self._bfs_order[1:]:
            M[:, y] = self._col_perm(int(col[y]))[M[:, parent[y]]]
        return M

    def right_perm(self, y: int) -> np.ndarray:
        """The permutation ``x -> x*y``."""
        if "mult" in self.__dict__:
            return self.mult[:, y]
        got = self._perm_cache.get(y)
        if got is not None:
            return got
        parent, col = self._tree
        chain = []
        x = y
        while x != 0 and x not in self._perm_cache:
            chain.append(x)
            x = int(parent[x])
        P = self._perm_cache[x] if x else np.arange(self.order)
        for z in reversed(chain):
            P = self._col_perm(int(col[z]))[P]
        if len(self._perm_cache) > 4096:
            self._perm_cache.clear()
        self._perm_cache[y] = P
        return P

    def mul(self, x: int, y: int) -> int:
        return int(self.right_perm(y)[x])

    def inv(self, x: int) -> int:
        return int(np.nonzero(self.right_perm(x) == 0)[0][0])

    @cached_property
    def inverse_table(self) -> np.ndarray:
        M = self.mult
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(M == 0)
        inv[rows] = cols
        return inv

    def word_of(self, x: int) -> List[Tuple[int, int]]:
        """A word (generator, +-1 letters) evaluating to element ``x``."""
        parent, col = self._tree
        out = []
        while x != 0:
            c = int(col[x])
            out.append((c // 2, -1 if c % 2 else 1))
            x = int(parent[x])
        return out[::-1]

    def commutator(self, x: int, y: int) -> int:
        """``x y x^-1 y^-1``."""
        return self.mul(self.mul(self.mul(x, y), self.inv(x)), self.inv(y))

    def validate(self, samples: int = 20000, seed: int = 0):
        M = self.mult
        n = self.order
        if not (M[0] == np.arange(n)).all() or not (M[:, 0] == np.arange(n)).all():
            raise ValueError("index 0 is not the identity")
        srt = np.arange(n)
        if not (np.sort(M, axis=1) == srt).all() or not (np.sort(M, axis=0) == srt[:, None]).all():
            raise ValueError("multiplication table is not a Latin square")
        if n <= 64:
            lhs = M[M[:, :, None], np.arange(n)[None, None, :]]  # (xy)z
            rhs = M[np.arange(n)[:, None, None], M[None, :, :]]  # x(yz)
            if not (lhs == rhs).all():
                raise ValueError("multiplication is not associative")
        else:
            rng = np.random.default_rng(seed)
            x, y, z = rng.integers(0, n, (3, samples))
            if not (M[M[x, y], z] == M[x, M[y, z]]).all():
                raise ValueError("multiplication is not associative")

    # -- subgroups
    def subgroup_closure(self, gens: Sequence[int]) -> np.ndarray:
        """Sorted element indices of the subgroup generated by ``gens``."""
        n = self.order
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        perms = [self.right_perm(int(g)) for g in gens]
        while frontier.size:
            new = np.unique(np.concatenate([P[frontier] for P in perms])) if perms else np.zeros(0, dtype=np.int64)
            new = new[~seen[new]]
            seen[new] = True
            frontier = new
        return np.nonzero(seen)[0]

    def normal_closure(self, gens: Sequence[int]) -> Tuple[np.ndarray, List[int]]:
        gset = [int(g) for g in gens if g != 0]
        H = self.subgroup_closure(gset)
        member = np.zeros(self.order, dtype=bool)
        member[H] = True
        k = 0
        while k < len(gset):
            s = gset[k]
            k += 1
            for g in self.generator_elements:
                c = self.mul(self.mul(self.inv(g), s), g)
                if not member[c]:
                    gset.append(c)
                    H = self.subgroup_closure(gset)
                    member[:] = False
                    member[H] = True
        return H, gset

    def lower_central_series(self) -> "LowerCentralSeries":
        terms = [np.arange(self.order)]
        gens_cur = self.generator_elements
        while True:
            comms = [self.commutator(x, y) for x in self.generator_elements for y in gens_cur]
            H, gens_next = self.normal_closure(comms)
            if len(H) == len(terms[-1]):
                break
            terms.append(H)
            gens_cur = gens_next
            if len(H) == 1:
                break
        nilpotent = len(terms[-1]) == 1
        return LowerCentralSeries(terms, nilpotent, len(terms) - 1 if nilpotent else None)

    def is_abelian(self) -> bool:
        g = self.generator_elements
        return all(self.mul(a, b) == self.mul(b, a) for a in g for b in g)

    @cached_property
    def element_orders(self) -> np.ndarray:
        M = self.mult
        n = self.order
        idx = np.arange(n)
        cur = idx.copy()
        out = np.zeros(n, dtype=np.int64)
        k = 1
        while (out == 0).any():
            hit = (cur == 0) & (out == 0)
            out[hit] = k
            cur = M[cur, idx]
            k += 1
        return out

    def sylow_product_check(self) -> bool:
        """For a nilpotent group: elements of p-power order form subgroups of
        the full p-part order for each p, which commute pairwise and whose
        orders multiply to the group order."""
        n = self.order
        orders = self.element_orders
        sylows = []
        for p in prime_factors(n):
            q = 1
            while n % (q * p) == 0:
                q *= p
            els = np.nonzero(np.array([_is_power_of(int(o), p) for o in orders]))[0]
            if len(els) != q:
                return False
            sylows.append(els)
        M = self.mult
        for a, b in itertools.combinations(sylows, 2):
            if not (M[np.ix_(a, b)] == M[np.ix_(b, a)].T).all():
                return False
        total = 1
        for s in sylows:
            total *= len(s)
        return total == n


def _is_power_of(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


def _greedy_generators(M: np.ndarray) -> List[int]:
    n = M.shape[0]
    gens: List[int] = []
    have = {0}
    for x in range(1, n):
        if x in have:
            continue
        gens.append(x)
        frontier = list(have)
        have = set(have)
        stack = list(have)
        while stack:
            a = stack.pop()
            for g in gens:
                b = int(M[a, g])
                if b not in have:
                    have.add(b)
                    stack.append(b)
        if len(have) == n:
            break
    return gens


@dataclass
class LowerCentralSeries:
    terms: List[np.ndarray]
    is_nilpotent: bool
    nilpotency_class: Optional[int]


# ---------------------------------------------------------------------------
# coset enumeration


def coset_enumerate(pres: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> FiniteGroup:
    """Regular representation of a finite presented group.

    Raises CosetLimitExceeded when more than ``max_cosets`` live cosets are
    needed (the group may be infinite or just large).
    """
    rels = []
    for r in pres.relators:
        rels.append([2 * g + (0 if s > 0 else 1) for g, s in r.syllables()])
    ngens = pres.ngens
    if ngens == 0:
        return FiniteGroup(np.zeros((0, 1), dtype=np.int64), name=pres.name)
    table = kernels.coset_enumerate(ngens, rels, max_cosets)
    return FiniteGroup.from_coset_table(table, pres)


# ---------------------------------------------------------------------------
# automorphisms


class GrpAutomorphism:
    def __init__(self, group: FiniteGroup, image: Sequence[int]):
        self.group = group
        self.image = np.array(image, dtype=np.int64)
        n = group.order
        if sorted(self.image.tolist()) != list(range(n)) or self.image[0] != 0:
            raise ValueError("image is not a bijection fixing the identity")
        # multiplicative on generators suffices: psi(x g) = psi(x) psi(g)
        for g, perm in enumerate(group.gen_perms):
            pg = int(self.image[group.generator_elements[g]])
            if not (self.image[perm] == group.right_perm(pg)[self.image]).all():
                raise ValueError("image is not multiplicative")

    @classmethod
    def from_generator_images(cls, G: FiniteGroup, images: Sequence[int]) -> "GrpAutomorphism":
        parent, col = G._tree
        img = np.zeros(G.order, dtype=np.int64)
        inv_imgs = [G.inv(int(i)) for i in images]
        for y in G._bfs_order[1:]:
            c = int(col[y])
            h = images[c // 2] if c % 2 == 0 else inv_imgs[c // 2]
            img[y] = G.mul(int(img[parent[y]]), int(h))
        return cls(G, img)

    @classmethod
    def from_abhom(cls, G: FiniteGroup, f: AbHom) -> "GrpAutomorphism":
        """Automorphism of ``FiniteGroup.from_abelian(A)`` given by a matrix."""
        dims = list(f.source.invariant_factors)
        n = G.order
        coords = np.array(np.unravel_index(np.arange(n), dims))
        M = np.array(f.matrix, dtype=np.int64)
        new = (M @ coords) % np.array(dims)[:, None]
        return cls(G, np.ravel_multi_index(tuple(new), dims))

    def __call__(self, x: int) -> int:
        return int(self.image[x])

    def compose(self, other: "GrpAutomorphism") -> "GrpAutomorphism":
        return GrpAutomorphism(self.group, self.image[other.image])

    def is_inner(self) -> bool:
        G = self.group
        for c in range(G.order):
            ci = G.inv(c)
            if all(G.mul(G.mul(c, g), ci) == self(g) for g in G.generator_elements):
                return True
        return False


# ---------------------------------------------------------------------------
# bar complex over F_p


class BarHomology:
    """Normalized bar complex of a finite group with F_p coefficients, in
    degrees up to 2, with explicit bases for induced maps."""

    def __init__(self, G: FiniteGroup, p: int, limit: int = BAR_LIMIT):
        n = G.order
        if n > limit:
            raise SizeLimit("bar complex limited to order %d (got %d)" % (limit, n))
        self.G = G
        self.p = p
        m = n - 1
        self.m = m
        M = G.mult
        # C1 index of element g (g >= 1) is g-1; C2 index of [g|h] is (g-1)*m + (h-1)
        g, h = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
        g, h = g.ravel(), h.ravel()
        gh = M[g, h]
        # d2 [g|h] = [h] - [gh] + [g]  (as dense (m^2) x m matrix)
        d2 = np.zeros((m * m, m), dtype=np.int64)
        rows = np.arange(m * m)
        np.add.at(d2, (rows, h - 1), 1)
        nz = gh != 0
        np.add.at(d2, (rows[nz], gh[nz] - 1), -1)
        np.add.at(d2, (rows, g - 1), 1)
        self.d2 = d2 % p
        # H1 = C1 / im d2
        self.B1, self.B1piv = linalg.rref_mod_p(self.d2, p) if m else (np.zeros((0, 0), dtype=np.int64), [])
        self.h1_cols = [c for c in range(m) if c not in set(self.B1piv)]
        # d3 [g|h|k] = [h|k] - [gh|k] + [g|hk] - [g|h]
        self.B2, self.B2piv = self._boundary_image_d3()
        # Z2 = {x : x d2 = 0}
        if m:
            Z2 = linalg.nullspace_mod_p(self.d2.T, p)
        else:
            Z2 = np.zeros((0, 0), dtype=np.int64)
        Zr = self._reduce_by(Z2, self.B2, self.B2piv)
        Zr = Zr[Zr.any(axis=1)] if Zr.size else Zr
        if Zr.shape[0]:
            H, Hpiv = linalg.rref_mod_p(Zr, p)
        else:
            H, Hpiv = np.zeros((0, m * m), dtype=np.int64), []
        self.H2 = H
        self.H2piv = list(Hpiv)

    def _boundary_image_d3(self):
        G, p, m = self.G, self.p, self.m
        n = G.order
        if m == 0:
            return np.zeros((0, 0), dtype=np.int64), []
        M = G.mult
        a = np.arange(1, n)
        g, h, k = (x.ravel() for x in np.meshgrid(a, a, a, indexing="ij"))
        gh = M[g, h]
        hk = M[h, k]
        cols = np.stack([(h - 1) * m + (k - 1), (gh - 1) * m + (k - 1),
                         (g - 1) * m + (hk - 1), (g - 1) * m + (h - 1)], axis=1)
        vals = np.tile(np.array([1, -1, 1, -1], dtype=np.int64), (len(g), 1))
        valid = np.stack([np.ones_like(g, dtype=bool), gh != 0, hk != 0,
                          np.ones_like(g, dtype=bool)], axis=1)
        vals = np.where(valid, vals, 0)
        cols = np.where(valid, cols, 0)
        indptr = np.arange(0, 4 * len(g) + 1, 4, dtype=np.int64)
        R, piv = kernels.rref_sparse_mod_p(indptr, cols.ravel(), vals.ravel() % p, m * m, p)
        return np.asarray(R, dtype=np.int64), [int(c) for c in piv]

    def _reduce_by(self, V: np.ndarray, R: np.ndarray, piv: Sequence[int]) -> np.ndarray:
        if V.size == 0 or len(piv) == 0:
            return V % self.p
        coef = V[:, list(piv)]
        return (V - _matmul_mod(coef, R, self.p)) % self.p

    @property
    def dims(self) -> Tuple[int, int, int]:
        return 1, len(self.h1_cols), self.H2.shape[0]

    def h2_coordinates(self, V: np.ndarray) -> np.ndarray:
        """Coordinates (rows) of 2-cycles ``V`` (rows) in the H2 basis."""
        Vr = self._reduce_by(np.atleast_2d(V), self.B2, self.B2piv)
        coords = Vr[:, self.H2piv] if self.H2piv else np.zeros((Vr.shape[0], 0), dtype=np.int64)
        check = (Vr - _matmul_mod(coords, self.H2, self.p)) % self.p if self.H2piv else Vr
        if check.any():
            raise ArithmeticError("vector is not a cycle")
        return coords

    def h2_induced(self, aut: GrpAutomorphism) -> np.ndarray:
        """Matrix of H_2(aut) in column convention."""
        if not self.H2piv:
            return np.zeros((0, 0), dtype=np.int64)
        m = self.m
        img = aut.image
        g, h = np.meshgrid(np.arange(1, m + 1), np.arange(1, m + 1), indexing="ij")
        dest = (img[g.ravel()] - 1) * m + (img[h.ravel()] - 1)
        moved = np.zeros_like(self.H2)
        moved[:, dest] = self.H2
        return self.h2_coordinates(moved).T % self.p

    def h1_induced(self, aut: GrpAutomorphism) -> np.ndarray:
        k = len(self.h1_cols)
        if k == 0:
            return np.zeros((0, 0), dtype=np.int64)
        m = self.m
        V = np.zeros((k, m), dtype=np.int64)
        for i, c in enumerate(self.h1_cols):
            V[i, aut(c + 1) - 1] = 1
        Vr = self._reduce_by(V, self.B1, self.B1piv)
        return Vr[:, self.h1_cols].T % self.p


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] * (p - 1) ** 2 < 2 ** 52:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    return (a.astype(object) @ b.astype(object)).astype(np.int64) % p


def bar_homology(G: FiniteGroup, p: int, limit: int = BAR_LIMIT) -> BarHomology:
    """Cached bar-complex homology of ``G`` over F_p in degrees 0..2."""
    got = G._bar.get(p)
    if got is None:
        got = BarHomology(G, p, limit)
        G._bar[p] = got
    return got


def fixed_dim(mats: Sequence[np.ndarray], dim: int, p: int) -> int:
    """Dimension of the common fixed space of matrices acting on columns."""
    if dim == 0:
        return 0
    if not mats:
        return dim
    stacked = np.concatenate([(np.asarray(M) - np.eye(dim, dtype=np.int64)) % p for M in mats], axis=0)
    return dim - linalg.rank_mod_p(stacked, p)


def fixed_H2_dim(K: FiniteGroup, autos: Sequence[GrpAutomorphism], p: int,
                 limit: int = BAR_LIMIT) -> int:
    """Dimension of the subspace of H^2(K; F_p) fixed by all ``autos``.

    Cohomology maps are the transposes of the homology maps.
    """
    bh = bar_homology(K, p, limit)
    d = bh.dims[2]
    return fixed_dim([bh.h2_induced(a).T for a in autos], d, p)


def fixed_H2_homology_dim(K: FiniteGroup, autos: Sequence[GrpAutomorphism], p: int,
                          limit: int = BAR_LIMIT) -> int:
    bh = bar_homology(K, p, limit)
    return fixed_dim([bh.h2_induced(a) for a in autos], bh.dims[2], p)


# ---------------------------------------------------------------------------
# integral H_2 from the bar complex


def integral_H2_bar(G: FiniteGroup, limit: int = INTEGRAL_BAR_LIMIT) -> FinAbGroup:
    """H_2(G; Z) as the torsion of the cokernel of the bar boundary d3.

    The cokernel of d3 is H_2 plus the free group of 1-boundaries, so its
    torsion is H_2 for finite G.  Unit pivots are eliminated sparsely in
    Markowitz order; what remains is put in Smith form densely.
    """
    n = G.order
    if n > limit:
        raise SizeLimit("integral bar computation limited to order %d (got %d)" % (limit, n))
    if n == 1:
        return FinAbGroup(0, ())
    m = n - 1
    M = G.mult
    rows: Dict[int, Dict[int, int]] = {}
    seen = set()
    rid = 0
    for g in range(1, n):
        for h in range(1, n):
            gh = int(M[g, h])
            for k in range(1, n):
                hk = int(M[h, k])
                r: Dict[int, int] = {}
                terms = [((h - 1) * m + (k - 1), 1), ((g - 1) * m + (h - 1), -1)]
                if gh:
                    terms.append(((gh - 1) * m + (k - 1), -1))
                if hk:
                    terms.append(((g - 1) * m + (hk - 1), 1))
                for c, v in terms:
                    r[c] = r.get(c, 0) + v
                r = {c: v for c, v in r.items() if v}
                key = tuple(sorted(r.items()))
                if key and key not in seen:
                    seen.add(key)
                    rows[rid] = r
                    rid += 1
    return FinAbGroup(0, tuple(d for d in _sparse_invariant_factors(rows, m * m) if d > 1))


def _sparse_invariant_factors(rows: Dict[int, Dict[int, int]], ncols: int) -> List[int]:
    """Nonzero invariant factors of a sparse integer matrix (rows as dicts)."""
    colrows: Dict[int, set] = {}
    for r, row in rows.items():
        for c in row:
            colrows.setdefault(c, set()).add(r)
    units = 0
    heap = [(len(row), r) for r, row in rows.items()]
    heapq.heapify(heap)
    while heap:
        length, r = heapq.heappop(heap)
        row = rows.get(r)
        if row is None:
            continue
        if len(row) != length:
            heapq.heappush(heap, (len(row), r))
            continue
        cands = [c for c, v in row.items() if v in (1, -1)]
        if not cands:
            continue
        c = min(cands, key=lambda c: len(colrows[c]))
        pv = row[c]
        del rows[r]
        for cc in row:
            colrows[cc].discard(r)
        for r2 in list(colrows[c]):
            row2 = rows[r2]
            q = row2[c] * pv  # pv = +-1, so row2[c]/pv = row2[c]*pv
            for cc, v in row.items():
                nv = row2.get(cc, 0) - q * v
                if nv:
                    if cc not in row2:
                        colrows[cc].add(r2)
                    row2[cc] = nv
                else:
                    if cc in row2:
                        del row2[cc]
                        colrows[cc].discard(r2)
            if not row2:
                del rows[r2]
            else:
                heapq.heappush(heap, (len(row2), r2))
        del colrows[c]
        units += 1
    if not rows:
        return [1] * units
    cols = sorted({c for row in rows.values() for c in row})
    cidx = {c: i for i, c in enumerate(cols)}
    dense = [[0] * len(cols) for _ in rows]
    for i, row in enumerate(rows.values()):
        for c, v in row.items():
            dense[i][cidx[c]] = v
    return [1] * units + linalg.smith_diagonal(dense, len(cols))
