"""Finitely generated abelian groups, their homomorphisms and automorphisms.

A group is kept in invariant-factor form ``Z^r + Z/d_1 + ... + Z/d_s`` with
``d_1 | d_2 | ... | d_s``.  Its standard generating system lists the free
generators first and then one generator per invariant factor.  A
homomorphism is an integer matrix in column convention: column ``j`` holds
the coordinates of the image of source generator ``j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .linalg import IntMatrix, smith_normal_form
from .presentation import Presentation


class NotAutomorphism(ValueError):
    pass


class NotUnipotent(ValueError):
    pass


def _factorize(n: int) -> List[Tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def prime_factors(n: int) -> List[int]:
    return [p for p, _ in _factorize(abs(n))] if n else []


def big_omega(n: int) -> int:
    """Number of prime factors counted with multiplicity."""
    return sum(e for _, e in _factorize(abs(n))) if n else 0


def is_prime(n: int) -> bool:
    return n >= 2 and _factorize(n) == [(n, 1)]


@dataclass(frozen=True)
class FinAbGroup:
    free_rank: int
    invariant_factors: Tuple[int, ...] = ()

    def __post_init__(self):
        inv = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", inv)
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for i, d in enumerate(inv):
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
            if i and d % inv[i - 1]:
                raise ValueError("invariant factors must form a divisibility chain")

    # -- constructors
    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FinAbGroup":
        """Normalize a direct sum of cyclic groups; order 0 means infinite cyclic."""
        orders = list(orders)
        if not orders:
            return cls(0, ())
        return cokernel([[d if i == j else 0 for j in range(len(orders))]
                         for i, d in enumerate(orders)], len(orders))

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        return cls.from_orders([n])

    # -- basic data
    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.invariant_factors)

    @property
    def orders(self) -> Tuple[int, ...]:
        """Order of each standard generator, 0 for free ones."""
        return (0,) * self.free_rank + self.invariant_factors

    @property
    def torsion_order(self) -> int:
        return reduce(lambda a, b: a * b, self.invariant_factors, 1)

    @property
    def order(self) -> Optional[int]:
        return None if self.free_rank else self.torsion_order

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def is_cyclic(self) -> bool:
        return self.ngens <= 1

    def torsion(self) -> "FinAbGroup":
        return FinAbGroup(0, self.invariant_factors)

    def primary_part(self, p: int) -> "FinAbGroup":
        orders = []
        for d in self.invariant_factors:
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            if q > 1:
                orders.append(q)
        return FinAbGroup(0, tuple(orders))

    def elementary_divisors(self) -> List[Tuple[int, int]]:
        """``(p, p^a)`` pairs for the primary cyclic summands."""
        out = []
        for d in self.invariant_factors:
            for p, e in _factorize(d):
                out.append((p, p ** e))
        return sorted(out)

    def reduce(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Canonical coordinates of an element."""
        r = self.free_rank
        return tuple(int(x) for x in v[:r]) + tuple(
            int(x) % d for x, d in zip(v[r:], self.invariant_factors))

    def elements(self):
        if self.free_rank:
            raise ValueError("infinite group")
        return itertools.product(*[range(d) for d in self.invariant_factors])

    def element_order(self, v: Sequence[int]) -> int:
        if any(v[: self.free_rank]):
            return 0
        o = 1
        for x, d in zip(v[self.free_rank:], self.invariant_factors):
            k = d // gcd(int(x), d)
            o = o * k // gcd(o, k)
        return o

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + ["Z/%d" % d for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}


@dataclass(frozen=True)
class FunctorDims:
    tensor: int
    tor: int
    hom: int
    ext: int


def functor_dims(A: FinAbGroup, p: int) -> FunctorDims:
    """Dimensions of A/pA, Ker(p), Hom(A, F_p) and Ext(A, F_p)."""
    t = sum(1 for d in A.invariant_factors if d % p == 0)
    return FunctorDims(A.free_rank + t, t, A.free_rank + t, t)


def cokernel_with_transform(relations: Sequence[Sequence[int]], ngens: int
                            ) -> Tuple[FinAbGroup, IntMatrix, List[int]]:
    """Cokernel of the row lattice of ``relations`` inside ``Z^ngens``.

    Returns the group, the change of coordinates ``V`` (a row vector ``x``
    of old coordinates becomes ``x V``) and the list of new-coordinate
    indices kept as standard generators, free ones first.
    """
    if not relations:
        return FinAbGroup(ngens, ()), linalg.identity(ngens), list(range(ngens))
    _, D, V = smith_normal_form(relations, ngens)
    diag = [D[i][i] if i < len(D) else 0 for i in range(ngens)]
    free = [i for i in range(ngens) if diag[i] == 0]
    tors = [i for i in range(ngens) if diag[i] > 1]
    A = FinAbGroup(len(free), tuple(diag[i] for i in tors))
    return A, V, free + tors


def cokernel(relations: Sequence[Sequence[int]], ngens: int) -> FinAbGroup:
    return cokernel_with_transform(relations, ngens)[0]


def abelianize(p: Presentation) -> FinAbGroup:
    return cokernel(p.exponent_matrix(), p.ngens)


def abelianization_map(p: Presentation) -> Tuple[FinAbGroup, IntMatrix]:
    """The abelianization and, per generator, its coordinates in it (rows)."""
    A, V, keep = cokernel_with_transform(p.exponent_matrix(), p.ngens)
    coords = [A.reduce([V[g][j] for j in keep]) for g in range(p.ngens)]
    return A, [list(c) for c in coords]


# ---------------------------------------------------------------------------
# homomorphisms


class AbHom:
    """Homomorphism between finitely generated abelian groups (column convention)."""

    def __init__(self, source: FinAbGroup, target: FinAbGroup, matrix: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        m = [list(map(int, row)) for row in matrix]
        if len(m) != target.ngens or any(len(r) != source.ngens for r in m):
            if not (target.ngens == 0 or source.ngens == 0):
                raise ValueError("matrix shape does not match the groups")
            m = [[0] * source.ngens for _ in range(target.ngens)]
        r = target.free_rank
        for i, d in enumerate(target.invariant_factors):
            m[r + i] = [x % d for x in m[r + i]]
        self.matrix: IntMatrix = m
        # image of a generator of order d must have order dividing d
        for j, d in enumerate(source.orders):
            if d == 0:
                continue
            col = [m[i][j] for i in range(target.ngens)]
            if any(col[:r]):
                raise ValueError("torsion generator %d maps to an element of infinite order" % j)
            for x, e in zip(col[r:], target.invariant_factors):
                if (x * d) % e:
                    raise ValueError("image of generator %d has order not dividing %d" % (j, d))

    @classmethod
    def identity(cls, A: FinAbGroup) -> "AbHom":
        return cls(A, A, linalg.identity(A.ngens))

    @classmethod
    def scalar(cls, A: FinAbGroup, n: int) -> "AbHom":
        return cls(A, A, [[n * int(i == j) for j in range(A.ngens)] for i in range(A.ngens)])

    def __call__(self, v: Sequence[int]) -> Tuple[int, ...]:
        out = [sum(self.matrix[i][j] * int(v[j]) for j in range(self.source.ngens))
               for i in range(self.target.ngens)]
        return self.target.reduce(out)

    def compose(self, other: "AbHom") -> "AbHom":
        """``self o other``."""
        assert other.target == self.source
        return AbHom(other.source, self.target, linalg.matmul(self.matrix, other.matrix)
                     if self.matrix and other.matrix else
                     [[0] * other.source.ngens for _ in range(self.target.ngens)])

    def __matmul__(self, other: "AbHom") -> "AbHom":
        return self.compose(other)

    def __sub__(self, other: "AbHom") -> "AbHom":
        return AbHom(self.source, self.target,
                     [[a - b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, AbHom) and self.source == other.source
                and self.target == other.target and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.source, self.target, tuple(map(tuple, self.matrix))))

    def __repr__(self) -> str:
        return "AbHom(%s -> %s, %r)" % (self.source, self.target, self.matrix)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def power(self, n: int) -> "AbHom":
        assert self.source == self.target and n >= 0
        result = AbHom.identity(self.source)
        base = self
        while n:
            if n & 1:
                result = base.compose(result)
            base = base.compose(base)
            n >>= 1
        return result

    # -- automorphism checks
    def is_automorphism(self) -> bool:
        A = self.source
        if self.target != A:
            return False
        r = A.free_rank
        if r:
            det = _det([row[:r] for row in self.matrix[:r]])
            if det not in (1, -1):
                return False
        s = len(A.invariant_factors)
        if s == 0:
            return True
        # the torsion block maps T to T; it is bijective iff it is onto
        block = [row[r:] for row in self.matrix[r:]]
        rel = [[block[i][j] for i in range(s)] for j in range(s)]
        rel += [[A.invariant_factors[i] * int(i == j) for j in range(s)] for i in range(s)]
        return cokernel(rel, s).is_trivial()

    def mod_p_matrix(self, p: int) -> np.ndarray:
        """Induced endomorphism of A/pA in column convention, on the F_p basis
        given by the free generators and the torsion generators with p | d."""
        idx = mod_p_coordinates(self.source, p)
        return np.array([[self.matrix[i][j] % p for j in idx] for i in idx],
                        dtype=np.int64).reshape(len(idx), len(idx))


def mod_p_coordinates(A: FinAbGroup, p: int) -> List[int]:
    r = A.free_rank
    return list(range(r)) + [r + i for i, d in enumerate(A.invariant_factors) if d % p == 0]


def _det(m: IntMatrix) -> int:
    n = len(m)
    if n == 0:
        return 1
    A = [list(r) for r in m]
    sign = 1
    prev = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                A[i][j] = (A[c][c] * A[i][j] - A[i][c] * A[c][j]) // prev
        prev = A[c][c]
    return sign * A[n - 1][n - 1]


def unipotency_bound(A: FinAbGroup) -> int:
    return A.free_rank + big_omega(A.torsion_order) + 1


def nilpotency_index(f: AbHom) -> Optional[int]:
    """Least N >= 1 with f^N = 0, or None when f is not nilpotent."""
    A = f.source
    P = f
    for k in range(1, unipotency_bound(A) + 1):
        if P.is_zero():
            return k
        P = f.compose(P)
    return None


def is_unipotent(f: AbHom) -> Tuple[bool, Optional[int]]:
    """Decide whether ``f - id`` is nilpotent.

    Returns ``(flag, index)``: the index is 0 for the identity, otherwise the
    least ``N`` with ``(f - id)^N = 0``; it is None when ``flag`` is false.
    Raises NotAutomorphism when ``f`` is not invertible.
    """
    if not f.is_automorphism():
        raise NotAutomorphism("map is not an automorphism of %s" % f.source)
    g = f - AbHom.identity(f.source)
    if g.is_zero():
        return True, 0
    n = nilpotency_index(g)
    return (n is not None), n


def submodule_kernel_mod_p(maps: Sequence[np.ndarray], basis: np.ndarray, p: int) -> np.ndarray:
    """Vectors of span(basis) (rows) killed by every map (acting on columns)."""
    k = basis.shape[0]
    if k == 0:
        return basis
    blocks = [((basis @ (m.T % p)) % p) for m in maps]
    if not blocks:
        return basis
    stacked = np.concatenate(blocks, axis=1)  # k x (n*len)
    coeffs = linalg.left_nullspace_mod_p(stacked, p, rows=k)
    if coeffs.size == 0:
        return np.zeros((0, basis.shape[1]), dtype=np.int64)
    return (coeffs @ basis) % p


def unipotent_filtration(A: FinAbGroup, gens: Sequence[AbHom], p: Optional[int] = None
                         ) -> List[np.ndarray]:
    """Finite filtration ``A = A_1 > ... > A_k = A^N > 0`` by submodules.

    Each ``(g - 1) A_i`` lies in ``A_{i+1}`` and the last nonzero term is
    the fixed subspace.  With ``p`` given the filtration is one of
    ``A/pA`` over F_p (subspaces as row bases); without it, the integral
    filtration is returned as row bases of sublattices of the coordinate
    lattice, with torsion coordinates read modulo their orders.
    """
    for g in gens:
        ok, _ = is_unipotent(g)
        if not ok:
            raise NotUnipotent("generator does not act unipotently")
    if p is not None:
        mats = [(g.mod_p_matrix(p) - np.eye(len(mod_p_coordinates(A, p)), dtype=np.int64)) % p
                for g in gens]
        n = len(mod_p_coordinates(A, p))
        # ascending series of fixed points: V_0 = 0, V_{i+1} = {v : (g-1)v in V_i}
        series = [np.zeros((0, n), dtype=np.int64)]
        while series[-1].shape[0] < n:
            prev = series[-1]
            nxt = _preimage_mod_p(mats, prev, n, p)
            if nxt.shape[0] == prev.shape[0]:
                raise NotUnipotent("action is not unipotent on A/pA")
            series.append(nxt)
        # reverse: A_1 = whole space, ..., A_k = V_1 = fixed space
        return [series[i] for i in range(len(series) - 1, 0, -1)]
    return _integral_filtration(A, gens)


def _preimage_mod_p(mats, sub: np.ndarray, n: int, p: int) -> np.ndarray:
    """Basis of {v : M v in span(sub) for all M}."""
    if sub.shape[0]:
        ann = linalg.nullspace_mod_p(sub, p)  # rows w with sub @ w = 0
    else:
        ann = np.eye(n, dtype=np.int64)
    if ann.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    cond = np.concatenate([(ann @ M) % p for M in mats], axis=0) if mats else np.zeros((0, n), dtype=np.int64)
    if cond.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, _ = linalg.rref_mod_p(linalg.nullspace_mod_p(cond, p), p)
    return R


def _integral_filtration(A: FinAbGroup, gens: Sequence[AbHom]) -> List[IntMatrix]:
    """Integral version: sublattices of ``Z^n`` containing the relation lattice.

    Built as the ascending series ``V_1 = A^N``, ``V_{i+1} = {v : (g-1)v in
    V_i for all g}`` and returned in reverse, so the last term is ``A^N``.
    """
    n = A.ngens
    rel = [[A.invariant_factors[i] * int(A.free_rank + i == j) for j in range(n)]
           for i in range(len(A.invariant_factors))]
    whole = linalg.hermite_rows(linalg.identity(n), n)
    dmats = [(g - AbHom.identity(A)).matrix for g in gens]
    series = [linalg.hermite_rows(rel, n)]
    while series[-1] != whole:
        nxt = _lattice_preimage(dmats, series[-1], n)
        if nxt == series[-1]:
            raise NotUnipotent("augmentation ideal does not act nilpotently")
        series.append(nxt)
    return [series[i] for i in range(len(series) - 1, 0, -1)]


def _lattice_preimage(mats: Sequence[IntMatrix], L: IntMatrix, n: int) -> IntMatrix:
    """Hermite basis of ``{v in Z^n : M v in L for every M}``."""
    if not mats:
        return linalg.hermite_rows(linalg.identity(n), n)
    # coordinates on Z^n / L: x -> x V, read modulo the Smith diagonal
    _, D, V = smith_normal_form(L, n) if L else (None, [], linalg.identity(n))
    diag = [D[i][i] if i < len(D) else 0 for i in range(n)]
    cols = [j for j in range(n) if diag[j] != 1]
    # unknowns (v, w): sum_i v_i W_ij - w_j diag_j = 0 for each condition column
    conds = []
    for M in mats:
        Mt = linalg.transpose(M) if M else linalg.zeros(n, n)
        W = linalg.matmul(Mt, V)
        for j in cols:
            conds.append(([W[i][j] for i in range(n)], diag[j]))
    k = len(conds)
    if k == 0:
        return linalg.hermite_rows(linalg.identity(n), n)
    K = []
    for c, (wcol, d) in enumerate(conds):
        K.append(list(wcol) + [-d * int(c == t) for t in range(k)])
    ker = linalg.integer_kernel(K, n + k)
    return linalg.hermite_rows([row[:n] for row in ker], n)


def fixed_subgroup_mod_p(A: FinAbGroup, gens: Sequence[AbHom], p: int) -> np.ndarray:
    n = len(mod_p_coordinates(A, p))
    mats = [(g.mod_p_matrix(p) - np.eye(n, dtype=np.int64)) % p for g in gens]
    if not mats:
        return np.eye(n, dtype=np.int64)
    return linalg.nullspace_mod_p(np.concatenate(mats, axis=0), p, cols=n)


# ---------------------------------------------------------------------------
# automorphism enumeration


def _elements_of_order_dividing(A: FinAbGroup, d: int) -> List[Tuple[int, ...]]:
    ranges = []
    for e in A.invariant_factors:
        step = e // gcd(d, e)
        ranges.append(range(0, e, step))
    return list(itertools.product(*ranges))


def automorphisms_bruteforce(A: FinAbGroup, limit: int = 10 ** 7):
    """All automorphisms of a finite abelian group by filtering image tuples."""
    if A.free_rank:
        raise ValueError("only finite groups")
    cands = [_elements_of_order_dividing(A, d) for d in A.invariant_factors]
    total = 1
    for c in cands:
        total *= len(c)
    if total > limit:
        raise ValueError("too many candidate image tuples (%d)" % total)
    for imgs in itertools.product(*cands):
        m = [[imgs[j][i] for j in range(len(imgs))] for i in range(len(imgs))]
        f = AbHom(A, A, m)
        if f.is_automorphism():
            yield f


def unipotent_automorphisms_bruteforce(A: FinAbGroup):
    for f in automorphisms_bruteforce(A):
        if is_unipotent(f)[0]:
            yield f


def _partitions(n: int, largest: Optional[int] = None):
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _jordan(part: Sequence[int]) -> List[List[int]]:
    n = sum(part)
    m = linalg.identity(n)
    pos = 0
    for b in part:
        for i in range(b - 1):
            m[pos + i][pos + i + 1] = 1
        pos += b
    return m


def _primary_unipotent_reps(p: int, exps: Sequence[int]) -> List[IntMatrix]:
    """Automorphisms of ``+ Z/p^{a_i}`` (coordinates in the given order)
    whose reduction on each homogeneous block is a Jordan matrix.

    Every unipotent automorphism is conjugate to one of these: reduction to
    the blocks of equal exponent is a surjection onto a product of general
    linear groups over F_p, whose unipotent classes are the Jordan forms, and
    an automorphism is unipotent iff all those reductions are.
    """
    n = len(exps)
    blocks: List[List[int]] = []
    for i, a in enumerate(exps):
        if blocks and exps[blocks[-1][0]] == a:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    # per-entry choices: (i, j) -> list of allowed values
    per_block_jordans = [list(_partitions(len(b))) for b in blocks]
    reps = []
    for parts in itertools.product(*per_block_jordans):
        base = linalg.zeros(n, n)
        for b, part in zip(blocks, parts):
            J = _jordan(part)
            for x, i in enumerate(b):
                for y, j in enumerate(b):
                    base[i][j] = J[x][y]
        choices = []
        for i in range(n):
            for j in range(n):
                ai, aj = exps[i], exps[j]
                mod = p ** ai
                if ai == aj:
                    # reduction fixed by the Jordan form, lift freely
                    choices.append([(base[i][j] + p * t) % mod for t in range(p ** (ai - 1))])
                else:
                    step = p ** max(0, ai - aj)
                    choices.append(list(range(0, mod, step)))
        for vals in itertools.product(*choices):
            reps.append([list(vals[i * n:(i + 1) * n]) for i in range(n)])
    return reps


def unipotent_class_representatives(A: FinAbGroup) -> List[AbHom]:
    """A set of unipotent automorphisms of a finite abelian group meeting
    every conjugacy class of unipotent automorphisms (with repetitions)."""
    if A.free_rank:
        raise ValueError("only finite groups")
    if A.is_trivial():
        return [AbHom.identity(A)]
    primes = prime_factors(A.torsion_order)
    per_prime = []
    for p in primes:
        Ap = A.primary_part(p)
        exps = [_valuation(d, p) for d in Ap.invariant_factors]
        per_prime.append((Ap, _primary_unipotent_reps(p, exps)))
    conv = _PrimaryCoordinates(A)
    out = []
    for combo in itertools.product(*[reps for _, reps in per_prime]):
        out.append(conv.assemble(list(combo)))
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class _PrimaryCoordinates:
    """Translate between invariant-factor coordinates of a finite abelian
    group and coordinates on its primary parts (each in invariant-factor form).
    """

    def __init__(self, A: FinAbGroup):
        self.A = A
        self.primes = prime_factors(A.torsion_order)
        self.parts = [A.primary_part(p) for p in self.primes]
        # generator i of A (order d_i) = sum over p of its p-component;
        # the p-component of e_i is (d_i/p^a) e_i of order p^a
        s = len(A.invariant_factors)
        self.s = s

    def to_part(self, k: int, v: Sequence[int]) -> List[int]:
        """Coordinates of the p_k-component of ``v`` in the p_k-part."""
        p = self.primes[k]
        part = self.parts[k]
        off = self.s - len(part.invariant_factors)
        out = []
        for idx, q in enumerate(part.invariant_factors):
            i = off + idx
            d = self.A.invariant_factors[i]
            m = d // q
            # x e_i has p-component; e_i = u*(m e_i) + (stuff of order m) where u m = 1 mod q
            u = pow(m, -1, q)
            out.append((v[i] * u) % q)
        return out

    def from_parts(self, comps: Sequence[Sequence[int]]) -> List[int]:
        v = [0] * self.s
        for k, part in enumerate(self.parts):
            off = self.s - len(part.invariant_factors)
            for idx, q in enumerate(part.invariant_factors):
                i = off + idx
                m = self.A.invariant_factors[i] // q
                v[i] += m * comps[k][idx]
        return [x % d for x, d in zip(v, self.A.invariant_factors)]

    def assemble(self, mats: Sequence[IntMatrix]) -> AbHom:
        cols = []
        for j in range(self.s):
            e = [int(i == j) for i in range(self.s)]
            imgs = []
            for k, part in enumerate(self.parts):
                c = self.to_part(k, e)
                M = mats[k]
                n = len(part.invariant_factors)
                img = [sum(M[a][b] * c[b] for b in range(n)) % part.invariant_factors[a]
                       for a in range(n)]
                imgs.append(img)
            cols.append(self.from_parts(imgs))
        m = [[cols[j][i] for j in range(self.s)] for i in range(self.s)]
        return AbHom(self.A, self.A, m)


def finite_abelian_groups(max_order: int, min_order: int = 1) -> List[FinAbGroup]:
    """Every finite abelian group of order in the range, sorted by order."""
    out = []
    for n in range(min_order, max_order + 1):
        fac = _factorize(n)
        per_prime = [[(p, part) for part in _partitions(e)] for p, e in fac]
        for combo in itertools.product(*per_prime):
            orders = []
            for p, part in combo:
                orders.extend(p ** a for a in part)
            out.append(FinAbGroup.from_orders(orders))
    return out
