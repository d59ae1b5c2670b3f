"""Exact linear algebra over the integers and over prime fields.

Integer matrices are plain lists of row lists holding Python ints, so there
is no overflow anywhere.  Prime-field routines take anything numpy can turn
into an int64 array and always return reduced representatives in [0, p).
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

IntMatrix = List[List[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        assert len(row) == inner
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(cols):
                    acc[j] += x * bk[j]
        out.append(acc)
    return out


def transpose(m: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*m)]


def shape(m: Sequence[Sequence[int]], cols: int | None = None) -> Tuple[int, int]:
    if not m:
        return 0, (cols or 0)
    return len(m), len(m[0])


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: Sequence[Sequence[int]], cols: int | None = None
                      ) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U * m * V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative
    entries forming a divisibility chain.  The pivot is always an entry of
    least absolute value in the active block.  ``cols`` is only needed for
    matrices with no rows.
    """
    rows, ncols = shape(m, cols)
    D = [list(map(int, r)) for r in m]
    U = identity(rows)
    V = identity(ncols)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):  # row dst += q * row src
        if q:
            rs, rd = D[src], D[dst]
            for k in range(ncols):
                if rs[k]:
                    rd[k] += q * rs[k]
            us, ud = U[src], U[dst]
            for k in range(rows):
                if us[k]:
                    ud[k] += q * us[k]

    def add_col(src, dst, q):  # col dst += q * col src
        if q:
            for r in D:
                if r[src]:
                    r[dst] += q * r[src]
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]

    t = 0
    while t < min(rows, ncols):
        # least nonzero entry in the active block
        best = None
        for i in range(t, rows):
            Di = D[i]
            for j in range(t, ncols):
                v = Di[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = D[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // piv))
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, ncols):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // piv))
                    if D[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder into the pivot slot and retry
                best = (abs(piv), t, t)
                for i in range(t + 1, rows):
                    if D[i][t] and abs(D[i][t]) < best[0]:
                        best = (abs(D[i][t]), i, t)
                for j in range(t + 1, ncols):
                    if D[t][j] and abs(D[t][j]) < best[0]:
                        best = (abs(D[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            # divisibility of the remaining block by the pivot
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, ncols):
                    if D[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def smith_diagonal(m: Sequence[Sequence[int]], cols: int | None = None) -> List[int]:
    """Nonzero diagonal entries of the Smith form (transforms discarded)."""
    _, D, _ = smith_normal_form(m, cols)
    out = []
    for i in range(min(len(D), len(D[0]) if D else 0)):
        if D[i][i]:
            out.append(D[i][i])
    return out


def integer_rank(m: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals via fraction-free (Bareiss) elimination."""
    A = [list(map(int, r)) for r in m]
    if not A or not A[0]:
        return 0
    rows, cols = len(A), len(A[0])
    rank = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank][c]
        for i in range(rank + 1, rows):
            a = A[i][c]
            Ai, Ar = A[i], A[rank]
            for j in range(c, cols):
                Ai[j] = (p * Ai[j] - a * Ar[j]) // prev
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def integer_kernel(m: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
    """Basis (as rows) of the lattice ``{x : m x = 0}``."""
    _, ncols = shape(m, cols)
    if not m:
        return identity(ncols)
    _, D, V = smith_normal_form(m, ncols)
    r = sum(1 for i in range(min(len(D), ncols)) if D[i][i])
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def hermite_rows(vectors: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Rows come out in echelon order with positive pivots and entries above
    each pivot reduced into ``[0, pivot)``; zero rows are dropped.  Two
    lattices are equal iff their Hermite forms are equal.
    """
    A = [list(map(int, v)) for v in vectors if any(v)]
    out: IntMatrix = []
    col = 0
    while A and col < n:
        nz = [r for r in A if r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(col, n):
                    r[j] -= q * piv[j]
                if r[col]:
                    rest.append(r)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            for j in range(n):
                piv[j] = -piv[j]
        A = [r for r in A if r is not piv and any(r) and not r[col]]
        for r in out:
            q = r[col] // piv[col]
            if q:
                for j in range(col, n):
                    r[j] -= q * piv[j]
        out.append(piv)
        col += 1
    return out


def reduce_by_hermite(v: Sequence[int], basis: IntMatrix) -> List[int]:
    """Remainder of ``v`` after reduction by a Hermite basis."""
    v = list(v)
    for row in basis:
        c = next(j for j, x in enumerate(row) if x)
        q = v[c] // row[c]
        if q:
            for j in range(c, len(v)):
                v[j] -= q * row[j]
    return v


def in_lattice(v: Sequence[int], basis: IntMatrix) -> bool:
    return not any(reduce_by_hermite(v, basis))


# ---------------------------------------------------------------------------
# prime fields


def as_mod(m, p: int) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    return np.mod(a, p) if p else a


def rref_mod_p(m, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form over F_p; returns ``(R, pivot_columns)``."""
    A = as_mod(m, p).copy()
    if A.ndim != 2 or A.size == 0:
        return A.reshape(A.shape[0] if A.ndim == 2 else 0, -1)[:0], []
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank_mod_p(m, p: int) -> int:
    if p == 0:
        return field_rank(m, 0)
    A = as_mod(m, p)
    if A.size == 0:
        return 0
    return len(rref_mod_p(A, p)[1])


def nullspace_mod_p(m, p: int, cols: int | None = None) -> np.ndarray:
    """Rows spanning ``{x : m @ x = 0}`` over F_p."""
    A = as_mod(m, p)
    if A.size == 0:
        n = cols if cols is not None else (A.shape[1] if A.ndim == 2 else 0)
        return np.eye(n, dtype=np.int64)
    n = A.shape[1]
    R, piv = rref_mod_p(A, p)
    free = [j for j in range(n) if j not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, j in enumerate(free):
        basis[k, j] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = (-R[i, j]) % p
    return basis


def left_nullspace_mod_p(m, p: int, rows: int | None = None) -> np.ndarray:
    """Rows spanning ``{x : x @ m = 0}`` over F_p."""
    A = as_mod(m, p)
    if A.size == 0:
        n = rows if rows is not None else A.shape[0]
        return np.eye(n, dtype=np.int64)
    return nullspace_mod_p(A.T, p)


def inverse_mod_p(m, p: int) -> np.ndarray:
    A = as_mod(m, p)
    n = A.shape[0]
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref_mod_p(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular mod %d" % p)
    return R[:, n:]


def nilpotency_index_mod_p(m, p: int) -> int | None:
    """Least ``N >= 1`` with ``m**N == 0`` mod p, or None if m is not nilpotent."""
    A = as_mod(m, p)
    n = A.shape[0]
    if n == 0:
        return 1
    P = A.copy()
    for k in range(1, n + 1):
        if not P.any():
            return k
        P = (P @ A) % p
    return None


def field_rank(m, p: int) -> int:
    """Rank over F_p, or over Q when ``p == 0``."""
    if p == 0:
        if isinstance(m, np.ndarray):
            m = m.tolist()
        return integer_rank(m)
    return rank_mod_p(m, p)


# ---------------------------------------------------------------------------
# small dense matrices over F_p (p > 0) or Q (p == 0), as Python lists


def _field_norm(x, p: int):
    from fractions import Fraction
    return x % p if p else Fraction(x)


def field_rref(m: Sequence[Sequence], p: int, cols: int | None = None):
    """Reduced row echelon form over F_p or Q; returns ``(rows, pivots)``."""
    from fractions import Fraction
    A = [[_field_norm(x, p) for x in row] for row in m]
    ncols = len(A[0]) if A else (cols or 0)
    R = []
    piv: List[int] = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(A)) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = pow(int(A[r][c]), -1, p) if p else 1 / A[r][c]
        A[r] = [(x * inv) % p if p else x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [((x - f * y) % p) if p else (x - f * y) for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], piv


def field_nullspace_left(m: Sequence[Sequence], p: int, rows: int) -> List[list]:
    """Basis of ``{x : x m = 0}`` (``m`` is rows x cols)."""
    if rows == 0:
        return []
    if not m or not m[0]:
        return [[_field_norm(int(i == j), p) for j in range(rows)] for i in range(rows)]
    mt = [list(c) for c in zip(*m)]  # cols x rows
    R, piv = field_rref(mt, p, rows)
    free = [j for j in range(rows) if j not in piv]
    out = []
    for j in free:
        v = [_field_norm(0, p) for _ in range(rows)]
        v[j] = _field_norm(1, p)
        for i, c in enumerate(piv):
            v[c] = (-R[i][j]) % p if p else -R[i][j]
        out.append(v)
    return out


def field_rank_small(m: Sequence[Sequence], p: int) -> int:
    if not m or not m[0]:
        return 0
    return len(field_rref(m, p)[1])


def field_matmul(a, b, p: int):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    acc[j] += x * bk[j]
        out.append([v % p for v in acc] if p else acc)
    return out


def field_inverse(m, p: int):
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    R, piv = field_rref(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


class Homology:
    """Homology of a chain complex of finite-dimensional vector spaces at one
    degree, with an explicit basis for computing induced maps.

    ``d_in`` maps degree n+1 to degree n and ``d_out`` maps degree n to n-1,
    both as matrices acting on row vectors.
    """

    def __init__(self, d_out, d_in, dim: int, p: int):
        self.p = p
        self.n = dim
        Z = field_nullspace_left(d_out, p, dim) if d_out and d_out[0] else \
            [[_field_norm(int(i == j), p) for j in range(dim)] for i in range(dim)]
        self.B, self.Bpiv = field_rref(d_in, p, dim) if d_in else ([], [])
        Zr = [self._reduce_B(z) for z in Z]
        Zr = [z for z in Zr if any(z)]
        self.H, self.Hpiv = field_rref(Zr, p, dim) if Zr else ([], [])

    def _reduce_B(self, v):
        v = list(v)
        for row, c in zip(self.B, self.Bpiv):
            f = v[c]
            if f:
                v = [((x - f * y) % self.p) if self.p else (x - f * y) for x, y in zip(v, row)]
        return v

    @property
    def dim(self) -> int:
        return len(self.H)

    def coordinates(self, v):
        r = self._reduce_B(v)
        coords = [r[c] for c in self.Hpiv]
        rest = list(r)
        for f, row in zip(coords, self.H):
            if f:
                rest = [((x - f * y) % self.p) if self.p else (x - f * y) for x, y in zip(rest, row)]
        if any(rest):
            raise ArithmeticError("vector is not a cycle")
        return coords

    def induced(self, chain_map) -> list:
        """Matrix (column convention) of the map induced by ``x -> x chain_map``."""
        cols = [self.coordinates(field_matmul([h], chain_map, self.p)[0]) for h in self.H]
        d = self.dim
        return [[cols[j][i] for j in range(d)] for i in range(d)]
