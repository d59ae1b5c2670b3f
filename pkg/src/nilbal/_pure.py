"""Pure Python/numpy versions of the hot kernels.

These mirror the compiled module function for function and are used when
the extension is missing or ``NILBAL_PURE`` is set.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np


class CosetLimitExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Todd-Coxeter (HLT with lookahead)


class _Table:
    def __init__(self, ncols: int, inv: Sequence[int], max_cosets: int):
        self.ncols = ncols
        self.inv = list(inv)
        self.max = max_cosets
        self.rows: List[List[int]] = [[-1] * ncols]
        self.parent: List[int] = [0]
        self.live = 1

    def rep(self, k: int) -> int:
        par = self.parent
        r = k
        while par[r] != r:
            r = par[r]
        while par[k] != r:
            par[k], k = r, par[k]
        return r

    def define(self, c: int, x: int) -> int:
        if self.live >= self.max:
            raise _Full()
        n = len(self.rows)
        self.rows.append([-1] * self.ncols)
        self.parent.append(n)
        self.live += 1
        self.rows[c][x] = n
        self.rows[n][self.inv[x]] = c
        return n

    def coincidence(self, a: int, b: int):
        rows, inv = self.rows, self.inv
        queue: List[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(self.ncols):
                f = rows[e][x]
                if f < 0:
                    continue
                rows[f][inv[x]] = -1
                e1, f1 = self.rep(e), self.rep(f)
                if rows[e1][x] >= 0:
                    self._merge(f1, self.rep(rows[e1][x]), queue)
                elif rows[f1][inv[x]] >= 0:
                    self._merge(e1, self.rep(rows[f1][inv[x]]), queue)
                else:
                    rows[e1][x] = f1
                    rows[f1][inv[x]] = e1

    def _merge(self, k: int, l: int, queue: List[int]):
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.parent[l] = k
        self.live -= 1
        queue.append(l)

    def is_live(self, c: int) -> bool:
        return self.parent[c] == c

    def scan(self, a: int, w: Sequence[int], fill: bool):
        rows, inv = self.rows, self.inv
        f, b = a, a
        i, j = 0, len(w) - 1
        while True:
            while i <= j and rows[f][w[i]] >= 0:
                f = rows[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and rows[b][inv[w[j]]] >= 0:
                b = rows[b][inv[w[j]]]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                rows[f][w[i]] = b
                rows[b][inv[w[i]]] = f
                return
            if not fill:
                return
            self.define(f, w[i])


class _Full(Exception):
    pass


def coset_enumerate(ngens: int, relators: Sequence[Sequence[int]], max_cosets: int) -> np.ndarray:
    """Enumerate cosets of the trivial subgroup.

    Relators are sequences of column indices (``2g`` for generator ``g``,
    ``2g+1`` for its inverse).  Returns the standardized coset table as an
    ``order x 2*ngens`` int64 array with coset 0 the identity.
    """
    ncols = 2 * ngens
    inv = [c ^ 1 for c in range(ncols)]
    T = _Table(ncols, inv, max_cosets)
    rels = sorted((list(r) for r in relators if len(r)), key=len)
    a = 0
    while a < len(T.rows):
        if T.is_live(a):
            try:
                for r in rels:
                    T.scan(a, r, True)
                    if not T.is_live(a):
                        break
                if T.is_live(a):
                    for x in range(ncols):
                        if T.rows[a][x] < 0:
                            T.define(a, x)
            except _Full:
                # lookahead: scan every live coset without defining
                for b in range(len(T.rows)):
                    if T.is_live(b):
                        for r in rels:
                            T.scan(b, r, False)
                            if not T.is_live(b):
                                break
                if T.live >= T.max:
                    raise CosetLimitExceeded("more than %d cosets" % max_cosets)
                continue  # retry the same coset
        a += 1
    return _standardize(T.rows, [T.is_live(c) for c in range(len(T.rows))], ncols)


def _standardize(rows, live, ncols: int) -> np.ndarray:
    order = {0: 0}
    seq = [0]
    k = 0
    while k < len(seq):
        c = seq[k]
        k += 1
        for x in range(ncols):
            d = rows[c][x]
            if d not in order:
                order[d] = len(seq)
                seq.append(d)
    out = np.empty((len(seq), ncols), dtype=np.int64)
    for new, old in enumerate(seq):
        out[new] = [order[d] for d in rows[old]]
    return out


# ---------------------------------------------------------------------------
# sparse rows -> fully reduced echelon basis over F_p


def rref_sparse_mod_p(indptr: np.ndarray, indices: np.ndarray, data: np.ndarray,
                      ncols: int, p: int, block: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """Fully reduced echelon basis of the row span of a sparse matrix mod p.

    Rows are processed in blocks: each block is reduced against the current
    basis with one dense product, the residual block is echelonized, and the
    new pivots are eliminated from the old basis.
    """
    nrows = len(indptr) - 1
    R = np.zeros((0, ncols), dtype=np.int64)
    piv: List[int] = []
    for start in range(0, nrows, block):
        stop = min(nrows, start + block)
        blk = np.zeros((stop - start, ncols), dtype=np.int64)
        lo, hi = indptr[start], indptr[stop]
        rix = np.repeat(np.arange(stop - start), np.diff(indptr[start:stop + 1]))
        np.add.at(blk, (rix, indices[lo:hi]), data[lo:hi])
        blk %= p
        if piv:
            coef = blk[:, piv]
            blk = (blk - _mulmod(coef, R, p)) % p
        blk = blk[blk.any(axis=1)]
        if blk.shape[0] == 0:
            continue
        newR, newpiv = _rref_dense(blk, p)
        if not newpiv:
            continue
        if piv:
            coef = R[:, newpiv]
            R = (R - _mulmod(coef, newR, p)) % p
        R = np.concatenate([R, newR], axis=0)
        piv = piv + newpiv
    order = np.argsort(piv, kind="stable") if piv else np.zeros(0, dtype=np.int64)
    return R[order], np.array(piv, dtype=np.int64)[order]


def _mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # exact in float64 while inner * (p-1)^2 < 2^53
    if a.shape[1] * (p - 1) ** 2 < 2 ** 52:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    return (a @ b) % p


def _rref_dense(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    A = A.copy()
    rows, cols = A.shape
    pivots: List[int] = []
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
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots
