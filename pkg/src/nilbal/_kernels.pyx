# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Todd-Coxeter enumeration and sparse mod-p elimination."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset

from ._pure import CosetLimitExceeded

cnp.import_array()


cdef class _Table:
    cdef int *rows
    cdef int *parent
    cdef int *queue
    cdef Py_ssize_t nrows, cap, qcap
    cdef int ncols, live, maxc

    def __cinit__(self, int ncols, int maxc):
        self.ncols = ncols
        self.maxc = maxc
        self.cap = 1024
        self.rows = <int*>malloc(self.cap * ncols * sizeof(int))
        self.parent = <int*>malloc(self.cap * sizeof(int))
        self.qcap = 1024
        self.queue = <int*>malloc(self.qcap * sizeof(int))
        if not self.rows or not self.parent or not self.queue:
            raise MemoryError()
        cdef int x
        for x in range(ncols):
            self.rows[x] = -1
        self.parent[0] = 0
        self.nrows = 1
        self.live = 1

    def __dealloc__(self):
        free(self.rows)
        free(self.parent)
        free(self.queue)

    cdef inline int rep(self, int k):
        cdef int r = k, t
        while self.parent[r] != r:
            r = self.parent[r]
        while self.parent[k] != r:
            t = self.parent[k]
            self.parent[k] = r
            k = t
        return r

    cdef int define(self, int c, int x) except -2:
        cdef Py_ssize_t n
        cdef int y
        if self.live >= self.maxc:
            return -1
        if self.nrows == self.cap:
            self.cap *= 2
            self.rows = <int*>realloc(self.rows, self.cap * self.ncols * sizeof(int))
            self.parent = <int*>realloc(self.parent, self.cap * sizeof(int))
            if not self.rows or not self.parent:
                raise MemoryError()
        n = self.nrows
        self.nrows += 1
        for y in range(self.ncols):
            self.rows[n * self.ncols + y] = -1
        self.parent[n] = <int>n
        self.live += 1
        self.rows[c * self.ncols + x] = <int>n
        self.rows[n * self.ncols + (x ^ 1)] = c
        return <int>n

    cdef int push(self, int l, Py_ssize_t *qlen) except -1:
        if qlen[0] == self.qcap:
            self.qcap *= 2
            self.queue = <int*>realloc(self.queue, self.qcap * sizeof(int))
            if not self.queue:
                raise MemoryError()
        self.queue[qlen[0]] = l
        qlen[0] += 1
        return 0

    cdef int merge(self, int k, int l, Py_ssize_t *qlen) except -1:
        cdef int t
        k = self.rep(k)
        l = self.rep(l)
        if k == l:
            return 0
        if k > l:
            t = k; k = l; l = t
        self.parent[l] = k
        self.live -= 1
        self.push(l, qlen)
        return 0

    cdef int coincidence(self, int a, int b) except -1:
        cdef Py_ssize_t qlen = 0, i = 0
        cdef int e, f, x, e1, f1, nc = self.ncols
        cdef int *rows
        self.merge(a, b, &qlen)
        while i < qlen:
            e = self.queue[i]
            i += 1
            rows = self.rows
            for x in range(nc):
                f = rows[e * nc + x]
                if f < 0:
                    continue
                rows[f * nc + (x ^ 1)] = -1
                e1 = self.rep(e)
                f1 = self.rep(f)
                if rows[e1 * nc + x] >= 0:
                    self.merge(f1, self.rep(rows[e1 * nc + x]), &qlen)
                elif rows[f1 * nc + (x ^ 1)] >= 0:
                    self.merge(e1, self.rep(rows[f1 * nc + (x ^ 1)]), &qlen)
                else:
                    rows[e1 * nc + x] = f1
                    rows[f1 * nc + (x ^ 1)] = e1
        return 0

    cdef int scan(self, int a, int *w, int length, bint fill) except -2:
        """Returns 0 normally, -1 when a definition was refused (table full)."""
        cdef int f = a, b = a, i = 0, j = length - 1, nc = self.ncols, d
        while True:
            while i <= j and self.rows[f * nc + w[i]] >= 0:
                f = self.rows[f * nc + w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return 0
            while j >= i and self.rows[b * nc + (w[j] ^ 1)] >= 0:
                b = self.rows[b * nc + (w[j] ^ 1)]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return 0
            if i == j:
                self.rows[f * nc + w[i]] = b
                self.rows[b * nc + (w[i] ^ 1)] = f
                return 0
            if not fill:
                return 0
            d = self.define(f, w[i])
            if d < 0:
                return -1


def coset_enumerate(int ngens, relators, int max_cosets):
    """Enumerate cosets of the trivial subgroup (see the pure version)."""
    cdef int ncols = 2 * ngens
    cdef _Table T = _Table(ncols, max_cosets)
    rels = sorted([list(r) for r in relators if len(r)], key=len)
    cdef Py_ssize_t nrel = len(rels), total = sum(len(r) for r in rels)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] flat = np.zeros(max(total, 1), dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] offs = np.zeros(nrel + 1, dtype=np.int32)
    cdef Py_ssize_t k, pos = 0
    for k in range(nrel):
        offs[k] = pos
        for v in rels[k]:
            flat[pos] = v
            pos += 1
    offs[nrel] = pos
    cdef int *w = <int*>flat.data
    cdef int *o = <int*>offs.data
    cdef Py_ssize_t a = 0, b
    cdef int x, status
    cdef bint full
    while a < T.nrows:
        if T.parent[a] != a:
            a += 1
            continue
        full = False
        for k in range(nrel):
            status = T.scan(<int>a, w + o[k], o[k + 1] - o[k], True)
            if status < 0:
                full = True
                break
            if T.parent[a] != a:
                break
        if not full and T.parent[a] == a:
            for x in range(ncols):
                if T.rows[a * ncols + x] < 0:
                    if T.define(<int>a, x) < 0:
                        full = True
                        break
        if full:
            for b in range(T.nrows):
                if T.parent[b] == b:
                    for k in range(nrel):
                        T.scan(<int>b, w + o[k], o[k + 1] - o[k], False)
                        if T.parent[b] != b:
                            break
            if T.live >= T.maxc:
                raise CosetLimitExceeded("more than %d cosets" % max_cosets)
            continue
        a += 1
    # standardize by breadth-first order from coset 0
    cdef Py_ssize_t n = T.nrows
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] seq = np.zeros(T.live, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 1, c, d
    order[0] = 0
    seq[0] = 0
    while head < tail:
        c = seq[head]
        head += 1
        for x in range(ncols):
            d = T.rows[c * ncols + x]
            if order[d] < 0:
                order[d] = tail
                seq[tail] = d
                tail += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((tail, ncols), dtype=np.int64)
    for c in range(tail):
        for x in range(ncols):
            out[c, x] = order[T.rows[seq[c] * ncols + x]]
    return out


def rref_sparse_mod_p(cnp.ndarray indptr_, cnp.ndarray indices_, cnp.ndarray data_,
                      int ncols, int p, int block=256):
    """Fully reduced echelon basis of the row span of a sparse matrix mod p.

    Row-at-a-time: a fully reduced basis has zeros in the other pivot
    columns, so a sparse row is reduced by touching only the pivot rows of
    its own support.
    """
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr = np.ascontiguousarray(indptr_, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indices = np.ascontiguousarray(indices_, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] data = np.ascontiguousarray(data_, dtype=np.int64)
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef Py_ssize_t cap = min(nrows, ncols) if nrows > 0 else 0
    cdef cnp.ndarray[cnp.int64_t, ndim=2] R = np.zeros((max(cap, 1), max(ncols, 1)), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivrow = np.full(max(ncols, 1), -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivcol = np.zeros(max(cap, 1), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] v = np.zeros(max(ncols, 1), dtype=np.int64)
    cdef Py_ssize_t rank = 0, r, t, j, q, i
    cdef long long coef, inv, c, x
    for r in range(nrows):
        if rank == ncols:
            break
        for t in range(indptr[r], indptr[r + 1]):
            j = indices[t]
            v[j] = (v[j] + data[t]) % p
            if v[j] < 0:
                v[j] += p
        # eliminate existing pivots found in the support
        for t in range(indptr[r], indptr[r + 1]):
            j = indices[t]
            i = pivrow[j]
            if i >= 0 and v[j] != 0:
                coef = v[j]
                for q in range(ncols):
                    x = R[i, q]
                    if x:
                        v[q] = (v[q] - coef * x) % p
                        if v[q] < 0:
                            v[q] += p
        q = -1
        for j in range(ncols):
            if v[j]:
                q = j
                break
        if q < 0:
            continue
        inv = pow(int(v[q]), p - 2, p)
        for j in range(ncols):
            if v[j]:
                v[j] = (v[j] * inv) % p
        # clear column q in the existing rows
        for i in range(rank):
            c = R[i, q]
            if c:
                for j in range(q, ncols):
                    x = v[j]
                    if x:
                        R[i, j] = (R[i, j] - c * x) % p
                        if R[i, j] < 0:
                            R[i, j] += p
        for j in range(ncols):
            R[rank, j] = v[j]
            v[j] = 0
        pivrow[q] = rank
        pivcol[rank] = q
        rank += 1
    order = np.argsort(pivcol[:rank], kind="stable")
    return R[:rank][order], pivcol[:rank][order]
