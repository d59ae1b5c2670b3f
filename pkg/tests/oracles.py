"""Independent reference computations used only by the tests.

Nothing here imports the package's linear algebra or group code, so a bug in
the library cannot also hide in its oracle.
"""

from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations, product
from math import gcd


def det(m):
    """Exact determinant by Fraction elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return int(d)


def determinantal_invariant_factors(m):
    """Invariant factors from gcds of k x k minors (d_k = D_k / D_{k-1})."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def rank_mod_p_bruteforce(m, p):
    """Rank over F_p by counting the kernel of x -> m x (small sizes only)."""
    cols = len(m[0]) if m else 0
    kernel = 0
    for v in product(range(p), repeat=cols):
        if all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in m):
            kernel += 1
    dim = 0
    while p ** dim < kernel:
        dim += 1
    return cols - dim


def quaternion_times_cyclic(a):
    """Multiplication table of Q(8) x Z/a with elements (q, c)."""
    # Q8 as pairs (sign, unit) with units 1, i, j, k
    table = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    q8 = [(s, u) for s in (1, -1) for u in "1ijk"]
    elems = [(q, c) for q in q8 for c in range(a)]
    idx = {e: i for i, e in enumerate(elems)}

    def mul(x, y):
        (s1, u1), c1 = x
        (s2, u2), c2 = y
        s, u = table[(u1, u2)]
        return ((s * s1 * s2, u), (c1 + c2) % a)

    return [[idx[mul(x, y)] for y in elems] for x in elems]


def symmetric_group_table(n):
    perms = list(permutations(range(n)))
    idx = {p: i for i, p in enumerate(perms)}
    return [[idx[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]


def table_order_closure(table, gens):
    seen = {0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = table[x][g]
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return len(seen)


def abelian_h2_fp_dim(orders, p):
    """dim H_2(A; F_p) for a finite abelian A by the Kunneth formula over F_p.

    For a cyclic group C of order d: H_i(C; F_p) is F_p for every i when
    p | d and vanishes in positive degrees otherwise.  Order 0 stands for Z,
    whose homology is F_p in degrees 0 and 1.
    """
    polys = []
    for d in orders:
        if d == 0:
            polys.append([1, 1, 0])
        elif d % p == 0:
            polys.append([1, 1, 1])
        else:
            polys.append([1, 0, 0])
    total = reduce(lambda a, b: [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(3)],
                   polys, [1, 0, 0])
    return total[2]


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def mat_inv(a):
    """Exact inverse of an integer matrix with determinant +-1."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [[int(x) for x in row[n:]] for row in m]


def mat_pow(a, e):
    n = len(a)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = a if e >= 0 else mat_inv(a)
    for _ in range(abs(e)):
        result = mat_mul(result, base)
    return result
