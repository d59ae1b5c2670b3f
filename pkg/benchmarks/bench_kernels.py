"""Compare the compiled kernels with the pure numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from nilbal import _pure
from nilbal.classify import metacyclic_presentation, metabelian_torsion_presentation

try:
    from nilbal import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None


def relator_columns(pres):
    return [[2 * g + (0 if s > 0 else 1) for g, s in r.syllables()] for r in pres.relators]


def coset_cases():
    return [
        ("metacyclic order 243", metacyclic_presentation(3, 1, 1, 0)),
        ("metacyclic order 729", metacyclic_presentation(3, 1, 1, 1)),
        ("T_9 order 729", metabelian_torsion_presentation(9)),
    ]


def random_csr(rows, cols, density, seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((rows, cols)) < density
    vals = rng.integers(1, 7, size=(rows, cols)) * mask
    indptr = np.concatenate([[0], np.cumsum(mask.sum(axis=1))]).astype(np.int64)
    r, c = np.nonzero(mask)
    return indptr, c.astype(np.int64), vals[r, c].astype(np.int64)


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; nothing to compare")
        return
    print("%-32s %12s %12s %8s" % ("case", "compiled s", "pure s", "speedup"))
    for name, pres in coset_cases():
        rels = relator_columns(pres)
        a = compiled.coset_enumerate(pres.ngens, rels, 10 ** 6)
        b = _pure.coset_enumerate(pres.ngens, rels, 10 ** 6)
        assert (a == b).all()
        tc = bench(lambda: compiled.coset_enumerate(pres.ngens, rels, 10 ** 6), args.repeat)
        tp = bench(lambda: _pure.coset_enumerate(pres.ngens, rels, 10 ** 6), args.repeat)
        print("%-32s %12.4f %12.4f %7.1fx" % ("coset " + name, tc, tp, tp / tc))
    for rows, cols in [(600, 400), (2000, 900)]:
        csr = random_csr(rows, cols, 0.01, rows)
        for p in (2, 7):
            ra, pa = compiled.rref_sparse_mod_p(*csr, cols, p)
            rb, pb = _pure.rref_sparse_mod_p(*csr, cols, p)
            assert list(pa) == list(pb)
            tc = bench(lambda: compiled.rref_sparse_mod_p(*csr, cols, p), args.repeat)
            tp = bench(lambda: _pure.rref_sparse_mod_p(*csr, cols, p), args.repeat)
            print("%-32s %12.4f %12.4f %7.1fx" % ("rref %dx%d mod %d" % (rows, cols, p), tc, tp, tp / tc))


if __name__ == "__main__":
    main()
