"""The nine acceptance criteria, each run at full size against its time limit.

Every criterion prints one PASS/FAIL line; the lines are repeated in the
terminal summary at the end of the run.
"""

import time

import pytest

from nilbal.classify import (
    abelianization_isomorphic, catalog, check_not_balanced, gamma_presentation, gamma_tower,
    heisenberg_presentation, heisenberg_tower, metacyclic_presentation, omega_presentation,
    omega_tower, verify_cycboth, verify_euler, verify_oracle, verify_partial3, verify_semidirect,
    verify_theorem_h1, wang_identity_catalog,
)
from nilbal.extension import betti
from nilbal.fingroup import coset_enumerate

RESULTS = []


def report(number, title, ok, elapsed, limit, detail=""):
    line = "criterion %d %-28s %s  %.2fs (limit %ds)%s" % (
        number, title, "PASS" if ok else "FAIL", elapsed, limit, ("  " + detail) if detail else "")
    RESULTS.append(line)
    print(line)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_catalog_orders():
    ok = True
    times = []
    for args, order in [((3, 1, 0, 0), 27), ((3, 1, 1, 0), 243)]:
        with Timer() as t:
            G = coset_enumerate(metacyclic_presentation(*args))
        p, r, s, tt = args
        ok = ok and G.order == order == p ** (3 * r + 2 * s + tt) and t.elapsed < 1
        times.append(t.elapsed)
    report(1, "catalog orders", ok, max(times), 1, "orders 27, 243")
    assert ok


@pytest.mark.xfail(strict=True, reason=(
    "b2 = b0 fails for commuting unipotent modules such as X = I + E12, Y = I + E13 over F_2 "
    "(b0 = 2, b1 = 3, b2 = 1); only the Euler characteristic vanishes in general"))
def test_criterion_2_euler_duality():
    with Timer() as t:
        rep = verify_euler(trials=1000, primes=(2, 3, 5), seed=0, max_dim=8)
    ok = rep.ok and t.elapsed < 10
    report(2, "euler duality", ok, t.elapsed, 10,
           "%d of %d trials violate b2 = b0 or b1 = 2 b0; Euler characteristic nonzero in %d"
           % (len(rep.failures), rep.stats["trials"], rep.stats["euler_characteristic_nonzero"]))
    assert rep.stats["euler_characteristic_nonzero"] == 0
    assert ok


def test_criterion_3_wang_identity():
    with Timer() as t:
        rep = wang_identity_catalog()
    towers = {e.name for e in catalog() if e.tower is not None and e.tower.h >= 1}
    covered = {r["group_id"] for r in rep.records}
    ok = rep.ok and covered == towers and t.elapsed < 60
    report(3, "wang rank identity", ok, t.elapsed, 60,
           "%d towers, %d (tower, field) pairs" % (len(covered), len(rep.records)))
    assert ok, rep.summary()


def test_criterion_4_partial3():
    with Timer() as t:
        rep = verify_partial3(kmax=16)
    params = {(r["params"]["k"], r["params"]["f"], r["params"]["l"]) for r in rep.records}
    expected = {(k, f, l) for k in (8, 16) for f in range(1, k + 1) if k % f == 0
                for l in range(2, k) if l % 4 == 1}
    shape = all(r["beta2"] == r["beta1"] + 1 and (r["beta1"] == 2) == (r["params"]["f"] == 1)
                and r["fox_beta1"] == r["beta1"] for r in rep.records)
    ok = rep.ok and params == expected and shape and t.elapsed < 300
    report(4, "three-generator family", ok, t.elapsed, 300, "%d parameter triples" % len(params))
    assert ok, rep.summary()


def test_criterion_5_cycboth():
    with Timer() as t:
        rep = verify_cycboth(bound=32)
    ok = rep.ok and len(rep.records) > 0 and t.elapsed < 600
    report(5, "fixed-space sweep", ok, t.elapsed, 600,
           "%d distinct actions, %d class representatives" % (
               len(rep.records), rep.stats.get("automorphisms", 0)))
    assert ok, rep.summary()


def test_criterion_6_hirsch_one():
    with Timer() as t:
        rep = verify_theorem_h1(bound=64)
    ok = rep.ok and rep.stats["balanced"] > 0 and t.elapsed < 600
    report(6, "hirsch length one sweep", ok, t.elapsed, 600,
           "%d actions, %d balanced (all with cyclic T)" % (
               rep.stats["automorphisms"], rep.stats["balanced"]))
    assert ok, rep.summary()


def test_criterion_7_semidirect():
    with Timer() as t:
        rep = verify_semidirect(mmax=100, nmax=50)
    ok = rep.ok and t.elapsed < 30
    report(7, "semidirect nilpotency", ok, t.elapsed, 30,
           "%d pairs, %d coset-enumerated quotients" % (rep.stats["pairs"], rep.stats["quotients"]))
    assert ok, rep.summary()


def test_criterion_8_witnesses():
    ok = True
    with Timer() as t:
        for p in (2, 3, 5):
            tower = heisenberg_tower(p)
            ok = ok and abelianization_isomorphic(heisenberg_presentation(p), tower.presentation())
            r = betti(tower)
            ok = ok and r.verdict == "not-homologically-balanced" and r.witness == p
        for q in range(1, 11):
            tower = gamma_tower(q)
            ok = ok and abelianization_isomorphic(gamma_presentation(q), tower.presentation())
            r = betti(tower)
            ok = ok and r.verdict == "balanced-consistent" and (r.beta1_Q, r.beta2_Q) == (2, 2)
        tower = omega_tower()
        ok = ok and abelianization_isomorphic(omega_presentation(), tower.presentation())
        r = betti(tower)
        ok = ok and r.verdict == "balanced-consistent" and (r.beta1_Q, r.beta2_Q) == (2, 2)
        for e in catalog():
            if e.name.startswith(("Heis", "Gamma", "Omega")):
                ok = ok and check_not_balanced(e)[1]
    ok = ok and t.elapsed < 60
    report(8, "non-balance witnesses", ok, t.elapsed, 60)
    assert ok


def test_criterion_9_oracle_coherence():
    with Timer() as t:
        rep = verify_oracle(bound=32)
    ok = rep.ok and t.elapsed < 300
    report(9, "oracle coherence", ok, t.elapsed, 300, "%d (group, prime) pairs" % len(rep.records))
    assert ok, rep.summary()
