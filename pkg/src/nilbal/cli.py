"""Command line interface: ``nilbal <command> ...``.

Exit codes: 0 success, 1 error or failed verification, 2 failed
``--assert-balanced``.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from math import gcd
from typing import Dict, List, Optional, Sequence

from . import classify, fingroup, presentation
from .abelian import abelianize, is_prime, prime_factors
from .extension import PcTower, betti, fox_lyndon_check
from .fingroup import CosetLimitExceeded, SizeLimit
from .presentation import ParseError

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
PARAM_FLAGS = ("q", "k", "f", "l", "m", "n", "r", "s", "t", "a")


class CliError(Exception):
    pass


def parse_range(text: Optional[str]) -> List[int]:
    """``"3"``, ``"1..20"``, ``"-5..5"`` or a comma list of those."""
    if text is None:
        return []
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def resolve_path(path: str) -> str:
    if os.path.exists(path):
        return path
    alt = os.path.join(DATA_DIR, path)
    if os.path.exists(alt):
        return alt
    raise CliError("no such file: %s" % path)


def collect_params(args) -> Dict[str, int]:
    params = {}
    for name in PARAM_FLAGS:
        v = getattr(args, name, None)
        if v is not None:
            params[name] = v
    for item in getattr(args, "param", None) or []:
        if "=" not in item:
            raise CliError("--param expects NAME=VALUE, got %r" % item)
        k, v = item.split("=", 1)
        params[k.strip()] = int(v)
    return params


def emit(args, payload, text: str):
    if args.json:
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _fmt_beta(beta: Dict) -> str:
    lines = []
    for p in sorted(beta, key=lambda x: (x != "Q", int(x) if x != "Q" else 0)):
        b1, b2 = beta[p]
        lines.append("  %-3s beta1=%d beta2=%d" % ("Q" if p in ("Q", 0) else "F%s" % p, b1, b2))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# betti


def finite_group_report(pres, primes: Sequence[int], max_cosets: int, bar_limit: int) -> dict:
    """Betti numbers of a finite presented group (order certified by enumeration)."""
    try:
        G = fingroup.coset_enumerate(pres, max_cosets)
    except CosetLimitExceeded:
        raise CliError("coset enumeration exceeded %d cosets; the group is not certified finite"
                       % max_cosets)
    A = abelianize(pres)
    ps = sorted(set(primes) | set(prime_factors(G.order)))
    beta = {"Q": [0, 0]}
    cert = classify.h2_vanishing_certificate(pres)
    routes = {}
    undetermined = False
    for p in ps:
        if G.order <= bar_limit:
            b1, b2 = classify.finite_presentation_betti(G, p, bar_limit)
            routes[str(p)] = "bar"
        else:
            b1 = sum(1 for d in A.invariant_factors if d % p == 0)
            if cert:
                # H_2(G; Z) = 0, so H_2(G; F_p) = Tor(H_1(G), F_p)
                b2 = b1
                routes[str(p)] = "certificate"
            else:
                b2 = None
                undetermined = True
                routes[str(p)] = "unavailable"
        beta[str(p)] = [b1, b2]
    bad = [int(p) for p, (b1, b2) in beta.items() if p != "Q" and b2 is not None and b2 > b1]
    verdict = ("not-homologically-balanced" if bad else
               "undetermined" if undetermined else "balanced-consistent")
    return {"group": pres.name, "order": G.order, "abelianization": A.to_json(),
            "nilpotency_class": G.lower_central_series().nilpotency_class,
            "h2_certificate": cert, "beta": beta, "routes": routes,
            "verdict": verdict, "witness": min(bad) if bad else None}


def cmd_betti(args) -> int:
    path = resolve_path(args.input)
    params = collect_params(args)
    primes = args.prime or []
    if path.endswith(".grp"):
        pres = presentation.load(path, params)
        report = finite_group_report(pres, primes, args.max_cosets, args.bar_limit)
        text = "%s: order %d, abelianization %s\n%s\nverdict: %s%s" % (
            report["group"] or path, report["order"],
            abelianize(pres), _fmt_beta({k: [v[0], v[1] if v[1] is not None else -1]
                                         for k, v in report["beta"].items()}),
            report["verdict"], " (witness p=%s)" % report["witness"] if report["witness"] else "")
    else:
        t = PcTower.load(path, params)
        rep = betti(t, primes or None)
        report = rep.to_json()
        text = "%s: Hirsch length %d, nilpotent %s\n%s\nH1 = %s, H2 = %s\nverdict: %s%s" % (
            rep.tower, rep.hirsch_length, rep.nilpotent, _fmt_beta(report["beta"]),
            rep.integral_H1, rep.integral_H2, rep.verdict,
            " (witness %s)" % ("Q" if rep.witness == 0 else "p=%d" % rep.witness)
            if rep.witness is not None else "")
    emit(args, report, text)
    if args.assert_balanced and report["verdict"] != "balanced-consistent":
        return 2
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    th = args.theorem
    jobs = args.jobs
    if th == "h1":
        rep = classify.verify_theorem_h1(args.bound or 64, jobs, args.bar_limit)
    elif th == "cycboth":
        rep = classify.verify_cycboth(args.bound or 32, jobs, args.bar_limit)
    elif th == "oracle":
        rep = classify.verify_oracle(args.bound or 32, jobs, args.bar_limit)
    elif th == "partial3":
        rep = classify.verify_partial3(args.kmax, jobs)
    elif th == "euler":
        rep = classify.verify_euler(args.trials, tuple(args.prime or (2, 3, 5)), args.seed)
    elif th == "catalog":
        rep = classify.verify_catalog(max_cosets=args.max_cosets)
    elif th == "wang":
        rep = classify.wang_identity_catalog()
    elif th == "semidirect":
        rep = classify.verify_semidirect(args.mmax, args.nmax, jobs, args.max_cosets)
    else:  # pragma: no cover - argparse restricts the choices
        raise CliError("unknown theorem %s" % th)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(rep.jsonl())
    if args.json:
        payload = {"name": rep.name, "records": len(rep.records), "failures": rep.failures,
                   "stats": rep.stats, "notes": rep.notes}
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stdout.write(rep.summary() + "\n")
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# enum


def _enum_semidirect(args) -> List[dict]:
    out = []
    for m in parse_range(args.m):
        for n in parse_range(args.n):
            if m < 1 or gcd(m, n) != 1:
                continue
            nil, e = classify.semidirect_nilpotent(m, n)
            A = abelianize(classify.semidirect_presentation(m, n))
            out.append({"family": "semidirect", "params": {"m": m, "n": n}, "nilpotent": nil,
                        "e": e, "order": None, "abelianization": A.to_json(),
                        # the presentation <a, t | a^m, t a t^-1 a^-n> is balanced
                        "verdict": "balanced-consistent"})
    return out


def _finite_record(family: str, params: dict, pres, args) -> dict:
    rep = finite_group_report(pres, [], args.max_cosets, args.bar_limit)
    return {"family": family, "params": params, "nilpotent": rep["nilpotency_class"] is not None,
            "order": rep["order"], "abelianization": rep["abelianization"],
            "verdict": rep["verdict"], "h2_certificate": rep["h2_certificate"]}


def _enum_metacyclic(args) -> List[dict]:
    out = []
    for p in parse_range(args.p):
        if not is_prime(p):
            raise CliError("%d is not prime" % p)
        for r in parse_range(args.r):
            for s in parse_range(args.s):
                for t in parse_range(args.t):
                    pres = classify.metacyclic_presentation(p, r, s, t)
                    rec = _finite_record("metacyclic", {"p": p, "r": r, "s": s, "t": t}, pres, args)
                    rec["expected_order"] = p ** (3 * r + 2 * s + t)
                    out.append(rec)
    return out


def _enum_q8k(args) -> List[dict]:
    out = []
    for k in parse_range(args.k):
        for a in parse_range(args.a or "1"):
            if gcd(a, 2 * k) != 1:
                continue
            try:
                s = classify.q8k_parameter(k, a)
            except ValueError:
                out.append({"family": "q8k", "params": {"k": k, "a": a}, "order": None,
                            "verdict": "undetermined", "note": "no exponent s for this presentation"})
                continue
            rec = _finite_record("q8k", {"k": k, "a": a, "s": s}, classify.q8k_presentation(k, a), args)
            rec["expected_order"] = 8 * k * a
            out.append(rec)
    return out


def cmd_enum(args) -> int:
    fam = args.family
    rows = {"semidirect": _enum_semidirect, "metacyclic": _enum_metacyclic, "q8k": _enum_q8k}[fam](args)
    rows.sort(key=lambda r: tuple(v for _, v in sorted(r["params"].items())))
    if args.json:
        sys.stdout.write("".join(json.dumps(r, sort_keys=True) + "\n" for r in rows))
    else:
        for r in rows:
            ps = " ".join("%s=%s" % kv for kv in sorted(r["params"].items()))
            sys.stdout.write("%-28s nilpotent=%-5s order=%-6s %s\n" % (
                ps, r.get("nilpotent"), r.get("order"), r.get("verdict")))
    return 0


# ---------------------------------------------------------------------------
# small utilities


def cmd_coset_enum(args) -> int:
    pres = presentation.load(resolve_path(args.input), collect_params(args))
    try:
        G = fingroup.coset_enumerate(pres, args.max_cosets)
    except CosetLimitExceeded as e:
        raise CliError(str(e))
    lcs = G.lower_central_series()
    payload = {"group": pres.name, "order": G.order, "nilpotent": lcs.is_nilpotent,
               "nilpotency_class": lcs.nilpotency_class,
               "lower_central_series": [len(t) for t in lcs.terms]}
    emit(args, payload, "order %d, nilpotent %s%s" % (
        G.order, lcs.is_nilpotent,
        ", class %d" % lcs.nilpotency_class if lcs.is_nilpotent else ""))
    return 0


def cmd_abelianize(args) -> int:
    pres = presentation.load(resolve_path(args.input), collect_params(args))
    A = abelianize(pres)
    bal = presentation.balance_accounting(pres)
    payload = {"group": pres.name, "abelianization": A.to_json(), "generators": bal.generators,
               "relators": bal.relators, "deficiency": bal.deficiency, "balanced": bal.balanced}
    emit(args, payload, "%s (deficiency %d)" % (A, bal.deficiency))
    return 0


def render_ring(el, names: Sequence[str]) -> str:
    if not el.terms:
        return "0"
    parts = []
    for w, c in sorted(el.terms.items(), key=lambda wc: (len(wc[0].letters), wc[0].letters)):
        ws = w.render(names) if w.letters else "1"
        parts.append(ws if c == 1 else "-" + ws if c == -1 else "%d*%s" % (c, ws))
    return " + ".join(parts).replace("+ -", "- ")


def cmd_fox(args) -> int:
    pres = presentation.load(resolve_path(args.input), collect_params(args))
    names = pres.generator_names
    J = pres.fox_jacobian()
    rows = [[render_ring(e, names) for e in row] for row in J]
    payload = {"group": pres.name, "generators": list(names), "jacobian": rows}
    lines = []
    for r, row in zip(pres.relators, rows):
        lines.append("%s:" % r.render(names))
        for g, e in zip(names, row):
            lines.append("  d/d%s = %s" % (g, e))
    for p in args.prime or []:
        E = presentation.epsilon_p_jacobian(pres, p).tolist()
        payload.setdefault("epsilon", {})[str(p)] = E
        lines.append("epsilon_%d: %s" % (p, E))
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_partial3(args) -> int:
    rec = fox_lyndon_check(args.k, args.f, args.l)
    payload = {"k": rec.k, "f": rec.f, "l": rec.l, "m": rec.m, "w": rec.w, "beta1": rec.beta1,
               "kernel_dim": rec.kernel_dim, "eps2": rec.eps2_matrix, "checks": rec.checks}
    emit(args, payload, "\n".join(["%s: %s" % kv for kv in sorted(rec.checks.items())]))
    return 0 if rec.ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.add_argument("--jobs", type=int, help="worker processes for sweeps (default $NILBAL_JOBS or 1)")
    c.add_argument("--max-cosets", type=int, help="coset enumeration limit")
    c.add_argument("--bar-limit", type=int, help="largest group order for the bar complex")
    c.add_argument("-p", "--prime", type=int, action="append", help="prime (repeatable)")
    return c


def _params(sp: argparse.ArgumentParser):
    for name in PARAM_FLAGS:
        sp.add_argument("--" + name, type=int, default=None, help=argparse.SUPPRESS)
    sp.add_argument("--param", action="append", metavar="NAME=VALUE", help="integer parameter")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="nilbal", parents=[common],
                                 description="Homology of nilpotent groups and balance checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("betti", parents=[common], help="Betti numbers of a .grp or .tower input")
    b.add_argument("input")
    b.add_argument("--assert-balanced", action="store_true")
    _params(b)
    b.set_defaults(func=cmd_betti)

    v = sub.add_parser("verify", parents=[common], help="run an exhaustive verifier")
    v.add_argument("theorem", choices=["h1", "cycboth", "partial3", "euler", "catalog",
                                       "wang", "semidirect", "oracle"])
    v.add_argument("--bound", type=int, default=None)
    v.add_argument("--kmax", type=int, default=16)
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--mmax", type=int, default=100)
    v.add_argument("--nmax", type=int, default=50)
    v.add_argument("-o", "--output", help="write JSON-lines records here")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("enum", parents=[common], help="list a parametrized family")
    e.add_argument("family", choices=["semidirect", "metacyclic", "q8k"])
    for name in ("m", "n", "p", "r", "s", "t", "k", "a"):
        e.add_argument("--" + name, default=None, help="range such as 1..20")
    e.set_defaults(func=cmd_enum)

    for cname, func, hlp in (("coset-enum", cmd_coset_enum, "order and nilpotency of a finite group"),
                             ("abelianize", cmd_abelianize, "abelianization of a presentation"),
                             ("fox", cmd_fox, "Fox Jacobian of a presentation")):
        s = sub.add_parser(cname, parents=[common], help=hlp)
        s.add_argument("input")
        _params(s)
        s.set_defaults(func=func)

    f = sub.add_parser("partial3", parents=[common], help="Fox-Lyndon checks for G(k,f,l)")
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--f", type=int, required=True)
    f.add_argument("--l", type=int, required=True)
    f.set_defaults(func=cmd_partial3)
    return ap


DEFAULTS = {"json": False, "jobs": None, "max_cosets": fingroup.DEFAULT_MAX_COSETS,
            "bar_limit": fingroup.BAR_LIMIT, "prime": None}


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ``--n -5..5`` into ``--n=-5..5`` so argparse accepts it."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and re.match(r"-\d", nxt):
            out.append("%s=%s" % (tok, nxt))
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = ap.parse_args(_join_negative_values(argv))
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.jobs is None:
        args.jobs = classify.default_jobs()
    try:
        for p in args.prime or []:
            if not is_prime(p):
                raise CliError("%d is not prime" % p)
        if args.max_cosets <= 0 or args.bar_limit <= 0 or args.jobs <= 0:
            raise CliError("limits must be positive")
        return args.func(args)
    except (CliError, ParseError, SizeLimit, ValueError, OSError) as e:
        sys.stderr.write("nilbal: error: %s\n" % e)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
