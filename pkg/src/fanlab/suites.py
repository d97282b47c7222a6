"""Batch verification suites and the reports they produce.

``run_suite(name, config)`` returns a plain dict (the run report).  Apart from
the ``timing`` field the report is a deterministic function of the config:
every random corpus is drawn from ``random.Random(seed)``.
"""

from __future__ import annotations

import math
import random
import time

from mpmath import iv

from . import counterexample as cx
from .dynamics import prop6_sandwich, t_min_at_depth, t_min_enclosure
from .errors import FanlabError, InvalidInstance
from .intervals import hi, working_precision
from .itinerary import Entry, ItinerarySeq, PeriodicTail, magnitude_at, t_star
from .sigma import ErdosPoint, SigmaPoint, in_En, in_Kn, l2_norm
from .strata import canonical_xn_point, claim8_inequality, prop7_check, prop7_valid
from .tower import Lit, compare, fapp, inc, precision_audit, to_interval

SUITES = ("prop6", "prop7", "claim8", "claim9", "sigma", "tower-oracle")


# --- corpora -------------------------------------------------------------------


def random_numeric_sequence(rng, max_mag=9, support=12, span=16, periodic=False):
    """Finite support of at most ``support`` entries in positions 1..span, magnitudes <= max_mag."""
    k = rng.randint(0, support)
    pos = sorted(rng.sample(range(1, span + 1), k))
    prefix = tuple(Entry(p, rng.randint(1, max_mag)) for p in pos)
    tail = None
    if periodic and rng.random() < 0.3:
        tail = PeriodicTail(tuple(rng.randint(0, max_mag) for _ in range(rng.randint(1, 3))))
    return ItinerarySeq(prefix, tail) if tail else ItinerarySeq(prefix)


def sequence_corpus(count=1000, seed=0, **kw):
    rng = random.Random(seed)
    return [random_numeric_sequence(rng, **kw) for _ in range(count)]


def dominated_pair(rng, max_mag=9, support=12, span=16):
    """(small, big) with |small_i| <= |big_i| at every position."""
    big = random_numeric_sequence(rng, max_mag, support, span)
    small = []
    for e in big.prefix:
        v = rng.randint(0, e.mag.n)
        if v:
            small.append(Entry(e.pos, v))
    return ItinerarySeq(tuple(small)), big


def oracle_trees(levels=3, lit_max=5, inc_max=2):
    """Raw expression trees ``(q, (c_1, ..., c_L))`` meaning F(...F(F(q) + c_1) + c_2 ...) + c_L."""
    layer = [(q, ()) for q in range(lit_max + 1)]
    out = list(layer)
    for _ in range(levels):
        layer = [(q, cs + (c,)) for q, cs in layer for c in range(-inc_max, inc_max + 1)]
        out.extend(layer)
    return out


def oracle_key(tree, guard=20000):
    """Order key computed from plain integers, independent of the tower module.

    Returns ``(0, value)`` when every step is small enough to evaluate.  When
    the last exponent a exceeds ``guard`` the key is ``(1, a, c)`` for
    3^a - 1 + c: such values exceed every evaluated one, and two of them
    are ordered by a first because 3^(a+1) - 3^a dwarfs any |c| <= 2.
    Returns None for trees that go negative.
    """
    q, cs = tree
    v = q
    for i, c in enumerate(cs):
        if v > guard:
            if i != len(cs) - 1:
                raise ValueError("oracle cannot order nested huge values")
            return (1, v, c)
        v = 3**v - 1 + c
        if v < 0:
            return None
    return (0, v, 0)


def build_tree(tree):
    q, cs = tree
    e = Lit(q)
    for c in cs:
        e = fapp(e, 1)
        if c:
            e = inc(e, c)
    return e


def oracle_corpus(levels=3, lit_max=5, inc_max=2):
    """Distinct canonical expressions paired with their oracle keys."""
    out = {}
    for tree in oracle_trees(levels, lit_max, inc_max):
        key = oracle_key(tree)
        if key is None:
            continue
        e = build_tree(tree)
        prev = out.setdefault(e, key)
        if prev != key:
            raise AssertionError(f"canonical form {e} has two oracle values")
    return list(out.items())


def random_erdos_point(rng, max_pos=8, max_den=6, max_support=5):
    k = rng.randint(0, max_support)
    pos = rng.sample(range(max_pos), k)
    return ErdosPoint(tuple((p, rng.randint(1, max_den)) for p in pos))


def random_sigma_point(rng, max_coords=5):
    return SigmaPoint(tuple(random_erdos_point(rng) for _ in range(rng.randint(0, max_coords))))


# --- suites --------------------------------------------------------------------


def _check(name, ok, **detail):
    d = {"name": name, "ok": bool(ok)}
    d.update(detail)
    return d


def suite_tower_oracle(cfg):
    corpus = oracle_corpus(cfg.get("levels", 3), cfg.get("lit_max", 5), cfg.get("inc_max", 2))
    disagree = []
    pairs = 0
    for a, ka in corpus:
        for b, kb in corpus:
            pairs += 1
            want = (ka > kb) - (ka < kb)
            if int(compare(a, b)) != want:
                disagree.append([str(a), str(b)])
    return [
        _check("oracle-agreement", not disagree, expressions=len(corpus), pairs=pairs, disagreements=disagree[:20]),
    ], {"expressions": len(corpus), "pairs": pairs}


def suite_prop6(cfg):
    seqs = sequence_corpus(cfg.get("count", 1000), cfg.get("seed", 0))
    n_max = cfg.get("n_max", 8)
    violations = []
    for idx, s in enumerate(seqs):
        for r in prop6_sandwich(s, n_max=n_max):
            if not r.ok:
                violations.append({"seq": idx, "n": r.n, "lower": r.lower_ok, "upper": r.upper_ok})
    return [_check("sandwich", not violations, sequences=len(seqs), n_max=n_max, violations=violations[:20])], {
        "sequences": len(seqs),
        "instances": len(seqs) * (n_max + 1),
        "violations": len(violations),
    }


def suite_tmin(cfg):
    seqs = sequence_corpus(cfg.get("count", 1000), cfg.get("seed", 0))
    max_depth = cfg.get("max_depth", 60)
    tol = cfg.get("tol", 1e-9)
    wide, nonmono = [], []
    for idx, s in enumerate(seqs):
        prev = None
        reached = None
        # past the last nonzero entry the lower seed iteration is stationary
        depths = sorted(set(range(1, min(max_depth, s.prefix_end + 2) + 1)) | {max_depth})
        for d in depths:
            a, b = t_min_at_depth(s, d)
            if prev is not None and a < prev:
                nonmono.append(idx)
                break
            prev = a
            if reached is None:
                with working_precision(128):
                    if hi(iv.mpf(b) - iv.mpf(a)) < tol:
                        reached = d
        if reached is None:
            wide.append(idx)
    const1 = t_min_enclosure(ItinerarySeq(tail=PeriodicTail((1,))), depth=60)
    ts = to_interval(t_star(ItinerarySeq(tail=PeriodicTail((1,)))).value, 128)
    with working_precision(128):
        ts_err = hi(abs(ts - iv.log(2) / iv.log(3)))
    return [
        _check("width-by-depth-60", not wide, failures=wide[:20]),
        _check("lower-monotone", not nonmono, failures=nonmono[:20]),
        _check("const1-contains-1", const1.lo <= 1 <= const1.hi, lo=str(const1.lo), hi=str(const1.hi)),
        _check("const1-tstar", ts_err < 1e-12, error=float(ts_err)),
    ], {"sequences": len(seqs)}


def suite_domination(cfg):
    rng = random.Random(cfg.get("seed", 0))
    bad = []
    count = cfg.get("count", 500)
    for idx in range(count):
        small, big = dominated_pair(rng)
        a = t_min_enclosure(small)
        b = t_min_enclosure(big)
        if not a.lo <= b.hi:
            bad.append(idx)
    return [_check("tmin-ordering", not bad, pairs=count, failures=bad[:20])], {"pairs": count}


def suite_prop7(cfg):
    ks = cfg.get("k", range(1, 4))
    js = cfg.get("j", range(1, 21))
    ns = cfg.get("n", range(0, 3))
    points = [(m, canonical_xn_point(m).seq) for m in cfg.get("points", range(0, 3))]
    counts = {"Verified": 0, "HypothesisFails": 0, "rejected": 0}
    problems = []
    for m, s in points:
        for n in ns:
            for k in ks:
                for j in js:
                    for l in range(1, k + j + 2):
                        if prop7_valid(k, j, l):
                            try:
                                r = prop7_check(s, k, j, l, n)
                            except FanlabError as exc:
                                problems.append({"point": m, "k": k, "j": j, "l": l, "n": n, "error": str(exc)})
                                continue
                            counts[r.status] += 1
                        else:
                            try:
                                prop7_check(s, k, j, l, n)
                                problems.append({"point": m, "k": k, "j": j, "l": l, "n": n, "error": "invalid instance accepted"})
                            except InvalidInstance:
                                counts["rejected"] += 1
    return [_check("prop7-grid", not problems, problems=problems[:20], **counts)], counts


def suite_claim8(cfg):
    ks = list(cfg.get("k", range(1, 7)))
    checks, anomalies = [], []
    for k in ks:
        r = claim8_inequality(k)
        checks.append(_check(f"k={k}", True, **r.to_json()))
        if not r.holds:
            anomalies.append(f"k={k}: {r.to_json()['lhs']} > {r.to_json()['rhs']} is false")
    return checks, {"holds": [k for k, c in zip(ks, checks) if c["result"] == "Holds"], "anomalies": anomalies}


def suite_claim9(cfg):
    ns = list(cfg.get("n", range(0, 3)))
    Ns = list(cfg.get("N", range(3, 41)))
    checks = []
    literal = []
    for n in ns:
        s = canonical_xn_point(n, cfg.get("c", 1)).seq
        reports = cx.verify_claim9(s, n, Ns, min_K=cfg.get("min_K"), strict=False)
        failed = [{"N": r.N, "failed": [k for k, c in r.checks.items() if not c["ok"]]} for r in reports if not r.ok]
        growth = cx.k_growth(reports)
        exact = all(r.checks["tstar_at_2K2"]["ok"] for r in reports)
        checks.append(_check(f"n={n}:certificates", not failed, failures=failed))
        checks.append(_check(f"n={n}:tstar-exact", exact))
        checks.append(_check(f"n={n}:K-growth", growth["nondecreasing"] and growth["increases"], K=growth["K"]))
        for r in reports:
            if r.K_least == n + 1:
                lit = cx.certify(cx.build_sN(s, n, r.N, min_K=n + 1), s)
                if not lit.checks["exclusion"]["ok"]:
                    literal.append({"n": n, "N": r.N, "K_least": r.K_least, "K_used": r.K})
        if n == 0 and 3 in Ns:
            r = next(r for r in reports if r.N == 3)
            hand = (
                r.jk_table == {1: 1}
                and r.K == 2
                and str(magnitude_at(r.sN, 9)) == "26"
                and r.checks["exclusion"]["margin"] == {"lhs": "3", "rhs": "7", "order": "LT"}
            )
            checks.append(_check("n=0,N=3:hand-run", hand, jk=r.jk_table, K=r.K, s9=str(magnitude_at(r.sN, 9))))
    return checks, {"least_K_exclusion_failures": literal}


def suite_sigma(cfg):
    rng = random.Random(cfg.get("seed", 0))
    count = cfg.get("count", 1000)
    nest_fail, norm_fail, en_fail = [], [], []
    worst = 0.0
    for idx in range(count):
        p = random_erdos_point(rng)
        q = random_sigma_point(rng)
        for n in range(0, 5):
            if in_Kn(p, n) and not in_Kn(p, n + 1):
                nest_fail.append(idx)
            if in_En(q, n) and not all(in_En(q, m) for m in range(n, 8)):
                en_fail.append(idx)
        brute = math.sqrt(math.fsum(1.0 / (d * d) for _, d in p.support))
        err = abs(float(l2_norm(p)) - brute)
        worst = max(worst, err)
        if err > 1e-12:
            norm_fail.append(idx)
    return [
        _check("Kn-nesting", not nest_fail, failures=nest_fail[:20]),
        _check("En-nesting", not en_fail, failures=en_fail[:20]),
        _check("norm-brute-force", not norm_fail, worst=worst, failures=norm_fail[:20]),
    ], {"points": count}


_RUNNERS = {
    "tower-oracle": suite_tower_oracle,
    "prop6": suite_prop6,
    "tmin": suite_tmin,
    "domination": suite_domination,
    "prop7": suite_prop7,
    "claim8": suite_claim8,
    "claim9": suite_claim9,
    "sigma": suite_sigma,
}


def run_suite(name: str, config: dict | None = None) -> dict:
    """Run one suite and return its report."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(sorted(_RUNNERS))}")
    cfg = dict(config or {})
    start = time.perf_counter()
    with precision_audit() as audit:
        checks, summary = _RUNNERS[name](cfg)
    elapsed = time.perf_counter() - start
    ok = all(c["ok"] for c in checks)
    return {
        "suite": name,
        "config": {k: _echo(v) for k, v in sorted(cfg.items())},
        "checks": checks,
        "summary": summary,
        "precision_audit": dict(audit),
        "status": "pass" if ok else "fail",
        "exit_status": 0 if ok else 1,
        "timing": {"seconds": round(elapsed, 3)},
    }


def _echo(v):
    if isinstance(v, range):
        return f"{v.start}..{v.stop - 1}"
    if isinstance(v, (list, tuple)):
        return list(v)
    return v
