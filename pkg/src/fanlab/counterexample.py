"""The approximation construction s -> s^N for a point of X_n, with its certificates.

Given s in X_n and N > n:

1. for every k > n with 2k^2 <= N pick the least j(k) >= 1 with
   F^-j |s_(2k^2+j)| > F^(k-n)(1);
2. pick K > n with 2K^2 >= max(N, 2k^2 + j(k));
3. copy s on positions <= 2K^2; at 2K^2 + j keep s unless
   F^-j |s_(2K^2+j)| > F^(K-n-1)(1), in which case write F^j(F^(K-n-1)(1) + 1).

s^N should then be dominated by s, lie in X_(n+1) and fail the necessary
condition for the closure of X_n at k = K.

The choice of K
---------------
With the least admissible K it can happen that K = n + 1.  Then the exclusion
bound reads F^0(1) + 1 < F^1(1) - 1, i.e. 2 < 1, and the closure test passes.
:func:`choose_K` keeps the least-K rule (``min_K`` defaults to n + 1), while
:func:`build_sN` and :func:`verify_claim9` default to ``min_K = n + 2``.  Any
larger K satisfies the size condition equally well and K still tends to
infinity with N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapExceeded, CertificateError, InvalidInstance
from .itinerary import (
    Entry,
    ItinerarySeq,
    PeriodicTail,
    WitnessTail,
    dominates,
    magnitude_at,
    seq_to_json,
    t_star,
)
from .strata import closure_necessary, prop7_check, xn_member
from .tower import Ordering, compare, f_apply, inc, inverse, threshold, to_text

DEFAULT_J_CAP = 50
DEFAULT_N_GRID = tuple(range(3, 41))


def find_jk(s: ItinerarySeq, k: int, n: int, j_cap: int = DEFAULT_J_CAP) -> int:
    """Least j >= 1 with F^-j |s_(2k^2+j)| > F^(k-n)(1)."""
    if k <= n:
        raise InvalidInstance(f"need k > n, got k={k}, n={n}")
    bound = threshold(k, n)
    base = 2 * k * k
    for j in range(1, j_cap + 1):
        if compare(inverse(magnitude_at(s, base + j), j), bound) == Ordering.GT:
            return j
    raise CapExceeded(f"no j <= {j_cap} for k={k}, n={n}")


def jk_table(s: ItinerarySeq, n: int, N: int, j_cap: int = DEFAULT_J_CAP) -> dict:
    table = {}
    k = n + 1
    while 2 * k * k <= N:
        table[k] = find_jk(s, k, n, j_cap)
        k += 1
    return table


def choose_K(n: int, N: int, jk: dict, min_K: int | None = None) -> int:
    """Least K >= min_K (default n + 1) with 2K^2 >= max(N, 2k^2 + j(k))."""
    target = max([N] + [2 * k * k + j for k, j in jk.items()])
    K = n + 1 if min_K is None else max(min_K, n + 1)
    while 2 * K * K < target:
        K += 1
    return K


@dataclass
class ApproximationReport:
    n: int
    N: int
    jk_table: dict
    K: int
    K_least: int
    sN: ItinerarySeq
    replaced: list
    tail_replaced: bool
    checks: dict = field(default_factory=dict)

    @property
    def agreement(self):
        """s^N and s agree on every position below this one."""
        return 2 * self.K * self.K + 1

    @property
    def ok(self):
        return all(c.get("ok") for c in self.checks.values())

    def to_json(self):
        return {
            "n": self.n,
            "N": self.N,
            "jk": {str(k): j for k, j in sorted(self.jk_table.items())},
            "K": self.K,
            "K_least": self.K_least,
            "agreement": self.agreement,
            "replaced_prefix_positions": self.replaced,
            "tail_replaced": self.tail_replaced,
            "sN": seq_to_json(self.sN),
            "checks": self.checks,
            "ok": self.ok,
        }


def _replace_value(K, n):
    return inc(threshold(K - n - 1, 0), 1)


def build_sN(s: ItinerarySeq, n: int, N: int, min_K: int | None = None, j_cap: int = DEFAULT_J_CAP):
    """Run the case split and return the report with s^N (checks not yet filled)."""
    if N <= n:
        raise InvalidInstance(f"need N > n, got N={N}, n={n}")
    if min_K is None:
        min_K = n + 2
    jk = jk_table(s, n, N, j_cap)
    K_least = choose_K(n, N, jk)
    K = choose_K(n, N, jk, min_K)
    cut = 2 * K * K
    keep_bound = threshold(K - n - 1, 0)
    cprime = _replace_value(K, n)

    def replaced(mag, j):
        return compare(inverse(mag, j), keep_bound) == Ordering.GT

    out = {}
    changed = []
    for e in s.prefix:
        if e.pos <= cut or not replaced(e.mag, e.pos - cut):
            out[e.pos] = e
        else:
            out[e.pos] = Entry(e.pos, f_apply(cprime, e.pos - cut), e.sign)
            changed.append(e.pos)

    tail = s.tail
    tail_replaced = False
    if isinstance(tail, WitnessTail):
        # witness positions up to the cut are copied literally
        k = tail.k0
        while tail.position(k) <= cut:
            p = tail.position(k)
            if p not in out and p >= 0:
                out[p] = Entry(p, tail.mag(k))
            k += 1
        # every tail term past the cut has F^-j |s| = F^(cut + offset - anchor)(c)
        if replaced(f_apply(tail.c, cut + tail.offset - tail.anchor), 0):
            tail_replaced = True
            tail = WitnessTail(cprime, tail.first_k(cut + 1), tail.offset + cut, tail.offset)
    elif isinstance(tail, PeriodicTail):
        top = max(tail.block)
        j = 1
        while compare(inverse(top, j), keep_bound) == Ordering.GT:
            p = cut + j
            if p not in out and replaced(magnitude_at(s, p), j):
                out[p] = Entry(p, f_apply(cprime, j))
                changed.append(p)
            j += 1
    sN = ItinerarySeq(tuple(out[p] for p in sorted(out)), tail)
    return ApproximationReport(n, N, jk, K, K_least, sN, sorted(changed), tail_replaced)


def _membership_branches(rep: ApproximationReport, s: ItinerarySeq):
    """Certify t*(sigma^(2k^2) s^N) > F^(k-n-1)(1) for n+1 < k <= K+1 along the constructive route.

    prefix-witness: 2k^2 <= N, the stored witness at 2k^2 + j(k) was copied.
    prop7: 2k^2 > N but some stored witness interval (2k'^2, 2k'^2 + j(k')) contains 2k^2.
    replaced-tail: k >= K, the replaced entries give t* >= F^(2k^2 - 2K^2)(F^(K-n-1)(1) + 1).
    """
    n, K, sN = rep.n, rep.K, rep.sN
    cprime = _replace_value(K, n)
    records = []
    for k in range(n + 2, K + 2):
        bound = threshold(k, n + 1)
        ts = t_star(sN, 2 * k * k).value
        if k >= K:
            route = "replaced-tail"
            lower = f_apply(cprime, 2 * k * k - 2 * K * K)
            ok = compare(lower, inc(bound, 1)) != Ordering.LT and compare(ts, lower) != Ordering.LT
            detail = to_text(lower)
        elif k in rep.jk_table:
            route = "prefix-witness"
            j = rep.jk_table[k]
            term = inverse(magnitude_at(sN, 2 * k * k + j), j)
            ok = compare(term, threshold(k, n)) == Ordering.GT and compare(term, bound) == Ordering.GT
            detail = to_text(term)
        else:
            route = "prop7"
            host = [kk for kk, j in rep.jk_table.items() if 2 * kk * kk < 2 * k * k < 2 * kk * kk + j]
            if host:
                kk = host[0]
                res = prop7_check(sN, kk, rep.jk_table[kk], k, n)
                ok = res.status == "Verified"
                detail = f"k'={kk} j={rep.jk_table[kk]} term={to_text(res.conclusion_term) if ok else '-'}"
            else:
                ok, detail = False, "no witness interval contains 2k^2"
        ok = ok and compare(ts, bound) == Ordering.GT
        records.append({"k": k, "route": route, "ok": ok, "tstar": to_text(ts), "bound": to_text(bound), "detail": detail})
    return records


def certify(rep: ApproximationReport, s: ItinerarySeq):
    """Fill ``rep.checks`` with the certificates; returns the report."""
    n, K, sN = rep.n, rep.K, rep.sN
    cprime = _replace_value(K, n)

    dom, pos = dominates(s, sN)
    rep.checks["domination"] = {"ok": dom, "violation": pos}
    if pos is not None:
        rep.checks["domination"]["values"] = [to_text(magnitude_at(sN, pos)), to_text(magnitude_at(s, pos))]

    branches = _membership_branches(rep, s)
    verdict = xn_member(sN, n + 1, K + 1)
    rep.checks["membership"] = {
        "ok": verdict.is_member and all(b["ok"] for b in branches),
        "verdict": verdict.to_json(),
        "branches": branches,
    }

    closure = closure_necessary(sN, n, K)
    margin = compare(cprime, inc(threshold(K, n), -1))
    rep.checks["exclusion"] = {
        "ok": not closure.passed and margin == Ordering.LT,
        "closure": closure.to_json(),
        "margin": {"lhs": to_text(cprime), "rhs": to_text(inc(threshold(K, n), -1)), "order": margin.name},
    }

    ts = t_star(sN, 2 * K * K).value
    rep.checks["tstar_at_2K2"] = {"ok": ts == cprime, "value": to_text(ts), "expected": to_text(cprime)}

    a, b = t_star(sN).value, t_star(s).value
    order = compare(a, b)
    rep.checks["tstar_order"] = {"ok": order != Ordering.GT, "sN": to_text(a), "s": to_text(b), "order": order.name}
    return rep


def verify_claim9(s: ItinerarySeq, n: int, N_list=DEFAULT_N_GRID, min_K: int | None = None, strict: bool = True, K_check: int = 8):
    """Build and certify s^N for each N.

    ``s`` must be certified in X_n first (window up to ``K_check``).  With
    ``strict`` any failed certificate raises CertificateError carrying the
    offending report; otherwise failures stay in the reports.
    """
    pre = xn_member(s, n, max(K_check, n + 1))
    if not pre.is_member:
        raise CertificateError("input is not a certified member of X_n", pre.to_json())
    reports = []
    for N in N_list:
        rep = certify(build_sN(s, n, N, min_K), s)
        if strict and not rep.ok:
            failed = [name for name, c in rep.checks.items() if not c.get("ok")]
            raise CertificateError(f"N={N}: failed {', '.join(failed)}", rep.to_json())
        reports.append(rep)
    return reports


def k_growth(reports):
    """K(N) along the grid: nondecreasing flag, increases somewhere flag, and agreement lengths."""
    Ks = [r.K for r in reports]
    return {
        "K": Ks,
        "agreement": [r.agreement for r in reports],
        "nondecreasing": all(a <= b for a, b in zip(Ks, Ks[1:])),
        "increases": any(a < b for a, b in zip(Ks, Ks[1:])),
    }


__all__ = [
    "ApproximationReport",
    "DEFAULT_J_CAP",
    "DEFAULT_N_GRID",
    "build_sN",
    "certify",
    "choose_K",
    "find_jk",
    "jk_table",
    "k_growth",
    "verify_claim9",
]
