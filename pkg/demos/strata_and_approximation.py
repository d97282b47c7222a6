"""Strata membership and the approximation sequence s^N, step by step.

Run:  python demos/strata_and_approximation.py
"""

from fanlab import counterexample as cx
from fanlab.itinerary import ItinerarySeq, WitnessTail, magnitude_at, t_star, zero_sequence
from fanlab.strata import canonical_xn_point, claim8_inequality, closure_necessary, prop7_check, xn_member
from fanlab.tower import f_apply, to_text


def main():
    x = canonical_xn_point(0)
    s = x.seq
    print("canonical point of X_0: witness entries at 2k^2 + 1")
    for p in (3, 9, 19, 33):
        print(f"  |s_{p}| = {to_text(magnitude_at(s, p))}")
    v = xn_member(s, 0, 5)
    print(f"  X_0 verdict: {v.verdict} via {v.tail_rule!r}")
    print(f"  zero sequence: {xn_member(zero_sequence(), 0, 3).verdict}")

    print("\nthe k^2 inequality per k")
    for k in range(1, 5):
        r = claim8_inequality(k)
        print(f"  k={k}: {to_text(r.lhs)} vs {to_text(r.rhs)} -> {r.order.name}")

    print("\ntransfer from 2k^2 + j to an interior index 2l^2")
    r = prop7_check(ItinerarySeq(((9, "F^9(1)"),)), 1, 7, 2, 0)
    print(f"  k=1 j=7 l=2: {r.status}")

    print("\nhand run n=0, N=3")
    rep = cx.certify(cx.build_sN(s, 0, 3), s)
    print(f"  j table {rep.jk_table}, K = {rep.K}")
    print(f"  s^N_9 = {to_text(magnitude_at(rep.sN, 9))}, s^N_19 = {to_text(magnitude_at(rep.sN, 19))}")
    print(f"  t*(sigma^8 s^N) = {to_text(t_star(rep.sN, 8).value)}")
    print(f"  exclusion margin: {rep.checks['exclusion']['margin']}")
    print(f"  all certificates: {rep.ok}")

    print("\nK(N) along N = 3..40 for n = 1")
    reports = cx.verify_claim9(canonical_xn_point(1).seq, 1, range(3, 41))
    print("  K:", [r.K for r in reports])

    print("\nwith the least admissible K = n + 1 the exclusion step breaks")
    s1 = canonical_xn_point(1).seq
    lit = cx.certify(cx.build_sN(s1, 1, 3, min_K=2), s1)
    c = closure_necessary(lit.sN, 1, lit.K)
    print(f"  n=1 N=3 K={lit.K}: t* = {c.to_json()['tstar']}, bound {c.to_json()['bound']}, closure {c.to_json()['result']}")

    print("\na non-integral ratio makes the replacement exceed the original entry")
    odd = ItinerarySeq(((9, 9),), WitnessTail(1, 1))
    r = cx.verify_claim9(odd, 0, [3], strict=False)[0]
    print(f"  |s_9| = 9, |s^N_9| = {to_text(magnitude_at(r.sN, 9))}, domination ok: {r.checks['domination']['ok']}")

    print("\na wide witness gap routes interior indices through the transfer step")
    wide = ItinerarySeq(tail=WitnessTail(f_apply(1, 25), 1, 0, -20))
    r = cx.verify_claim9(wide, 0, [9])[0]
    print("  routes:", sorted({b["route"] for b in r.checks["membership"]["branches"]}))


if __name__ == "__main__":
    main()
