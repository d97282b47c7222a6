import pytest

from fanlab.errors import InvalidInstance
from fanlab.itinerary import ItinerarySeq, WitnessTail, constant_sequence, magnitude_at, zero_sequence
from fanlab.strata import (
    HYPOTHESIS_FAILS,
    MEMBER,
    NON_MEMBER,
    UNKNOWN,
    VERIFIED,
    canonical_xn_point,
    claim8_inequality,
    closure_necessary,
    prop7_check,
    prop7_valid,
    xn_member,
)
from fanlab.tower import Lit, Ordering, f_apply, inc, parse_expr, threshold


def test_xn_member_examples():
    s = canonical_xn_point(0).seq
    v = xn_member(s, 0, 6)
    assert v.verdict == MEMBER
    assert all(m.order == Ordering.GT for m in v.margins)
    assert v.tail_rule
    z = xn_member(zero_sequence(), 0, 4)
    assert z.verdict == NON_MEMBER and z.witness_k == 1


def test_bounded_tail_refuted_beyond_window():
    s = ItinerarySeq(((3, "F^5(1)"),), constant_sequence(7).tail)
    v = xn_member(s, 0, 0)
    assert v.verdict == NON_MEMBER
    assert v.witness_k is not None and v.tail_rule == "bounded tail"


def test_weak_witness_tail_is_unknown_not_member():
    # the tail adds F^(m - 51)(1) at depth m, which is tiny for small m;
    # the tail rule cannot certify that, so an empty window leaves Unknown
    s = ItinerarySeq(tail=WitnessTail(1, 5, anchor=51))
    assert xn_member(s, 0, 0).verdict == UNKNOWN
    v = xn_member(s, 0, 3)
    assert v.verdict == NON_MEMBER and v.witness_k == 1


def test_nesting_of_strata():
    for n in range(0, 3):
        for c in (1, 2, 5):
            s = canonical_xn_point(n, c).seq
            for m in range(n, n + 4):
                assert xn_member(s, m, m + 5).verdict == MEMBER


def test_membership_implies_closure_pass():
    for n in range(3):
        s = canonical_xn_point(n).seq
        v = xn_member(s, n, n + 5)
        assert v.verdict == MEMBER
        for k in range(n + 1, n + 6):
            assert closure_necessary(s, n, k).passed


def test_closure_examples():
    c = closure_necessary(zero_sequence(), 0, 1)
    assert not c.passed and c.bound == Lit(1)
    # t* at 2K^2 equal to F^(K-n-1)(1) + 1 fails at k = K
    K, n = 3, 0
    val = inc(threshold(K - n - 1, 0), 1)
    s = ItinerarySeq(tail=WitnessTail(val, K, anchor=2 * K * K))
    assert closure_necessary(s, n, K).passed is False
    with pytest.raises(InvalidInstance):
        closure_necessary(zero_sequence(), 2, 2)


def test_prop7_examples():
    s = ItinerarySeq(((9, "F^9(1)"),))
    r = prop7_check(s, 1, 7, 2, 0)
    assert r.status == VERIFIED
    assert r.hypothesis_term == Lit(8)
    assert r.conclusion_term == parse_expr("F^8(1)")
    assert prop7_check(zero_sequence(), 1, 7, 2, 0).status == HYPOTHESIS_FAILS
    with pytest.raises(InvalidInstance):
        prop7_check(s, 1, 7, 1, 0)


def test_prop7_boundary_rejected():
    # 2l^2 = 2k^2 + j exactly
    assert not prop7_valid(1, 6, 2)
    with pytest.raises(InvalidInstance):
        prop7_check(zero_sequence(), 1, 6, 2, 0)


def _hypothesis_oracle(c, k0, k, j, n):
    """Does F^-j |s_(2k^2+j)| > F^(k-n)(1) hold for the canonical point?  Plain integers only."""
    p = 2 * k * k + j
    q = p - 1
    if q % 2:
        return False
    kk = round((q // 2) ** 0.5)
    if 2 * kk * kk != q or kk < k0:
        return False
    # F^(p - j)(c) > F^(k-n)(1): compare exponents, F^a(c) vs F^b(1)
    a, b = p - j, k - n
    if c == 1:
        return a > b
    return a >= b  # c >= 2 > 1 and F strictly increasing on [0, inf)


def test_prop7_grid_against_oracle():
    for m in range(3):
        for c in (1, 2):
            s = canonical_xn_point(m, c).seq
            for n in range(3):
                for k in range(1, 4):
                    for j in range(1, 21):
                        for l in range(1, k + j + 2):
                            if not prop7_valid(k, j, l):
                                continue
                            r = prop7_check(s, k, j, l, n)
                            want = _hypothesis_oracle(c, m + 1, k, j, n)
                            assert (r.status == VERIFIED) == want, (m, c, n, k, j, l)


def test_claim8():
    assert not claim8_inequality(1).holds
    assert claim8_inequality(1).order == Ordering.LT
    for k in range(2, 7):
        assert claim8_inequality(k).holds


def test_canonical_point_examples():
    rec = canonical_xn_point(0, 1)
    s = rec.seq
    assert magnitude_at(s, 3) == Lit(6560)
    assert magnitude_at(s, 9) == parse_expr("F^9(1)")
    assert magnitude_at(s, 19) == parse_expr("F^19(1)")
    assert rec.t_star0 == Lit(1)
    s2 = canonical_xn_point(2, 1).seq
    nonzero = [p for p in range(0, 40) if magnitude_at(s2, p) != Lit(0)]
    assert nonzero[0] == 19
    assert xn_member(s2, 2, 6).verdict == MEMBER
    assert canonical_xn_point(1, 3).t_star0 == f_apply(3, 0)
