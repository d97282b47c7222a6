import random

import pytest
from mpmath import iv, mp

from fanlab.errors import NotRepresentable, TooLarge, TowerSyntaxError, UnresolvedComparison
from fanlab.intervals import hi, lo, working_precision
from fanlab.suites import oracle_corpus
from fanlab.tower import (
    ZERO,
    Enclosure,
    ExactInv,
    FApp,
    Inc,
    Lit,
    Ordering,
    compare,
    compare_by_enclosure,
    eval_enclosure,
    eval_exact,
    f_apply,
    fapp,
    format_expr,
    from_int,
    inc,
    inverse,
    parse_expr,
    precision_audit,
    threshold,
    to_interval,
)


def test_f_apply_small_values():
    assert f_apply(ZERO, 5) == ZERO
    assert f_apply(1, 1) == Lit(2)
    assert f_apply(2, 1) == Lit(8)
    assert f_apply(8, 1) == Lit(6560)


def test_f_apply_negative_gives_log3_2():
    x = f_apply(1, -1)
    assert x == ExactInv(1, Lit(1))
    enc = to_interval(x, 64)
    with working_precision(200):
        ref = iv.log(2) / iv.log(3)
    assert lo(enc) <= lo(ref) and hi(ref) <= hi(enc)
    assert abs(float(lo(enc)) - 0.63093) < 1e-5


def test_f_apply_shift_cancels_exactly():
    assert f_apply(f_apply(1, 7), -7) == Lit(1)
    assert f_apply(f_apply(Lit(3), -4), 4) == Lit(3)
    assert inverse(Lit(6560), 1) == Lit(8)
    assert inverse(Lit(6560), 3) == Lit(1)


def test_eval_exact_examples():
    assert eval_exact(fapp(Lit(1), 3)) == 6560
    assert eval_exact(fapp(Lit(3), 1)) == 26
    v = eval_exact(fapp(Lit(1), 4))
    assert v == 3**6560 - 1
    assert len(str(v)) == 3130


def test_eval_exact_guard():
    with pytest.raises(TooLarge):
        eval_exact(fapp(Lit(1), 5))


def test_canonical_forms_collapse():
    e = fapp(fapp(Lit(1), 8), 11)
    assert e == FApp(19, Lit(1))
    # F^3(1) is a literal, but F^19(1) keeps the primitive base 1
    assert fapp(Lit(1), 3) == Lit(6560)
    assert inc(inc(fapp(Lit(1), 5), 3), -3) == fapp(Lit(1), 5)
    assert isinstance(inc(fapp(Lit(1), 5), 2), Inc)
    assert from_int(6560) == Lit(6560)


def test_value_equal_forms_are_structurally_equal():
    a = fapp(Lit(8), 1)
    b = fapp(Lit(1), 3)
    assert a == b
    assert fapp(inc(fapp(Lit(1), 1), 1), 11) == parse_expr("F^11(3)")
    assert compare(a, b) == Ordering.EQ


def test_negative_values_rejected():
    with pytest.raises(NotRepresentable):
        inc(Lit(1), -2)
    with pytest.raises(NotRepresentable):
        from_int(-1)


def test_compare_examples():
    assert compare(inc(threshold(1, 0), 1), inc(threshold(2, 0), -1)) == Ordering.LT
    assert compare(parse_expr("F^11(3)"), parse_expr("F^19(1)")) == Ordering.LT
    e = parse_expr("F^7(2)+5")
    assert compare(e, e) == Ordering.EQ


def test_compare_by_enclosure_agrees_with_symbolic():
    pairs = [("F^11(3)", "F^19(1)"), ("3", "7"), ("F^2(5)", "F^3(1)"), ("F^4(1)+1", "F^5(1)")]
    for a, b in pairs:
        assert compare_by_enclosure(parse_expr(a), parse_expr(b)) == compare(parse_expr(a), parse_expr(b))


def test_enclosure_cannot_split_adjacent_towers():
    # one unit apart at height F^5(1): intervals cannot separate them
    with pytest.raises(UnresolvedComparison):
        compare_by_enclosure(parse_expr("F^5(1)+1"), parse_expr("F^5(1)"))
    assert compare(parse_expr("F^5(1)+1"), parse_expr("F^5(1)")) == Ordering.GT


def test_enclosure_of_one_is_level_one():
    enc = eval_enclosure(Lit(1), 64)
    with working_precision(200):
        ref = iv.log(2) / iv.log(3)
    assert enc.level == 1
    assert enc.lo <= lo(ref) and hi(ref) <= enc.hi


def test_enclosure_power_of_three():
    x = to_interval(ExactInv(1, Lit(6560)), 64)
    assert lo(x) <= 8 <= hi(x)


def test_double_log_enclosure():
    x = to_interval(ExactInv(2, Lit(1)), 128)
    assert hi(x) - lo(x) < mp.mpf("1e-20")
    with working_precision(300):
        ref = iv.log(1 + iv.log(2) / iv.log(3)) / iv.log(3)
    assert lo(x) <= lo(ref) and hi(ref) <= hi(x)
    assert abs(float(lo(x)) - 0.44524) < 1e-5


def test_enclosure_width_shrinks_with_precision():
    x = ExactInv(3, fapp(Lit(2), 2))
    widths = []
    for p in (64, 128, 256, 512):
        X = to_interval(x, p)
        widths.append(hi(X) - lo(X))
    assert all(a >= b for a, b in zip(widths, widths[1:]))


def test_enclosure_mantissa_range():
    with working_precision(200):
        l32 = iv.log(2) / iv.log(3)
    for v in ("2", "8", "1000", "F^2(3)", "F^6(1)+4", "F^9(2)-1"):
        enc = eval_enclosure(parse_expr(v), 128)
        assert enc.hi < 1
        assert enc.hi >= lo(l32)


def test_threshold_examples():
    assert threshold(1, 0) == Lit(2)
    assert threshold(4, 4) == Lit(1)
    assert threshold(3, 0) == Lit(6560)
    assert threshold(0, 2) == ExactInv(2, Lit(1))


@pytest.mark.parametrize("text", ["0", "5", "F^3(1)", "F^11(3)", "F^2(1)+1", "F^7(2)-3", "F^20(4)+999"])
def test_parse_format_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(format_expr(e)) == e


def test_parse_canonicalizes():
    assert format_expr(parse_expr("F^2(1)+1")) == "9"
    assert format_expr(parse_expr("F^1(F^1(1)+1)")) == "26"
    assert format_expr(parse_expr("F^3(F^8(1))")) == "F^11(1)"


@pytest.mark.parametrize("bad", ["F^0(1)", "F^(1)", "F^2(1", "1+", "-3", "F^2(x)", ""])
def test_parse_errors(bad):
    with pytest.raises((TowerSyntaxError, NotRepresentable)):
        parse_expr(bad)


def test_oracle_monotonicity_sample():
    corpus = [e for e, _ in oracle_corpus()]
    rng = random.Random(3)
    for _ in range(3000):
        a, b = rng.choice(corpus), rng.choice(corpus)
        if compare(a, b) == Ordering.LT:
            assert compare(f_apply(a, 1), f_apply(b, 1)) == Ordering.LT


def test_round_trip_shifts():
    values = [Lit(1), Lit(7), parse_expr("F^3(2)+1"), ExactInv(2, Lit(5))]
    for x in values:
        for j in range(-20, 21):
            assert f_apply(f_apply(x, j), -j) == x


def test_round_trip_enclosures():
    enc = eval_enclosure(parse_expr("F^2(5)"), 128)
    for j in (-20, -3, 0, 4, 20):
        back = f_apply(f_apply(enc, j), -j)
        assert back.level == enc.level and back.lo <= enc.lo and enc.hi <= back.hi


def test_precision_stability():
    rng = random.Random(11)
    corpus = [e for e, _ in oracle_corpus(levels=2)]
    done = 0
    while done < 100:
        a = ExactInv(rng.randint(1, 3), rng.choice(corpus))
        b = rng.choice(corpus)
        if a.e == ZERO:
            continue
        try:
            r = compare_by_enclosure(a, b, precision=64)
        except UnresolvedComparison:
            continue
        assert compare_by_enclosure(a, b, precision=128) == r
        done += 1


def test_precision_audit_records_escalation():
    with precision_audit() as rec:
        compare_by_enclosure(parse_expr("F^11(3)"), parse_expr("F^19(1)"))
    assert rec["enclosure_comparisons"] == 1
    assert rec["max_precision"] >= 64


def test_enclosure_comparison_with_plain_enclosure():
    e = Enclosure(2, mp.mpf("0.7"), mp.mpf("0.8"))
    assert compare(e, 8) == Ordering.LT
    assert compare(e, 1) == Ordering.GT
