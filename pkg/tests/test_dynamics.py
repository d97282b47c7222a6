import random

import pytest
from mpmath import iv, mp

from fanlab.dynamics import (
    Membership,
    in_J,
    orbit,
    orbit_height,
    prop6_sandwich,
    t_min_at_depth,
    t_min_enclosure,
    tower_endpoint,
)
from fanlab.errors import DepthInsufficient, HorizonExceeded, NumericModeRequired
from fanlab.intervals import hi, lo
from fanlab.itinerary import Entry, ItinerarySeq, constant_sequence, witness_sequence, zero_sequence
from fanlab.suites import dominated_pair, random_numeric_sequence
from fanlab.tower import Lit, inc


def _brute_orbit(t, mags, n):
    """Plain float forward iteration, used as an oracle away from the boundary."""
    out = [t]
    for j in range(n):
        t = 3.0**t - 1 - mags[j + 1]
        out.append(t)
    return out


def test_orbit_examples():
    assert orbit_height(0, zero_sequence(), 10) == iv.mpf(0)
    T = orbit_height(1, constant_sequence(1), 1)
    assert lo(T) == 1 == hi(T)


def test_orbit_point_nine_goes_negative():
    heights = orbit(0.9, constant_sequence(1), 8)
    assert hi(heights[-1]) < 0
    ref = _brute_orbit(0.9, [1] * 10, 8)
    for T, r in zip(heights, ref):
        assert lo(T) - 1e-12 <= r <= hi(T) + 1e-12


def test_orbit_matches_float_oracle():
    s = ItinerarySeq(((1, 2), (2, 5), (4, 1)))
    mags = [0, 2, 5, 0, 1, 0, 0]
    heights = orbit(1.9, s, 3)
    ref = _brute_orbit(1.9, mags, 3)
    for T, r in zip(heights, ref):
        assert abs(float(lo(T)) - r) <= 1e-9 * max(1.0, abs(r))


def test_orbit_errors():
    with pytest.raises(HorizonExceeded):
        orbit_height(0, zero_sequence(), 16)
    with pytest.raises(NumericModeRequired):
        orbit_height(0, witness_sequence(), 10)


def test_t_min_examples():
    rec = t_min_enclosure(zero_sequence())
    assert rec.lo == 0 and rec.hi == 0
    rec = t_min_enclosure(constant_sequence(1), depth=60)
    assert rec.lo <= 1 <= rec.hi and rec.width < 1e-9
    rec = t_min_enclosure(ItinerarySeq(((1, 5),)))
    with mp.workprec(300):
        ref = mp.log(6, 3)
        assert abs(rec.lo - ref) < 1e-12
        assert rec.lo - 1e-30 <= ref <= rec.hi + 1e-30


def test_t_min_depth_insufficient():
    with pytest.raises(DepthInsufficient):
        t_min_enclosure(constant_sequence(1), depth=2, tol=1e-9)


def test_t_min_numeric_only():
    with pytest.raises(NumericModeRequired):
        t_min_enclosure(witness_sequence())


def test_backward_iteration_monotone():
    rng = random.Random(2)
    for _ in range(40):
        s = random_numeric_sequence(rng, periodic=True)
        prev = None
        for d in range(1, 25):
            a, b = t_min_at_depth(s, d)
            assert a <= b
            if prev is not None:
                assert a >= prev
            prev = a


def test_in_J_examples():
    assert in_J(0, zero_sequence()) == Membership.CERTIFIED_YES
    assert in_J(1, constant_sequence(1)) == Membership.CERTIFIED_YES
    assert in_J(0.5, constant_sequence(1)) == Membership.CERTIFIED_NO
    assert in_J(0.9, constant_sequence(1)) == Membership.CERTIFIED_NO
    assert in_J(2, ItinerarySeq(((1, 5),))) == Membership.CERTIFIED_YES
    assert in_J(1.5, ItinerarySeq(((1, 5),))) == Membership.CERTIFIED_NO


def test_in_J_at_t_min_upper_bound():
    rng = random.Random(9)
    for _ in range(30):
        s = random_numeric_sequence(rng)
        rec = t_min_enclosure(s, precision=160, tol=1e-30)
        assert in_J(rec.hi, s) != Membership.CERTIFIED_NO


def test_tower_endpoint_bracket():
    rec = tower_endpoint(witness_sequence())
    assert rec.mode == "tower"
    assert rec.lo == Lit(1) and rec.hi == inc(Lit(1), 1)


def test_prop6_sandwich_sample():
    rng = random.Random(4)
    for _ in range(30):
        s = random_numeric_sequence(rng)
        assert all(r.ok for r in prop6_sandwich(s))


def test_domination_orders_t_min():
    rng = random.Random(6)
    for _ in range(50):
        small, big = dominated_pair(rng)
        assert t_min_enclosure(small).lo <= t_min_enclosure(big).hi


def test_t_min_recursion():
    """t_s = log3(1 + |s_1| + t_(sigma s)) at the enclosure level."""
    s = ItinerarySeq((Entry(1, 3), Entry(2, 7), Entry(3, 1)))
    a = t_min_enclosure(s, tol=1e-25, precision=160)
    b = t_min_enclosure(ItinerarySeq((Entry(1, 7), Entry(2, 1))), tol=1e-25, precision=160)
    with mp.workprec(160):
        mid = mp.log(1 + 3 + (b.lo + b.hi) / 2, 3)
        assert abs(mid - (a.lo + a.hi) / 2) < 1e-20
