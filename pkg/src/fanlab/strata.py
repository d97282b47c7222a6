"""Strata X_n: membership, the closure test, and two tower inequalities.

A sequence s belongs to X_n when, for every k > n,

    t*(sigma^(2k^2) s) > F^(k-n)(1).

A finite window of k can only ever refute this.  A Member verdict also needs
a tail rule that covers every k beyond the window, and only witness tails
provide one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import EndpointRecord, tower_endpoint
from .errors import CertificateError, InvalidInstance
from .itinerary import ItinerarySeq, PeriodicTail, WitnessTail, ZeroTail, magnitude_at, t_star
from .tower import Ordering, compare, f_apply, inc, inverse, threshold, to_text

MEMBER = "Member"
NON_MEMBER = "NonMember"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Margin:
    """One checked k: t*(sigma^(2k^2) s) against the threshold it must beat."""

    k: int
    t_star: object
    bound: object
    order: Ordering

    def to_json(self):
        return {"k": self.k, "tstar": to_text(self.t_star), "bound": to_text(self.bound), "order": self.order.name}


@dataclass(frozen=True)
class StratumVerdict:
    verdict: str
    n: int
    K_max: int
    witness_k: int | None = None
    margins: tuple = ()
    tail_rule: str | None = None

    @property
    def is_member(self):
        return self.verdict == MEMBER

    def to_json(self):
        return {
            "verdict": self.verdict,
            "n": self.n,
            "K_max": self.K_max,
            "witness_k": self.witness_k,
            "tail_rule": self.tail_rule,
            "margins": [m.to_json() for m in self.margins],
        }


def _margin(s, k, n):
    ts = t_star(s, 2 * k * k).value
    bound = threshold(k, n)
    return Margin(k, ts, bound, compare(ts, bound))


def _witness_rule(tail: WitnessTail, n, k1):
    """Certify the X_n inequality for every k >= k1 from the witness tail alone.

    Every surviving tail term gives t*(sigma^(2k^2) s) >= F^g(c) with
    g = 2k^2 + offset - anchor.  Against F^(k-n)(1) this is F^h(c) > 1 with
    h = g - (k - n), and h grows with k, so checking k1 covers all k >= k1.
    """
    h = 2 * k1 * k1 + tail.offset - tail.anchor - (k1 - n)
    return compare(f_apply(tail.c, h), 1) == Ordering.GT


def _bounded_tail_refutation(s, n, k_start):
    """For zero and periodic tails t* stays bounded, so some k refutes membership."""
    k = k_start
    while True:
        m = _margin(s, k, n)
        if m.order != Ordering.GT:
            return m
        k += 1


def xn_member(s: ItinerarySeq, n: int, K_max: int) -> StratumVerdict:
    """Decide membership of s in X_n, checking k = n+1 .. K_max explicitly."""
    margins = []
    for k in range(n + 1, K_max + 1):
        m = _margin(s, k, n)
        margins.append(m)
        if m.order != Ordering.GT:
            return StratumVerdict(NON_MEMBER, n, K_max, k, tuple(margins))
    k1 = max(K_max + 1, n + 1)
    tail = s.tail
    if isinstance(tail, WitnessTail):
        if _witness_rule(tail, n, k1):
            return StratumVerdict(MEMBER, n, K_max, None, tuple(margins), f"witness tail covers k >= {k1}")
        return StratumVerdict(UNKNOWN, n, K_max, None, tuple(margins))
    if isinstance(tail, (ZeroTail, PeriodicTail)):
        # past the prefix, t* <= F^-1(10^6) < F^3(1), so k with 2k^2 >= prefix and k - n >= 3 refutes
        m = _bounded_tail_refutation(s, n, k1)
        return StratumVerdict(NON_MEMBER, n, K_max, m.k, tuple(margins) + (m,), "bounded tail")
    return StratumVerdict(UNKNOWN, n, K_max, None, tuple(margins))


@dataclass(frozen=True)
class ClosureCheck:
    passed: bool
    n: int
    k: int
    t_star: object
    bound: object
    order: Ordering

    def to_json(self):
        return {
            "result": "Pass" if self.passed else "Fail",
            "n": self.n,
            "k": self.k,
            "tstar": to_text(self.t_star),
            "bound": to_text(self.bound),
            "order": self.order.name,
        }


def closure_necessary(s: ItinerarySeq, n: int, k: int) -> ClosureCheck:
    """Pass iff t*(sigma^(2k^2) s) >= F^(k-n)(1) - 1.  Fail excludes s from the closure of X_n."""
    if k <= n:
        raise InvalidInstance(f"closure test needs k > n, got k={k}, n={n}")
    ts = t_star(s, 2 * k * k).value
    bound = inc(threshold(k, n), -1)
    order = compare(ts, bound)
    return ClosureCheck(order != Ordering.LT, n, k, ts, bound, order)


VERIFIED = "Verified"
HYPOTHESIS_FAILS = "HypothesisFails"


@dataclass(frozen=True)
class Prop7Result:
    status: str
    k: int
    j: int
    l: int
    n: int
    i: int
    hypothesis_term: object
    conclusion_term: object | None = None
    t_star: object | None = None

    def to_json(self):
        out = {"status": self.status, "k": self.k, "j": self.j, "l": self.l, "n": self.n, "i": self.i}
        out["hypothesis_term"] = to_text(self.hypothesis_term)
        if self.conclusion_term is not None:
            out["conclusion_term"] = to_text(self.conclusion_term)
            out["tstar"] = to_text(self.t_star)
        return out


def prop7_valid(k, j, l):
    return j >= 1 and 2 * k * k < 2 * l * l < 2 * k * k + j


def prop7_check(s: ItinerarySeq, k: int, j: int, l: int, n: int) -> Prop7Result:
    """Transfer the X_n witness at 2k^2 + j to the index 2l^2 inside (2k^2, 2k^2 + j).

    If F^-j |s_(2k^2+j)| > F^(k-n)(1), then the same entry, read from
    sigma^(2l^2), is the term at offset i = 2k^2 + j - 2l^2, and it must
    exceed F^(l-n)(1).  Both the term and the full supremum are certified.
    """
    if not prop7_valid(k, j, l):
        raise InvalidInstance(f"need j >= 1 and 2k^2 < 2l^2 < 2k^2 + j (k={k}, j={j}, l={l})")
    p = 2 * k * k + j
    i = p - 2 * l * l
    mag = magnitude_at(s, p)
    hyp = inverse(mag, j)
    if compare(hyp, threshold(k, n)) != Ordering.GT:
        return Prop7Result(HYPOTHESIS_FAILS, k, j, l, n, i, hyp)
    term = inverse(mag, i)
    ts = t_star(s, 2 * l * l).value
    bound = threshold(l, n)
    if compare(term, bound) != Ordering.GT or compare(ts, bound) != Ordering.GT:
        raise CertificateError(
            "transfer inequality failed although its hypothesis holds",
            {"k": k, "j": j, "l": l, "n": n, "term": to_text(term), "bound": to_text(bound)},
        )
    return Prop7Result(VERIFIED, k, j, l, n, i, hyp, term, ts)


@dataclass(frozen=True)
class Claim8Result:
    k: int
    holds: bool
    lhs: object
    rhs: object
    order: Ordering

    def to_json(self):
        return {
            "k": self.k,
            "result": "Holds" if self.holds else "Fails",
            "lhs": to_text(self.lhs),
            "rhs": to_text(self.rhs),
            "order": self.order.name,
        }


def claim8_inequality(k: int) -> Claim8Result:
    """Certified verdict on F^(k^2)(1) - 1 > F^k(1)."""
    if k < 1:
        raise InvalidInstance("k must be >= 1")
    lhs = inc(threshold(k * k, 0), -1)
    rhs = threshold(k, 0)
    order = compare(lhs, rhs)
    return Claim8Result(k, order == Ordering.GT, lhs, rhs, order)


def canonical_xn_point(n: int, c=1) -> EndpointRecord:
    """Witness-tail point with k0 = n + 1, packaged with t* and the bracket [t*, t* + 1]."""
    if n < 0:
        raise InvalidInstance("n must be >= 0")
    if isinstance(c, int) and c < 1:
        raise InvalidInstance("c must be >= 1")
    return tower_endpoint(ItinerarySeq(tail=WitnessTail(c, n + 1)))
