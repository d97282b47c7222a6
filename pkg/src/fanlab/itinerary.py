"""Finitely described integer sequences and the supremum t*(s) = sup_k F^-k |s_k|.

A sequence is a finite prefix of explicit entries laid over a tail rule.  The
prefix wins wherever both define a position.  Three tail rules exist, each
with an exactly computable supremum:

``ZeroTail``
    every position is 0.
``PeriodicTail(block, phase)``
    position p holds ``block[(p + phase) % len(block)]``.
``WitnessTail(c, k0, anchor, offset)``
    for every k >= k0 the position ``2k^2 + 1 - offset`` holds
    ``F^(2k^2 + 1 - anchor)(c)``; all other positions are 0.  With
    ``anchor = offset = 0`` and a small integer ``c`` this is the pattern that
    makes a sequence a member of X_n.  Under the shift sigma^m every tail term
    contributes exactly ``F^(m + offset - anchor)(c)`` to t*.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from .errors import NumericModeRequired, SpecError
from .tower import (
    ZERO,
    Lit,
    Ordering,
    TowerExpr,
    as_real,
    compare,
    f_apply,
    format_expr,
    from_int,
    inverse,
    parse_expr,
)

__all__ = [
    "Entry",
    "ZeroTail",
    "PeriodicTail",
    "WitnessTail",
    "ItinerarySeq",
    "SupCertificate",
    "zero_sequence",
    "constant_sequence",
    "witness_sequence",
    "shift",
    "magnitude_at",
    "t_star",
    "dominates",
    "seq_from_json",
    "seq_to_json",
]


@dataclass(frozen=True)
class Entry:
    pos: int
    mag: TowerExpr
    sign: int = 1


@dataclass(frozen=True)
class ZeroTail:
    pass


@dataclass(frozen=True)
class PeriodicTail:
    block: tuple
    phase: int = 0

    def __post_init__(self):
        if not self.block:
            raise SpecError("periodic block must be non-empty")
        for b in self.block:
            if not isinstance(b, int) or not 0 <= b <= 10**6:
                raise SpecError(f"periodic block entries must be ints in [0, 10^6], got {b!r}")
        object.__setattr__(self, "phase", self.phase % len(self.block))

    def at(self, p):
        return self.block[(p + self.phase) % len(self.block)]


@dataclass(frozen=True)
class WitnessTail:
    c: TowerExpr
    k0: int
    anchor: int = 0
    offset: int = 0

    def __post_init__(self):
        if isinstance(self.c, int):
            object.__setattr__(self, "c", from_int(self.c))
        if compare(self.c, 1) == Ordering.LT:
            raise SpecError("witness constant c must be >= 1")
        if self.k0 < 0:
            raise SpecError("witness k0 must be >= 0")
        if 2 * self.k0**2 + 1 < self.anchor:
            raise SpecError("witness anchor lies beyond the first witness position")

    def first_k(self, pmin):
        """Least k >= k0 whose position 2k^2 + 1 - offset is >= pmin."""
        k = self.k0
        while 2 * k * k + 1 - self.offset < pmin:
            k += 1
        return k

    def position(self, k):
        return 2 * k * k + 1 - self.offset

    def mag(self, k):
        return f_apply(self.c, 2 * k * k + 1 - self.anchor)

    def k_at(self, p):
        """k with position(k) == p, or None."""
        q = p + self.offset - 1
        if q < 0 or q % 2:
            return None
        k = int((q // 2) ** 0.5)
        while k * k < q // 2:
            k += 1
        while k * k > q // 2:
            k -= 1
        if 2 * k * k == q and k >= self.k0:
            return k
        return None

    def contribution(self, m):
        """Exact value every tail term adds to t*(sigma^m s)."""
        return f_apply(self.c, m + self.offset - self.anchor)


Tail = Union[ZeroTail, PeriodicTail, WitnessTail]


@dataclass(frozen=True)
class ItinerarySeq:
    prefix: tuple = ()
    tail: Tail = field(default_factory=ZeroTail)

    def __post_init__(self):
        entries = []
        for e in self.prefix:
            if not isinstance(e, Entry):
                e = Entry(*e)
            if e.pos < 0:
                raise SpecError(f"negative prefix position {e.pos}")
            if e.sign not in (1, -1):
                raise SpecError(f"sign must be +1 or -1 at position {e.pos}")
            mag = as_real(e.mag)
            if not isinstance(mag, TowerExpr):
                raise SpecError(f"magnitude at position {e.pos} must be an integer")
            entries.append(Entry(e.pos, mag, e.sign))
        entries.sort(key=lambda e: e.pos)
        for a, b in zip(entries, entries[1:]):
            if a.pos == b.pos:
                raise SpecError(f"duplicate prefix position {a.pos}")
        object.__setattr__(self, "prefix", tuple(entries))

    @cached_property
    def by_pos(self):
        return {e.pos: e for e in self.prefix}

    @property
    def prefix_end(self):
        """One past the last prefix position."""
        return self.prefix[-1].pos + 1 if self.prefix else 0

    def is_numeric(self):
        if isinstance(self.tail, WitnessTail):
            return False
        return all(isinstance(e.mag, Lit) for e in self.prefix)

    def numeric_entries(self, upto):
        """Integer magnitudes |s_0| .. |s_{upto-1}|."""
        out = []
        for p in range(upto):
            m = magnitude_at(self, p)
            if not isinstance(m, Lit):
                raise NumericModeRequired(f"tower-sized magnitude at position {p}")
            out.append(m.n)
        return out

    def __str__(self):
        return json.dumps(seq_to_json(self), sort_keys=True)


@dataclass(frozen=True)
class SupCertificate:
    """``value`` = t*(sigma^n s); attained at offset ``index`` (k >= 1) from ``source``.

    Every term with offset beyond ``window`` is certified <= ``value``.
    """

    value: object
    index: int | None
    source: str
    window: int


def zero_sequence():
    return ItinerarySeq()


def constant_sequence(v):
    return ItinerarySeq(tail=PeriodicTail((v,)))


def witness_sequence(c=1, k0=1):
    return ItinerarySeq(tail=WitnessTail(from_int(c) if isinstance(c, int) else c, k0))


def magnitude_at(s: ItinerarySeq, k: int) -> TowerExpr:
    e = s.by_pos.get(k)
    if e is not None:
        return e.mag
    t = s.tail
    if isinstance(t, PeriodicTail):
        return Lit(t.at(k))
    if isinstance(t, WitnessTail):
        kk = t.k_at(k)
        if kk is not None:
            return t.mag(kk)
    return ZERO


def shift(s: ItinerarySeq, n: int) -> ItinerarySeq:
    """sigma^n(s)."""
    if n < 0:
        raise ValueError("shift needs n >= 0")
    if n == 0:
        return s
    prefix = tuple(Entry(e.pos - n, e.mag, e.sign) for e in s.prefix if e.pos >= n)
    t = s.tail
    if isinstance(t, PeriodicTail):
        t = PeriodicTail(t.block, t.phase + n)
    elif isinstance(t, WitnessTail):
        t = WitnessTail(t.c, t.k0, t.anchor, t.offset + n)
    return ItinerarySeq(prefix, t)


def _max(best, cand):
    if best is None:
        return cand
    if compare(cand[0], best[0]) == Ordering.GT:
        return cand
    return best


def t_star(s: ItinerarySeq, n: int = 0) -> SupCertificate:
    """Exact ``sup_{k>=1} F^-k |s_{n+k}|`` with its attaining offset."""
    best = None
    window = 0
    for e in s.prefix:
        if e.pos > n:
            k = e.pos - n
            best = _max(best, (inverse(e.mag, k), k, "prefix"))
            window = max(window, k)
    t = s.tail
    if isinstance(t, PeriodicTail):
        L = len(t.block)
        seen = set()
        start = n + 1
        stop = max(start, s.prefix_end) + L
        for p in range(start, stop):
            if p in s.by_pos:
                continue
            r = (p + t.phase) % L
            if r in seen:
                continue
            seen.add(r)
            # F^-k(b) strictly decreases in k, so the first free slot of each residue wins
            best = _max(best, (inverse(Lit(t.block[r]), p - n), p - n, "periodic"))
        window = max(window, stop - n)
    elif isinstance(t, WitnessTail):
        k = t.first_k(n + 1)
        while t.position(k) in s.by_pos:
            k += 1
        idx = t.position(k) - n
        best = _max(best, (t.contribution(n), idx, "witness"))
        window = max(window, idx)
    if best is None or best[0] == ZERO:
        return SupCertificate(ZERO, None, "zero", window)
    return SupCertificate(best[0], best[1], best[2], window)


def dominates(big: ItinerarySeq, small: ItinerarySeq):
    """Certify ``|small_i| <= |big_i|`` for every i.

    Returns ``(True, None)`` or ``(False, p)`` with a violating position p.
    """
    horizon = max(big.prefix_end, small.prefix_end)
    tb, ts = big.tail, small.tail
    period = 1
    for t in (tb, ts):
        if isinstance(t, PeriodicTail):
            period = period * len(t.block) // _gcd(period, len(t.block))
    # positions below horizon + period are checked one by one
    limit = horizon + period
    for p in range(limit):
        if compare(magnitude_at(small, p), magnitude_at(big, p)) == Ordering.GT:
            return False, p
    # beyond the prefixes only the tails matter
    if isinstance(ts, ZeroTail):
        return True, None
    if isinstance(ts, PeriodicTail):
        if max(ts.block) == 0:
            return True, None
        if isinstance(tb, PeriodicTail):
            return True, None  # one full common period already checked
        if isinstance(tb, ZeroTail):
            return False, _first(lambda p: ts.at(p) > 0, limit)
        # witness tails vanish off a sparse set of positions
        return False, _first(lambda p: ts.at(p) > 0 and tb.k_at(p) is None, limit)
    # small has a witness tail
    if not isinstance(tb, WitnessTail) or tb.offset != ts.offset:
        k = ts.first_k(limit)
        while True:
            p = ts.position(k)
            if compare(ts.mag(k), magnitude_at(big, p)) == Ordering.GT:
                return False, p
            k += 1
    if tb.first_k(limit) != ts.first_k(limit):
        k = min(tb.first_k(limit), ts.first_k(limit))
        if ts.first_k(limit) == k:
            return False, ts.position(k)
    # both magnitudes are F^(q - anchor)(c); compare after a common shift
    if compare(f_apply(ts.c, tb.anchor - ts.anchor), tb.c) == Ordering.GT:
        return False, ts.position(ts.first_k(limit))
    return True, None


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _first(pred, start):
    p = start
    while not pred(p):
        p += 1
    return p


# --- JSON ----------------------------------------------------------------------


def _mag_from_json(v, where):
    try:
        if isinstance(v, bool):
            raise SpecError("boolean magnitude")
        if isinstance(v, int):
            return from_int(v)
        if isinstance(v, str):
            return parse_expr(v)
    except (ValueError, SpecError) as exc:
        raise SpecError(f"{where}: {exc}") from None
    raise SpecError(f"{where}: magnitude must be an int or tower expression string")


def seq_from_json(obj) -> ItinerarySeq:
    """Build a sequence from its JSON description (already decoded, or a JSON string)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise SpecError("sequence spec must be an object")
    unknown = set(obj) - {"prefix", "tail"}
    if unknown:
        raise SpecError(f"unknown sequence keys {sorted(unknown)}")
    entries = []
    for i, raw in enumerate(obj.get("prefix", [])):
        where = f"prefix[{i}]"
        if not isinstance(raw, dict) or "pos" not in raw or "mag" not in raw:
            raise SpecError(f"{where}: needs 'pos' and 'mag'")
        pos = raw["pos"]
        if not isinstance(pos, int) or isinstance(pos, bool) or pos < 0:
            raise SpecError(f"{where}.pos: must be a nonnegative int")
        sign = raw.get("sign", 1)
        if sign not in (1, -1):
            raise SpecError(f"{where}.sign: must be 1 or -1")
        entries.append(Entry(pos, _mag_from_json(raw["mag"], f"{where}.mag"), sign))
    tail = _tail_from_json(obj.get("tail", "zero"))
    return ItinerarySeq(tuple(entries), tail)


def _tail_from_json(t):
    if t == "zero" or t == {"type": "zero"}:
        return ZeroTail()
    if not isinstance(t, dict) or "type" not in t:
        raise SpecError("tail must be 'zero' or an object with a 'type'")
    kind = t["type"]
    if kind == "periodic":
        block = t.get("block")
        if not isinstance(block, list) or not block:
            raise SpecError("tail.block: must be a non-empty list")
        for i, b in enumerate(block):
            if not isinstance(b, int) or isinstance(b, bool) or b < 0:
                raise SpecError(f"tail.block[{i}]: must be a nonnegative int")
        return PeriodicTail(tuple(abs(b) for b in block), t.get("phase", 0))
    if kind == "witness":
        for key in ("c", "k0"):
            if key not in t:
                raise SpecError(f"tail.{key}: required for witness tails")
        c = _mag_from_json(t["c"], "tail.c")
        return WitnessTail(c, t["k0"], t.get("anchor", 0), t.get("offset", 0))
    raise SpecError(f"tail.type: unknown tail type {kind!r}")


def _mag_to_json(m):
    return m.n if isinstance(m, Lit) else format_expr(m)


def seq_to_json(s: ItinerarySeq):
    out = {}
    if s.prefix:
        out["prefix"] = [{"pos": e.pos, "mag": _mag_to_json(e.mag), "sign": e.sign} for e in s.prefix]
    t = s.tail
    if isinstance(t, ZeroTail):
        out["tail"] = "zero"
    elif isinstance(t, PeriodicTail):
        out["tail"] = {"type": "periodic", "block": list(t.block)}
        if t.phase:
            out["tail"]["phase"] = t.phase
    else:
        out["tail"] = {"type": "witness", "c": _mag_to_json(t.c), "k0": t.k0}
        if t.anchor:
            out["tail"]["anchor"] = t.anchor
        if t.offset:
            out["tail"]["offset"] = t.offset
    return out
