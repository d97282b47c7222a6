"""Exact and enclosed arithmetic for numbers generated by F(t) = 3^t - 1.

Two kinds of value live here.

:class:`TowerExpr` is an exact nonnegative integer built from literals, the map
F and small increments.  Every expression is kept in a canonical form that is
determined by its value alone, so structural equality is value equality:

* values up to ``LIT_MAX`` are literals;
* a larger value v is written ``F(a) + c`` where ``a`` is the largest integer
  with ``F(a) <= v + INC_MAX`` and ``|c| <= INC_MAX``;  chains of F collapse
  into one :class:`FApp` whose literal base is *F-primitive* (``q + 1`` is
  not a power of three), so ``F^19(1)`` never appears as ``F^16(6560)``.

Values that are not within ``INC_MAX`` of an F-image raise
:class:`~fanlab.errors.NotRepresentable`.

A *TowerReal* is a :class:`TowerExpr`, an :class:`ExactInv` ``F^{-k}(e)``, or
an :class:`Enclosure` ``F^level(r)`` with ``r`` known to lie in a mantissa
interval.  Symbolic values compare exactly; enclosures compare by interval
separation with the escalation schedule ``PRECISION_SCHEDULE``.
"""

from __future__ import annotations

import enum
import re
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from mpmath import iv, mp

from .errors import NotRepresentable, TooLarge, TowerSyntaxError, UnresolvedComparison
from .intervals import F_iv, Finv_iv, exact_log3, hi, lo, log3_2, working_precision

LIT_MAX = 10**6
INC_MAX = 10**6
SMALL_BITS = 4096
EXACT_GUARD = 20000
PRECISION_SCHEDULE = (64, 256, 1024, 4096)
PRECISION_CAP = 4096
# Highest level at which an enclosure still converts to a plain mpf interval.
PLAIN_LEVEL_MAX = 4
# Mantissa shift caused by adding |c| <= INC_MAX to a value >= F^4(1) = 3^6560 - 1.
_HIGH_LEVEL_SLACK = mp.mpf(2) ** -10300

# Smallest a with 3^a - 1 >= 2^SMALL_BITS; every non-small canonical value is
# at least 3^a - 1 - INC_MAX, which must still clear the small bound.
_A_BIG = 2585
assert 3 ** (_A_BIG - 1) - 1 < 2**SMALL_BITS <= 3**_A_BIG - 1 - INC_MAX


class TowerExpr:
    """Exact nonnegative integer of tower magnitude.  Build with :func:`lit`,
    :func:`fapp`, :func:`inc`, :func:`from_int` or :func:`parse_expr`."""

    __slots__ = ()

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True)
class Lit(TowerExpr):
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not 0 <= self.n <= LIT_MAX:
            raise NotRepresentable(f"literal must be an int in [0, {LIT_MAX}], got {self.n!r}")

    @property
    def small(self):
        return self.n


@dataclass(frozen=True)
class FApp(TowerExpr):
    j: int
    e: TowerExpr

    def __post_init__(self):
        if not isinstance(self.j, int) or self.j < 1:
            raise NotRepresentable(f"F exponent must be >= 1, got {self.j!r}")

    @cached_property
    def small(self):
        v = self.e.small
        if v is None:
            return None
        for _ in range(self.j):
            if v == 0:
                return 0
            # 3^v - 1 >= 2^(1.58 v)
            if v > SMALL_BITS:
                return None
            v = 3**v - 1
            if v.bit_length() > SMALL_BITS:
                return None
        return v

    @cached_property
    def arg(self):
        """Canonical argument of the outermost F."""
        return fapp(self.e, self.j - 1)


@dataclass(frozen=True)
class Inc(TowerExpr):
    e: TowerExpr
    c: int

    def __post_init__(self):
        if not isinstance(self.c, int) or abs(self.c) > INC_MAX:
            raise NotRepresentable(f"increment must satisfy |c| <= {INC_MAX}, got {self.c!r}")

    @cached_property
    def small(self):
        v = self.e.small
        if v is None:
            return None
        v += self.c
        if v < 0:
            raise NotRepresentable(f"negative value {v}")
        return v if v.bit_length() <= SMALL_BITS else None


Expr = TowerExpr


# --- canonical constructors -------------------------------------------------


def lit(n: int) -> TowerExpr:
    return Lit(n)


def _unfold(q):
    """Write q = F^i(p) with p F-primitive; returns (i, p)."""
    i = 0
    while q >= 2:
        p = exact_log3(q + 1)
        if p is None:
            break
        q, i = p, i + 1
    return i, q


def fapp(e: TowerExpr, j: int = 1) -> TowerExpr:
    """Canonical ``F^j(e)`` for ``j >= 0``."""
    if j < 0:
        raise ValueError("fapp needs j >= 0; use inverse() for F^-k")
    while j > 0 and isinstance(e, Lit):
        v = e.n
        if v == 0:
            return e
        if v <= 12:  # F(12) = 531440 is the last literal image
            e, j = Lit(3**v - 1), j - 1
            continue
        i, q = _unfold(v)
        return FApp(j + i, Lit(q))
    if j == 0:
        return e
    if isinstance(e, FApp):
        return FApp(e.j + j, e.e)
    return FApp(j, e)


def _f_arg_near(v):
    """Largest a with 3^a - 1 <= v + INC_MAX."""
    target = v + INC_MAX + 1
    a = max(0, int((target.bit_length() - 1) / 1.5849625007211563) - 2)
    while 3 ** (a + 1) <= target:
        a += 1
    while 3**a > target:
        a -= 1
    return a


def from_int(v: int) -> TowerExpr:
    """Canonical expression for an explicit nonnegative integer."""
    if v < 0:
        raise NotRepresentable(f"negative value {v}")
    if v <= LIT_MAX:
        return Lit(v)
    a = _f_arg_near(v)
    c = v - (3**a - 1)
    if c > INC_MAX:
        raise NotRepresentable(f"{v} is not within {INC_MAX} of an F-image")
    base = fapp(from_int(a), 1)
    return Inc(base, c) if c else base


def inc(e: TowerExpr, c: int) -> TowerExpr:
    """Canonical ``e + c``."""
    if c == 0:
        return e
    v = e.small
    if v is not None:
        return from_int(v + c)
    if isinstance(e, Inc):
        e, c = e.e, e.c + c
        if c == 0:
            return e
    if abs(c) > INC_MAX:
        raise NotRepresentable(f"increment {c} exceeds {INC_MAX}")
    return Inc(e, c)


def canonical(e: TowerExpr) -> TowerExpr:
    """Rebuild an arbitrary (possibly raw) expression in canonical form."""
    if isinstance(e, Lit):
        return e
    if isinstance(e, FApp):
        return fapp(canonical(e.e), e.j)
    if isinstance(e, Inc):
        return inc(canonical(e.e), e.c)
    raise TypeError(f"not a TowerExpr: {e!r}")


def _split(e):
    """(a, c) with value(e) = F(a) + c, for non-small canonical e."""
    if isinstance(e, Inc):
        return e.e.arg, e.c
    return e.arg, 0


# --- text format ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(F\^)|([()+-]))")


def parse_expr(text: str) -> TowerExpr:
    """Parse ``INT | F^INT(EXPR) | EXPR+INT | EXPR-INT`` into canonical form."""
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise TowerSyntaxError(text, pos, "unexpected character")
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), start))
        pos = m.end()
    toks.append(("", len(text)))
    i = 0

    def peek():
        return toks[i]

    def take_int():
        nonlocal i
        tok, p = toks[i]
        if not tok.isdigit():
            raise TowerSyntaxError(text, p, "expected integer")
        i += 1
        return int(tok)

    def expect(sym):
        nonlocal i
        tok, p = toks[i]
        if tok != sym:
            raise TowerSyntaxError(text, p, f"expected {sym!r}")
        i += 1

    def atom():
        nonlocal i
        tok, p = peek()
        if tok == "F^":
            i += 1
            jp = peek()[1]
            j = take_int()
            if j < 1:
                raise TowerSyntaxError(text, jp, "F exponent must be >= 1")
            expect("(")
            inner = expr()
            expect(")")
            return fapp(inner, j)
        if tok.isdigit():
            n = take_int()
            if n > LIT_MAX:
                raise TowerSyntaxError(text, p, f"literal exceeds {LIT_MAX}")
            return Lit(n)
        raise TowerSyntaxError(text, p, "expected integer or F^")

    def expr():
        nonlocal i
        e = atom()
        while peek()[0] in ("+", "-"):
            sign = 1 if peek()[0] == "+" else -1
            i += 1
            cp = peek()[1]
            c = take_int()
            if c > INC_MAX:
                raise TowerSyntaxError(text, cp, f"increment exceeds {INC_MAX}")
            try:
                e = inc(e, sign * c)
            except NotRepresentable as exc:
                raise TowerSyntaxError(text, cp, str(exc)) from None
        return e

    result = expr()
    tok, p = peek()
    if tok != "":
        raise TowerSyntaxError(text, p, "trailing input")
    return result


def format_expr(e: TowerExpr) -> str:
    if isinstance(e, Lit):
        return str(e.n)
    if isinstance(e, FApp):
        return f"F^{e.j}({format_expr(e.e)})"
    if isinstance(e, Inc):
        sign = "+" if e.c > 0 else "-"
        return f"{format_expr(e.e)}{sign}{abs(e.c)}"
    raise TypeError(e)


# --- exact evaluation ---------------------------------------------------------


def eval_exact(e: TowerExpr, guard: int = EXACT_GUARD) -> int:
    """Exact integer value; refuses anything above ``3**guard``."""
    v = e.small
    if v is not None:
        return v
    a, c = _split(e)
    av = eval_exact(a, guard)
    if av > guard:
        raise TooLarge(f"{format_expr(e)} exceeds 3^{guard}")
    return 3**av - 1 + c


# --- TowerReal ----------------------------------------------------------------


@dataclass(frozen=True)
class ExactInv:
    """``F^{-k}(e)`` with k >= 1 and no further cancellation possible."""

    k: int
    e: TowerExpr

    def __str__(self):
        return f"F^-{self.k}({format_expr(self.e)})"


@dataclass(frozen=True)
class Enclosure:
    """``F^level(r)`` for some r in ``[lo, hi]``.

    Normalization puts ``hi`` in ``[log3(2), 1)``.  ``lo`` normally lies in the
    same range, but when the enclosed values straddle a level boundary it is
    allowed to drop below ``log3(2)`` (down to 0).
    """

    level: int
    lo: mp.mpf
    hi: mp.mpf
    prec: int = 64

    def __str__(self):
        return f"F^{self.level}([{mp.nstr(self.lo, 15)}, {mp.nstr(self.hi, 15)}])"


TowerReal = Union[TowerExpr, ExactInv, Enclosure]
ZERO = Lit(0)


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def as_real(x) -> TowerReal:
    if isinstance(x, int):
        return from_int(x)
    if isinstance(x, str):
        return parse_expr(x)
    if isinstance(x, (TowerExpr, ExactInv, Enclosure)):
        return x
    raise TypeError(f"not a tower value: {x!r}")


def inverse(e, k: int) -> TowerReal:
    """Canonical ``F^{-k}(e)``; cancels against F-chains and powers of three."""
    e = as_real(e)
    if isinstance(e, ExactInv):
        k, e = k + e.k, e.e
    elif isinstance(e, Enclosure):
        return f_apply(e, -k)
    while k > 0:
        if isinstance(e, FApp):
            t = min(k, e.j)
            e, k = fapp(e.e, e.j - t), k - t
            continue
        if isinstance(e, Lit):
            if e.n == 0:
                return e
            p = exact_log3(e.n + 1)
            if p is not None:
                e, k = Lit(p), k - 1
                continue
        break
    return e if k == 0 else ExactInv(k, e)


def f_apply(x, j: int) -> TowerReal:
    """``F^j(x)`` for signed j.  Symbolic forms shift exactly; enclosures shift level."""
    x = as_real(x)
    if isinstance(x, Enclosure):
        return Enclosure(x.level + j, x.lo, x.hi, x.prec)
    if isinstance(x, ExactInv):
        k, e = x.k, x.e
    else:
        k, e = 0, x
    total = j - k
    if total >= 0:
        return fapp(e, total)
    return inverse(e, -total)


def threshold(k: int, n: int) -> TowerReal:
    """``F^{k-n}(1)``."""
    return f_apply(Lit(1), k - n)


def increment(x, c: int, precision: int = 64) -> TowerReal:
    """``x + c``.  Exact on integers; non-integer values become enclosures."""
    x = as_real(x)
    if isinstance(x, TowerExpr):
        return inc(x, c)
    if c == 0:
        return x
    enc = eval_enclosure(x, precision)
    return _enc_add(enc, c, precision)


def is_symbolic(x) -> bool:
    return isinstance(x, (TowerExpr, ExactInv))


# --- comparison ---------------------------------------------------------------

_AUDIT: ContextVar = ContextVar("fanlab_precision_audit", default=None)


@contextmanager
def precision_audit():
    """Collect the highest precision any enclosure comparison needed."""
    record = {"max_precision": 0, "enclosure_comparisons": 0}
    token = _AUDIT.set(record)
    try:
        yield record
    finally:
        _AUDIT.reset(token)


def _note_precision(p):
    rec = _AUDIT.get()
    if rec is not None:
        rec["enclosure_comparisons"] += 1
        rec["max_precision"] = max(rec["max_precision"], p)


def _cmp_expr(x: TowerExpr, y: TowerExpr) -> int:
    if x is y:
        return 0
    xs, ys = x.small, y.small
    if xs is not None:
        if ys is not None:
            return (xs > ys) - (xs < ys)
        return -1
    if ys is not None:
        return 1
    if x == y:
        return 0
    # both >= 3^2585 - 1 - INC_MAX, so F-arguments differ by >= 1 and
    # 3^(a+1) - 3^a = 2*3^a > 2*INC_MAX dominates any increment difference
    a, c = _split(x)
    b, d = _split(y)
    r = _cmp_expr(a, b)
    if r:
        return r
    return (c > d) - (c < d)


def _parts(x):
    if isinstance(x, ExactInv):
        return x.k, x.e
    return 0, x


def _cmp_symbolic(a, b) -> int:
    ka, ea = _parts(a)
    kb, eb = _parts(b)
    # F^{-ka}(ea) < F^{-kb}(eb)  iff  ea < F^{ka-kb}(eb)  (F increasing on [0, inf))
    if ka >= kb:
        return _cmp_expr(ea, fapp(eb, ka - kb))
    return _cmp_expr(fapp(ea, kb - ka), eb)


def compare(a, b, precision: int = PRECISION_SCHEDULE[0], cap: int = PRECISION_CAP) -> Ordering:
    """Certified order of two tower values.

    Symbolic pairs are decided exactly.  Any pair involving an
    :class:`Enclosure` is separated by intervals, escalating through
    ``PRECISION_SCHEDULE``; failure at ``cap`` raises UnresolvedComparison.
    """
    a, b = as_real(a), as_real(b)
    if a == b:
        return Ordering.EQ
    if is_symbolic(a) and is_symbolic(b):
        return Ordering(_cmp_symbolic(a, b))
    return compare_by_enclosure(a, b, precision, cap)


def compare_by_enclosure(a, b, precision: int = PRECISION_SCHEDULE[0], cap: int = PRECISION_CAP) -> Ordering:
    """Order by interval separation only, ignoring the symbolic fast path."""
    a, b = as_real(a), as_real(b)
    if a == b:
        return Ordering.EQ
    for p in _schedule(precision, cap):
        r = _cmp_enclosures(a, b, p)
        if r is not None:
            _note_precision(p)
            return Ordering(r)
    _note_precision(cap)
    raise UnresolvedComparison(f"cannot separate {a} and {b} at {cap} bits")


def _schedule(start, cap):
    steps = [p for p in PRECISION_SCHEDULE if start <= p <= cap]
    if not steps or steps[0] != start:
        steps.insert(0, start)
    return steps


def _is_zero(x):
    return isinstance(x, Lit) and x.n == 0


def _cmp_enclosures(a, b, prec):
    if _is_zero(a) or _is_zero(b):
        if _is_zero(a) and _is_zero(b):
            return 0
        # every other value is positive; enclosures of positive values are too
        if _is_zero(a):
            return -1 if _enc_positive(b) else None
        return 1 if _enc_positive(a) else None
    ea = eval_enclosure(a, prec)
    eb = eval_enclosure(b, prec)
    return _cmp_levels(ea, eb, prec)


def _enc_positive(x):
    return not isinstance(x, Enclosure) or x.lo > 0


def _cmp_levels(ea: Enclosure, eb: Enclosure, prec):
    if ea.level < eb.level:
        r = _cmp_levels(eb, ea, prec)
        return None if r is None else -r
    d = ea.level - eb.level
    with working_precision(prec):
        if d == 0:
            A = iv.mpf([ea.lo, ea.hi])
        elif _at_least_log3_2(ea.lo, prec):
            # F^d(A) >= F^{d-1}(1) >= 1 > mantissa of b
            return 1
        else:
            # straddling mantissa; F(t) >= t lets a partial lift bound F^d(lo) from below
            A = iv.mpf(ea.lo)
            for _ in range(min(d, PLAIN_LEVEL_MAX)):
                A = F_iv(A)
            if lo(A) > eb.hi:
                return 1
            if d > PLAIN_LEVEL_MAX:
                return None
            A = iv.mpf([ea.lo, ea.hi])
            for _ in range(d):
                A = F_iv(A)
        if hi(A) < eb.lo:
            return -1
        if lo(A) > eb.hi:
            return 1
    return None


# --- enclosures ---------------------------------------------------------------


def _at_least_log3_2(x, prec):
    """Decide x >= log3(2) for a binary float x (never equal: log3(2) is irrational)."""
    p = prec + 16
    for _ in range(12):
        with working_precision(p):
            L = log3_2()
            if x >= hi(L):
                return True
            if x < lo(L):
                return False
        p *= 2
    raise UnresolvedComparison(f"cannot place {x} against log3(2)")


def _normalize(level, X, prec):
    """Canonical level form of the value F^level(X) for a plain interval X > 0."""
    with working_precision(prec):
        while hi(X) >= 1:
            X = Finv_iv(X)
            level += 1
        while not _at_least_log3_2(hi(X), prec):
            X = F_iv(X)
            level -= 1
        a = lo(X)
        if a < 0:
            a = mp.zero
        return Enclosure(level, a, hi(X), prec)


def _to_plain(enc: Enclosure, prec):
    if enc.level > PLAIN_LEVEL_MAX:
        raise TooLarge(f"level {enc.level} enclosure has no plain interval form")
    with working_precision(prec):
        X = iv.mpf([enc.lo, enc.hi])
        for _ in range(enc.level):
            X = F_iv(X)
        for _ in range(-enc.level):
            X = Finv_iv(X)
        return X


def _enc_add(enc: Enclosure, c: int, prec):
    if enc.level <= PLAIN_LEVEL_MAX:
        X = _to_plain(enc, prec)
        with working_precision(prec):
            Y = X + c
            if hi(Y) <= 0:
                raise NotRepresentable("increment makes the value negative")
            if lo(Y) < 0:
                Y = iv.mpf([0, hi(Y)])
        return _normalize(0, Y, prec)
    # values at level >= 5 with mantissa >= log3(2) exceed F^4(1); there adding
    # c moves the mantissa by less than _HIGH_LEVEL_SLACK
    with working_precision(prec):
        if c > 0:
            X = iv.mpf([enc.lo, enc.hi]) + iv.mpf([0, _HIGH_LEVEL_SLACK])
            a = enc.lo
        else:
            X = iv.mpf([enc.lo, enc.hi]) - iv.mpf([0, _HIGH_LEVEL_SLACK])
            a = lo(X)
        return _normalize(enc.level, iv.mpf([max(a, mp.zero), hi(X)]), prec)


def _expr_enclosure(e: TowerExpr, prec) -> Enclosure:
    if isinstance(e, Lit):
        if e.n == 0:
            raise ValueError("zero has no level form")
        with working_precision(prec):
            X = iv.mpf(e.n)
        return _normalize(0, X, prec)
    if isinstance(e, FApp):
        base = _expr_enclosure(e.e, prec)
        return Enclosure(base.level + e.j, base.lo, base.hi, prec)
    v = e.small
    if v is not None:
        with working_precision(prec):
            X = iv.mpf(v)
        return _normalize(0, X, prec)
    return _enc_add(_expr_enclosure(e.e, prec), e.c, prec)


def eval_enclosure(x, precision: int = 64):
    """Canonical level/mantissa enclosure of a tower value.

    Exact zero has no level form and is returned unchanged as ``ZERO``.  An
    exact power of F such as ``1 = F(log3 2)`` lands on the level whose
    mantissa interval brackets ``log3(2)``: the upper endpoint decides the level.
    """
    if not 16 <= precision <= PRECISION_CAP * 4:
        raise ValueError(f"precision {precision} outside supported range")
    x = as_real(x)
    if _is_zero(x):
        return ZERO
    if isinstance(x, Enclosure):
        return x
    if isinstance(x, ExactInv):
        enc = _expr_enclosure(x.e, precision)
        return Enclosure(enc.level - x.k, enc.lo, enc.hi, precision)
    return _expr_enclosure(x, precision)


def to_interval(x, precision: int = 64):
    """Plain mpmath interval for a value small enough to have one."""
    x = as_real(x)
    if isinstance(x, TowerExpr) and x.small is not None:
        with working_precision(precision):
            return iv.mpf(x.small)
    if _is_zero(x):
        with working_precision(precision):
            return iv.mpf(0)
    if isinstance(x, ExactInv) and x.e.small is not None:
        with working_precision(precision):
            X = iv.mpf(x.e.small)
            for _ in range(x.k):
                X = Finv_iv(X)
            return X
    return _to_plain(eval_enclosure(x, precision), precision)


def to_text(x) -> str:
    """Stable text for reports: canonical expression, ``F^-k(expr)`` or level form."""
    return format_expr(x) if isinstance(x, TowerExpr) else str(x)
