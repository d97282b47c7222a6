"""The skew-product map on [0, inf) x Z^omega, orbit heights and escape heights.

One step sends ``(t, s)`` to ``(F(t) - |s_1|, sigma(s))``: the entry that is
subtracted is the first entry of the *shifted* sequence.  With this indexing
the supremum ``t*(s) = sup_{k>=1} F^-k |s_k|`` sandwiches the minimal escape
height, ``t*(s) <= t_s <= t*(s) + 1``, and the minimal height obeys

    t_s = log3(1 + |s_1| + t_{sigma(s)}),

which is what :func:`t_min_enclosure` iterates backwards.

Forward orbits are numeric only: subtracting a tower-sized entry from F(T)
is not representable, so sequences with tower entries go through t* instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from mpmath import iv, mp

from .errors import DepthInsufficient, HorizonExceeded, NumericModeRequired, TooLarge
from .intervals import F_iv, Finv_iv, hi, lo, working_precision
from .itinerary import ItinerarySeq, PeriodicTail, ZeroTail, magnitude_at, shift, t_star
from .tower import ZERO, Lit, increment, to_interval

DEFAULT_HORIZON = 15
DEFAULT_TOL = 1e-9
DEPTH_CAP = 200
DEFAULT_PRECISION = 128
# For t >= 20 and |s| <= 10^6: F(t) - |s| >= t, so the orbit never comes back down.
ESCAPE_HEIGHT = 20
# F is not evaluated above this height.
_F_INPUT_MAX = 2**16


class Membership(enum.Enum):
    CERTIFIED_YES = "CertifiedYes"
    CERTIFIED_NO = "CertifiedNo"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class EndpointRecord:
    """A sequence with t*(s) and an enclosure ``[lo, hi]`` of its escape height.

    In ``numeric`` mode lo/hi are mpf reals from backward iteration.  In
    ``tower`` mode they are the tower values t* and t* + 1.
    """

    seq: ItinerarySeq
    t_star0: object
    lo: object
    hi: object
    mode: str
    depth: int | None = None
    precision: int | None = None

    @property
    def width(self):
        if self.mode != "numeric":
            return None
        return _width(self.lo, self.hi)


def _width(a, b):
    """Upper bound on b - a."""
    with working_precision(max(mp.prec, 64)):
        return hi(iv.mpf(b) - iv.mpf(a))


def _interval(t):
    if isinstance(t, iv.mpf):
        return t
    if isinstance(t, (tuple, list)):
        return iv.mpf([t[0], t[1]])
    if isinstance(t, float):
        return iv.mpf(mp.mpf(t))
    return iv.mpf(t)


def _entry(s, p):
    m = magnitude_at(s, p)
    if not isinstance(m, Lit):
        raise NumericModeRequired(f"position {p} holds a tower-sized magnitude")
    return m.n


def _step(T, m):
    if hi(T) > _F_INPUT_MAX:
        raise TooLarge("orbit height too large to apply F")
    return F_iv(T) - m


def orbit(t0, s: ItinerarySeq, n: int, precision: int = DEFAULT_PRECISION):
    """Interval enclosures of T(F^j(x)) for j = 0..n."""
    with working_precision(precision):
        T = _interval(t0)
        out = [T]
        for j in range(n):
            T = _step(T, _entry(s, j + 1))
            out.append(T)
    return out


def orbit_height(t0, s: ItinerarySeq, n: int, precision: int = DEFAULT_PRECISION, horizon: int = DEFAULT_HORIZON):
    """Enclosure of T(F^n(<t0, s>))."""
    if n > horizon:
        raise HorizonExceeded(f"n={n} exceeds horizon {horizon}")
    return orbit(t0, s, n, precision)[-1]


def _upper_seed(s, depth, precision):
    ts = t_star(s, depth).value
    if ts == ZERO:
        # every entry past `depth` is zero, so the escape height there is exactly 0
        return mp.zero
    if not _numeric_value(ts):
        raise NumericModeRequired("t* of the shifted sequence is tower-sized")
    with working_precision(precision):
        return hi(to_interval(ts, precision) + 1)


def _numeric_value(x):
    try:
        to_interval(x, 64)
    except TooLarge:
        return False
    return True


def t_min_at_depth(s: ItinerarySeq, depth: int, precision: int = DEFAULT_PRECISION):
    """(lo, hi) after ``depth`` backward steps from the seeds 0 and t*(sigma^depth s) + 1."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    mags = [_entry(s, j + 1) for j in range(depth)]
    upper = _upper_seed(s, depth, precision)
    with working_precision(precision):
        L = iv.mpf(0)
        U = iv.mpf(upper)
        for m in reversed(mags):
            L = Finv_iv(L + m)
            U = Finv_iv(U + m)
        return lo(L), hi(U)


def t_min_enclosure(
    s: ItinerarySeq,
    depth: int | None = None,
    precision: int = DEFAULT_PRECISION,
    tol: float | None = DEFAULT_TOL,
    depth_cap: int = DEPTH_CAP,
) -> EndpointRecord:
    """Certified enclosure of the minimal escape height t_s.

    With ``depth=None`` the depth grows until the width drops below ``tol``.
    An explicit depth runs once and raises DepthInsufficient if ``tol`` is
    given and not met.
    """
    if not s.is_numeric():
        raise NumericModeRequired("t_min_enclosure needs a numeric-mode sequence")
    if depth is not None:
        depths = [depth]
    else:
        base = max(1, s.prefix_end)
        depths = sorted({min(depth_cap, d) for d in (base, base + 8, base + 16, base + 32, base + 64, 2 * base + 64, depth_cap)})
    a = b = None
    for d in depths:
        a, b = t_min_at_depth(s, d, precision)
        if tol is None or _width(a, b) <= tol:
            break
    else:
        raise DepthInsufficient(f"width {mp.nstr(_width(a, b), 5)} above tol {tol} at depth {d}")
    return EndpointRecord(s, t_star(s).value, a, b, "numeric", d, precision)


def tower_endpoint(s: ItinerarySeq, precision: int = 64) -> EndpointRecord:
    """Endpoint record with the bracket ``[t*, t* + 1]``; works for any tail."""
    ts = t_star(s).value
    return EndpointRecord(s, ts, ts, increment(ts, 1, precision), "tower", None, precision)


def _periodic_from(s, j):
    """Period length if sigma^j(s) is purely periodic, else None."""
    if j < s.prefix_end:
        return None
    if isinstance(s.tail, PeriodicTail):
        return len(s.tail.block)
    if isinstance(s.tail, ZeroTail):
        return 1
    return None


def in_J(t, s: ItinerarySeq, horizon: int = DEFAULT_HORIZON, precision: int = DEFAULT_PRECISION) -> Membership:
    """Decide whether ``<t, s>`` keeps a nonnegative orbit forever.

    CertifiedNo: some orbit height is certified negative.
    CertifiedYes: every height up to the certificate is >= 0, and the orbit point
    there lies above the escape height of its shifted sequence,
    exceeds ESCAPE_HEIGHT, or recurs above its own height after a full period
    of a purely periodic remainder.
    """
    if not s.is_numeric():
        raise NumericModeRequired("in_J needs a numeric-mode sequence")
    heights = []
    with working_precision(precision):
        T = _interval(t)
        for j in range(horizon + 1):
            if j:
                if hi(T) > _F_INPUT_MAX:
                    break
                T = F_iv(T) - _entry(s, j)
            heights.append(T)
            if hi(T) < 0:
                return Membership.CERTIFIED_NO
            if lo(T) >= ESCAPE_HEIGHT:
                break
    for j, T in enumerate(heights):
        if lo(T) < 0:
            return Membership.UNKNOWN
        if lo(T) >= ESCAPE_HEIGHT:
            return Membership.CERTIFIED_YES
        try:
            rec = t_min_enclosure(shift(s, j), precision=precision, tol=None, depth=max(1, s.prefix_end - j) + 40)
            if lo(T) >= rec.hi:
                return Membership.CERTIFIED_YES
        except NumericModeRequired:
            pass
        L = _periodic_from(s, j)
        if (
            L is not None
            and j + L < len(heights)
            and all(lo(h) >= 0 for h in heights[j : j + L])
            and lo(heights[j + L]) >= hi(T)
        ):
            return Membership.CERTIFIED_YES
    return Membership.UNKNOWN


@dataclass(frozen=True)
class SandwichRecord:
    n: int
    t_star: object
    height: object
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self):
        return self.lower_ok and self.upper_ok


def prop6_sandwich(s: ItinerarySeq, n_max: int = 8, precision: int = 160, tol=1e-30):
    """Check ``t*(sigma^n s) <= T(F^n(x)) <= t*(sigma^n s) + 1`` for n <= n_max.

    x sits at the certified upper bound of t_s, so x is in J.  The forward
    orbit and t* are evaluated with 96 extra bits so that the tiny gap between
    x and the true endpoint is resolved.
    """
    rec = t_min_enclosure(s, precision=precision, tol=tol)
    fine = precision + 96
    heights = orbit(rec.hi, s, n_max, fine)
    out = []
    for n, T in enumerate(heights):
        ts = t_star(s, n).value
        with working_precision(fine):
            S = to_interval(ts, fine)
            out.append(SandwichRecord(n, ts, T, hi(S) <= lo(T), hi(T) <= lo(S + 1)))
    return out
