"""Finite-support model of complete Erdos space and its sigma-product.

An :class:`ErdosPoint` has entries 1/d (d >= 1) at finitely many positions
and 0 elsewhere.  Every predicate below works with exact rationals; only
:func:`l2_norm` rounds, and only in its final square root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .errors import SpecError


@dataclass(frozen=True)
class ErdosPoint:
    support: tuple = ()  # sorted (pos, den) pairs

    def __post_init__(self):
        items = dict()
        for pos, den in self.support:
            if not isinstance(pos, int) or pos < 0:
                raise SpecError(f"support position must be a nonnegative int, got {pos!r}")
            if not isinstance(den, int) or den < 1:
                raise SpecError(f"denominator at position {pos} must be an int >= 1, got {den!r}")
            if pos in items:
                raise SpecError(f"duplicate support position {pos}")
            items[pos] = den
        object.__setattr__(self, "support", tuple(sorted(items.items())))

    @classmethod
    def of(cls, *dens):
        """Point with entries 1/dens[0], 1/dens[1], ... at positions 0, 1, ..."""
        return cls(tuple(enumerate(dens)))

    def entry(self, pos):
        for p, d in self.support:
            if p == pos:
                return Fraction(1, d)
        return Fraction(0)

    def is_zero(self):
        return not self.support


ZERO_POINT = ErdosPoint()


def norm_sq(p: ErdosPoint) -> Fraction:
    return sum((Fraction(1, d * d) for _, d in p.support), Fraction(0))


def l2_norm(p: ErdosPoint, precision: int = 53):
    """sqrt of the exact rational sum of squares, rounded once at ``precision`` bits."""
    q = norm_sq(p)
    with mp.workprec(precision):
        return +mp.sqrt(mp.mpf(q.numerator) / q.denominator)


def in_Kn(p: ErdosPoint, n: int) -> bool:
    """||p|| <= n + 1, decided on squares."""
    return norm_sq(p) <= (n + 1) ** 2


@dataclass(frozen=True)
class SigmaPoint:
    """Finitely many coordinates; every later coordinate is the zero point."""

    coords: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def coord(self, i):
        return self.coords[i] if i < len(self.coords) else ZERO_POINT


def in_En(q: SigmaPoint, n: int) -> bool:
    """Coordinate 0 free, coordinates 1..n in K_n, everything after zero."""
    for i, c in enumerate(q.coords):
        if i == 0:
            continue
        if i <= n:
            if not in_Kn(c, n):
                return False
        elif not c.is_zero():
            return False
    return True


@dataclass(frozen=True)
class Ball:
    """Closed ball of rational radius around a finite-support centre."""

    radius: Fraction
    center: ErdosPoint = ZERO_POINT

    def contains(self, p: ErdosPoint) -> bool:
        positions = {pos for pos, _ in p.support} | {pos for pos, _ in self.center.support}
        d2 = sum(((p.entry(i) - self.center.entry(i)) ** 2 for i in positions), Fraction(0))
        return d2 <= Fraction(self.radius) ** 2


@dataclass(frozen=True)
class CoordConstraint:
    """Union of balls (empty means unrestricted) plus fixed entry values."""

    balls: tuple = ()
    values: tuple = ()  # (pos, Fraction) pairs that must match exactly

    def contains(self, p: ErdosPoint) -> bool:
        if self.balls and not any(b.contains(p) for b in self.balls):
            return False
        return all(p.entry(pos) == v for pos, v in self.values)


def in_basis(q: SigmaPoint, basis) -> bool:
    """Membership in C_0 x ... x C_m x (everything) intersected with the sigma-product."""
    return all(c.contains(q.coord(i)) for i, c in enumerate(basis))


# --- JSON ----------------------------------------------------------------------


def point_from_json(obj, where="point") -> ErdosPoint:
    if not isinstance(obj, dict) or "support" not in obj:
        raise SpecError(f"{where}: needs a 'support' list")
    pairs = []
    for i, e in enumerate(obj["support"]):
        if not isinstance(e, dict) or "pos" not in e or "den" not in e:
            raise SpecError(f"{where}.support[{i}]: needs 'pos' and 'den'")
        pairs.append((e["pos"], e["den"]))
    try:
        return ErdosPoint(tuple(pairs))
    except SpecError as exc:
        raise SpecError(f"{where}: {exc}") from None


def sigma_from_json(obj) -> SigmaPoint:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or not isinstance(obj.get("coords"), list):
        raise SpecError("sigma point needs a 'coords' list")
    return SigmaPoint(tuple(point_from_json(c, f"coords[{i}]") for i, c in enumerate(obj["coords"])))


def point_to_json(p: ErdosPoint):
    return {"support": [{"pos": pos, "den": d} for pos, d in p.support]}


def sigma_to_json(q: SigmaPoint):
    return {"coords": [point_to_json(c) for c in q.coords]}


def _frac(v, where):
    try:
        return Fraction(v)
    except (TypeError, ValueError):
        raise SpecError(f"{where}: not a rational number: {v!r}") from None


def basis_from_json(obj):
    """``[{"balls": [{"radius": "1", "center": {...}}], "values": [{"pos": 0, "value": "1/2"}]}, ...]``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, list):
        raise SpecError("basis must be a list of coordinate constraints")
    out = []
    for i, c in enumerate(obj):
        where = f"basis[{i}]"
        balls = tuple(
            Ball(_frac(b["radius"], f"{where}.balls[{m}].radius"), point_from_json(b.get("center", {"support": []}), f"{where}.balls[{m}].center"))
            for m, b in enumerate(c.get("balls", []))
        )
        values = tuple((v["pos"], _frac(v["value"], f"{where}.values[{m}]")) for m, v in enumerate(c.get("values", [])))
        out.append(CoordConstraint(balls, values))
    return out
