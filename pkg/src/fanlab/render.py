"""Static pictures of a finite family of spines [t_s, t_max] x {s}.

Each sequence gets a horizontal coordinate in [0, 1) by writing the zig-zag
codes of its entries s_1, s_2, ..., s_depth as digits after the point in
base ``max(4, largest code + 1)``.  The coordinates are exact fractions, so
injectivity is checked exactly before anything is drawn.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from mpmath import mp

from .dynamics import t_min_enclosure
from .errors import NumericModeRequired
from .itinerary import Entry, ItinerarySeq, magnitude_at, seq_to_json
from .tower import Lit


def zigzag(z: int) -> int:
    """0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ..."""
    return 2 * z - 1 if z > 0 else -2 * z


def signed_entry(s: ItinerarySeq, p: int) -> int:
    m = magnitude_at(s, p)
    if not isinstance(m, Lit):
        raise NumericModeRequired(f"position {p} holds a tower-sized magnitude")
    e = s.by_pos.get(p)
    sign = e.sign if e is not None else 1
    return sign * m.n


def abscissas(family, depth: int):
    codes = [[zigzag(signed_entry(s, p)) for p in range(1, depth + 1)] for s in family]
    base = max([4] + [c + 1 for row in codes for c in row])
    out = []
    for row in codes:
        x = Fraction(0)
        scale = Fraction(1)
        for c in row:
            scale /= base
            x += c * scale
        out.append(x)
    return out, base


def digit_family(spines: int, depth: int, digits: int = 4):
    """Sequence i carries the base-``digits`` expansion of i (most significant first) at positions 1..depth."""
    if spines > digits**depth:
        raise ValueError(f"{spines} spines need depth >= log_{digits}({spines})")
    family = []
    for i in range(spines):
        ds = []
        v = i
        for _ in range(depth):
            ds.append(v % digits)
            v //= digits
        ds.reverse()
        family.append(ItinerarySeq(tuple(Entry(p + 1, d) for p, d in enumerate(ds) if d)))
    return family


@dataclass
class Spine:
    seq: ItinerarySeq
    x: Fraction
    t_lo: object
    t_hi: object


@dataclass
class FanPicture:
    spines: list
    base: int
    t_max: float

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "x_exact", "t_lo", "t_hi", "seq"])
        for i, sp in enumerate(self.spines):
            w.writerow([i, f"{float(sp.x):.12f}", str(sp.x), mp.nstr(sp.t_lo, 15), mp.nstr(sp.t_hi, 15), json.dumps(seq_to_json(sp.seq), sort_keys=True)])
        return buf.getvalue()

    def svg_text(self, width=800, height=500, margin=40):
        def px(x):
            return margin + float(x) * (width - 2 * margin)

        def py(t):
            return height - margin - float(t) / self.t_max * (height - 2 * margin)

        lines = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
            f'<line x1="{margin}" y1="{py(0):.3f}" x2="{width - margin}" y2="{py(0):.3f}" stroke="#999" stroke-width="0.5"/>',
        ]
        for sp in self.spines:
            x = px(sp.x)
            lines.append(f'<line x1="{x:.3f}" y1="{py(sp.t_hi):.3f}" x2="{x:.3f}" y2="{py(self.t_max):.3f}" stroke="black" stroke-width="0.6"/>')
            lines.append(f'<circle cx="{x:.3f}" cy="{py(sp.t_hi):.3f}" r="1.5" fill="#c00"/>')
        lines.append("</svg>")
        return "\n".join(lines) + "\n"


def build_fan(family, depth: int, precision: int = 128, tol: float = 1e-9, t_max=None) -> FanPicture:
    xs, base = abscissas(family, depth)
    if len(set(xs)) != len(xs):
        raise ValueError("abscissa collision: the family has repeated prefixes up to the given depth")
    spines = []
    for s, x in zip(family, xs):
        rec = t_min_enclosure(s, precision=precision, tol=tol)
        spines.append(Spine(s, x, rec.lo, rec.hi))
    top = max([float(sp.t_hi) for sp in spines] + [0.0]) + 1.0
    return FanPicture(spines, base, float(t_max) if t_max is not None else top)


def render_fan(spines: int, depth: int, out, family=None, precision: int = 128, tol: float = 1e-9, t_max=None) -> FanPicture:
    """Write ``out`` (SVG) and ``out`` with suffix .csv; return the picture."""
    if family is None:
        family = digit_family(spines, depth)
    pic = build_fan(family, depth, precision, tol, t_max)
    out = Path(out)
    out.write_text(pic.svg_text())
    out.with_suffix(".csv").write_text(pic.csv_text())
    return pic
