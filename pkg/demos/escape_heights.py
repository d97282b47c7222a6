"""Suprema t*, minimal heights t_min and the sandwich between them.

Run:  python demos/escape_heights.py
"""

from fanlab.dynamics import Membership, in_J, orbit, prop6_sandwich, t_min_enclosure, tower_endpoint
from fanlab.intervals import lo
from fanlab.itinerary import ItinerarySeq, constant_sequence, t_star, witness_sequence, zero_sequence
from fanlab.tower import to_text


def show(name, s):
    cert = t_star(s)
    rec = t_min_enclosure(s, tol=1e-12)
    print(f"{name:>12}: t* = {to_text(cert.value):<18} t_min in [{rec.lo}, {rec.hi}] (depth {rec.depth})")


def main():
    show("zero", zero_sequence())
    show("const 1", constant_sequence(1))
    show("(0,5,0,..)", ItinerarySeq(((1, 5),)))
    show("(0,2,7,1,..)", ItinerarySeq(((1, 2), (2, 7), (3, 1))))

    print("\nthe constant-1 sequence: 1 is a fixed point, anything below it drops out")
    for t in (1, 0.9):
        heights = orbit(t, constant_sequence(1), 6)
        print(f"  start {t}: " + ", ".join(f"{float(lo(h)):.4f}" for h in heights))
        print(f"    membership: {in_J(t, constant_sequence(1)).value}")
    assert in_J(1, constant_sequence(1)) == Membership.CERTIFIED_YES

    print("\nsandwich t* <= T(orbit) <= t* + 1 at the t_min upper bound")
    for r in prop6_sandwich(ItinerarySeq(((1, 2), (2, 7), (3, 1))), n_max=3):
        print(f"  n={r.n}: ok={r.ok}")

    print("\na tower-scale sequence is bracketed symbolically")
    rec = tower_endpoint(witness_sequence())
    print(f"  witness sequence: t_min in [{to_text(rec.lo)}, {to_text(rec.hi)}]")
    X = t_min_enclosure(constant_sequence(1), depth=60)
    print(f"  constant 1 width {float(X.hi - X.lo):.1e}; contains 1: {X.lo <= 1 <= X.hi}")


if __name__ == "__main__":
    main()
