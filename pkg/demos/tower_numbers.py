"""Walk through tower arithmetic for F(t) = 3^t - 1.

Run:  python demos/tower_numbers.py
"""

from fanlab.tower import (
    compare,
    compare_by_enclosure,
    eval_enclosure,
    eval_exact,
    f_apply,
    from_int,
    inc,
    parse_expr,
    precision_audit,
    threshold,
    to_interval,
    to_text,
)
from fanlab.errors import UnresolvedComparison


def main():
    print("small values are exact integers")
    for j in range(4):
        x = f_apply(from_int(1), j)
        print(f"  F^{j}(1) = {to_text(x)}")
    print("  F^3(1) as an integer:", eval_exact(f_apply(from_int(1), 3)))

    print("\npast 10^6 a value is kept as an iterate of a small base")
    big = f_apply(from_int(1), 9)
    print("  F^9(1) ->", to_text(big))
    print("  F^9(1) + 1 ->", to_text(inc(big, 1)))
    print("  parsed 'F^11(3)' ->", to_text(parse_expr("F^11(3)")))

    print("\ncomparisons are decided exactly on canonical forms")
    pairs = [("F^5(1)+1", "F^5(1)"), ("F^11(3)", "F^12(1)"), ("F^4(1)-1", "8")]
    for a, b in pairs:
        print(f"  compare({a}, {b}) = {compare(parse_expr(a), parse_expr(b)).name}")

    print("\nthe enclosure route cannot split an increment at tower level 5")
    with precision_audit() as audit:
        try:
            compare_by_enclosure(parse_expr("F^5(1)+1"), parse_expr("F^5(1)"))
        except UnresolvedComparison as exc:
            print("  unresolved:", exc)
    print("  precision reached:", dict(audit))

    print("\nenclosures: level plus mantissa interval")
    enc = eval_enclosure(f_apply(from_int(1), 7), precision=64)
    print("  F^7(1):", enc)

    print("\ninverse thresholds are exact symbolic values")
    for k, n in [(3, 1), (1, 3)]:
        v = threshold(k, n)
        print(f"  F^({k}-{n})(1) = {to_text(v)}  ~ {to_interval(v, 64)}")


if __name__ == "__main__":
    main()
