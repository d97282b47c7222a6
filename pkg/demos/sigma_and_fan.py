"""Finite-support sigma-product points, then a picture of a spine family.

Run:  python demos/sigma_and_fan.py [out.svg]
"""

import sys

from fanlab.render import render_fan
from fanlab.sigma import ErdosPoint, SigmaPoint, in_En, in_Kn, l2_norm


def main(out="fan.svg"):
    p = ErdosPoint.of(1, 2)
    print(f"(1, 1/2): norm {l2_norm(p)}, in K_0 {in_Kn(p, 0)}, in K_1 {in_Kn(p, 1)}")
    q = SigmaPoint((ErdosPoint.of(1, 1, 1, 1, 1, 1), ErdosPoint.of(1, 1, 1)))
    for n in range(3):
        print(f"  two-coordinate point in E_{n}: {in_En(q, n)}")

    pic = render_fan(64, 6, out)
    print(f"\n{len(pic.spines)} spines, base {pic.base}, written to {out} (+ .csv)")
    for sp in pic.spines[:4]:
        print(f"  x = {float(sp.x):.6f}  t_min ~ {float(sp.t_lo):.6f}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
