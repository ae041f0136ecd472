"""Walk the full certificate pipeline on the unit disk.

For each exponent q the script solves the primal problem, builds the
matching dual pair, and prints the primal value, the certificate value,
and the relative duality gap, then repeats under grid refinement so the
gap's decay is visible.  Run from the repository root:

    python3 demos/certify_disk.py
"""

import math

from dualfreq import build_disk, build_pair, solve_frequency, weak_duality_certificate

QS = (1.0, 1.25, 1.5, 1.75, 2.0)
HS = (1 / 32, 1 / 64, 1 / 128)


def main() -> None:
    print(f"{'q':>5} {'h':>7} {'1/lambda1':>12} {'dual':>12} "
          f"{'gap*lambda':>11} {'residual':>10}")
    for q in QS:
        for h in HS:
            dom = build_disk(1.0, h)
            sol = solve_frequency(dom, q)
            pair = build_pair(dom, q, solution=sol)
            rep = weak_duality_certificate(dom, q, pair, solution=sol)
            print(f"{q:5.2f} 1/{round(1 / h):<5d} {rep.primal_value:12.6f} "
                  f"{rep.dual_value:12.6f} {rep.gap_relative:+10.4%} "
                  f"{pair.feasibility_residual:10.2e}")
        print()
    T = 1.0 / solve_frequency(build_disk(1.0, 1 / 128), 1.0).lambda1
    print(f"disk rigidity at 1/128: {T:.6f}  (pi/8 = {math.pi / 8:.6f})")


if __name__ == "__main__":
    main()
