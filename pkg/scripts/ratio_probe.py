"""Tabulate g(t-1, 1) / f'(t) for the three coefficient regimes."""

import argparse
from fractions import Fraction

from admiss_hc.scaling import SumScaling, f_prime

REGIMES = {
    "cubic (1,0,0)": (SumScaling(1, 0, 0), Fraction(256, 21)),
    "quadratic (0,1,0)": (SumScaling(0, 1, 0), Fraction(128, 21)),
    "linear (0,0,1)": (SumScaling(0, 0, 1), Fraction(4)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-max", type=int, default=10**4)
    args = ap.parse_args()

    checkpoints = sorted({t for t in (10, 100, 1000, 10**4, 10**5) if t <= args.t_max} | {args.t_max})
    for name, (s, limit) in REGIMES.items():
        running, at = Fraction(0), 2
        rows = []
        for t in range(2, args.t_max + 1):
            r = s(t - 1, 1) / f_prime(s, t)
            if r > running:
                running, at = r, t
            if t in checkpoints:
                rows.append((t, r))
        print(f"{name}: limit {float(limit):.4f}, running max {float(running):.4f} at t={at}")
        for t, r in rows:
            print(f"  t={t:>7}  ratio={float(r):.6f}  rel.err={float(abs(r - limit) / limit):.2e}")


if __name__ == "__main__":
    main()
