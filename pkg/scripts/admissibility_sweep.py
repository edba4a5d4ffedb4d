"""Compare the degree-2 admissibility criterion with brute-force experiments.

For each (lambda, mu) on a grid, the objective lambda(2(a+b)^2 - ab) + mu(a+b)
is run against generating instances and the four-block constructions; the
experimental verdict is printed next to the closed-form one. The search is
bounded in n, so a missing witness is weaker evidence than a found one; for
those rows the first monotonicity failure of g is shown instead.
"""

import argparse
from fractions import Fraction

from admiss_hc import ObjectiveSpec, SumScaling
from admiss_hc.oracle import find_nonadmissibility_witness
from admiss_hc.scaling import admissible_sum_deg2, monotone_violation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--n-max", type=int, default=6)
    args = ap.parse_args()

    grid = [(Fraction(l), Fraction(m)) for l in (0, 1, 2) for m in (-20, -10, -9, -8, 0, 1)]
    grid += [(Fraction(-1), Fraction(100))]
    mismatches = 0
    for lam, mu in grid:
        spec = ObjectiveSpec("sum", SumScaling.degree2(lam, mu))
        predicted = admissible_sum_deg2(lam, mu)
        ce = find_nonadmissibility_witness(spec, seed=args.seed, count=args.count, n_max=args.n_max)
        if ce is not None:
            note = f"refuted by {ce.source}, n={ce.matrix.n}"
        else:
            mono = monotone_violation(spec.scaling, 200)
            note = "no witness" + ("" if mono is None else f"; g(a+1,b) <= g(a,b) first at {mono}")
        contradiction = predicted and ce is not None
        mismatches += contradiction
        flag = "  <-- contradiction" if contradiction else ""
        print(f"lambda={lam!s:>3} mu={mu!s:>4}  admissible={predicted!s:<5}  {note}{flag}")
    print(f"{mismatches} contradictions (criterion says admissible, experiment refutes)")


if __name__ == "__main__":
    main()
