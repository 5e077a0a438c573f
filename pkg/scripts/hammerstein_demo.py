"""Solve the discretized Hammerstein equation and write the solution as CSV."""
import argparse
import csv

from monotone_iter.cone import self_bounded_check, solve
from monotone_iter.io import fmt_float
from monotone_iter.problems import hammerstein_grid


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=41)
    parser.add_argument("--g-scale", type=float, default=1.0)
    parser.add_argument("--out", default="hammerstein.csv")
    args = parser.parse_args()

    p = hammerstein_grid(samples=args.samples, g_scale=args.g_scale)
    r = solve(p.operator, p.phi, p.u)
    print(f"iterations={r.iterations} residual={r.residual:.2e} "
          f"upper self-bounded={bool(self_bounded_check(r.xs, 'upper'))}")
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x"])
        for t, x in zip(p.universe.grid, r.x_star):
            w.writerow([fmt_float(t), fmt_float(x)])
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
