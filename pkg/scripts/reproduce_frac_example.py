"""Iterate A(x, y) = x + (1 - {x})/2 from (0, 1) and compare with the closed form.

The operator is mixed monotone and the iteration isolates x* = 1, yet
A(1, 1) = 1.5: attraction does not imply a fixed point.
"""
import argparse

from monotone_iter.engine import StopPolicy, run
from monotone_iter.problems import frac_example


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=50)
    args = parser.parse_args()

    p = frac_example()
    trace = run(p.operator, *p.start, StopPolicy(max_steps=args.steps, early_stop=False))
    exact = all(x == 1 - 2.0 ** -n and y == 2 - 2.0 ** -n for n, x, y in trace.steps)
    v = trace.verdict
    print(f"steps={trace.horizon} closed form reproduced exactly: {exact}")
    print(f"verdict={v.kind.value} x*={v.x_star!r} fixed_point_confirmed={v.fixed_point_confirmed}")
    print(f"A(1, 1) = {p.operator(1.0, 1.0)!r}")


if __name__ == "__main__":
    main()
