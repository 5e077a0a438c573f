"""Run the randomized lattice verification over several seeds and both generators."""
import argparse
import time

from monotone_iter.oracle import verify_theorem_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 42])
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    total = 0
    for generator in ("maps", "general"):
        for seed in args.seeds:
            start = time.perf_counter()
            report = verify_theorem_suite(seed, args.trials, jobs=args.jobs, generator=generator)
            total += report.total_violations
            print(f"{generator:8s} seed={seed:<6d} violations={report.total_violations} "
                  f"attractive={report.attractive_fixed_point_instances} "
                  f"checks={sum(report.applicable.values())} {time.perf_counter() - start:.1f}s")
    raise SystemExit(1 if total else 0)


if __name__ == "__main__":
    main()
