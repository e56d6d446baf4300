"""Randomized checks of the three pattern-transport statements, with the offset-formula comparison."""

import argparse

from horotile.dyadic import verify_prop


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    failed = 0
    for prop in (1, 2, 3):
        for n in range(1, args.max_n + 1):
            report = verify_prop(prop, n, args.trials, args.seed)
            print("\n".join(report.lines()))
            failed += not report.holds
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
