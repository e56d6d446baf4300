"""Compile a machine to tile rules, solve a seeded window and compare it with direct simulation."""

import argparse
import time
from pathlib import Path

from horotile.cft import count_solutions, solve
from horotile.turing import MachineStuck, compile_to_rules, extract_diagram, machine_ex, parse_machine, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("machines", nargs="*", type=Path, help="machine files; the built-in example if none")
    ap.add_argument("--width", type=int, default=16)
    ap.add_argument("--depth", type=int, default=8)
    args = ap.parse_args()
    machines = [(p.name, parse_machine(p.read_text(encoding="utf-8"))) for p in args.machines] or [("mex", machine_ex())]
    bad = 0
    for name, tm in machines:
        start = time.perf_counter()
        cm = compile_to_rules(tm)
        window, seed = cm.window(args.width, args.depth), cm.seed_row(args.width)
        n = count_solutions(window, cm.rules, seed=seed, stop_at=2)
        sol = solve(window, cm.rules, seed=seed)
        got = extract_diagram(sol, tm.blank, tm.halting) if sol else None
        try:
            want = run(tm, "", args.depth)
        except MachineStuck as exc:
            # a stuck machine has no diagram of full depth, so no completion either
            print(f"{name}: stuck ({exc}); completions {n}")
            bad += n != 0
            continue
        same = got is not None and got.truncated(args.width) == want.truncated(args.width)
        bad += not (same and n == 1)
        print(f"{name}: {len(cm.alphabet)} symbols, completions {'1' if n == 1 else '>1' if n else '0'}, "
              f"matches simulation: {same}, {time.perf_counter() - start:.2f}s")
        if got is not None:
            print(got.text(args.width))
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
