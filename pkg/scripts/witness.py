"""Build and check four-layer patches on random layer-1 inputs, with and without the forbidden pattern."""

import argparse
import random
import time
from pathlib import Path

from horotile.layers import serialize_layers
from horotile.pattern import appears
from horotile.render import render_svg
from horotile.witness import WitnessConfig, avoiding_patch, build_and_check, planted_patch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200, help="per side")
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--save", type=Path, help="directory for one layered file and SVG per side")
    args = ap.parse_args()
    cfg = WitnessConfig(depth=args.depth)
    start = time.perf_counter()
    stats = {"containing": [0, 0], "avoiding": [0, 0]}  # [ok, failed]
    last = {}
    for i in range(args.instances):
        rng = random.Random(args.seed * 1_000_003 + i)
        y, at = planted_patch(cfg, rng)
        flp, rep = build_and_check(cfg, y)
        ok = rep.clean and bool(rep.qf)
        stats["containing"][not ok] += 1
        if not ok:
            print(f"containing #{i} (planted at {at}) failed: {rep.lines()[:5]}")
        last["containing"] = flp
        x = avoiding_patch(cfg, rng)
        flp, rep = build_and_check(cfg, x)
        ok = not appears(x, cfg.pattern) and rep.clean and not rep.qf and flp.layer1 == x
        stats["avoiding"][not ok] += 1
        if not ok:
            print(f"avoiding #{i} failed: {rep.lines()[:5]}")
        last["avoiding"] = flp
    for side, (ok, bad) in stats.items():
        print(f"{side:>10}: {ok} ok, {bad} failed")
    print(f"{time.perf_counter() - start:.2f}s")
    if args.save:
        args.save.mkdir(parents=True, exist_ok=True)
        for side, flp in last.items():
            (args.save / f"{side}.layers").write_text(serialize_layers(flp), encoding="utf-8")
            (args.save / f"{side}.svg").write_text(render_svg(flp), encoding="utf-8")
    raise SystemExit(1 if stats["containing"][1] or stats["avoiding"][1] else 0)


if __name__ == "__main__":
    main()
