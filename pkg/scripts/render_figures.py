"""Write schematic SVGs of a U_3 support, a zone layer, a compiled machine window and a four-layer patch."""

import argparse
import random
from pathlib import Path

from horotile.cft import RowConstraint, solve
from horotile.layers import HALFPLANE_ZONE, zone_rules
from horotile.pattern import Alphabet, Pattern, Window
from horotile.render import RenderOptions, render_svg
from horotile.turing import compile_to_rules, encode_diagram, machine_ex
from horotile.witness import WitnessConfig, build_and_check, planted_patch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    figures = {}
    figures["support_u3"] = (Pattern.from_flat("abcdefg", 3).to_patch(Alphabet(tuple("abcdefg"))), True)
    zones = solve(Window(0, 6, 0, 1), zone_rules(), RowConstraint(HALFPLANE_ZONE, 0), rng=rng)
    figures["zone_layer"] = (zones, False)
    cm = compile_to_rules(machine_ex())
    figures["machine_window"] = (encode_diagram(cm, 6, 5), False)
    cfg = WitnessConfig(depth=6)
    figures["four_layers"] = (build_and_check(cfg, planted_patch(cfg, rng)[0])[0], False)

    for name, (obj, labels) in figures.items():
        path = args.out / f"{name}.svg"
        path.write_text(render_svg(obj, RenderOptions(show_labels=labels)), encoding="utf-8")
        print(path)


if __name__ == "__main__":
    main()
