import random
import xml.etree.ElementTree as ET

import pytest

from horotile.address import Address
from horotile.pattern import Alphabet, Patch, Pattern
from horotile.render import PALETTE, RenderOptions, render_svg
from horotile.witness import HP, WitnessConfig, avoiding_patch, build_and_check

NS = "{http://www.w3.org/2000/svg}"
AB = Alphabet(("0", "1"))


def parse(svg):
    return ET.fromstring(svg)


def u2():
    return Pattern.from_flat("011", 2).to_patch(AB)


def test_empty_patch_is_valid_svg():
    root = parse(render_svg(Patch(AB, {})))
    assert root.get("width") == "0" and root.get("height") == "0"
    assert root.findall(f"{NS}polygon") == []


def test_u2_layout():
    root = parse(render_svg(u2()))
    polys = root.findall(f"{NS}polygon")
    assert len(polys) == 3
    tops = sorted({float(p.get("points").split()[0].split(",")[1]) for p in polys})
    assert len(tops) == 2
    fills = [p.get("fill") for p in polys]
    assert fills == [PALETTE[0], PALETTE[1], PALETTE[1]]


def test_pentagon_widths_halve():
    root = parse(render_svg(u2(), RenderOptions(cell_width=40)))
    widths = []
    for p in root.findall(f"{NS}polygon"):
        xs = [float(pt.split(",")[0]) for pt in p.get("points").split()]
        widths.append(max(xs) - min(xs))
    assert widths == [40, 20, 20]


def test_output_is_deterministic():
    assert render_svg(u2()) == render_svg(u2())


def test_colour_map_with_gap_raises():
    with pytest.raises(ValueError):
        render_svg(u2(), RenderOptions(colours={"0": "#000"}))


def test_custom_colours_and_labels():
    root = parse(render_svg(u2(), RenderOptions(colours={"0": "#000", "1": "#fff"}, show_labels=True)))
    assert [p.get("fill") for p in root.findall(f"{NS}polygon")] == ["#000", "#fff", "#fff"]
    assert [t.text for t in root.findall(f"{NS}text")] == ["0", "1", "1"]


def test_halfplane_tiles_get_a_double_top():
    a = Alphabet(("0", HP), halfplane=HP)
    p = Patch(a, {Address(0, 0): HP, Address(1, 0): "0", Address(1, 1): "0"})
    assert len(parse(render_svg(p)).findall(f"{NS}line")) == 1
    assert len(parse(render_svg(p, RenderOptions(double_top=False))).findall(f"{NS}line")) == 0


def test_four_layers_stack():
    cfg = WitnessConfig(depth=4)
    flp, _ = build_and_check(cfg, avoiding_patch(cfg, random.Random(0)))
    root = parse(render_svg(flp))
    assert len(root.findall(f"{NS}polygon")) == 4 * len(flp.layer1.cells)
    assert [t.text for t in root.findall(f"{NS}text")] == [f"layer {i}" for i in range(1, 5)]
