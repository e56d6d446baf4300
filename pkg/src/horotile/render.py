"""Schematic SVG drawings of patches: one pentagon per tile, rows halving in width going down."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union
from xml.sax.saxutils import escape

from .pattern import Patch

PALETTE = (
    "#e6e6e6", "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
    "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd", "#2f4b7c",
)
UNDETERMINED_FILL = "#ffffff"


@dataclass
class RenderOptions:
    cell_width: float = 64.0  # width of a top-row tile
    row_height: float = 24.0
    colours: Optional[dict] = None  # symbol -> fill; default assigns PALETTE in alphabet order
    show_labels: bool = False
    double_top: bool = True  # double top edge on half-plane tiles
    double_top_symbols: tuple = field(default_factory=tuple)  # extra symbols drawn with a double top
    margin: float = 8.0


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def colour_map(patch: Patch, opts: RenderOptions) -> dict[str, str]:
    symbols = patch.alphabet.symbols
    if opts.colours is None:
        return {s: PALETTE[i % len(PALETTE)] for i, s in enumerate(symbols)}
    missing = [s for s in symbols if s not in opts.colours]
    if missing:
        raise ValueError(f"colour map has no entry for {missing}")
    return dict(opts.colours)


def _panel(patch: Patch, opts: RenderOptions, y0: float) -> tuple[list[str], float, float]:
    """SVG elements for one patch, its width and its height."""
    if not patch.cells:
        return [], 0.0, 0.0
    fills = colour_map(patch, opts)
    doubled = set(opts.double_top_symbols)
    if opts.double_top and patch.alphabet.halfplane is not None:
        doubled.add(patch.alphabet.halfplane)
    levels = patch.levels()
    top = levels[0]
    xmin = min(a.offset / (1 << (a.level - top)) for a in patch.cells)
    xmax = max((a.offset + 1) / (1 << (a.level - top)) for a in patch.cells)
    out = []
    for a in sorted(patch.cells):
        s = patch.cells[a]
        scale = 1 << (a.level - top)
        w = opts.cell_width / scale
        x = opts.margin + (a.offset / scale - xmin) * opts.cell_width
        y = y0 + (a.level - top) * opts.row_height
        h = opts.row_height
        pts = [(x, y), (x + w, y), (x + w, y + h), (x + w / 2, y + h), (x, y + h)]
        fill = fills.get(s, UNDETERMINED_FILL)
        out.append(
            '<polygon points="' + " ".join(f"{_num(px)},{_num(py)}" for px, py in pts)
            + f'" fill="{fill}" stroke="#333" stroke-width="0.5"/>'
        )
        if s in doubled:
            out.append(
                f'<line x1="{_num(x)}" y1="{_num(y + 2)}" x2="{_num(x + w)}" y2="{_num(y + 2)}" '
                'stroke="#333" stroke-width="0.5"/>'
            )
        if opts.show_labels:
            size = min(h * 0.5, w * 0.6)
            out.append(
                f'<text x="{_num(x + w / 2)}" y="{_num(y + h * 0.65)}" font-size="{_num(size)}" '
                f'text-anchor="middle">{escape(s)}</text>'
            )
    width = (xmax - xmin) * opts.cell_width
    height = len(range(levels[0], levels[-1] + 1)) * opts.row_height
    return out, width, height


def render_svg(patch: Union[Patch, "FourLayerPatch"], opts: Optional[RenderOptions] = None) -> str:  # noqa: F821
    """SVG text for a patch, or for the four layers of a layered patch stacked vertically."""
    opts = opts or RenderOptions()
    layers = [patch] if isinstance(patch, Patch) else [patch.layer1, patch.layer2, patch.layer3, patch.layer4]
    body: list[str] = []
    y = opts.margin
    width = 0.0
    for i, layer in enumerate(layers):
        if len(layers) > 1:
            # a custom colour map describes the first layer only
            elems, w, h = _panel(layer, opts if i == 0 else replace(opts, colours=None), y + 14)
            body.append(f'<text x="{_num(opts.margin)}" y="{_num(y + 10)}" font-size="10">layer {i + 1}</text>')
            h += 14
        else:
            elems, w, h = _panel(layer, opts, y)
        body.extend(elems)
        width = max(width, w)
        y += h + opts.margin
    if not any(layer.cells for layer in layers):
        total_w = total_h = 0.0
    else:
        total_w, total_h = width + 2 * opts.margin, y
    head = (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_num(total_w)}" height="{_num(total_h)}" viewBox="0 0 {_num(total_w)} {_num(total_h)}">'
    )
    return "\n".join([head] + body + ["</svg>"]) + "\n"
