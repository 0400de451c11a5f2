"""Chart emission for computed pages.

Two projections of the trigraded data:

- Novikov: x = u − s, y = s (classes of every t collapse onto one node)
- Adams:   x = u − s, y = s + t

Output is byte-deterministic: integer coordinates, sorted nodes and arrows, no timestamps.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape

from novikov_eta.datasets import SSArrow, SSDataset
from novikov_eta.exceptions import RegionError
from novikov_eta.ext import ExtRegion
from novikov_eta.grading import MultiDegree
from novikov_eta.novikov import novikov_d1

logger = logging.getLogger(__name__)

PROJECTIONS = ("novikov", "adams")
FORMATS = ("svg", "tsv")
TSV_HEADER = ("stem", "y", "t", "weight", "multiplicity", "labels", "arrows")

CELL = 40
MARGIN = 40
RADIUS = 4

# Arrow kinds and their SVG stroke colors.
ARROW_STYLES = {
    "q0": "#000000",
    "h0": "#000000",
    "d1": "#2e8b57",
    "input": "#c0392b",
}


@dataclass(frozen=True)
class ChartSpec:
    """What to draw: projection, window and overlays."""

    projection: str = "novikov"
    max_x: int = 15
    max_y: int = 8
    overlays: frozenset = frozenset({"q0", "h0", "d1", "input"})
    multiplicity_threshold: int = 1

    def __post_init__(self):
        if self.projection not in PROJECTIONS:
            raise ValueError(f"projection must be one of {PROJECTIONS}, got {self.projection!r}")

    def position(self, degree: MultiDegree) -> tuple[int, int]:
        x = degree.u - degree.s
        y = degree.s if self.projection == "novikov" else degree.s + degree.t
        return x, y

    def in_window(self, degree: MultiDegree) -> bool:
        x, y = self.position(degree)
        return 0 <= x <= self.max_x and 0 <= y <= self.max_y


@dataclass
class ChartNode:
    x: int
    y: int
    ts: set = field(default_factory=set)
    weights: set = field(default_factory=set)
    labels: list = field(default_factory=list)
    tower: bool = False

    @property
    def multiplicity(self) -> int:
        return len(self.labels)


def _collect(spec: ChartSpec, dataset: SSDataset) -> tuple[dict, list]:
    nodes: dict = {}
    for item in dataset.sorted_classes():
        if not spec.in_window(item.degree):
            continue
        key = spec.position(item.degree)
        node = nodes.setdefault(key, ChartNode(*key))
        node.ts.add(item.degree.t)
        if item.degree.w is not None:
            node.weights.add(item.degree.w)
        node.labels.append(item.name or "·")
        node.tower = node.tower or item.tower
    arrows = set()
    for arrow in dataset.arrows:
        if arrow.kind not in spec.overlays or not (spec.in_window(arrow.source) and spec.in_window(arrow.target)):
            continue
        source, target = spec.position(arrow.source), spec.position(arrow.target)
        if source != target:
            arrows.add((arrow.kind, source, target))
    return nodes, sorted(arrows)


def check_region(spec: ChartSpec, dataset: SSDataset) -> None:
    """Raise RegionError when the window needs blocks the dataset's region does not cover."""
    region = dataset.metadata.get("region")
    if region is None:
        return
    missing = []
    for x in range(spec.max_x + 1):
        for y in range(spec.max_y + 1):
            if spec.projection == "novikov":
                needs = [(y, x + y)]
            else:
                needs = [(s, x + s) for s in range(y + 1) if y - s <= region.max_t]
            for s, u in needs:
                if s > region.max_s or u > region.max_u:
                    missing.append((x, y))
                    break
    if missing:
        raise RegionError(f"Chart window needs {len(missing)} positions outside {region}: {missing[:10]}")


def emit(spec: ChartSpec, dataset: SSDataset, fmt: str = "svg") -> bytes:
    """Render the dataset in the requested format.

    Raises:
        RegionError: If the window extends past the computed region.
        ValueError: For an unknown format.
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    check_region(spec, dataset)
    nodes, arrows = _collect(spec, dataset)
    logger.debug("Chart %s/%s: %d nodes, %d arrows", spec.projection, fmt, len(nodes), len(arrows))
    if fmt == "tsv":
        return emit_tsv(nodes, arrows)
    return emit_svg(spec, nodes, arrows)


def emit_tsv(nodes: dict, arrows: list) -> bytes:
    outgoing = defaultdict(list)
    for kind, source, target in arrows:
        outgoing[source].append(f"{kind}:{target[0]},{target[1]}")
    lines = ["\t".join(TSV_HEADER)]
    for key in sorted(nodes):
        node = nodes[key]
        lines.append(
            "\t".join(
                (
                    str(node.x),
                    str(node.y),
                    ",".join(str(t) for t in sorted(node.ts)),
                    ",".join(str(w) for w in sorted(node.weights)),
                    f"{node.multiplicity}{'+' if node.tower else ''}",
                    ";".join(node.labels),
                    ";".join(sorted(outgoing.get(key, []))),
                )
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_tsv(document: bytes) -> tuple[dict, list]:
    """Read a TSV chart back into ({(x, y): (multiplicity, tower, labels)}, sorted arrows).

    Raises:
        ValueError: If the header is not the chart header.
    """
    lines = document.decode("utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != TSV_HEADER:
        raise ValueError("Not a chart TSV: missing header")
    nodes = {}
    arrows = []
    for line in lines[1:]:
        stem, y, _t, _weight, multiplicity, labels, targets = line.split("\t")
        key = (int(stem), int(y))
        tower = multiplicity.endswith("+")
        nodes[key] = (int(multiplicity.rstrip("+")), tower, tuple(labels.split(";")) if labels else ())
        for item in filter(None, targets.split(";")):
            kind, _, position = item.partition(":")
            tx, ty = position.split(",")
            arrows.append((kind, key, (int(tx), int(ty))))
    return nodes, sorted(arrows)


def _xy(spec: ChartSpec, x: int, y: int) -> tuple[int, int]:
    return MARGIN + x * CELL, MARGIN + (spec.max_y - y) * CELL


def emit_svg(spec: ChartSpec, nodes: dict, arrows: list) -> bytes:
    width = 2 * MARGIN + spec.max_x * CELL
    height = 2 * MARGIN + spec.max_y * CELL
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        '<g id="axes" stroke="#999999" stroke-width="1">',
    ]
    x0, y0 = _xy(spec, 0, 0)
    x1, y1 = _xy(spec, spec.max_x, spec.max_y)
    out.append(f'<path d="M {x0} {y0} L {x1} {y0} M {x0} {y0} L {x0} {y1}"/>')
    out.append("</g>")
    out.append('<g id="ticks" font-size="10" text-anchor="middle">')
    for x in range(spec.max_x + 1):
        px, py = _xy(spec, x, 0)
        out.append(f'<text x="{px}" y="{py + 16}">{x}</text>')
    for y in range(spec.max_y + 1):
        px, py = _xy(spec, 0, y)
        out.append(f'<text x="{px - 16}" y="{py + 4}">{y}</text>')
    out.append("</g>")
    out.append('<g id="arrows" stroke-width="1.5" fill="none">')
    for kind, source, target in arrows:
        sx, sy = _xy(spec, *source)
        tx, ty = _xy(spec, *target)
        color = ARROW_STYLES.get(kind, "#000000")
        out.append(f'<path class="{kind}" stroke="{color}" d="M {sx} {sy} L {tx} {ty}"/>')
    out.append("</g>")
    out.append('<g id="nodes">')
    for key in sorted(nodes):
        node = nodes[key]
        px, py = _xy(spec, node.x, node.y)
        title = escape(", ".join(node.labels))
        if node.multiplicity > spec.multiplicity_threshold or node.tower:
            side = 2 * RADIUS + 2
            out.append(
                f'<rect x="{px - side // 2}" y="{py - side // 2}" width="{side}" height="{side}" '
                f'fill="#ffffff" stroke="#000000"><title>{title}</title></rect>'
            )
            mark = "∞" if node.tower else str(node.multiplicity)
            out.append(f'<text x="{px - side}" y="{py - side // 2}" font-size="9" text-anchor="end">{mark}</text>')
        else:
            out.append(f'<circle cx="{px}" cy="{py}" r="{RADIUS}" fill="#000000"><title>{title}</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Datasets from computed regions
# ---------------------------------------------------------------------------


def dataset_from_engine(engine: ExtRegion, products: bool = True, d1: bool = False) -> SSDataset:
    """Every basis class of the engine's blocks, with q0/h0 lines and optionally d1 arrows."""
    dataset = SSDataset(name=f"ext-{engine.context.id}", context=engine.context.id, page="E1")
    dataset.metadata["region"] = engine.region
    region = engine.region
    q0 = engine.parse_class("q0[]") if products and region.max_t >= 1 and not engine.context.mod2 else None
    h0 = engine.parse_class("[ζ1]") if products and region.max_s >= 1 and region.max_u >= 2 else None
    targets = set()
    for degree in sorted(engine.blocks, key=lambda d: (d.u, d.s, d.t)):
        block = engine.blocks[degree]
        for x in block.basis_classes():
            for kind, factor in (("q0", q0), ("h0", h0)):
                if factor is None:
                    continue
                target_degree = degree + factor.degree
                if not region.contains(target_degree):
                    continue
                product = engine.product(x, factor)
                if not product.is_zero():
                    dataset.add_arrow(kind, degree, target_degree, f"{x.name}·{kind}")
                    targets.add((kind, target_degree))
            if d1 and region.contains(degree.shift(ds=1, dt=1)):
                image = novikov_d1(engine, x)
                if not image.is_zero():
                    dataset.add_arrow("d1", degree, image.degree, f"d1({x.name})")
    for degree in sorted(engine.blocks, key=lambda d: (d.u, d.s, d.t)):
        block = engine.blocks[degree]
        for x in block.basis_classes():
            tower = (degree.t == region.max_t and ("q0", degree) in targets) or (
                degree.s == region.max_s and ("h0", degree) in targets
            )
            dataset.add(degree, x.name, tower)
    return dataset


def add_input_arrows(dataset: SSDataset, arrows: list[SSArrow]) -> SSDataset:
    """Attach provided annotations (drawn in red) to a dataset."""
    for arrow in arrows:
        dataset.add_arrow("input", arrow.source, arrow.target, arrow.label)
    return dataset


def chart(
    engine: ExtRegion, spec: ChartSpec, fmt: str = "svg", d1: bool = False, extra: Optional[list] = None
) -> bytes:
    dataset = dataset_from_engine(engine, d1=d1)
    if extra:
        add_input_arrows(dataset, extra)
    return emit(spec, dataset, fmt)
