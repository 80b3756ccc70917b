"""Byte-deterministic SVG rendering of graphs, stacked-polyline models,
rectangle-rule overlays, and arrow fields.

Determinism rules: fixed 6-decimal coordinate formatting, fixed element
order (rows in index order, classes in sorted order), no timestamps, and
the affine data-to-canvas transform plus plane anchors are embedded as data
attributes so overlays and tests can invert the mapping without private
state.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coords import GlcGraph
from .dataset import Dataset
from .glcl import LinearModel, classify_rows, polyline
from .rules import ArrowField, RectRule


class RenderError(ValueError):
    pass


#: First class blue, second red; then extras. Long arrows are green and
#: short red regardless of class colors.
PALETTE = ("#2166ac", "#b2182b", "#1b7837", "#b8860b", "#762a83", "#636363")
THRESHOLD_COLOR = "#e6c000"
LONG_COLOR = "#1b7837"
SHORT_COLOR = "#b2182b"


@dataclass(frozen=True)
class RenderSpec:
    width: int = 640
    height: int = 480
    margin: float = 40.0
    stroke_width: float = 1.5
    node_radius: float = 2.5
    plane_frames: bool = True
    legend: bool = True
    class_colors: tuple[tuple[str, str], ...] = ()  # explicit (class, color) pairs

    def color_for(self, cls: str, ordered_classes: Sequence[str]) -> str:
        for name, color in self.class_colors:
            if name == cls:
                return color
        idx = list(ordered_classes).index(cls)
        return PALETTE[idx % len(PALETTE)]


def fmt(v: float) -> str:
    """Fixed 6-decimal formatting; normalizes negative zero."""
    r = round(float(v), 6)
    if r == 0.0:
        r = 0.0
    return f"{r:.6f}"


@dataclass(frozen=True)
class Transform:
    """Data (x, y) to canvas: (x * sx + tx, y * sy + ty); sy < 0 flips y."""

    sx: float
    sy: float
    tx: float
    ty: float

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (x * self.sx + self.tx, y * self.sy + self.ty)

    def invert(self, cx: float, cy: float) -> tuple[float, float]:
        return ((cx - self.tx) / self.sx, (cy - self.ty) / self.sy)

    def attrs(self) -> str:
        return (
            f'data-sx="{fmt(self.sx)}" data-sy="{fmt(self.sy)}" '
            f'data-tx="{fmt(self.tx)}" data-ty="{fmt(self.ty)}"'
        )

    @staticmethod
    def fit(
        bounds: tuple[float, float, float, float], spec: RenderSpec
    ) -> "Transform":
        x_lo, x_hi, y_lo, y_hi = bounds
        span_x = x_hi - x_lo if x_hi > x_lo else 1.0
        span_y = y_hi - y_lo if y_hi > y_lo else 1.0
        inner_w = spec.width - 2 * spec.margin
        inner_h = spec.height - 2 * spec.margin
        sx = inner_w / span_x
        sy = -inner_h / span_y
        tx = spec.margin - x_lo * sx
        ty = spec.margin - y_hi * sy  # y_hi maps to the top margin
        return Transform(sx=sx, sy=sy, tx=tx, ty=ty)

    @staticmethod
    def from_svg(svg: str) -> "Transform":
        values = {}
        for key in ("sx", "sy", "tx", "ty"):
            m = re.search(f'data-{key}="([-0-9.]+)"', svg)
            if not m:
                raise RenderError(f"svg lacks embedded transform attribute {key}")
            values[key] = float(m.group(1))
        return Transform(**values)


def _svg_open(spec: RenderSpec, transform: Transform, extra_attrs: str = "") -> str:
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}" '
        f"{transform.attrs()}{extra_attrs}>\n"
        f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" '
        'fill="#ffffff"/>\n'
    )


def _legend(classes: Sequence[str], spec: RenderSpec) -> list[str]:
    if not spec.legend or not classes:
        return []
    parts = ['<g id="legend">']
    for i, cls in enumerate(classes):
        color = spec.color_for(cls, classes)
        y = 14.0 + 14.0 * i
        parts.append(
            f'<rect x="6" y="{fmt(y - 8)}" width="10" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="20" y="{fmt(y)}" font-size="11" '
            f'font-family="monospace">{_esc(cls)}</text>'
        )
    parts.append("</g>")
    return parts


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _graph_bounds(graphs: Sequence[GlcGraph]) -> tuple[float, float, float, float]:
    if not graphs:
        return (0.0, 1.0, 0.0, 1.0)
    nodes = np.vstack([g.nodes for g in graphs])
    return (
        float(nodes[:, 0].min()),
        float(nodes[:, 0].max()),
        float(nodes[:, 1].min()),
        float(nodes[:, 1].max()),
    )


def _plane_frames(graph: GlcGraph, t: Transform) -> list[str]:
    """Unit squares anchored at each pair-plane offset (spc only)."""
    if graph.system != "spc" or graph.offsets is None:
        return []
    parts = ['<g id="plane-frames">']
    for k, (ox, oy) in enumerate(np.asarray(graph.offsets)):
        x0, y0 = t.apply(ox, oy + 1.0)
        x1, y1 = t.apply(ox + 1.0, oy)
        parts.append(
            f'<rect x="{fmt(x0)}" y="{fmt(y0)}" width="{fmt(x1 - x0)}" '
            f'height="{fmt(y1 - y0)}" fill="none" stroke="#bbbbbb" '
            f'stroke-width="0.8" data-plane="{k}"/>'
        )
    parts.append("</g>")
    return parts


def _polyline_points(nodes: np.ndarray, t: Transform, close: bool = False) -> str:
    pts = [t.apply(float(x), float(y)) for x, y in nodes]
    if close and len(pts) > 2:
        pts.append(pts[0])
    return " ".join(f"{fmt(x)},{fmt(y)}" for x, y in pts)


def _inline_arcs(graph: GlcGraph, t: Transform) -> str:
    """Semicircular hops between consecutive nodes; drawing detail only."""
    parts = []
    for i in range(graph.node_count - 1):
        x0, y0 = graph.nodes[i]
        x1, _ = graph.nodes[i + 1]
        cx0, cy0 = t.apply(float(x0), float(y0))
        cx1, _ = t.apply(float(x1), float(y0))
        r = abs(cx1 - cx0) / 2.0
        parts.append(f"M {fmt(cx0)} {fmt(cy0)} A {fmt(r)} {fmt(r)} 0 0 1 {fmt(cx1)} {fmt(cy0)}")
    return " ".join(parts)


def render_graphs(
    graphs: Sequence[GlcGraph],
    labels: Sequence[str] | None = None,
    spec: RenderSpec = RenderSpec(),
) -> str:
    """One class-colored polyline per graph, in row order."""
    if labels is None:
        labels = [""] * len(graphs)
    if len(labels) != len(graphs):
        raise RenderError("one label per graph required")
    systems = {g.system for g in graphs}
    if len(systems) > 1:
        raise RenderError(f"mixed coordinate systems {sorted(systems)}")

    classes = sorted(set(labels))
    bounds = _graph_bounds(graphs)
    # pad bounds so frames/arcs are not clipped
    pad_x = 0.05 * (bounds[1] - bounds[0] or 1.0)
    pad_y = 0.05 * (bounds[3] - bounds[2] or 1.0)
    if graphs and graphs[0].system == "spc" and graphs[0].offsets is not None:
        offs = np.asarray(graphs[0].offsets)
        bounds = (
            min(bounds[0], float(offs[:, 0].min())),
            max(bounds[1], float(offs[:, 0].max()) + 1.0),
            min(bounds[2], float(offs[:, 1].min())),
            max(bounds[3], float(offs[:, 1].max()) + 1.0),
        )
    bounds = (bounds[0] - pad_x, bounds[1] + pad_x, bounds[2] - pad_y, bounds[3] + pad_y)
    t = Transform.fit(bounds, spec)

    extra = ""
    if graphs and graphs[0].system == "spc" and graphs[0].offsets is not None:
        anchor_text = ";".join(
            f"{fmt(ox)},{fmt(oy)}" for ox, oy in np.asarray(graphs[0].offsets)
        )
        extra = f' data-plane-offsets="{anchor_text}"'
    parts = [_svg_open(spec, t, extra)]
    if spec.plane_frames and graphs:
        parts.extend(_plane_frames(graphs[0], t))
    for row, (graph, label) in enumerate(zip(graphs, labels)):
        color = spec.color_for(label, classes) if label else PALETTE[0]
        close = graph.system == "stars"
        if graph.system == "inline":
            parts.append(
                f'<path d="{_inline_arcs(graph, t)}" fill="none" stroke="{color}" '
                f'stroke-width="{spec.stroke_width}" data-row="{row}"/>'
            )
        else:
            parts.append(
                f'<polyline points="{_polyline_points(graph.nodes, t, close)}" '
                f'fill="none" stroke="{color}" stroke-width="{spec.stroke_width}" '
                f'data-row="{row}"/>'
            )
        for x, y in graph.nodes:
            cx, cy = t.apply(float(x), float(y))
            parts.append(
                f'<circle cx="{fmt(cx)}" cy="{fmt(cy)}" r="{spec.node_radius}" '
                f'fill="{color}" data-row="{row}"/>'
            )
    parts.extend(_legend(classes if any(labels) else [], spec))
    parts.append("</svg>\n")
    return "\n".join(parts)


def render_glc_l(
    d: Dataset, model: LinearModel, spec: RenderSpec = RenderSpec()
) -> str:
    """Per-case stacked polylines over the projection axis with the threshold
    marker; misclassified cases are dashed."""
    if d.n_attributes != model.n_attributes:
        raise RenderError(
            f"dataset has {d.n_attributes} attributes, model {model.n_attributes}"
        )
    polylines = [polyline(row, model) for row in d.rows]
    predicted = classify_rows(d.rows, model)
    classes = sorted({model.positive_class, model.negative_class})

    nodes = np.vstack([p.nodes for p in polylines])
    x_lo = min(float(nodes[:, 0].min()), model.threshold, 0.0)
    x_hi = max(float(nodes[:, 0].max()), model.threshold, 0.0)
    y_lo = min(0.0, float(nodes[:, 1].min()))
    y_hi = max(float(nodes[:, 1].max()), 0.0)
    pad_x = 0.05 * ((x_hi - x_lo) or 1.0)
    pad_y = 0.05 * ((y_hi - y_lo) or 1.0)
    t = Transform.fit((x_lo - pad_x, x_hi + pad_x, y_lo - pad_y, y_hi + pad_y), spec)

    parts = [_svg_open(spec, t)]
    ax0, ay0 = t.apply(x_lo, 0.0)
    ax1, _ = t.apply(x_hi, 0.0)
    parts.append(
        f'<line id="projection-axis" x1="{fmt(ax0)}" y1="{fmt(ay0)}" '
        f'x2="{fmt(ax1)}" y2="{fmt(ay0)}" stroke="#333333" stroke-width="1"/>'
    )
    thx, _ = t.apply(model.threshold, 0.0)
    parts.append(
        f'<line id="threshold" x1="{fmt(thx)}" y1="{fmt(spec.margin / 2)}" '
        f'x2="{fmt(thx)}" y2="{fmt(spec.height - spec.margin / 2)}" '
        f'stroke="{THRESHOLD_COLOR}" stroke-width="2"/>'
    )
    for row, (poly, label, pred) in enumerate(zip(polylines, d.labels, predicted)):
        color = spec.color_for(label, classes)
        dash = ' stroke-dasharray="4 3" data-misclassified="1"' if pred != label else ""
        parts.append(
            f'<polyline points="{_polyline_points(poly.nodes, t)}" fill="none" '
            f'stroke="{color}" stroke-width="{spec.stroke_width}" '
            f'data-row="{row}"{dash}/>'
        )
        fx, fy = t.apply(*poly.projection_foot)
        parts.append(
            f'<circle cx="{fmt(fx)}" cy="{fmt(fy)}" r="2" fill="{color}" '
            f'data-row="{row}" data-foot="1"/>'
        )
    parts.extend(_legend(classes, spec))
    parts.append("</svg>\n")
    return "\n".join(parts)


def render_rule_overlay(base_svg: str, rule: RectRule) -> str:
    """Draw the rule's rectangles over the matching pair-plane svg.

    Reads the transform and plane anchors embedded in the base document, so
    the overlay is a pure function of (base svg, rule).
    """
    t = Transform.from_svg(base_svg)
    m = re.search(r'data-plane-offsets="([^"]*)"', base_svg)
    if not m:
        raise RenderError("base svg carries no plane anchors (render spc first)")
    anchors = [
        tuple(float(v) for v in chunk.split(","))
        for chunk in m.group(1).split(";")
        if chunk
    ]
    parts = ['<g id="rule-overlay">']
    for idx, clause in enumerate(rule.clauses):
        if not 0 <= clause.plane < len(anchors):
            raise RenderError(
                f"clause plane {clause.plane} not in rendered planes 0..{len(anchors) - 1}"
            )
        ox, oy = anchors[clause.plane]
        x_lo, x_hi, y_lo, y_hi = clause.rect
        cx0, cy0 = t.apply(ox + x_lo, oy + y_hi)
        cx1, cy1 = t.apply(ox + x_hi, oy + y_lo)
        style = (
            'stroke="#6a0dad" stroke-width="1.6"'
            if clause.inside
            else 'stroke="#6a0dad" stroke-width="1.6" stroke-dasharray="5 3"'
        )
        parts.append(
            f'<rect x="{fmt(cx0)}" y="{fmt(cy0)}" width="{fmt(cx1 - cx0)}" '
            f'height="{fmt(cy1 - cy0)}" fill="none" {style} '
            f'data-clause="{idx}" data-membership='
            f'"{"inside" if clause.inside else "outside"}"/>'
        )
    parts.append("</g>")
    overlay = "\n".join(parts)
    if "</svg>" not in base_svg:
        raise RenderError("base document is not a complete svg")
    return base_svg.replace("</svg>", overlay + "\n</svg>")


def render_arrow_field(
    f: ArrowField,
    spec: RenderSpec = RenderSpec(),
    flagged_cells: Sequence[tuple[int, int]] = (),
    origin: tuple[float, float] = (0.0, 0.0),
    cell_size: tuple[float, float] = (1.0, 1.0),
) -> str:
    """Long arrows green, short red; optional highlighted dominance cells."""
    pts = np.array([a.tail for a in f.arrows] + [a.head for a in f.arrows])
    x_lo, x_hi = float(pts[:, 0].min()), float(pts[:, 0].max())
    y_lo, y_hi = float(pts[:, 1].min()), float(pts[:, 1].max())
    pad_x = 0.08 * ((x_hi - x_lo) or 1.0)
    pad_y = 0.08 * ((y_hi - y_lo) or 1.0)
    t = Transform.fit((x_lo - pad_x, x_hi + pad_x, y_lo - pad_y, y_hi + pad_y), spec)
    parts = [_svg_open(spec, t)]
    for cx, cy in flagged_cells:
        gx = origin[0] + cx * cell_size[0]
        gy = origin[1] + cy * cell_size[1]
        x0, y0 = t.apply(gx, gy + cell_size[1])
        x1, y1 = t.apply(gx + cell_size[0], gy)
        parts.append(
            f'<rect x="{fmt(x0)}" y="{fmt(y0)}" width="{fmt(x1 - x0)}" '
            f'height="{fmt(y1 - y0)}" fill="#dff2df" stroke="#1b7837" '
            f'stroke-width="0.8" data-cell="{cx},{cy}"/>'
        )
    for i, arrow in enumerate(f.arrows):
        x0, y0 = t.apply(*arrow.tail)
        x1, y1 = t.apply(*arrow.head)
        color = LONG_COLOR if arrow.long else SHORT_COLOR
        parts.append(
            f'<line x1="{fmt(x0)}" y1="{fmt(y0)}" x2="{fmt(x1)}" y2="{fmt(y1)}" '
            f'stroke="{color}" stroke-width="{spec.stroke_width}" data-arrow="{i}"/>'
        )
        # simple arrowhead: short segment rotated +/- 25 degrees back from the head
        ang = math.atan2(y1 - y0, x1 - x0)
        for delta in (math.radians(155), math.radians(-155)):
            hx = x1 + 6.0 * math.cos(ang + delta)
            hy = y1 + 6.0 * math.sin(ang + delta)
            parts.append(
                f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(hx)}" y2="{fmt(hy)}" '
                f'stroke="{color}" stroke-width="{spec.stroke_width}" data-arrow="{i}"/>'
            )
    parts.append("</svg>\n")
    return "\n".join(parts)
