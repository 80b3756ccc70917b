import re
from pathlib import Path

import numpy as np
import pytest

from glcvis import coords, glcl
from glcvis.dataset import AttributeMeta, Dataset
from glcvis.render import (
    RenderError,
    RenderSpec,
    Transform,
    fmt,
    render_arrow_field,
    render_glc_l,
    render_graphs,
    render_rule_overlay,
)
from glcvis.rules import RectClause, RectRule, build_arrow_field

GOLDEN = Path(__file__).parent / "golden"


def toy_dataset():
    rows = np.array([[0.1, 0.2], [0.9, 0.8], [0.2, 0.1], [0.8, 0.9]])
    attrs = tuple(
        AttributeMeta(f"x{j+1}", float(rows[:, j].min()), float(rows[:, j].max()))
        for j in range(2)
    )
    return Dataset(attributes=attrs, rows=rows, labels=("A", "B", "A", "B"))


def test_fmt_fixed_decimals_and_negative_zero():
    assert fmt(1.23456789) == "1.234568"
    assert fmt(-0.0000001) == "0.000000"
    assert fmt(-1.5) == "-1.500000"


def test_empty_graph_list_still_valid_svg():
    svg = render_graphs([], [])
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")


def test_two_classes_get_distinct_colors():
    graphs = [coords.encode_cpc([0.1, 0.2, 0.3, 0.4]), coords.encode_cpc([0.5, 0.6, 0.7, 0.8])]
    svg = render_graphs(graphs, ["A", "B"])
    colors = set(re.findall(r'stroke="(#[0-9a-f]{6})"', svg))
    assert len(colors) >= 2


def test_byte_determinism_across_runs():
    graphs = [coords.encode_spc(np.random.default_rng(1).uniform(0, 1, 6))]
    a = render_graphs(graphs, ["A"])
    b = render_graphs(graphs, ["A"])
    assert a == b


def test_mixed_systems_rejected():
    with pytest.raises(RenderError):
        render_graphs(
            [coords.encode_pc([1, 2]), coords.encode_cpc([1, 2])], ["A", "B"]
        )


def test_nodes_parse_back_through_transform():
    x = np.array([0.3, 0.7, 0.5, 0.2])
    g = coords.encode_cpc(x)
    svg = render_graphs([g], ["A"])
    t = Transform.from_svg(svg)
    circles = re.findall(r'<circle cx="([-0-9.]+)" cy="([-0-9.]+)"', svg)
    assert len(circles) == g.node_count
    for (cx, cy), node in zip(circles, g.nodes):
        dx, dy = t.invert(float(cx), float(cy))
        assert abs(dx - node[0]) < 1e-4
        assert abs(dy - node[1]) < 1e-4


def test_spc_plane_frames_and_anchor_attributes():
    g = coords.encode_spc([0.2, 0.4, 0.6, 0.8])
    svg = render_graphs([g], ["A"])
    assert 'id="plane-frames"' in svg
    assert svg.count("data-plane=") == 2
    m = re.search(r'data-plane-offsets="([^"]*)"', svg)
    assert m and m.group(1).count(";") == 1


def test_stars_polyline_closes_contour():
    g = coords.encode_cpc_stars([0.5, 0.6, 0.7, 0.8, 0.9, 0.4])
    svg = render_graphs([g], ["A"])
    points = re.search(r'<polyline points="([^"]*)"', svg).group(1).split()
    assert points[0] == points[-1]  # closing segment drawn
    assert len(points) == g.node_count + 1


def test_inline_renders_arcs():
    g = coords.encode_inline([0.5, 0.3, 0.8])
    svg = render_graphs([g], ["A"])
    assert "<path d=" in svg and " A " in svg


def test_glcl_render_counts_and_flags():
    d = toy_dataset()
    model = glcl.train(d, cfg=glcl.TrainConfig(seed=0)).model
    svg = render_glc_l(d, model)
    assert svg.count("<polyline") == d.n_rows
    assert 'id="projection-axis"' in svg
    assert 'id="threshold"' in svg
    # separable toy set: no misclassification markers
    assert "data-misclassified" not in svg
    assert render_glc_l(d, model) == svg  # deterministic


def test_glcl_misclassified_flagged():
    rows = np.array([[0.1], [0.9], [0.15]])
    attrs = (AttributeMeta("x1", 0.1, 0.9),)
    d = Dataset(attributes=attrs, rows=rows, labels=("A", "B", "B"))
    model = glcl.LinearModel(
        coefficients=np.array([1.0]),
        threshold=0.5,
        positive_class="B",
        negative_class="A",
    )
    svg = render_glc_l(d, model)
    assert svg.count("data-misclassified") == 1


def quad_dataset():
    rows = np.array(
        [[0.1, 0.2, 0.3, 0.4], [0.9, 0.8, 0.7, 0.6], [0.2, 0.1, 0.4, 0.3]]
    )
    attrs = tuple(
        AttributeMeta(f"x{j+1}", float(rows[:, j].min()), float(rows[:, j].max()))
        for j in range(4)
    )
    return Dataset(attributes=attrs, rows=rows, labels=("A", "B", "A"))


def test_rule_overlay_structure_and_idempotence():
    d = quad_dataset()
    base = render_graphs([coords.encode_spc(row) for row in d.rows], list(d.labels))
    rule = RectRule(
        clauses=(
            RectClause(plane=0, rect=(0.0, 0.5, 0.0, 0.5), inside=True),
            RectClause(plane=1, rect=(0.2, 0.8, 0.2, 0.8), inside=False),
        ),
        then_class="A",
        else_class="B",
    )
    out1 = render_rule_overlay(base, rule)
    out2 = render_rule_overlay(base, rule)
    assert out1 == out2
    assert out1.count('data-clause="') == 2
    assert 'data-membership="outside"' in out1
    assert out1.count("<rect") == base.count("<rect") + 2


def test_rule_overlay_requires_plane_anchors():
    g = coords.encode_cpc([0.1, 0.2, 0.3, 0.4])
    base = render_graphs([g], ["A"])
    rule = RectRule(
        clauses=(RectClause(plane=0, rect=(0.0, 0.5, 0.0, 0.5)),),
        then_class="A",
        else_class="B",
    )
    with pytest.raises(RenderError):
        render_rule_overlay(base, rule)


def test_rule_overlay_rect_geometry_matches_transform():
    d = quad_dataset()
    base = render_graphs([coords.encode_spc(row) for row in d.rows], list(d.labels))
    rule = RectRule(
        clauses=(RectClause(plane=1, rect=(0.25, 0.75, 0.1, 0.6)),),
        then_class="A",
        else_class="B",
    )
    out = render_rule_overlay(base, rule)
    t = Transform.from_svg(base)
    m = re.search(
        r'<rect x="([-0-9.]+)" y="([-0-9.]+)" width="([-0-9.]+)" height="([-0-9.]+)"[^>]*data-clause="0"',
        out,
    )
    assert m
    x, y = float(m.group(1)), float(m.group(2))
    # plane 1 sits at offset (1.2, 0); rectangle top-left is (1.2+0.25, 0.6)
    ex, ey = t.apply(1.2 + 0.25, 0.6)
    assert abs(x - ex) < 1e-4
    assert abs(y - ey) < 1e-4


def test_arrow_field_colors():
    field = build_arrow_field([(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)])
    svg = render_arrow_field(field)
    assert "#1b7837" in svg  # long arrow
    assert "#b2182b" in svg  # short arrow


def test_golden_files_unchanged():
    for name in ("spc_single.svg", "cpc_pair.svg", "glcl_toy.svg", "spc_rule_overlay.svg"):
        path = GOLDEN / name
        assert path.exists(), f"golden fixture {name} missing; run scripts/make_goldens.py"
    d = toy_dataset()
    point = np.asarray([3, 2, 1, 4, 2, 6]) / 6.0
    assert (GOLDEN / "spc_single.svg").read_text() == render_graphs(
        [coords.encode_spc(point)], ["A"]
    )
    cpc = [
        coords.encode_cpc([0.2, 0.4, 0.1, 0.6, 0.4, 0.8]),
        coords.encode_cpc([0.5, 0.5, 0.5, 0.5, 0.5, 0.5]),
    ]
    assert (GOLDEN / "cpc_pair.svg").read_text() == render_graphs(cpc, ["A", "B"])
    model = glcl.train(d, cfg=glcl.TrainConfig(seed=0)).model
    assert (GOLDEN / "glcl_toy.svg").read_text() == render_glc_l(d, model)
    base = render_graphs([coords.encode_spc(row) for row in d.rows], list(d.labels))
    rule = RectRule(
        clauses=(RectClause(plane=0, rect=(0.0, 0.5, 0.0, 0.5)),),
        then_class="A",
        else_class="B",
    )
    assert (GOLDEN / "spc_rule_overlay.svg").read_text() == render_rule_overlay(base, rule)
