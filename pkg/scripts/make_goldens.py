#!/usr/bin/env python3
"""Regenerate the golden SVG fixtures under tests/golden/.

Run after an intentional renderer change, then review the diff:
    python scripts/make_goldens.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from glcvis import coords, glcl
from glcvis.dataset import AttributeMeta, Dataset
from glcvis.render import render_glc_l, render_graphs, render_rule_overlay
from glcvis.rules import RectClause, RectRule

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def toy_dataset() -> Dataset:
    rows = np.array([[0.1, 0.2], [0.9, 0.8], [0.2, 0.1], [0.8, 0.9]])
    attrs = tuple(
        AttributeMeta(f"x{j+1}", float(rows[:, j].min()), float(rows[:, j].max()))
        for j in range(2)
    )
    return Dataset(attributes=attrs, rows=rows, labels=("A", "B", "A", "B"))


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)

    point = [3, 2, 1, 4, 2, 6]
    spc = [coords.encode_spc(np.asarray(point) / 6.0)]
    (GOLDEN / "spc_single.svg").write_text(render_graphs(spc, ["A"]))

    cpc = [
        coords.encode_cpc([0.2, 0.4, 0.1, 0.6, 0.4, 0.8]),
        coords.encode_cpc([0.5, 0.5, 0.5, 0.5, 0.5, 0.5]),
    ]
    (GOLDEN / "cpc_pair.svg").write_text(render_graphs(cpc, ["A", "B"]))

    d = toy_dataset()
    model = glcl.train(d, cfg=glcl.TrainConfig(seed=0)).model
    (GOLDEN / "glcl_toy.svg").write_text(render_glc_l(d, model))

    base = render_graphs(
        [coords.encode_spc(row) for row in d.rows], list(d.labels)
    )
    rule = RectRule(
        clauses=(RectClause(plane=0, rect=(0.0, 0.5, 0.0, 0.5)),),
        then_class="A",
        else_class="B",
    )
    (GOLDEN / "spc_rule_overlay.svg").write_text(render_rule_overlay(base, rule))


if __name__ == "__main__":
    main()
