#!/usr/bin/env python3
"""Generate the committed breast-cytology surrogate dataset.

The classic 9-attribute Wisconsin breast cancer dataset (699 records,
integer features 1..10, 16 records with a missing bare-nuclei value) is not
redistributable from inside this repository, so tests ship with a seeded
surrogate of identical schema and comparable class structure: a tight
benign cluster at low values, a spread-out malignant class driven by a
latent severity factor, and deliberate overlap so neither a linear model
nor a small rectangle rule is trivially perfect.

Drop a real copy at tests/data/wbc.csv (same header layout) and the
acceptance suite will prefer it automatically.

Usage: python scripts/make_wbc_surrogate.py > tests/data/wbc_surrogate.csv
"""

from __future__ import annotations

import sys

import numpy as np

ATTRIBUTES = [
    "clump_thickness",
    "size_uniformity",
    "shape_uniformity",
    "marginal_adhesion",
    "epithelial_size",
    "bare_nuclei",
    "bland_chromatin",
    "normal_nucleoli",
    "mitoses",
]

SEED = 20240811
N_BENIGN = 458
N_MALIGNANT = 241
N_MISSING = 16  # bare_nuclei withheld, split across both classes


def benign_rows(rng: np.random.Generator, count: int) -> np.ndarray:
    lam = np.array([2.0, 0.35, 0.45, 0.35, 1.1, 0.45, 1.1, 0.35, 0.08])
    rows = 1 + rng.poisson(lam, size=(count, 9))
    # a fraction of benign cases show one or two elevated attributes
    spikes = rng.random(count) < 0.12
    for i in np.flatnonzero(spikes):
        for j in rng.choice(9, size=rng.integers(1, 3), replace=False):
            rows[i, j] = rng.integers(4, 10)
    return np.clip(rows, 1, 10)


def malignant_rows(rng: np.random.Generator, count: int) -> np.ndarray:
    # severity skewed toward the low end so the classes genuinely overlap
    severity = rng.beta(1.4, 1.1, size=count)
    gain = np.array([0.75, 0.95, 0.9, 0.8, 0.7, 1.0, 0.7, 0.85, 0.45])
    base = 1.2 + 8.8 * severity[:, None] * gain[None, :]
    rows = np.rint(base + rng.normal(0.0, 2.1, size=(count, 9)))
    return np.clip(rows, 1, 10).astype(int)


def main() -> None:
    rng = np.random.default_rng(SEED)
    benign = benign_rows(rng, N_BENIGN)
    malignant = malignant_rows(rng, N_MALIGNANT)

    rows = [(row, "benign") for row in benign] + [
        (row, "malignant") for row in malignant
    ]
    order = rng.permutation(len(rows))
    rows = [rows[i] for i in order]

    missing = set(rng.choice(len(rows), size=N_MISSING, replace=False).tolist())

    out = sys.stdout
    out.write(",".join(ATTRIBUTES + ["class"]) + "\n")
    for i, (row, label) in enumerate(rows):
        cells = [str(int(v)) for v in row]
        if i in missing:
            cells[5] = "?"
        out.write(",".join(cells + [label]) + "\n")


if __name__ == "__main__":
    main()
