"""Order-encoded cell images for non-image data.

An n-D point with integer attribute levels in 1..G becomes a G x G image:
consecutive attribute pairs are cells, and cell intensity encodes the pair's
position in the sequence (first pair darkest), so the point is exactly
recoverable from the image. Colliding pairs (repeated cell coordinates) are
placed on a deterministic outward spiral and logged, preserving
decodability for arbitrary inputs.

Cell coordinates follow the data convention: (x, y) with x the column
1..G left-to-right and y the row 1..G bottom-up. `matrix()` flips y for
the usual top-down raster layout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Dataset, normalize, pad_even


class CpcrError(ValueError):
    pass


class UndecodableError(CpcrError):
    pass


@dataclass(frozen=True)
class Collision:
    pair_index: int  # 0-based position in the pair sequence
    intended: tuple[int, int]
    placed: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "pair_index": self.pair_index,
            "intended": list(self.intended),
            "placed": list(self.placed),
        }

    @staticmethod
    def from_json(obj: dict) -> "Collision":
        return Collision(
            pair_index=int(obj["pair_index"]),
            intended=tuple(obj["intended"]),
            placed=tuple(obj["placed"]),
        )


@dataclass(frozen=True)
class CpcrImage:
    """Cell grid with order-encoding intensities for one point.

    cells[k] = (x, y, intensity) for pair k in sequence order; intensities
    are k/(pair_count+1) for k = 1.., strictly increasing, never reaching
    the 0 background or 1.
    """

    grid_size: int
    cells: tuple[tuple[int, int, float], ...]
    collisions: tuple[Collision, ...]
    pair_count: int
    original_dim: int
    cell_size: int = 1

    def matrix(self) -> np.ndarray:
        """(G, G) float array, row 0 at the top, 0.0 = empty background."""
        g = self.grid_size
        out = np.zeros((g, g))
        for x, y, intensity in self.cells:
            out[g - y, x - 1] = intensity
        return out

    def to_json(self) -> dict:
        return {
            "grid_size": self.grid_size,
            "cells": [[x, y, intensity] for x, y, intensity in self.cells],
            "collisions": [c.to_json() for c in self.collisions],
            "pair_count": self.pair_count,
            "original_dim": self.original_dim,
            "cell_size": self.cell_size,
        }

    @staticmethod
    def from_json(obj: dict) -> "CpcrImage":
        return CpcrImage(
            grid_size=int(obj["grid_size"]),
            cells=tuple((int(x), int(y), float(v)) for x, y, v in obj["cells"]),
            collisions=tuple(Collision.from_json(c) for c in obj["collisions"]),
            pair_count=int(obj["pair_count"]),
            original_dim=int(obj["original_dim"]),
            cell_size=int(obj.get("cell_size", 1)),
        )


def _spiral(start: tuple[int, int], grid: int):
    """start, then ring cells in order right, down, left, up, expanding."""
    x, y = start
    yield (x, y)
    steps = [(1, 0), (0, -1), (-1, 0), (0, 1)]  # right, down, left, up
    run = 1
    d = 0
    while run < 2 * grid + 2:
        for _ in range(2):
            dx, dy = steps[d % 4]
            for _ in range(run):
                x += dx
                y += dy
                if 1 <= x <= grid and 1 <= y <= grid:
                    yield (x, y)
            d += 1
        run += 1


def encode_cpcr(
    x: Sequence[int] | np.ndarray, grid_size: int = 10, cell_size: int = 1
) -> CpcrImage:
    """Place consecutive pairs as cells, darkest first.

    Values must be integers in 1..grid_size. A pair whose cell is already
    occupied walks the spiral to the nearest free cell; the detour is logged
    so decoding stays exact.
    """
    vec = np.asarray(x, dtype=np.float64).ravel()
    if vec.size == 0:
        raise CpcrError("cannot encode an empty point")
    if np.any(vec != np.round(vec)):
        raise CpcrError("attribute levels must be integers (quantize first)")
    levels = np.round(vec).astype(int)
    if np.any(levels < 1) or np.any(levels > grid_size):
        raise CpcrError(
            f"levels must be within 1..{grid_size}; got range "
            f"[{levels.min()}, {levels.max()}]"
        )
    original = levels.size
    padded = pad_even(levels).astype(int)
    pairs = [(int(padded[i]), int(padded[i + 1])) for i in range(0, padded.size, 2)]
    if len(pairs) > grid_size * grid_size:
        raise CpcrError("grid too small to hold all pairs")

    occupied: set[tuple[int, int]] = set()
    cells: list[tuple[int, int, float]] = []
    collisions: list[Collision] = []
    denom = len(pairs) + 1
    for k, intended in enumerate(pairs):
        placed = None
        for cell in _spiral(intended, grid_size):
            if cell not in occupied:
                placed = cell
                break
        if placed is None:
            raise CpcrError("grid too small to resolve collisions")
        occupied.add(placed)
        cells.append((placed[0], placed[1], (k + 1) / denom))
        if placed != intended:
            collisions.append(
                Collision(pair_index=k, intended=intended, placed=placed)
            )
    return CpcrImage(
        grid_size=grid_size,
        cells=tuple(cells),
        collisions=tuple(collisions),
        pair_count=len(pairs),
        original_dim=original,
        cell_size=cell_size,
    )


def decode_cpcr(img: CpcrImage) -> np.ndarray:
    """Recover the point: sort non-background cells by intensity, undo the
    logged collision detours, strip the even-padding duplicate."""
    g = img.grid_size
    mat = img.matrix()
    found = [
        (float(mat[r, c]), c + 1, g - r)
        for r in range(g)
        for c in range(g)
        if mat[r, c] != 0.0
    ]
    if not found:
        raise UndecodableError("image has no placed cells")
    found.sort()
    intensities = [f[0] for f in found]
    if len(set(intensities)) != len(intensities):
        raise UndecodableError("intensity ties cannot be ordered")
    detours = {c.pair_index: c for c in img.collisions}
    values: list[int] = []
    for k, (_, x, y) in enumerate(found):
        detour = detours.get(k)
        if detour is not None:
            if detour.placed != (x, y):
                raise UndecodableError(
                    f"collision log for pair {k} does not match the image"
                )
            x, y = detour.intended
        values.extend([x, y])
    return np.array(values[: img.original_dim], dtype=np.float64)


def quantize_unit(values: np.ndarray, levels: int) -> np.ndarray:
    """[0, 1] values to integer levels 1..levels."""
    v = np.asarray(values, dtype=np.float64)
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise CpcrError("values must be within [0, 1]; normalize first")
    return np.minimum(levels, np.floor(v * levels).astype(int) + 1)


@dataclass(frozen=True)
class Composite:
    """Mean images of two classes side by side, optional case overlay."""

    left_class: str
    right_class: str
    left: np.ndarray  # (G, G) mean intensity, top-down rows
    right: np.ndarray
    gutter: int
    grid_size: int
    target_cells: tuple[tuple[int, int], ...] = ()

    def panel(self) -> np.ndarray:
        g = self.grid_size
        out = np.zeros((g, 2 * g + self.gutter))
        out[:, :g] = self.left
        out[:, g + self.gutter :] = self.right
        return out

    def rgb(self) -> np.ndarray:
        """(G, 2G+gutter, 3): grayscale means; target case cells in red."""
        base = self.panel()
        out = np.repeat(base[:, :, None], 3, axis=2)
        g = self.grid_size
        for x, y in self.target_cells:
            for col in (x - 1, g + self.gutter + x - 1):
                out[g - y, col] = (1.0, 0.0, 0.0)
        return out


def mean_class_composite(
    d: Dataset,
    classes: tuple[str, str],
    grid_size: int = 10,
    target_row: int | None = None,
    gutter: int = 1,
) -> Composite:
    """Cell-wise mean of per-case images for each class, put side by side.

    The dataset is normalized internally and quantized to grid levels. When
    target_row is given, that case's cells are over-drawn in a distinct
    color channel on both panels.
    """
    left_cls, right_cls = classes
    for c in classes:
        if c not in d.class_set:
            raise CpcrError(f"class {c!r} not present in dataset")
    norm, _ = normalize(d)

    def encode_row(i: int) -> CpcrImage:
        levels = quantize_unit(norm.rows[i], grid_size)
        return encode_cpcr(levels, grid_size)

    def class_mean(cls: str) -> np.ndarray:
        rows = [i for i, l in enumerate(norm.labels) if l == cls]
        total = np.zeros((grid_size, grid_size))
        for i in rows:
            total += encode_row(i).matrix()
        return total / len(rows)

    target_cells: tuple[tuple[int, int], ...] = ()
    if target_row is not None:
        if not 0 <= target_row < d.n_rows:
            raise CpcrError(f"target row {target_row} out of range")
        img = encode_row(target_row)
        target_cells = tuple((x, y) for x, y, _ in img.cells)

    return Composite(
        left_class=left_cls,
        right_class=right_cls,
        left=class_mean(left_cls),
        right=class_mean(right_cls),
        gutter=gutter,
        grid_size=grid_size,
        target_cells=target_cells,
    )


# ---------------------------------------------------------------------------
# file output


def _expand(matrix: np.ndarray, cell_size: int) -> np.ndarray:
    return np.kron(matrix, np.ones((cell_size, cell_size)))


def display_gray(img: CpcrImage) -> np.ndarray:
    """Display form: white background, first pair black, later pairs lighter."""
    g = img.grid_size
    out = np.full((g, g), 255, dtype=np.uint8)
    denom = max(1, img.pair_count)
    for k, (x, y, _) in enumerate(img.cells):
        out[g - y, x - 1] = int(round(255 * k / denom * 0.85))
    return _expand(out, img.cell_size).astype(np.uint8)


def write_pgm(gray: np.ndarray, path: str | Path) -> None:
    """Binary PGM (P5); byte-deterministic."""
    arr = np.asarray(gray)
    if arr.dtype != np.uint8:
        arr = np.clip(np.round(arr * 255), 0, 255).astype(np.uint8)
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


def write_ppm(rgb: np.ndarray, path: str | Path) -> None:
    """Binary PPM (P6) for color composites; byte-deterministic."""
    arr = np.asarray(rgb)
    if arr.dtype != np.uint8:
        arr = np.clip(np.round(arr * 255), 0, 255).astype(np.uint8)
    h, w, _ = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


def write_png(image: np.ndarray, path: str | Path) -> None:
    """PNG via Pillow for human viewing (tests rely on PGM/PPM instead)."""
    from PIL import Image

    arr = np.asarray(image)
    if arr.dtype != np.uint8:
        arr = np.clip(np.round(arr * 255), 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(str(path))


def write_sidecar(img: CpcrImage, path: str | Path) -> None:
    Path(path).write_text(json.dumps(img.to_json(), sort_keys=True, indent=2))


def read_sidecar(path: str | Path) -> CpcrImage:
    return CpcrImage.from_json(json.loads(Path(path).read_text()))


def export_dataset(
    d: Dataset,
    out_dir: str | Path,
    grid_size: int = 10,
    cell_size: int = 1,
    image_format: str = "pgm",
) -> dict:
    """Encode every row into <out_dir>/<class>/row_<i>.<ext> plus a JSON
    sidecar each, the layout external image trainers expect.

    Rows are normalized and quantized to grid levels first. Returns a
    manifest {class: [relative paths]} which is also written to
    <out_dir>/manifest.json.
    """
    if image_format not in ("pgm", "png"):
        raise CpcrError(f"unsupported image format {image_format!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    norm, _ = normalize(d)
    manifest: dict[str, list[str]] = {}
    for i, (row, label) in enumerate(zip(norm.rows, norm.labels)):
        img = encode_cpcr(quantize_unit(row, grid_size), grid_size, cell_size)
        class_dir = out / label
        class_dir.mkdir(exist_ok=True)
        name = f"row_{i:05d}.{image_format}"
        path = class_dir / name
        if image_format == "png":
            write_png(display_gray(img), path)
        else:
            write_pgm(display_gray(img), path)
        write_sidecar(img, path.with_suffix(path.suffix + ".json"))
        manifest.setdefault(label, []).append(f"{label}/{name}")
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2))
    return manifest
