"""Lossless encoders from n-D points to 2-D graphs, their exact decoders,
and distance/distortion measurement.

Five coordinate systems are implemented:

``pc``      one node per attribute at (i, x_i) on parallel vertical axes
``cpc``     consecutive attribute pairs as points in one shared plane
``spc``     each pair in its own translated plane
``stars``   pairs in radial frames chained x_2|x_3, x_4|x_5, ..., x_n|x_1,
            drawn as a closed contour
``inline``  all axes laid head-to-tail on one horizontal line

Every encoder records enough structure (pairing, offsets, angles, original
dimension before even-padding) for the matching decoder to reproduce the
input exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .dataset import pad_even

SYSTEMS = ("pc", "cpc", "spc", "stars", "inline")

#: Horizontal gap between consecutive pair planes (spc) / axis anchors
#: (inline) for unit-normalized data; 1.2 leaves a visible gutter between
#: unit squares so planes never overlap.
DEFAULT_PLANE_STEP = 1.2

Pairing = tuple[tuple[int, int], ...]


class CoordsError(ValueError):
    """Invalid pairing, spec, or graph for the requested operation."""


def identity_pairing(m: int) -> Pairing:
    """((0,1), (2,3), ...) over an even dimension m."""
    if m % 2 != 0:
        raise CoordsError(f"pairing needs an even dimension, got {m}")
    return tuple((i, i + 1) for i in range(0, m, 2))


def star_pairing(m: int) -> Pairing:
    """Chained pairing (x_2,x_3), (x_4,x_5), ..., (x_m,x_1) in 0-based form."""
    if m % 2 != 0:
        raise CoordsError(f"star pairing needs an even dimension, got {m}")
    return tuple((2 * k + 1, (2 * k + 2) % m) for k in range(m // 2))


def validate_pairing(pairing: Pairing, m: int) -> None:
    flat = [i for pair in pairing for i in pair]
    if sorted(flat) != list(range(m)):
        raise CoordsError(
            f"pairing {pairing} is not a permutation of 0..{m - 1}"
        )


def default_spc_offsets(pair_count: int) -> np.ndarray:
    """Pair k anchored at (k * DEFAULT_PLANE_STEP, 0)."""
    offsets = np.zeros((pair_count, 2))
    offsets[:, 0] = np.arange(pair_count) * DEFAULT_PLANE_STEP
    return offsets


def default_star_angles(axis_count: int) -> np.ndarray:
    """Equally spaced radial axes: 2*pi*k / axis_count, k = 0..axis_count-1."""
    return 2.0 * np.pi * np.arange(axis_count) / axis_count


def default_inline_offsets(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.float64) * DEFAULT_PLANE_STEP


@dataclass(frozen=True)
class GlcGraph:
    """The 2-D directed-graph image of one n-D point.

    nodes are in drawing order; edges are the consecutive links (for stars
    the closing segment of the contour is a rendering detail, not an edge).
    original_dim records the dimension before even-padding so decoders can
    strip the duplicate.
    """

    system: str
    nodes: np.ndarray  # (k, 2)
    plane_index: tuple[int, ...]
    original_dim: int
    pairing: Pairing | None = None
    offsets: np.ndarray | None = None  # spc: (k, 2); inline: (m,)
    angles: np.ndarray | None = None  # stars: (k,)

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=np.float64)
        object.__setattr__(self, "nodes", nodes)
        if self.system not in SYSTEMS:
            raise CoordsError(f"unknown system {self.system!r}")
        if len(self.plane_index) != nodes.shape[0]:
            raise CoordsError("plane_index length must match node count")

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, i + 1) for i in range(self.node_count - 1))

    def to_json(self) -> dict:
        obj: dict = {
            "system": self.system,
            "nodes": [[float(u), float(v)] for u, v in self.nodes],
            "plane_index": list(self.plane_index),
            "original_dim": self.original_dim,
        }
        if self.pairing is not None:
            obj["pairing"] = [list(p) for p in self.pairing]
        if self.offsets is not None:
            obj["offsets"] = np.asarray(self.offsets).tolist()
        if self.angles is not None:
            obj["angles"] = np.asarray(self.angles).tolist()
        return obj

    @staticmethod
    def from_json(obj: dict) -> "GlcGraph":
        return GlcGraph(
            system=obj["system"],
            nodes=np.asarray(obj["nodes"], dtype=np.float64),
            plane_index=tuple(obj["plane_index"]),
            original_dim=obj["original_dim"],
            pairing=tuple(tuple(p) for p in obj["pairing"]) if "pairing" in obj else None,
            offsets=np.asarray(obj["offsets"], dtype=np.float64) if "offsets" in obj else None,
            angles=np.asarray(obj["angles"], dtype=np.float64) if "angles" in obj else None,
        )


@dataclass(frozen=True)
class DistortionReport:
    """Squared-distance ratios of a point-to-point mapping over all pairs."""

    max_ratio: float
    min_ratio: float
    mean_stress: float
    pair_count: int

    def to_json(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "mean_stress": self.mean_stress,
            "pair_count": self.pair_count,
        }


# ---------------------------------------------------------------------------
# encoders / decoders


def encode_pc(x: Sequence[float] | np.ndarray) -> GlcGraph:
    """Polyline on parallel axes: node i = (i, x_i). No padding needed."""
    vec = np.asarray(x, dtype=np.float64).ravel()
    if vec.size == 0:
        raise CoordsError("cannot encode an empty vector")
    if not np.all(np.isfinite(vec)):
        raise CoordsError("input vector must be finite")
    nodes = np.column_stack([np.arange(vec.size, dtype=np.float64), vec])
    return GlcGraph(
        system="pc",
        nodes=nodes,
        plane_index=(0,) * vec.size,
        original_dim=vec.size,
    )


def decode_pc(g: GlcGraph) -> np.ndarray:
    _require_system(g, "pc")
    return g.nodes[:, 1].copy()


def encode_cpc(
    x: Sequence[float] | np.ndarray, pairing: Pairing | None = None
) -> GlcGraph:
    """Consecutive pairs as points in one shared plane, linked in order.

    Odd-dimensional input is padded by repeating the last value; the
    original dimension is recorded on the graph.
    """
    vec = np.asarray(x, dtype=np.float64).ravel()
    original = vec.size
    padded = pad_even(vec)
    m = padded.size
    if pairing is None:
        pairing = identity_pairing(m)
    validate_pairing(pairing, m)
    nodes = np.array([[padded[i], padded[j]] for i, j in pairing])
    return GlcGraph(
        system="cpc",
        nodes=nodes,
        plane_index=(0,) * len(pairing),
        original_dim=original,
        pairing=pairing,
    )


def decode_cpc(g: GlcGraph) -> np.ndarray:
    _require_system(g, "cpc")
    return _unpair(g.nodes, g.pairing, g.original_dim)


def encode_spc(
    x: Sequence[float] | np.ndarray,
    pairing: Pairing | None = None,
    offsets: np.ndarray | Sequence[Sequence[float]] | None = None,
) -> GlcGraph:
    """Each pair in its own translated plane: node k = offset_k + (x_i, x_j)."""
    vec = np.asarray(x, dtype=np.float64).ravel()
    original = vec.size
    padded = pad_even(vec)
    m = padded.size
    if pairing is None:
        pairing = identity_pairing(m)
    validate_pairing(pairing, m)
    k = len(pairing)
    if offsets is None:
        offsets = default_spc_offsets(k)
    offsets = np.asarray(offsets, dtype=np.float64).reshape(k, 2)
    distinct = len({(float(u), float(v)) for u, v in offsets})
    # all-equal offsets are the deliberate fully-collocated view; a partial
    # duplicate among otherwise distinct planes is almost surely a mistake
    if distinct not in (k, 1):
        raise CoordsError("spc plane offsets must be pairwise distinct")
    raw = np.array([[padded[i], padded[j]] for i, j in pairing])
    return GlcGraph(
        system="spc",
        nodes=raw + offsets,
        plane_index=tuple(range(k)),
        original_dim=original,
        pairing=pairing,
        offsets=offsets,
    )


def decode_spc(g: GlcGraph) -> np.ndarray:
    _require_system(g, "spc")
    if g.offsets is None:
        raise CoordsError("spc graph is missing its plane offsets")
    return _unpair(g.nodes - g.offsets, g.pairing, g.original_dim)


def encode_cpc_stars(
    x: Sequence[float] | np.ndarray,
    angles: np.ndarray | Sequence[float] | None = None,
) -> GlcGraph:
    """Radial paired encoding: half the nodes of a classic star.

    Pair k under the chained pairing contributes node
    r * (cos a_k, sin a_k) + t * (-sin a_k, cos a_k) where (r, t) are the
    pair's values and a_k is the k-th axis angle. The closed contour is a
    rendering convention; stored edges remain the consecutive chain.
    """
    vec = np.asarray(x, dtype=np.float64).ravel()
    original = vec.size
    padded = pad_even(vec)
    m = padded.size
    pairing = star_pairing(m)
    k = m // 2
    if angles is None:
        angles = default_star_angles(k)
    angles = np.asarray(angles, dtype=np.float64).ravel()
    if angles.size != k:
        raise CoordsError(f"need {k} axis angles, got {angles.size}")
    if np.any(np.diff(angles) <= 0) or angles[0] < 0 or angles[-1] >= 2 * np.pi:
        raise CoordsError("star axis angles must be strictly increasing in [0, 2*pi)")
    radial = np.column_stack([np.cos(angles), np.sin(angles)])
    tangent = np.column_stack([-np.sin(angles), np.cos(angles)])
    r = padded[[i for i, _ in pairing]]
    t = padded[[j for _, j in pairing]]
    nodes = radial * r[:, None] + tangent * t[:, None]
    return GlcGraph(
        system="stars",
        nodes=nodes,
        plane_index=tuple(range(k)),
        original_dim=original,
        pairing=pairing,
        angles=angles,
    )


def decode_cpc_stars(g: GlcGraph) -> np.ndarray:
    _require_system(g, "stars")
    if g.angles is None:
        raise CoordsError("stars graph is missing its axis angles")
    angles = np.asarray(g.angles)
    radial = np.column_stack([np.cos(angles), np.sin(angles)])
    tangent = np.column_stack([-np.sin(angles), np.cos(angles)])
    r = np.sum(g.nodes * radial, axis=1)
    t = np.sum(g.nodes * tangent, axis=1)
    return _unpair(np.column_stack([r, t]), g.pairing, g.original_dim)


def encode_inline(
    x: Sequence[float] | np.ndarray,
    offsets: np.ndarray | Sequence[float] | None = None,
) -> GlcGraph:
    """All axes on one line: node i = (offset_i + x_i, 0).

    Connecting arcs between consecutive nodes are drawn by the renderer;
    the node geometry alone carries the data.
    """
    vec = np.asarray(x, dtype=np.float64).ravel()
    if vec.size == 0:
        raise CoordsError("cannot encode an empty vector")
    if offsets is None:
        offsets = default_inline_offsets(vec.size)
    offsets = np.asarray(offsets, dtype=np.float64).ravel()
    if offsets.size != vec.size:
        raise CoordsError("one horizontal offset per axis is required")
    if np.any(np.diff(offsets) <= 0):
        raise CoordsError("inline axis offsets must be strictly increasing")
    nodes = np.column_stack([offsets + vec, np.zeros(vec.size)])
    return GlcGraph(
        system="inline",
        nodes=nodes,
        plane_index=tuple(range(vec.size)),
        original_dim=vec.size,
        offsets=offsets,
    )


def decode_inline(g: GlcGraph) -> np.ndarray:
    _require_system(g, "inline")
    if g.offsets is None:
        raise CoordsError("inline graph is missing its axis offsets")
    return g.nodes[:, 0] - np.asarray(g.offsets)


_DECODERS = {
    "pc": decode_pc,
    "cpc": decode_cpc,
    "spc": decode_spc,
    "stars": decode_cpc_stars,
    "inline": decode_inline,
}


def decode(g: GlcGraph) -> np.ndarray:
    """Dispatch to the decoder for g's coordinate system."""
    return _DECODERS[g.system](g)


def encode(
    system: str,
    x: Sequence[float] | np.ndarray,
    pairing: Pairing | None = None,
    offsets=None,
    angles=None,
) -> GlcGraph:
    """Uniform entry point used by the CLI and service."""
    if system == "pc":
        return encode_pc(x)
    if system == "cpc":
        return encode_cpc(x, pairing)
    if system == "spc":
        return encode_spc(x, pairing, offsets)
    if system == "stars":
        return encode_cpc_stars(x, angles)
    if system == "inline":
        return encode_inline(x, offsets)
    raise CoordsError(f"unknown system {system!r}")


def _require_system(g: GlcGraph, system: str) -> None:
    if g.system != system:
        raise CoordsError(f"graph was encoded as {g.system!r}, not {system!r}")


def _unpair(raw: np.ndarray, pairing: Pairing | None, original_dim: int) -> np.ndarray:
    if pairing is None:
        raise CoordsError("graph is missing its pairing")
    m = 2 * len(pairing)
    out = np.empty(m)
    for k, (i, j) in enumerate(pairing):
        out[i] = raw[k, 0]
        out[j] = raw[k, 1]
    return out[:original_dim]


# ---------------------------------------------------------------------------
# distances


def graph_distance(g1: GlcGraph, g2: GlcGraph, p: int = 2) -> float:
    """Node-wise L^p aggregate between two graphs of the same system/spec.

    Defined as (sum over corresponding nodes of |du|^p + |dv|^p)^(1/p),
    except that a coordinate slot created by even-padding is counted once,
    not twice, so the value equals the L^p distance of the original points
    for pc, cpc and spc (p in {1, 2}).
    """
    if p not in (1, 2):
        raise CoordsError("p must be 1 or 2")
    if g1.system != g2.system:
        raise CoordsError("graphs use different coordinate systems")
    if g1.node_count != g2.node_count:
        raise CoordsError("graphs have different node counts")
    if g1.pairing != g2.pairing:
        raise CoordsError("graphs use different pairings")
    if g1.original_dim != g2.original_dim:
        raise CoordsError("graphs encode different dimensions")
    for a, b in ((g1.offsets, g2.offsets), (g1.angles, g2.angles)):
        if (a is None) != (b is None) or (
            a is not None and not np.array_equal(np.asarray(a), np.asarray(b))
        ):
            raise CoordsError("graphs use different system parameters")

    diff = np.abs(g1.nodes - g2.nodes)
    if g1.pairing is not None and 2 * len(g1.pairing) > g1.original_dim:
        # skip the duplicated pad slot (index >= original_dim)
        mask = np.ones_like(diff)
        for k, (i, j) in enumerate(g1.pairing):
            if i >= g1.original_dim:
                mask[k, 0] = 0.0
            if j >= g1.original_dim:
                mask[k, 1] = 0.0
        diff = diff * mask
    total = float(np.sum(diff**p))
    return total ** (1.0 / p)


def lp_distance(x: np.ndarray, y: np.ndarray, p: int) -> float:
    return float(np.sum(np.abs(np.asarray(x) - np.asarray(y)) ** p) ** (1.0 / p))


def mapping_distortion(
    high: Sequence[Sequence[float]] | np.ndarray,
    low: Sequence[Sequence[float]] | np.ndarray,
) -> DistortionReport:
    """Squared-distance ratios low/high over all unordered point pairs.

    Duplicate high-D points are rejected (zero denominators). mean_stress is
    the mean of (ratio - 1)^2; an isometry scores max = min = 1, stress 0.
    """
    hi = np.asarray(high, dtype=np.float64)
    lo = np.asarray(low, dtype=np.float64)
    if hi.ndim != 2 or lo.ndim != 2:
        raise CoordsError("point lists must be 2-D matrices")
    if hi.shape[0] != lo.shape[0]:
        raise CoordsError("high and low point lists differ in length")
    if hi.shape[0] < 2:
        raise CoordsError("need at least two points")
    d_hi = pdist(hi, "sqeuclidean")
    if np.any(d_hi == 0.0):
        raise CoordsError("duplicate high-dimensional points give zero denominators")
    d_lo = pdist(lo, "sqeuclidean")
    ratios = d_lo / d_hi
    return DistortionReport(
        max_ratio=float(ratios.max()),
        min_ratio=float(ratios.min()),
        mean_stress=float(np.mean((ratios - 1.0) ** 2)),
        pair_count=int(ratios.size),
    )
