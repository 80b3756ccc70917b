"""Linear classifier drawn as stacked attribute vectors.

Each attribute value x_i is drawn as a vector of length x_i at an angle
whose cosine is |a_i| (sign mirrored horizontally), stacked head to tail.
The horizontal coordinate of the final node is exactly the discriminant
value sum(a_i * x_i), so the drawing *is* the classifier: cases whose
endpoint projects right of the threshold belong to the positive class.

Training is multi-start coordinate hill climbing over the coefficient
vector; the threshold is never searched stochastically, it is solved
exactly for every candidate by sorting the projections and scanning cut
midpoints. Everything is deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class LinearModel:
    """Canonical linear discriminant: coefficients scaled so max |a_i| = 1.

    The angle of attribute i is arccos(|a_i|) in [0, pi/2]; the sign of a_i
    is carried separately and mirrors the drawn vector horizontally.
    """

    coefficients: np.ndarray
    threshold: float
    positive_class: str
    negative_class: str
    attribute_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        coeff = np.asarray(self.coefficients, dtype=np.float64).ravel()
        if coeff.size == 0:
            raise ModelError("model needs at least one coefficient")
        if np.any(np.abs(coeff) > 1.0 + 1e-12):
            raise ModelError("coefficients must lie in [-1, 1]")
        coeff = np.clip(coeff, -1.0, 1.0)
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    @property
    def n_attributes(self) -> int:
        return self.coefficients.size

    @property
    def angles(self) -> np.ndarray:
        """Per-attribute stacking angle, cos(angle_i) == |a_i|."""
        return np.arccos(np.abs(self.coefficients))

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.coefficients < 0.0, -1.0, 1.0)

    @property
    def informativeness(self) -> np.ndarray:
        """|a_i| as a rough attribute score. On normalized data larger
        magnitudes move the projection more; with heterogeneous raw units
        this is a quasi-measure at best, so treat it as a hint only."""
        return np.abs(self.coefficients)

    def to_json(self) -> dict:
        obj = {
            "coefficients": [float(a) for a in self.coefficients],
            "threshold": float(self.threshold),
            "positive_class": self.positive_class,
            "negative_class": self.negative_class,
        }
        if self.attribute_names is not None:
            obj["attribute_names"] = list(self.attribute_names)
        return obj

    @staticmethod
    def from_json(obj: dict) -> "LinearModel":
        return LinearModel(
            coefficients=np.asarray(obj["coefficients"], dtype=np.float64),
            threshold=float(obj["threshold"]),
            positive_class=obj["positive_class"],
            negative_class=obj["negative_class"],
            attribute_names=tuple(obj["attribute_names"])
            if obj.get("attribute_names")
            else None,
        )


@dataclass(frozen=True)
class StackedPolyline:
    """Head-to-tail stack of one case's attribute vectors.

    nodes has n+1 entries starting at the origin; projection_value is the
    horizontal coordinate of the last node.
    """

    nodes: np.ndarray

    @property
    def projection_value(self) -> float:
        return float(self.nodes[-1, 0])

    @property
    def projection_foot(self) -> tuple[float, float]:
        return (self.projection_value, 0.0)


def _check_dim(x: np.ndarray, model: LinearModel) -> np.ndarray:
    vec = np.asarray(x, dtype=np.float64).ravel()
    if vec.size != model.n_attributes:
        raise ModelError(
            f"point has {vec.size} values, model expects {model.n_attributes}"
        )
    return vec


def project(x: Sequence[float] | np.ndarray, model: LinearModel) -> float:
    """Discriminant value sum(a_i * x_i)."""
    vec = _check_dim(x, model)
    return float(vec @ model.coefficients)


def polyline(x: Sequence[float] | np.ndarray, model: LinearModel) -> StackedPolyline:
    """Stack the attribute vectors; the endpoint's x equals project(x, model)."""
    vec = _check_dim(x, model)
    cos = model.coefficients  # sign folded into the horizontal component
    sin = np.sqrt(np.clip(1.0 - model.coefficients**2, 0.0, 1.0))
    deltas = np.column_stack([vec * cos, vec * sin])
    nodes = np.vstack([[0.0, 0.0], np.cumsum(deltas, axis=0)])
    return StackedPolyline(nodes=nodes)


def reconstruct(poly: StackedPolyline, model: LinearModel) -> np.ndarray:
    """Recover the case from its polyline's node deltas, exactly.

    Attributes with a_i = 0 are drawn straight up (sin = 1), so their value
    survives in the vertical component; nothing extra needs to be stored.
    """
    deltas = np.diff(poly.nodes, axis=0)
    if deltas.shape[0] != model.n_attributes:
        raise ModelError("polyline node count does not match the model")
    cos = model.coefficients
    sin = np.sqrt(np.clip(1.0 - cos**2, 0.0, 1.0))
    out = np.empty(model.n_attributes)
    for i in range(model.n_attributes):
        if abs(cos[i]) >= sin[i]:
            out[i] = deltas[i, 0] / cos[i]
        else:
            out[i] = deltas[i, 1] / sin[i]
    return out


def classify(x: Sequence[float] | np.ndarray, model: LinearModel) -> str:
    """positive_class iff the projection lands strictly right of the threshold."""
    return (
        model.positive_class
        if project(x, model) > model.threshold
        else model.negative_class
    )


def classify_rows(rows: np.ndarray, model: LinearModel) -> list[str]:
    u = rows @ model.coefficients
    return [
        model.positive_class if v > model.threshold else model.negative_class
        for v in u
    ]


def best_threshold(u: np.ndarray, is_positive: np.ndarray) -> tuple[float, int]:
    """Exact accuracy-optimal cut for fixed projections.

    Scans every midpoint between consecutive distinct sorted values plus the
    two all-one-class cuts; returns (threshold, correct_count). Ties go to
    the leftmost cut, so the result is deterministic.
    """
    u = np.asarray(u, dtype=np.float64)
    pos = np.asarray(is_positive, dtype=bool)
    order = np.argsort(u, kind="stable")
    us = u[order]
    ps = pos[order].astype(np.int64)
    n = us.size
    # cut j classifies items at sorted positions >= j as positive
    pos_right = np.concatenate([np.cumsum(ps[::-1])[::-1], [0]])
    neg_left = np.concatenate([[0], np.cumsum(1 - ps)])
    correct = pos_right + neg_left
    valid = np.ones(n + 1, dtype=bool)
    if n > 1:
        valid[1:n] = us[1:] > us[:-1]
    correct = np.where(valid, correct, -1)
    j = int(np.argmax(correct))
    if j == 0:
        t = float(us[0] - 1.0)
    elif j == n:
        t = float(us[-1] + 1.0)
    else:
        t = float((us[j - 1] + us[j]) / 2.0)
    return t, int(correct[j])


@dataclass(frozen=True)
class TrainConfig:
    restarts: int = 8
    max_iters: int = 60  # coordinate sweeps per step size, safety cap
    seed: int = 0
    step_sizes: tuple[float, ...] = (0.5, 0.25, 0.1, 0.05, 0.02)


@dataclass(frozen=True)
class TrainResult:
    model: LinearModel
    accuracy: float
    restart_accuracies: tuple[float, ...]


def _climb(
    X: np.ndarray,
    is_pos: np.ndarray,
    start: np.ndarray,
    cfg: TrainConfig,
) -> tuple[np.ndarray, int]:
    a = start.copy()
    _, best = best_threshold(X @ a, is_pos)
    n = a.size
    for step in cfg.step_sizes:
        for _ in range(cfg.max_iters):
            improved = False
            for i in range(n):
                base = a[i]
                for cand in (base + step, base - step):
                    cand = min(1.0, max(-1.0, cand))
                    if cand == base:
                        continue
                    a[i] = cand
                    _, correct = best_threshold(X @ a, is_pos)
                    if correct > best:
                        best = correct
                        base = cand
                        improved = True
                    else:
                        a[i] = base
            if not improved:
                break
    # prefer sparse ties: zero out coefficients that cost nothing
    for i in range(n):
        if a[i] == 0.0:
            continue
        kept = a[i]
        a[i] = 0.0
        if np.any(a != 0.0):
            _, correct = best_threshold(X @ a, is_pos)
            if correct >= best:
                best = correct
                continue
        a[i] = kept
    return a, best


def train(
    d: Dataset,
    positive_class: str | None = None,
    negative_class: str | None = None,
    cfg: TrainConfig = TrainConfig(),
) -> TrainResult:
    """Fit the discriminant by seeded multi-start coordinate hill climbing.

    Restart 0 starts from the between-class mean-difference direction, the
    rest from seeded uniform draws; each restart's stream is derived from
    (seed, restart index) so the result is independent of evaluation order.
    Ties across restarts go to the lowest restart index.
    """
    classes = d.class_set
    if positive_class is None or negative_class is None:
        if len(classes) != 2:
            raise ModelError(
                f"dataset has classes {classes}; pick positive/negative explicitly"
            )
        negative_class, positive_class = classes
    if positive_class == negative_class:
        raise ModelError("positive and negative class must differ")
    for c in (positive_class, negative_class):
        if c not in classes:
            raise ModelError(f"class {c!r} not present in dataset")
    sub = d.select_classes([positive_class, negative_class])
    if sub.n_rows < 2:
        raise ModelError("need at least two rows to train")
    X = sub.rows
    is_pos = sub.label_mask(positive_class)
    if is_pos.all() or not is_pos.any():
        raise ModelError("both classes must be non-empty")

    n = X.shape[1]
    mean_diff = X[is_pos].mean(axis=0) - X[~is_pos].mean(axis=0)
    peak = np.max(np.abs(mean_diff))
    starts = [mean_diff / peak if peak > 0 else np.ones(n)]
    for r in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        starts.append(rng.uniform(-1.0, 1.0, size=n))

    best_a: np.ndarray | None = None
    best_correct = -1
    accuracies = []
    for a0 in starts:
        a, correct = _climb(X, is_pos, np.asarray(a0, dtype=np.float64), cfg)
        accuracies.append(correct / X.shape[0])
        if correct > best_correct:
            best_correct = correct
            best_a = a

    assert best_a is not None
    t, _ = best_threshold(X @ best_a, is_pos)
    peak = np.max(np.abs(best_a))
    if peak > 0:
        best_a = best_a / peak
        t = t / peak
    model = LinearModel(
        coefficients=best_a,
        threshold=t,
        positive_class=positive_class,
        negative_class=negative_class,
        attribute_names=sub.attribute_names,
    )
    return TrainResult(
        model=model,
        accuracy=best_correct / X.shape[0],
        restart_accuracies=tuple(accuracies),
    )


def accuracy_on(d: Dataset, model: LinearModel) -> float:
    predicted = classify_rows(d.rows, model)
    correct = sum(1 for p, l in zip(predicted, d.labels) if p == l)
    return correct / d.n_rows


@dataclass(frozen=True)
class PruneReport:
    removed: tuple[str, ...]
    kept: tuple[str, ...]
    accuracy_before: float
    accuracy_after: float

    def to_json(self) -> dict:
        return {
            "removed": list(self.removed),
            "kept": list(self.kept),
            "accuracy_before": self.accuracy_before,
            "accuracy_after": self.accuracy_after,
        }


def prune_and_refit(
    model: LinearModel,
    d: Dataset,
    eps: float = 0.05,
    cfg: TrainConfig = TrainConfig(),
) -> tuple[LinearModel, PruneReport]:
    """Drop attributes whose |coefficient| < eps, then retrain on the rest.

    eps is on the canonical scale (max |a_i| = 1), so the default 0.05 means
    5% of the strongest coefficient. eps = 0 keeps everything.
    """
    coeff = np.abs(model.coefficients)
    keep = [i for i in range(coeff.size) if coeff[i] >= eps]
    if not keep:
        raise ModelError("pruning would remove every attribute")
    names = model.attribute_names or tuple(f"x{i+1}" for i in range(coeff.size))
    removed = tuple(names[i] for i in range(coeff.size) if i not in set(keep))
    sub = d.select_classes([model.positive_class, model.negative_class])
    before = accuracy_on(sub, model)
    if not removed:
        return model, PruneReport(
            removed=(), kept=names, accuracy_before=before, accuracy_after=before
        )
    reduced = d.select_attributes(keep)
    result = train(
        reduced,
        positive_class=model.positive_class,
        negative_class=model.negative_class,
        cfg=cfg,
    )
    report = PruneReport(
        removed=removed,
        kept=tuple(names[i] for i in keep),
        accuracy_before=before,
        accuracy_after=result.accuracy,
    )
    return result.model, report


@dataclass(frozen=True)
class ExplanationDiff:
    """A misclassified case next to its nearest correctly-classified peers.

    deltas[k] = neighbor_k - query per attribute; changed flags mark the
    attributes whose difference exceeds the display tolerance.
    """

    query: np.ndarray
    true_class: str
    predicted_class: str
    neighbor_rows: tuple[int, ...]
    neighbors: np.ndarray
    deltas: np.ndarray
    changed: np.ndarray
    distances: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "query": [float(v) for v in self.query],
            "true_class": self.true_class,
            "predicted_class": self.predicted_class,
            "neighbor_rows": list(self.neighbor_rows),
            "neighbors": [[float(v) for v in row] for row in self.neighbors],
            "deltas": [[float(v) for v in row] for row in self.deltas],
            "changed": [[bool(v) for v in row] for row in self.changed],
            "distances": [float(v) for v in self.distances],
        }


def explain_misclassified(
    x: Sequence[float] | np.ndarray,
    true_class: str,
    d: Dataset,
    model: LinearModel,
    k: int = 2,
    tol: float = 1e-9,
) -> ExplanationDiff:
    """Nearest correctly-classified same-class cases, with per-attribute diffs.

    Distance is L2 in the dataset's (normalized) units; ties break on row
    index. Raises when no correctly classified case of the true class exists.
    """
    vec = _check_dim(x, model)
    predicted = classify(vec, model)
    if predicted == true_class:
        raise ModelError("case is classified correctly; nothing to explain")
    candidates = [
        i
        for i, label in enumerate(d.labels)
        if label == true_class and classify(d.rows[i], model) == true_class
    ]
    if not candidates:
        raise ModelError(
            f"no correctly classified case of class {true_class!r} exists"
        )
    dists = [(float(np.linalg.norm(d.rows[i] - vec)), i) for i in candidates]
    dists.sort()
    chosen = dists[: max(1, k)]
    rows = tuple(i for _, i in chosen)
    neighbors = d.rows[list(rows)]
    deltas = neighbors - vec
    return ExplanationDiff(
        query=vec,
        true_class=true_class,
        predicted_class=predicted,
        neighbor_rows=rows,
        neighbors=neighbors,
        deltas=deltas,
        changed=np.abs(deltas) > tol,
        distances=tuple(dist for dist, _ in chosen),
    )
