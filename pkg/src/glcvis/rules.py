"""Interpretable rule machinery.

Three families live here:

* step rules: a 2-D linear decision boundary interpolated by a staircase of
  interval rules, each readable in original attribute units;
* rectangle rules: conjunctions of axis-aligned rectangle memberships over
  pair planes, discovered by a filter / search / present pipeline;
* arrow fields: consecutive time-series states as directed 2-D arrows with
  per-cell dominance statistics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .coords import Pairing, identity_pairing, validate_pairing
from .dataset import Dataset, pad_even


class RuleError(ValueError):
    pass


class DomainError(RuleError):
    """A case falls outside the domain a rule was built for."""


# ---------------------------------------------------------------------------
# step rules


@dataclass(frozen=True)
class Step:
    """One staircase interval [lo, hi) on the first attribute.

    The last step of a rule set is closed on the right. height is the
    boundary's value at the interval midpoint.
    """

    lo: float
    hi: float
    height: float
    closed_right: bool = False

    def contains(self, x1: float) -> bool:
        if self.closed_right:
            return self.lo <= x1 <= self.hi
        return self.lo <= x1 < self.hi

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2.0


@dataclass(frozen=True)
class StepRuleSet:
    """Staircase interpolation of the boundary a*x1 + b*x2 + c = 0.

    Classification: find the step containing x1, then compare x2 against the
    step height; strictly above gives class_above, otherwise class_below.
    A case exactly on the staircase goes below, matching the convention that
    a zero discriminant is the negative side.
    """

    boundary: tuple[float, float, float]
    steps: tuple[Step, ...]
    class_above: str
    class_below: str
    attr_x: int = 0
    attr_y: int = 1

    def step_for(self, x1: float) -> Step:
        for s in self.steps:
            if s.contains(x1):
                return s
        raise DomainError(
            f"x1 = {x1} outside the step domain "
            f"[{self.steps[0].lo}, {self.steps[-1].hi}]"
        )

    def classify(self, x1: float, x2: float) -> str:
        s = self.step_for(x1)
        return self.class_above if x2 > s.height else self.class_below

    def to_json(self) -> dict:
        return {
            "kind": "steps",
            "boundary": list(self.boundary),
            "steps": [
                {"lo": s.lo, "hi": s.hi, "height": s.height, "closed_right": s.closed_right}
                for s in self.steps
            ],
            "class_above": self.class_above,
            "class_below": self.class_below,
            "attr_x": self.attr_x,
            "attr_y": self.attr_y,
        }


@dataclass(frozen=True)
class SingleAxisRule:
    """Degenerate boundary that depends on one attribute only."""

    attr: int
    threshold: float
    class_above: str
    class_below: str

    def classify(self, value: float) -> str:
        return self.class_above if value > self.threshold else self.class_below

    def to_json(self) -> dict:
        return {
            "kind": "single_axis",
            "attr": self.attr,
            "threshold": self.threshold,
            "class_above": self.class_above,
            "class_below": self.class_below,
        }


def linear_to_steps(
    boundary: tuple[float, float, float],
    domain: tuple[float, float],
    resolution: float,
    class_pos: str = "class1",
    class_neg: str = "class2",
    attr_x: int = 0,
    attr_y: int = 1,
) -> StepRuleSet | SingleAxisRule:
    """Interpolate the boundary by steps of the given width on x1.

    class_pos is the side where a*x1 + b*x2 + c > 0. A vertical boundary
    (b = 0) cannot be written as a staircase over x1; a single-attribute
    threshold rule is returned instead.
    """
    a, b, c = boundary
    lo, hi = domain
    if not lo < hi:
        raise RuleError("domain must satisfy lo < hi")
    if resolution <= 0:
        raise RuleError("resolution must be positive")
    if b == 0.0:
        if a == 0.0:
            raise RuleError("boundary has no dependence on either attribute")
        thr = -c / a
        above = class_pos if a > 0 else class_neg
        below = class_neg if a > 0 else class_pos
        return SingleAxisRule(
            attr=attr_x, threshold=thr, class_above=above, class_below=below
        )

    def height(x1: float) -> float:
        return -(a * x1 + c) / b

    if a == 0.0:
        steps: tuple[Step, ...] = (
            Step(lo=lo, hi=hi, height=height((lo + hi) / 2.0), closed_right=True),
        )
    else:
        count = max(1, math.ceil((hi - lo) / resolution - 1e-12))
        edges = [lo + i * resolution for i in range(count)] + [hi]
        built = []
        for i in range(count):
            s_lo, s_hi = edges[i], min(edges[i + 1], hi)
            built.append(
                Step(
                    lo=s_lo,
                    hi=s_hi,
                    height=height((s_lo + s_hi) / 2.0),
                    closed_right=(i == count - 1),
                )
            )
        steps = tuple(built)

    above = class_pos if b > 0 else class_neg
    below = class_neg if b > 0 else class_pos
    return StepRuleSet(
        boundary=(a, b, c),
        steps=steps,
        class_above=above,
        class_below=below,
        attr_x=attr_x,
        attr_y=attr_y,
    )


@dataclass(frozen=True)
class StepSensitivity:
    """Step length and riser height, optionally in analyst-chosen units.

    Raw step dimensions say nothing about attribute importance by
    themselves: rescaling an axis changes them arbitrarily. When the
    analyst supplies per-attribute insensitivity units the dimensions are
    additionally reported as multiples of those units; any importance
    reading is theirs to make, never computed here.
    """

    step_length: float
    riser_height: float
    length_units: float | None = None
    height_units: float | None = None

    def to_json(self) -> dict:
        obj: dict = {"step_length": self.step_length, "riser_height": self.riser_height}
        if self.length_units is not None:
            obj["length_units"] = self.length_units
        if self.height_units is not None:
            obj["height_units"] = self.height_units
        return obj


def sensitivity_report(
    rule: StepRuleSet,
    unit_x: float | None = None,
    unit_y: float | None = None,
) -> list[StepSensitivity]:
    """Per-step dimensions; units are optional insensitivity units."""
    if unit_x is not None and unit_x <= 0:
        raise RuleError("insensitivity units must be positive")
    if unit_y is not None and unit_y <= 0:
        raise RuleError("insensitivity units must be positive")
    out = []
    for i, step in enumerate(rule.steps):
        length = step.hi - step.lo
        if len(rule.steps) == 1:
            riser = 0.0
        elif i + 1 < len(rule.steps):
            riser = abs(rule.steps[i + 1].height - step.height)
        else:
            riser = abs(step.height - rule.steps[i - 1].height)
        out.append(
            StepSensitivity(
                step_length=length,
                riser_height=riser,
                length_units=length / unit_x if unit_x else None,
                height_units=riser / unit_y if unit_y else None,
            )
        )
    return out


@dataclass(frozen=True)
class CaseRule:
    """The single step rule applicable to one case, generated on the fly."""

    step: Step
    below: bool  # case sits at or under the step height
    predicted: str
    text: str


def rule_for_case(
    x: tuple[float, float],
    boundary: tuple[float, float, float],
    domain: tuple[float, float],
    resolution: float,
    class_pos: str = "class1",
    class_neg: str = "class2",
) -> CaseRule:
    """Interval rule of the step containing the case, plus its prediction."""
    rule = linear_to_steps(boundary, domain, resolution, class_pos, class_neg)
    if isinstance(rule, SingleAxisRule):
        predicted = rule.classify(x[0])
        text = (
            f"if x1 > {rule.threshold:g} then {rule.class_above} "
            f"else {rule.class_below}"
        )
        step = Step(lo=domain[0], hi=domain[1], height=rule.threshold, closed_right=True)
        return CaseRule(step=step, below=x[0] <= rule.threshold, predicted=predicted, text=text)
    step = rule.step_for(x[0])
    below = x[1] <= step.height
    predicted = rule.class_below if below else rule.class_above
    op = "<=" if below else ">"
    closer = "<=" if step.closed_right else "<"
    text = (
        f"if {step.lo:g} <= x1 {closer} {step.hi:g} and x2 {op} {step.height:g} "
        f"then {predicted}"
    )
    return CaseRule(step=step, below=below, predicted=predicted, text=text)


# ---------------------------------------------------------------------------
# rectangle rules


@dataclass(frozen=True)
class RectClause:
    """Membership test of one pair-plane point in an axis-aligned rectangle."""

    plane: int
    rect: tuple[float, float, float, float]  # x_lo, x_hi, y_lo, y_hi
    inside: bool = True

    def __post_init__(self) -> None:
        x_lo, x_hi, y_lo, y_hi = self.rect
        if not (x_lo < x_hi and y_lo < y_hi):
            raise RuleError(f"rectangle {self.rect} must have positive area")

    def to_json(self) -> dict:
        return {
            "plane": self.plane,
            "rect": list(self.rect),
            "membership": "inside" if self.inside else "outside",
        }

    @staticmethod
    def from_json(obj: dict) -> "RectClause":
        return RectClause(
            plane=int(obj["plane"]),
            rect=tuple(float(v) for v in obj["rect"]),
            inside=obj.get("membership", "inside") == "inside",
        )


@dataclass(frozen=True)
class RectRule:
    """If every clause holds then then_class, otherwise else_class."""

    clauses: tuple[RectClause, ...]
    then_class: str
    else_class: str

    def covers(self, rows: np.ndarray, pairing: Pairing) -> np.ndarray:
        """Boolean mask of rows satisfying the whole conjunction."""
        padded = _pad_rows(rows, pairing)
        mask = np.ones(padded.shape[0], dtype=bool)
        for clause in self.clauses:
            if not 0 <= clause.plane < len(pairing):
                raise RuleError(
                    f"clause references plane {clause.plane}, pairing has {len(pairing)}"
                )
            i, j = pairing[clause.plane]
            x = padded[:, i]
            y = padded[:, j]
            x_lo, x_hi, y_lo, y_hi = clause.rect
            inside = (x >= x_lo) & (x <= x_hi) & (y >= y_lo) & (y <= y_hi)
            mask &= inside if clause.inside else ~inside
        return mask

    def predict(self, rows: np.ndarray, pairing: Pairing) -> list[str]:
        mask = self.covers(rows, pairing)
        return [self.then_class if m else self.else_class for m in mask]

    def describe(self, attribute_names: Sequence[str], pairing: Pairing) -> str:
        names = list(attribute_names)
        while len(names) < 2 * len(pairing):
            names.append(names[-1])  # padded duplicate shares the name
        parts = []
        for clause in self.clauses:
            i, j = pairing[clause.plane]
            x_lo, x_hi, y_lo, y_hi = clause.rect
            op = "in" if clause.inside else "not in"
            parts.append(
                f"({names[i]}, {names[j]}) {op} "
                f"[{x_lo:g}, {x_hi:g}] x [{y_lo:g}, {y_hi:g}]"
            )
        cond = " and ".join(parts) if parts else "always"
        return f"if {cond} then {self.then_class} else {self.else_class}"

    def to_json(self) -> dict:
        return {
            "kind": "rect",
            "clauses": [c.to_json() for c in self.clauses],
            "then_class": self.then_class,
            "else_class": self.else_class,
        }

    @staticmethod
    def from_json(obj: dict) -> "RectRule":
        return RectRule(
            clauses=tuple(RectClause.from_json(c) for c in obj["clauses"]),
            then_class=obj["then_class"],
            else_class=obj["else_class"],
        )


@dataclass(frozen=True)
class RuleEvalReport:
    correct: int
    total: int
    confusion: dict[tuple[str, str], int]
    covered_ids: tuple[int, ...]

    @property
    def accuracy(self) -> float:
        return self.correct / self.total

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "correct": self.correct,
            "total": self.total,
            "confusion": [
                {"true": t, "predicted": p, "count": n}
                for (t, p), n in sorted(self.confusion.items())
            ],
            "covered_ids": list(self.covered_ids),
        }


def _pad_rows(rows: np.ndarray, pairing: Pairing) -> np.ndarray:
    m = 2 * len(pairing)
    if rows.shape[1] == m:
        return rows
    if rows.shape[1] == m - 1:
        return np.column_stack([rows, rows[:, -1]])
    raise RuleError(
        f"pairing covers {m} attributes but rows have {rows.shape[1]}"
    )


def evaluate_rule(
    rule: RectRule | StepRuleSet | SingleAxisRule,
    d: Dataset,
    pairing: Pairing | None = None,
) -> RuleEvalReport:
    """Exact counts by direct evaluation of every row."""
    if isinstance(rule, RectRule):
        if pairing is None:
            pairing = identity_pairing(d.n_attributes + d.n_attributes % 2)
        predicted = rule.predict(d.rows, pairing)
        covered = tuple(
            int(i) for i, m in enumerate(rule.covers(d.rows, pairing)) if m
        )
    elif isinstance(rule, StepRuleSet):
        lo = rule.steps[0].lo
        hi = rule.steps[-1].hi
        predicted = [
            rule.classify(min(max(row[rule.attr_x], lo), hi), row[rule.attr_y])
            for row in d.rows
        ]
        covered = tuple(
            i
            for i, row in enumerate(d.rows)
            if lo <= row[rule.attr_x] <= hi
        )
    elif isinstance(rule, SingleAxisRule):
        predicted = [rule.classify(row[rule.attr]) for row in d.rows]
        covered = tuple(range(d.n_rows))
    else:
        raise RuleError(f"cannot evaluate {type(rule).__name__}")

    confusion: dict[tuple[str, str], int] = {}
    correct = 0
    for true, pred in zip(d.labels, predicted):
        confusion[(true, pred)] = confusion.get((true, pred), 0) + 1
        if true == pred:
            correct += 1
    return RuleEvalReport(
        correct=correct,
        total=d.n_rows,
        confusion=confusion,
        covered_ids=covered,
    )


# ---------------------------------------------------------------------------
# filter / search / present over pair planes


@dataclass(frozen=True)
class FspConfig:
    seed: int = 0
    max_pairings: int = 1000  # sample the pairing space beyond this budget
    keep: int = 12  # pairings surviving the filter stage
    quantiles: int = 10  # rectangle grid lines per axis come from deciles
    max_clauses: int = 3


@dataclass(frozen=True)
class FspResult:
    pairing: Pairing
    rule: RectRule
    report: RuleEvalReport
    pairings_scored: int


def _all_pairings(m: int) -> Iterable[Pairing]:
    """Every partition of 0..m-1 into ordered-canonical pairs, lexicographic."""

    def rec(items: tuple[int, ...]) -> Iterable[Pairing]:
        if not items:
            yield ()
            return
        first = items[0]
        rest = items[1:]
        for idx, partner in enumerate(rest):
            head = (first, partner)
            for tail in rec(rest[:idx] + rest[idx + 1 :]):
                yield (head,) + tail

    return rec(tuple(range(m)))


def _pairing_space_size(m: int) -> int:
    size = 1
    for v in range(m - 1, 0, -2):
        size *= v
    return size


def _sample_pairings(m: int, budget: int, seed: int) -> list[Pairing]:
    if _pairing_space_size(m) <= budget:
        return list(_all_pairings(m))
    rng = np.random.default_rng([seed, 1])
    seen: set[Pairing] = set()
    out: list[Pairing] = [identity_pairing(m)]
    seen.add(identity_pairing(m))
    while len(out) < budget:
        perm = rng.permutation(m)
        pairing = tuple(
            tuple(sorted((int(perm[2 * k]), int(perm[2 * k + 1]))))
            for k in range(m // 2)
        )
        pairing = tuple(sorted(pairing))
        if pairing not in seen:
            seen.add(pairing)
            out.append(pairing)
    return out


def _grid_values(column: np.ndarray, quantiles: int) -> np.ndarray:
    qs = np.linspace(0.0, 1.0, quantiles + 1)
    return np.unique(np.quantile(column, qs))


class _PlaneMasks:
    """Candidate rectangles of one plane and their row-membership masks."""

    def __init__(self, x: np.ndarray, y: np.ndarray, quantiles: int) -> None:
        gx = _grid_values(x, quantiles)
        gy = _grid_values(y, quantiles)
        rects = []
        for a, b in itertools.combinations(range(gx.size), 2):
            for c, e in itertools.combinations(range(gy.size), 2):
                rects.append((float(gx[a]), float(gx[b]), float(gy[c]), float(gy[e])))
        self.rects = rects
        masks = np.empty((len(rects), x.size), dtype=bool)
        for r, (x_lo, x_hi, y_lo, y_hi) in enumerate(rects):
            masks[r] = (x >= x_lo) & (x <= x_hi) & (y >= y_lo) & (y <= y_hi)
        self.masks = masks
        self.masks_f = masks.astype(np.float32)


def _best_clause_for_plane(
    p: _PlaneMasks, current: np.ndarray, is_then: np.ndarray
) -> tuple[int, int, bool]:
    """(correct, rect index, inside) maximizing accuracy after conjunction.

    Uses (M & c) @ v == M @ (c & v) to stay on one matrix-vector product per
    membership instead of materializing row-by-rectangle temporaries.
    """
    n_else = int((~is_then).sum())
    then_in = p.masks_f @ (is_then & current).astype(np.float32)
    all_in = p.masks_f @ current.astype(np.float32)
    # correct = then-rows covered + else-rows not covered
    correct_inside = then_in + (n_else - (all_in - then_in))

    cur_then = float((is_then & current).sum())
    cur_all = float(current.sum())
    # outside-membership keeps current minus the rectangle rows
    then_out = cur_then - then_in
    all_out = cur_all - all_in
    correct_outside = then_out + (n_else - (all_out - then_out))

    best_in = int(np.argmax(correct_inside))
    best_out = int(np.argmax(correct_outside))
    if correct_inside[best_in] >= correct_outside[best_out]:
        return int(round(float(correct_inside[best_in]))), best_in, True
    return int(round(float(correct_outside[best_out]))), best_out, False


def fsp_search(d: Dataset, cfg: FspConfig = FspConfig()) -> FspResult:
    """Filter pairings, search greedily for rectangle clauses, present the best.

    Filtering scores every candidate pairing by the best single-plane
    rectangle accuracy over a quantile grid and keeps the top cfg.keep.
    Searching adds clauses greedily (inside/outside membership over the same
    grid) while accuracy strictly improves, up to cfg.max_clauses. Returns
    the overall best; ties break on fewer clauses then lexicographic pairing,
    so the result is independent of evaluation order. Accuracy never drops
    below the majority-class baseline because the empty conjunction (predict
    then_class everywhere) is the search's starting point.
    """
    classes = d.class_set
    if len(classes) != 2:
        raise RuleError(f"rectangle search needs two classes, got {classes}")
    if d.n_attributes < 2:
        raise RuleError("need at least two attributes")
    rows = _pad_rows(d.rows, identity_pairing(d.n_attributes + d.n_attributes % 2))
    m = rows.shape[1]
    labels = np.array([l == classes[1] for l in d.labels])  # True = classes[1]

    candidates = _sample_pairings(m, cfg.max_pairings, cfg.seed)

    # bounded FIFO cache: only the planes of surviving pairings stay warm
    plane_cache: dict[tuple[int, int], _PlaneMasks] = {}

    def plane(i: int, j: int) -> _PlaneMasks:
        key = (i, j)
        if key not in plane_cache:
            if len(plane_cache) >= 16:
                plane_cache.pop(next(iter(plane_cache)))
            plane_cache[key] = _PlaneMasks(rows[:, i], rows[:, j], cfg.quantiles)
        return plane_cache[key]

    n = rows.shape[0]
    everything = np.ones(n, dtype=bool)

    plane_scores: dict[tuple[int, int], int] = {}

    def plane_score(i: int, j: int) -> int:
        key = (i, j)
        if key not in plane_scores:
            p = _PlaneMasks(rows[:, i], rows[:, j], cfg.quantiles)
            best = 0
            for is_then in (labels, ~labels):
                correct, _, _ = _best_clause_for_plane(p, everything, is_then)
                best = max(best, correct)
            plane_scores[key] = best
        return plane_scores[key]

    scored = sorted(
        candidates,
        key=lambda pairing: (-max(plane_score(i, j) for i, j in pairing), pairing),
    )
    survivors = scored[: max(1, cfg.keep)]

    majority = max(int(labels.sum()), int((~labels).sum()))
    best: tuple[int, int, Pairing, RectRule] | None = None  # (-correct, clauses, ...)

    for pairing in survivors:
        for then_idx in (0, 1):
            then_class = classes[then_idx]
            else_class = classes[1 - then_idx]
            is_then = labels if then_idx == 1 else ~labels
            current = everything.copy()
            clauses: list[RectClause] = []
            correct_now = int(is_then.sum())  # empty conjunction covers all
            while len(clauses) < cfg.max_clauses:
                round_best: tuple[int, int, int, bool] | None = None
                for plane_idx, (i, j) in enumerate(pairing):
                    correct, rect_idx, inside = _best_clause_for_plane(
                        plane(i, j), current, is_then
                    )
                    if round_best is None or correct > round_best[0]:
                        round_best = (correct, plane_idx, rect_idx, inside)
                assert round_best is not None
                correct, plane_idx, rect_idx, inside = round_best
                if correct <= correct_now:
                    break
                i, j = pairing[plane_idx]
                rect = plane(i, j).rects[rect_idx]
                mask = plane(i, j).masks[rect_idx]
                current = current & (mask if inside else ~mask)
                clauses.append(RectClause(plane=plane_idx, rect=rect, inside=inside))
                correct_now = correct
            candidate = (
                -correct_now,
                len(clauses),
                pairing,
                RectRule(
                    clauses=tuple(clauses),
                    then_class=then_class,
                    else_class=else_class,
                ),
            )
            if best is None or candidate[:3] < best[:3]:
                best = candidate

    assert best is not None
    _, _, pairing, rule = best
    if -best[0] < majority:
        # cannot happen: the empty conjunction with the majority then-class
        # already scores the baseline; kept as a guard
        majority_class = classes[int(labels.sum() > (~labels).sum())]
        other = classes[1 - int(labels.sum() > (~labels).sum())]
        rule = RectRule(clauses=(), then_class=majority_class, else_class=other)
    report = evaluate_rule(rule, d, pairing)
    return FspResult(
        pairing=pairing, rule=rule, report=report, pairings_scored=len(candidates)
    )


# ---------------------------------------------------------------------------
# arrow fields


@dataclass(frozen=True)
class Arrow:
    tail: tuple[float, float]
    head: tuple[float, float]
    long: bool  # outcome increased from tail time to head time

    def to_json(self) -> dict:
        return {
            "tail": list(self.tail),
            "head": list(self.head),
            "direction": "long" if self.long else "short",
        }


@dataclass(frozen=True)
class ArrowField:
    arrows: tuple[Arrow, ...]

    def to_json(self) -> dict:
        return {"arrows": [a.to_json() for a in self.arrows]}


def build_arrow_field(series: Sequence[tuple[float, float]]) -> ArrowField:
    """One arrow per consecutive (state, outcome) pair.

    The arrow is long when the outcome strictly increased over the step; a
    flat or falling outcome is short. Decisions attach to the tail time.
    """
    if len(series) < 2:
        raise RuleError("need at least two time points")
    arrows = []
    for (v0, y0), (v1, y1) in zip(series, series[1:]):
        arrows.append(
            Arrow(
                tail=(float(v0), float(y0)),
                head=(float(v1), float(y1)),
                long=y1 > y0,
            )
        )
    return ArrowField(arrows=tuple(arrows))


@dataclass(frozen=True)
class CellStats:
    long: int
    short: int

    @property
    def dominance(self) -> float:
        return self.long / (self.long + self.short)


@dataclass(frozen=True)
class DominanceGrid:
    origin: tuple[float, float]
    cell_size: tuple[float, float]
    cells: dict[tuple[int, int], CellStats]
    flagged: tuple[tuple[int, int], ...]
    threshold: float

    def to_json(self) -> dict:
        return {
            "origin": list(self.origin),
            "cell_size": list(self.cell_size),
            "threshold": self.threshold,
            "cells": [
                {
                    "cell": list(key),
                    "long": s.long,
                    "short": s.short,
                    "dominance": s.dominance,
                }
                for key, s in sorted(self.cells.items())
            ],
            "flagged": [list(c) for c in self.flagged],
        }


def arrow_dominance(
    f: ArrowField,
    cell_size: tuple[float, float],
    origin: tuple[float, float] | None = None,
    threshold: float = 0.9,
) -> DominanceGrid:
    """Per-cell long/short counts; arrows belong to the cell of their tail.

    Cells whose long fraction reaches the threshold are flagged as candidate
    strategy regions.
    """
    if not f.arrows:
        raise RuleError("arrow field is empty")
    sx, sy = cell_size
    if sx <= 0 or sy <= 0:
        raise RuleError("cell sizes must be positive")
    tails = np.array([a.tail for a in f.arrows])
    if origin is None:
        origin = (float(tails[:, 0].min()), float(tails[:, 1].min()))
    ox, oy = origin
    cells: dict[tuple[int, int], list[int]] = {}
    for arrow in f.arrows:
        cx = math.floor((arrow.tail[0] - ox) / sx)
        cy = math.floor((arrow.tail[1] - oy) / sy)
        counts = cells.setdefault((cx, cy), [0, 0])
        counts[0 if arrow.long else 1] += 1
    stats = {key: CellStats(long=v[0], short=v[1]) for key, v in cells.items()}
    flagged = tuple(
        sorted(key for key, s in stats.items() if s.dominance >= threshold)
    )
    return DominanceGrid(
        origin=(ox, oy),
        cell_size=(sx, sy),
        cells=stats,
        flagged=flagged,
        threshold=threshold,
    )
