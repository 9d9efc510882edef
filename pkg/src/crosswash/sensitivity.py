"""Weight perturbation sweeps and criterion-set comparisons."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Activity, Criterion, ScoreTable, WeightVector, as_criteria, score_run
from .errors import ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepPoint:
    weights: WeightVector
    table: ScoreTable

    @property
    def average_percent(self) -> float:
        return self.table.average_percent

    @property
    def deterioration_percent(self) -> float:
        return self.table.deterioration_percent

    @property
    def ranking(self) -> tuple[str, ...]:
        return self.table.ranking


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    baseline: WeightVector

    def __post_init__(self):
        if not self.points:
            raise ValidationError("sweep has no grid points")
        codes = set(self.points[0].ranking)
        if any(set(p.ranking) != codes for p in self.points):
            raise ValidationError("sweep rankings do not cover the same activities")

    @property
    def baseline_point(self) -> SweepPoint:
        for p in self.points:
            if p.weights == self.baseline:
                return p
        return self.points[0]


def weight_grid(baseline: WeightVector, step: float, radius: int) -> list[WeightVector]:
    """Baseline followed by one-at-a-time perturbations of +-k*step, k = 1..radius.

    Perturbed weights are clamped at 0. Points that clamp to an earlier point
    or to all-zero weights are dropped.
    """
    if not step > 0:
        raise ValidationError(f"step must be positive, got {step}")
    if radius < 0 or int(radius) != radius:
        raise ValidationError(f"radius must be a non-negative integer, got {radius}")
    grid = [baseline]
    seen = {baseline.entries}
    for j, (cid, w) in enumerate(baseline.entries):
        for k in range(-int(radius), int(radius) + 1):
            if k == 0:
                continue
            entries = list(baseline.entries)
            entries[j] = (cid, max(0.0, w + k * step))
            if not any(v > 0 for _, v in entries):
                continue
            wv = WeightVector(tuple(entries))
            if wv.entries in seen:
                continue
            seen.add(wv.entries)
            grid.append(wv)
    return grid


def sweep_weights(
    activities: Sequence[Activity],
    criteria: Iterable[Criterion | str],
    baseline: WeightVector,
    step: float,
    radius: int,
    renormalize: bool = False,
    workers: int | None = None,
) -> SweepResult:
    crits = as_criteria(criteria)
    grid = weight_grid(baseline, step, radius)
    log.debug("sweeping %d weight vectors", len(grid))

    def run(w: WeightVector) -> SweepPoint:
        return SweepPoint(w, score_run(activities, crits, w, renormalize=renormalize))

    if workers and workers > 1 and len(grid) > 1:
        # map() yields in submission order, so grid order is preserved
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(run, grid))
    else:
        points = tuple(run(w) for w in grid)
    return SweepResult(points, baseline)


def rank_stability(sweep: SweepResult) -> list[tuple[str, float]]:
    """Per activity, the fraction of grid points whose dense rank equals the baseline's."""
    base = sweep.baseline_point.table
    base_ranks = base.dense_ranks()
    all_ranks = [p.table.dense_ranks() for p in sweep.points]
    n = len(all_ranks)
    return [
        (code, sum(r[code] == base_ranks[code] for r in all_ranks) / n) for code in base.ranking
    ]


@dataclass(frozen=True)
class CriteriaSet:
    criteria: tuple[Criterion, ...]
    weights: WeightVector
    renormalize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "criteria", as_criteria(self.criteria))

    @classmethod
    def coerce(cls, value) -> "CriteriaSet":
        if isinstance(value, cls):
            return value
        criteria, weights = value
        return cls(tuple(criteria), weights)


@dataclass(frozen=True)
class CriteriaComparison:
    table_a: ScoreTable
    table_b: ScoreTable
    rank_shifts: dict[str, int]  # dense rank under b minus rank under a; positive = fell


def compare_criteria_sets(activities: Sequence[Activity], set_a, set_b) -> CriteriaComparison:
    """Score the same activities under two criteria/weight sets and diff the ranks.

    Each set is a :class:`CriteriaSet` or a ``(criteria, weights)`` pair.
    """
    a, b = CriteriaSet.coerce(set_a), CriteriaSet.coerce(set_b)
    ta = score_run(activities, a.criteria, a.weights, renormalize=a.renormalize)
    tb = score_run(activities, b.criteria, b.weights, renormalize=b.renormalize)
    ra, rb = ta.dense_ranks(), tb.dense_ranks()
    return CriteriaComparison(ta, tb, {code: rb[code] - ra[code] for code in ta.ranking})
