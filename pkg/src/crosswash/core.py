"""Weighted-sum scoring of taxonomy-aligned activities.

Pipeline: raw decision matrix -> per-criterion min-max normalization ->
weighted sum per activity -> min-max rescale of the sums onto [0, 100] ->
average and deterioration (100 - average).
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CriteriaMismatch,
    DuplicateCode,
    MissingValue,
    OutOfRangeLevel,
    ValidationError,
)

log = logging.getLogger(__name__)

LEVEL_MIN, LEVEL_MAX = 0, 5

LINK = "Link"
CONTRIBUTION = "Contribution"
CAPEX = "CapEx"
TURNOVER = "Turnover"
STANDARD_CRITERIA = (LINK, CONTRIBUTION, CAPEX, TURNOVER)
_ACTIVITY_FIELD = {LINK: "link", CONTRIBUTION: "contribution", CAPEX: "capex", TURNOVER: "turnover"}

# tolerance for treating two percents as tied when ordering
_TIE_TOL = 1e-9


class Direction(str, Enum):
    BENEFIT = "benefit"
    COST = "cost"


def canonical_criterion(name: str) -> str:
    """Map ``"capex"``, ``"LINK"`` etc. to the standard spelling; other names pass through."""
    stripped = name.strip()
    for std in STANDARD_CRITERIA:
        if stripped.lower() == std.lower():
            return std
    if not stripped:
        raise ValidationError("criterion name must be non-empty")
    return stripped


def code_sort_key(code: str) -> tuple:
    """Natural ordering for taxonomy codes, so that 4.1 < 4.10 < 4.13 < 4.25."""
    parts = re.split(r"[.\s]+", code.strip())
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts)


def round_half_away(x: float, ndigits: int = 2) -> float:
    return float(_quantize(x, ndigits))


def fmt(x: float | None, ndigits: int = 2) -> str:
    """Display rounding: half away from zero on the shortest repr of ``x``."""
    if x is None:
        return ""
    return str(_quantize(x, ndigits))


def _quantize(x: float, ndigits: int) -> Decimal:
    q = Decimal(1).scaleb(-ndigits)
    d = Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP)
    if d.is_zero():
        d = abs(d)
    return d


@dataclass(frozen=True)
class Activity:
    """One taxonomy-aligned activity. Monetary figures are millions USD."""

    code: str
    name: str = ""
    capex: float | None = None
    turnover: float | None = None
    link: int = 0
    contribution: int = 0

    def __post_init__(self):
        if not isinstance(self.code, str) or not self.code.strip():
            raise ValidationError("activity code must be a non-empty string")
        for attr in ("link", "contribution"):
            v = getattr(self, attr)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise OutOfRangeLevel(f"{self.code}: {attr} must be an integer, got {v!r}")
            if not LEVEL_MIN <= v <= LEVEL_MAX:
                raise OutOfRangeLevel(
                    f"{self.code}: {attr} level {v} outside {LEVEL_MIN}..{LEVEL_MAX}"
                )
        for attr in ("capex", "turnover"):
            v = getattr(self, attr)
            if v is not None and (not math.isfinite(v) or v < 0):
                raise ValidationError(f"{self.code}: {attr} must be finite and >= 0, got {v!r}")

    def value(self, criterion: str) -> float:
        attr = _ACTIVITY_FIELD.get(canonical_criterion(criterion))
        v = getattr(self, attr) if attr else None
        if v is None:
            raise MissingValue(self.code, criterion)
        return float(v)


@dataclass(frozen=True)
class Criterion:
    id: str
    direction: Direction = Direction.BENEFIT

    def __post_init__(self):
        object.__setattr__(self, "id", canonical_criterion(self.id))
        object.__setattr__(self, "direction", Direction(self.direction))


def as_criteria(items: Iterable[Criterion | str]) -> tuple[Criterion, ...]:
    out = tuple(c if isinstance(c, Criterion) else Criterion(c) for c in items)
    if not out:
        raise ValidationError("at least one criterion is required")
    ids = [c.id for c in out]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"duplicate criteria in {ids}")
    return out


@dataclass(frozen=True)
class WeightVector:
    """Ordered (criterion id, weight) pairs. Weights need not sum to 1."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        entries = tuple((canonical_criterion(k), float(w)) for k, w in self.entries)
        ids = [k for k, _ in entries]
        if not entries:
            raise ValidationError("weight vector is empty")
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate criteria in weights: {ids}")
        for k, w in entries:
            if not math.isfinite(w) or w < 0:
                raise ValidationError(f"weight for {k} must be finite and >= 0, got {w}")
        if not any(w > 0 for _, w in entries):
            raise ValidationError("at least one weight must be positive")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, mapping: Mapping[str, float] | None = None, **kw: float) -> "WeightVector":
        items = dict(mapping or {})
        items.update(kw)
        return cls(tuple(items.items()))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.entries)

    @property
    def total(self) -> float:
        return math.fsum(w for _, w in self.entries)

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)

    def __getitem__(self, criterion: str) -> float:
        return self.as_dict()[canonical_criterion(criterion)]

    def scaled(self, c: float) -> "WeightVector":
        return WeightVector(tuple((k, w * c) for k, w in self.entries))

    def renormalized(self) -> "WeightVector":
        return self.scaled(1.0 / self.total)

    def __str__(self):
        return ", ".join(f"{k}={w:g}" for k, w in self.entries)


# Weights used for the four-criterion run on the bundled data.
DEFAULT_WEIGHTS = WeightVector(((CAPEX, 0.3), (TURNOVER, 0.2), (LINK, 0.3), (CONTRIBUTION, 0.2)))


@dataclass(frozen=True, eq=False)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    criteria: tuple[Criterion, ...]
    raw: np.ndarray

    def __post_init__(self):
        alts = tuple(self.alternatives)
        crits = as_criteria(self.criteria)
        try:
            raw = np.array(self.raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"decision matrix is not numeric: {exc}") from None
        if raw.ndim != 2 or raw.shape != (len(alts), len(crits)):
            raise ValidationError(
                f"matrix shape {raw.shape} does not match "
                f"{len(alts)} alternatives x {len(crits)} criteria"
            )
        if not alts:
            raise ValidationError("decision matrix needs at least one alternative")
        if len(set(alts)) != len(alts):
            dup = next(a for a in alts if alts.count(a) > 1)
            raise DuplicateCode(dup, "decision matrix")
        if not np.all(np.isfinite(raw)):
            raise ValidationError("decision matrix contains NaN or infinite entries")
        raw.setflags(write=False)
        object.__setattr__(self, "alternatives", alts)
        object.__setattr__(self, "criteria", crits)
        object.__setattr__(self, "raw", raw)

    @property
    def criterion_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.criteria)

    def column(self, criterion: str) -> np.ndarray:
        return self.raw[:, self.criterion_ids.index(canonical_criterion(criterion))]


def build_matrix(
    activities: Sequence[Activity], criteria: Iterable[Criterion | str]
) -> DecisionMatrix:
    crits = as_criteria(criteria)
    raw = [[a.value(c.id) for c in crits] for a in activities]
    return DecisionMatrix(tuple(a.code for a in activities), crits, np.array(raw, dtype=float).reshape(len(activities), len(crits)))


def normalize_matrix(matrix: DecisionMatrix) -> DecisionMatrix:
    """Column-wise min-max normalization onto [0, 1].

    Cost criteria are flipped so that 1 is always the preferred end. A column
    whose values are all equal carries no information and normalizes to 0.
    """
    raw = matrix.raw
    out = np.zeros_like(raw)
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    for j, crit in enumerate(matrix.criteria):
        span = hi[j] - lo[j]
        if span <= 0:
            log.warning("criterion %s is constant across alternatives; normalized to 0", crit.id)
            continue
        if crit.direction is Direction.BENEFIT:
            out[:, j] = (raw[:, j] - lo[j]) / span
        else:
            out[:, j] = (hi[j] - raw[:, j]) / span
    return DecisionMatrix(matrix.alternatives, matrix.criteria, out)


def weighted_sum(matrix: DecisionMatrix, weights: WeightVector) -> list[tuple[str, float]]:
    """S_i = sum_j w_j * V_ij over an already-normalized matrix."""
    ids = matrix.criterion_ids
    if set(ids) != set(weights.ids) or len(ids) != len(weights.ids):
        raise CriteriaMismatch(
            f"weights cover {sorted(weights.ids)} but matrix criteria are {sorted(ids)}"
        )
    w = weights.as_dict()
    # left-to-right accumulation in criterion order keeps results reproducible
    sums = np.zeros(len(matrix.alternatives))
    for j, cid in enumerate(ids):
        sums = sums + w[cid] * matrix.raw[:, j]
    return [(code, float(s)) for code, s in zip(matrix.alternatives, sums)]


def rescale_scores(sums: Sequence[tuple[str, float]]) -> list[tuple[str, float]]:
    """Min-max rescale weighted sums onto [0, 100]; all-equal sums map to 100."""
    if not sums:
        raise ValidationError("cannot rescale an empty score list")
    values = [s for _, s in sums]
    lo, hi = min(values), max(values)
    span = hi - lo
    if span <= 0:
        return [(code, 100.0) for code, _ in sums]
    return [(code, (s - lo) / span * 100.0) for code, s in sums]


@dataclass(frozen=True)
class ScoreRow:
    code: str
    weighted_sum: float
    normalized_percent: float
    name: str = ""


@dataclass(frozen=True)
class ScoreTable:
    """Rows ordered by normalized percent, highest first; ties by code."""

    rows: tuple[ScoreRow, ...]
    average_percent: float
    deterioration_percent: float
    weights: WeightVector | None = None
    criteria: tuple[Criterion, ...] = field(default=())

    @property
    def ranking(self) -> tuple[str, ...]:
        return tuple(r.code for r in self.rows)

    def row(self, code: str) -> ScoreRow:
        for r in self.rows:
            if r.code == code:
                return r
        raise KeyError(code)

    def dense_ranks(self) -> dict[str, int]:
        """1-based dense ranks; percents within 1e-9 share a rank."""
        ranks: dict[str, int] = {}
        rank, prev = 0, None
        for r in self.rows:
            if prev is None or prev - r.normalized_percent > _TIE_TOL:
                rank += 1
                prev = r.normalized_percent
            ranks[r.code] = rank
        return ranks


def _ordered(rows: Iterable[ScoreRow]) -> tuple[ScoreRow, ...]:
    # group near-equal percents first so the code tie-break is not defeated by float noise
    rows = sorted(rows, key=lambda r: -r.normalized_percent)
    out: list[ScoreRow] = []
    group: list[ScoreRow] = []
    for r in rows:
        if group and group[0].normalized_percent - r.normalized_percent > _TIE_TOL:
            out.extend(sorted(group, key=lambda g: code_sort_key(g.code)))
            group = []
        group.append(r)
    out.extend(sorted(group, key=lambda g: code_sort_key(g.code)))
    return tuple(out)


def score_run(
    activities: Sequence[Activity],
    criteria: Iterable[Criterion | str],
    weights: WeightVector,
    renormalize: bool = False,
) -> ScoreTable:
    if not activities:
        raise ValidationError("no activities to score")
    seen: set[str] = set()
    for a in activities:
        if a.code in seen:
            raise DuplicateCode(a.code, "activity list")
        seen.add(a.code)
    crits = as_criteria(criteria)
    if renormalize:
        weights = weights.renormalized()
    matrix = build_matrix(activities, crits)
    sums = weighted_sum(normalize_matrix(matrix), weights)
    percents = dict(rescale_scores(sums))
    names = {a.code: a.name for a in activities}
    rows = _ordered(
        ScoreRow(code, s, percents[code], names[code]) for code, s in sums
    )
    average = math.fsum(r.normalized_percent for r in rows) / len(rows)
    return ScoreTable(rows, average, 100.0 - average, weights, crits)


def apply_deterioration(base_env_score: float, deterioration_percent: float) -> float:
    """Scale an environmental score down by the deterioration percentage."""
    for label, v in (("base score", base_env_score), ("deterioration", deterioration_percent)):
        if not (math.isfinite(v) and 0 <= v <= 100):
            raise ValidationError(f"{label} must lie in [0, 100], got {v!r}")
    return base_env_score * (1.0 - deterioration_percent / 100.0)
