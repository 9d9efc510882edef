"""CapEx/Turnover totals grouped by Link or Contribution level."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import Activity
from .dataset import CompanyContext
from .errors import ValidationError

METRICS = ("capex", "turnover")


class GroupBy(str, Enum):
    LINK = "link"
    CONTRIBUTION = "contribution"


class Scope(str, Enum):
    FULL = "full"
    MERGED = "merged"


@dataclass(frozen=True)
class AggregateRow:
    """One level. Metric cells are None when no activity at this level reports it.

    ``*_share_company`` is a fraction of the company-wide total;
    ``*_share_selected`` is a percent of the selected activities' total.
    """

    level: int
    capex_musd: float | None
    capex_share_company: float | None
    capex_share_selected: float | None
    turnover_musd: float | None
    turnover_share_company: float | None
    turnover_share_selected: float | None

    def get(self, metric: str, column: str = "musd"):
        return getattr(self, f"{metric}_{column}")


@dataclass(frozen=True)
class GroupedAggregate:
    group_by: GroupBy
    scope: Scope
    rows: tuple[AggregateRow, ...]
    capex_total: float
    turnover_total: float

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(r.level for r in self.rows)

    def row(self, level: int) -> AggregateRow:
        for r in self.rows:
            if r.level == level:
                return r
        raise KeyError(level)

    def total(self, metric: str) -> float:
        return self.capex_total if metric == "capex" else self.turnover_total


def group_by_level(
    activities: Sequence[Activity],
    which: GroupBy | str,
    context: CompanyContext,
    scope: Scope | str = Scope.FULL,
) -> GroupedAggregate:
    """Sum each metric per level over the activities that report it.

    Activities without a figure for a metric (e.g. capex-only rows in an
    outer join) are skipped for that metric only. Levels with no data in
    either metric are omitted.
    """
    if not activities:
        raise ValidationError("cannot aggregate an empty activity list")
    which = GroupBy(which)
    sums: dict[str, dict[int, list[float]]] = {m: {} for m in METRICS}
    for a in activities:
        level = getattr(a, which.value)
        for m in METRICS:
            v = getattr(a, m)
            if v is not None:
                sums[m].setdefault(level, []).append(v)
    totals = {m: math.fsum(math.fsum(vs) for vs in sums[m].values()) for m in METRICS}

    rows = []
    for level in sorted(set(sums["capex"]) | set(sums["turnover"])):
        cells = {}
        for m in METRICS:
            if level in sums[m]:
                s = math.fsum(sums[m][level])
                cells[f"{m}_musd"] = s
                cells[f"{m}_share_company"] = s / context.company_total(m)
                cells[f"{m}_share_selected"] = 100.0 * s / totals[m] if totals[m] > 0 else 0.0
            else:
                cells.update({f"{m}_musd": None, f"{m}_share_company": None, f"{m}_share_selected": None})
        rows.append(AggregateRow(level=level, **cells))
    return GroupedAggregate(which, Scope(scope), tuple(rows), totals["capex"], totals["turnover"])


def group_merged(
    activities: Sequence[Activity], which: GroupBy | str, context: CompanyContext
) -> GroupedAggregate:
    """As :func:`group_by_level` over an inner-joined list (both figures present)."""
    for a in activities:
        if a.capex is None or a.turnover is None:
            raise ValidationError(f"merged aggregation needs both CapEx and Turnover; {a.code} lacks one")
    return group_by_level(activities, which, context, Scope.MERGED)


def concentration_summary(agg: GroupedAggregate, levels: Iterable[int], metric: str = "capex") -> float:
    """Percent of the selected total held by the given levels; absent levels count 0."""
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}")
    wanted = set(levels)
    return math.fsum(
        r.get(metric, "share_selected") or 0.0 for r in agg.rows if r.level in wanted
    )
