"""Regenerate the published grouping and scoring tables and diff them against golden files."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .aggregation import GroupBy, GroupedAggregate, group_by_level, group_merged
from .core import CONTRIBUTION, DEFAULT_WEIGHTS, LINK, ScoreTable, WeightVector, score_run
from .dataset import Dataset, JoinMode
from .errors import ValidationError

MUSD_TOL = 1e-9  # integer millions must match exactly
SHARE_TOL = 0.0005
SCORE_TOL = 0.01

LINK_CONTRIBUTION_WEIGHTS = WeightVector(((LINK, 0.3), (CONTRIBUTION, 0.2)))

TABLE_TITLES = {
    "table2": "CapEx/Turnover by Link level, full scope",
    "table3": "CapEx/Turnover by Contribution level, full scope",
    "table4": "CapEx/Turnover by Link level, merged activities",
    "table5": "CapEx/Turnover by Contribution level, merged activities",
    "table7": "scores with Link, Contribution, CapEx, Turnover",
    "table8": "scores with Link, Contribution only",
}
AGGREGATE_COLUMNS = (
    "capex_musd",
    "capex_share_company",
    "capex_share_selected",
    "turnover_musd",
    "turnover_share_company",
    "turnover_share_selected",
)


@dataclass
class TableCheck:
    table: str
    title: str
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


@dataclass
class ReproductionReport:
    checks: list[TableCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_mismatch(self) -> TableCheck | None:
        return next((c for c in self.checks if not c.ok), None)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"{'PASS' if c.ok else 'FAIL'}  {c.table}  {c.title}")
            lines.extend(f"      {m}" for m in c.mismatches)
        first = self.first_mismatch
        if first is None:
            lines.append(f"all {len(self.checks)} checks matched")
        else:
            failed = [c.table for c in self.checks if not c.ok]
            lines.append(f"first mismatch: {first.table} ({first.title}); failing: {', '.join(failed)}")
        return "\n".join(lines) + "\n"


def golden_dir() -> Path:
    return Path(str(resources.files("crosswash") / "data" / "golden"))


def _read_golden(path: Path) -> list[dict[str, str]]:
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def compute_tables(ds: Dataset) -> tuple[dict[str, GroupedAggregate], dict[str, ScoreTable]]:
    full = ds.activities(JoinMode.OUTER)
    merged = ds.activities(JoinMode.INNER)
    aggs = {
        "table2": group_by_level(full, GroupBy.LINK, ds.context),
        "table3": group_by_level(full, GroupBy.CONTRIBUTION, ds.context),
        "table4": group_merged(merged, GroupBy.LINK, ds.context),
        "table5": group_merged(merged, GroupBy.CONTRIBUTION, ds.context),
    }
    scores = {
        "table7": score_run(merged, DEFAULT_WEIGHTS.ids, DEFAULT_WEIGHTS),
        "table8": score_run(merged, LINK_CONTRIBUTION_WEIGHTS.ids, LINK_CONTRIBUTION_WEIGHTS),
    }
    return aggs, scores


def _cmp(out: list[str], label: str, got, want: str, tol: float, digits: int):
    if want == "":
        if got is not None:
            out.append(f"{label}: expected empty, got {got:.{digits}f}")
        return
    if got is None:
        out.append(f"{label}: expected {want}, got empty")
    elif abs(got - float(want)) > tol:
        out.append(f"{label}: expected {want}, got {got:.{digits}f} (tol {tol:g})")


def check_aggregate(table: str, agg: GroupedAggregate, golden: list[dict[str, str]]) -> TableCheck:
    check = TableCheck(table, TABLE_TITLES[table])
    want_levels = [int(r["level"]) for r in golden]
    if list(agg.levels) != want_levels:
        check.mismatches.append(f"levels: expected {want_levels}, got {list(agg.levels)}")
    got = {r.level: r for r in agg.rows}
    for g in golden:
        level = int(g["level"])
        row = got.get(level)
        if row is None:
            continue
        for col in AGGREGATE_COLUMNS:
            musd = col.endswith("musd")
            _cmp(
                check.mismatches,
                f"level {level} {col}",
                getattr(row, col),
                g[col],
                MUSD_TOL if musd else SHARE_TOL,
                0 if musd else 6,
            )
    return check


def check_scores(table: str, st: ScoreTable, golden: list[dict[str, str]], summary: dict[str, str]) -> TableCheck:
    check = TableCheck(table, TABLE_TITLES[table])
    want_order = [g["code"] for g in golden]
    if list(st.ranking) != want_order:
        check.mismatches.append(f"row order: expected {want_order}, got {list(st.ranking)}")
    got = {r.code: r for r in st.rows}
    for g in golden:
        row = got.get(g["code"])
        if row is None:
            check.mismatches.append(f"activity {g['code']} missing")
            continue
        _cmp(check.mismatches, f"{g['code']} weighted_sum", row.weighted_sum, g["weighted_sum"], SCORE_TOL, 4)
        _cmp(check.mismatches, f"{g['code']} normalized_percent", row.normalized_percent, g["normalized_percent"], SCORE_TOL, 2)
    _cmp(check.mismatches, "average_percent", st.average_percent, summary["average_percent"], SCORE_TOL, 4)
    _cmp(check.mismatches, "deterioration_percent", st.deterioration_percent, summary["deterioration_percent"], SCORE_TOL, 4)
    return check


def check_context(ds: Dataset, golden: dict[str, str]) -> TableCheck:
    check = TableCheck("context", "company context and aligned totals")
    ctx = ds.context
    fields = {
        "eligible_capex_musd": ctx.eligible_capex,
        "eligible_capex_share": ctx.eligible_capex_share,
        "eligible_turnover_musd": ctx.eligible_turnover,
        "eligible_turnover_share": ctx.eligible_turnover_share,
        "aligned_capex_musd": ctx.aligned_capex,
        "aligned_turnover_musd": ctx.aligned_turnover,
    }
    for name, got in fields.items():
        _cmp(check.mismatches, name, got, golden[name], MUSD_TOL, 4)
    for table, aligned in ((ds.capex, ctx.aligned_capex), (ds.turnover, ctx.aligned_turnover)):
        if abs(table.total - aligned) > MUSD_TOL:
            check.mismatches.append(
                f"{table.kind.value} amounts sum to {table.total:g}, context says {aligned:g} aligned"
            )
    return check


def reproduce(ds: Dataset, golden: str | os.PathLike | None = None) -> ReproductionReport:
    gdir = Path(golden) if golden is not None else golden_dir()
    if not gdir.is_dir():
        raise ValidationError(f"golden directory not found: {gdir}")
    aggs, scores = compute_tables(ds)
    summary = {r["table"]: r for r in _read_golden(gdir / "summary.csv")}
    checks = [check_aggregate(t, agg, _read_golden(gdir / f"{t}.csv")) for t, agg in aggs.items()]
    checks += [
        check_scores(t, st, _read_golden(gdir / f"{t}.csv"), summary[t]) for t, st in scores.items()
    ]
    checks.append(check_context(ds, _read_golden(gdir / "context.csv")[0]))
    return ReproductionReport(checks)
