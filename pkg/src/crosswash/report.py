"""Markdown, CSV and JSON-lines rendering of score tables, aggregates and sweeps.

Markdown rounds for display (half away from zero); CSV and JSON-lines carry
full precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .aggregation import GroupedAggregate
from .core import ScoreTable, fmt
from .sensitivity import CriteriaComparison, SweepResult, rank_stability

FORMATS = ("markdown", "csv", "jsonl")


def _num(x):
    # full-precision text for csv/jsonl; repr round-trips doubles exactly
    if x is None:
        return ""
    return repr(float(x))


def markdown_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _jsonl(records) -> str:
    return "".join(json.dumps(r, sort_keys=False) + "\n" for r in records)


def score_footer(table: ScoreTable) -> str:
    return f"average {fmt(table.average_percent)}, deterioration {fmt(table.deterioration_percent)}"


def render_scores(table: ScoreTable, fmt_name: str = "markdown", adjusted: float | None = None) -> str:
    if fmt_name == "markdown":
        rows = [(r.code, r.name, fmt(r.weighted_sum), fmt(r.normalized_percent)) for r in table.rows]
        text = markdown_table(("Code", "Activity", "Weighted Sum", "Normalised Weighted Sum (%)"), rows)
        text += f"\n{score_footer(table)}\n"
        if adjusted is not None:
            text += f"adjusted environmental score {fmt(adjusted)}\n"
        return text
    if fmt_name == "csv":
        rows = [(r.code, r.name, _num(r.weighted_sum), _num(r.normalized_percent)) for r in table.rows]
        text = _csv(("code", "name", "weighted_sum", "normalized_percent"), rows)
        text += f"# average_percent={_num(table.average_percent)}\n"
        text += f"# deterioration_percent={_num(table.deterioration_percent)}\n"
        if adjusted is not None:
            text += f"# adjusted_score={_num(adjusted)}\n"
        return text
    if fmt_name == "jsonl":
        recs = [
            {"code": r.code, "name": r.name, "weighted_sum": r.weighted_sum, "normalized_percent": r.normalized_percent}
            for r in table.rows
        ]
        summary = {
            "average_percent": table.average_percent,
            "deterioration_percent": table.deterioration_percent,
            "weights": table.weights.as_dict() if table.weights else None,
        }
        if adjusted is not None:
            summary["adjusted_score"] = adjusted
        recs.append({"summary": summary})
        return _jsonl(recs)
    raise ValueError(f"unknown format {fmt_name!r}")


_AGG_FIELDS = (
    "capex_musd",
    "capex_share_company",
    "capex_share_selected",
    "turnover_musd",
    "turnover_share_company",
    "turnover_share_selected",
)


def _agg_cells(row, paper_compat: bool) -> list:
    # default reports keep every share as a fraction; paper-compat keeps the
    # share-of-selected columns in percent as the published tables do
    cells = []
    for f in _AGG_FIELDS:
        v = getattr(row, f)
        if v is not None and f.endswith("share_selected") and not paper_compat:
            v = v / 100.0
        cells.append(v)
    return cells


def render_aggregate(agg: GroupedAggregate, fmt_name: str = "markdown", paper_compat: bool = False) -> str:
    level_name = agg.group_by.value.capitalize()
    if paper_compat:
        header = [level_name, "CapEx M$", "CapEx Perc", "CapEx Perc2", "Turnover M$", "Turnover Perc", "Turnover Perc2"]
    else:
        header = [
            agg.group_by.value,
            "capex_musd",
            "capex_share_company_frac",
            "capex_share_selected_frac",
            "turnover_musd",
            "turnover_share_company_frac",
            "turnover_share_selected_frac",
        ]
    body = [[r.level] + _agg_cells(r, paper_compat) for r in agg.rows]

    if fmt_name == "markdown":
        rows = []
        for cells in body:
            out = [str(cells[0])]
            for f, v in zip(_AGG_FIELDS, cells[1:]):
                out.append(fmt(v, 0 if f.endswith("musd") else 6))
            rows.append(out)
        text = markdown_table(header, rows)
        return text + f"\nscope {agg.scope.value}, capex total {fmt(agg.capex_total, 0)}, turnover total {fmt(agg.turnover_total, 0)}\n"
    if fmt_name == "csv":
        return _csv(header, [[c[0]] + [_num(v) for v in c[1:]] for c in body])
    if fmt_name == "jsonl":
        recs = [dict(zip(header, c)) for c in body]
        recs.append({"summary": {"group_by": agg.group_by.value, "scope": agg.scope.value,
                                 "capex_total": agg.capex_total, "turnover_total": agg.turnover_total}})
        return _jsonl(recs)
    raise ValueError(f"unknown format {fmt_name!r}")


def render_sweep(sweep: SweepResult, fmt_name: str = "markdown", names: dict[str, str] | None = None) -> str:
    names = names or {}
    stability = rank_stability(sweep)
    base_ranks = sweep.baseline_point.table.dense_ranks()
    if fmt_name == "markdown":
        pts = [
            (str(i), str(p.weights), fmt(p.average_percent), fmt(p.deterioration_percent), p.ranking[0])
            for i, p in enumerate(sweep.points)
        ]
        text = markdown_table(("Point", "Weights", "Average (%)", "Deterioration (%)", "Top"), pts)
        text += "\n"
        text += markdown_table(
            ("Code", "Activity", "Baseline rank", "Rank stability"),
            [(c, names.get(c, ""), str(base_ranks[c]), fmt(f, 4)) for c, f in stability],
        )
        return text
    if fmt_name == "csv":
        ids = sweep.baseline.ids
        rows = []
        for i, p in enumerate(sweep.points):
            w = p.weights.as_dict()
            rows.append([i] + [_num(w[k]) for k in ids] + [_num(p.average_percent), _num(p.deterioration_percent), " ".join(p.ranking)])
        text = _csv(["point"] + [f"w_{k}" for k in ids] + ["average_percent", "deterioration_percent", "ranking"], rows)
        text += "\n" + _csv(("code", "baseline_rank", "rank_stability"), [(c, base_ranks[c], _num(f)) for c, f in stability])
        return text
    if fmt_name == "jsonl":
        recs = [
            {"point": i, "weights": p.weights.as_dict(), "average_percent": p.average_percent,
             "deterioration_percent": p.deterioration_percent, "ranking": list(p.ranking)}
            for i, p in enumerate(sweep.points)
        ]
        recs += [{"code": c, "baseline_rank": base_ranks[c], "rank_stability": f} for c, f in stability]
        return _jsonl(recs)
    raise ValueError(f"unknown format {fmt_name!r}")


def render_comparison(cmp: CriteriaComparison, fmt_name: str = "markdown") -> str:
    ra, rb = cmp.table_a.dense_ranks(), cmp.table_b.dense_ranks()
    codes = cmp.table_a.ranking
    if fmt_name == "markdown":
        rows = [
            (c, cmp.table_a.row(c).name, fmt(cmp.table_a.row(c).normalized_percent),
             fmt(cmp.table_b.row(c).normalized_percent), str(ra[c]), str(rb[c]), f"{cmp.rank_shifts[c]:+d}")
            for c in codes
        ]
        text = markdown_table(("Code", "Activity", "A (%)", "B (%)", "Rank A", "Rank B", "Shift"), rows)
        return text + f"\nA: {score_footer(cmp.table_a)}\nB: {score_footer(cmp.table_b)}\n"
    if fmt_name == "csv":
        rows = [
            (c, _num(cmp.table_a.row(c).normalized_percent), _num(cmp.table_b.row(c).normalized_percent), ra[c], rb[c], cmp.rank_shifts[c])
            for c in codes
        ]
        text = _csv(("code", "percent_a", "percent_b", "rank_a", "rank_b", "rank_shift"), rows)
        return text + (f"# deterioration_a={_num(cmp.table_a.deterioration_percent)}\n"
                       f"# deterioration_b={_num(cmp.table_b.deterioration_percent)}\n")
    if fmt_name == "jsonl":
        recs = [
            {"code": c, "percent_a": cmp.table_a.row(c).normalized_percent,
             "percent_b": cmp.table_b.row(c).normalized_percent, "rank_a": ra[c], "rank_b": rb[c],
             "rank_shift": cmp.rank_shifts[c]}
            for c in codes
        ]
        recs.append({"summary": {"deterioration_a": cmp.table_a.deterioration_percent,
                                 "deterioration_b": cmp.table_b.deterioration_percent}})
        return _jsonl(recs)
    raise ValueError(f"unknown format {fmt_name!r}")
