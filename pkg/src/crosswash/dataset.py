"""CSV formats for activity data, plus the bundled 2022 TotalEnergies fixture.

All files are UTF-8 with a header row, comma-delimited, decimal point and no
thousands separators. Source tables are joined to the attribute table on the
taxonomy code, never on the activity name.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterator, Sequence

from .core import LEVEL_MAX, LEVEL_MIN, Activity
from .errors import (
    DuplicateCode,
    MissingAttribute,
    OutOfRangeLevel,
    ParseError,
    ValidationError,
)

log = logging.getLogger(__name__)

DATA_DIR_ENV = "CROSSWASH_DATA_DIR"
FIXTURE_NAME = "totalenergies-2022"

SOURCE_COLUMNS = ("code", "name", "amount_musd", "share_of_company")
ATTRIBUTE_COLUMNS = ("code", "name", "link", "contribution", "link_rationale", "contribution_rationale")
CONTEXT_COLUMNS = (
    "company",
    "period",
    "eligible_capex_musd",
    "eligible_capex_share",
    "eligible_turnover_musd",
    "eligible_turnover_share",
    "aligned_capex_musd",
    "aligned_turnover_musd",
)
# optional explicit company totals; derived from eligible amount / share otherwise
CONTEXT_OPTIONAL = ("total_capex_musd", "total_turnover_musd")


class SourceKind(str, Enum):
    CAPEX = "capex"
    TURNOVER = "turnover"


class JoinMode(str, Enum):
    INNER = "inner"
    CAPEX_ONLY = "capex_only"
    TURNOVER_ONLY = "turnover_only"
    OUTER = "outer"


@dataclass(frozen=True)
class SourceRow:
    code: str
    name: str
    amount: float
    share_of_company: float


@dataclass(frozen=True)
class SourceTable:
    kind: SourceKind
    rows: tuple[SourceRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for r in self.rows:
            if r.code in seen:
                raise DuplicateCode(r.code, f"{self.kind.value} table")
            seen.add(r.code)
            if not math.isfinite(r.amount) or r.amount < 0:
                raise ValidationError(f"{r.code}: amount must be >= 0, got {r.amount}")
            if not 0 <= r.share_of_company <= 1:
                raise ValidationError(f"{r.code}: share_of_company must be in [0, 1], got {r.share_of_company}")

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(r.code for r in self.rows)

    @property
    def total(self) -> float:
        return math.fsum(r.amount for r in self.rows)

    def by_code(self) -> dict[str, SourceRow]:
        return {r.code: r for r in self.rows}


@dataclass(frozen=True)
class AttributeRow:
    code: str
    name: str
    link: int
    contribution: int
    link_rationale: str = ""
    contribution_rationale: str = ""


@dataclass(frozen=True)
class AttributeTable:
    rows: tuple[AttributeRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for r in self.rows:
            if r.code in seen:
                raise DuplicateCode(r.code, "attribute table")
            seen.add(r.code)
            for attr in ("link", "contribution"):
                v = getattr(r, attr)
                if not LEVEL_MIN <= v <= LEVEL_MAX:
                    raise OutOfRangeLevel(f"{r.code}: {attr} level {v} outside {LEVEL_MIN}..{LEVEL_MAX}")

    def by_code(self) -> dict[str, AttributeRow]:
        return {r.code: r for r in self.rows}


@dataclass(frozen=True)
class CompanyContext:
    company: str
    period: int
    eligible_capex: float
    eligible_capex_share: float
    eligible_turnover: float
    eligible_turnover_share: float
    aligned_capex: float
    aligned_turnover: float
    total_capex: float | None = None
    total_turnover: float | None = None

    def __post_init__(self):
        for attr in ("eligible_capex_share", "eligible_turnover_share"):
            v = getattr(self, attr)
            if not 0 < v <= 1:
                raise ValidationError(f"{attr} must be in (0, 1], got {v}")
        if self.aligned_capex > self.eligible_capex or self.aligned_turnover > self.eligible_turnover:
            raise ValidationError("aligned amounts cannot exceed eligible amounts")
        for metric in ("capex", "turnover"):
            explicit = getattr(self, f"total_{metric}")
            derived = getattr(self, f"eligible_{metric}") / getattr(self, f"eligible_{metric}_share")
            if explicit is not None and abs(explicit - derived) > 0.01 * explicit:
                raise ValidationError(
                    f"total {metric} {explicit} inconsistent with eligible amount/share ({derived:.1f})"
                )

    @property
    def company_capex(self) -> float:
        if self.total_capex is not None:
            return self.total_capex
        return self.eligible_capex / self.eligible_capex_share

    @property
    def company_turnover(self) -> float:
        if self.total_turnover is not None:
            return self.total_turnover
        return self.eligible_turnover / self.eligible_turnover_share

    def company_total(self, metric: str) -> float:
        return self.company_capex if metric == "capex" else self.company_turnover


@dataclass(frozen=True)
class Dataset:
    capex: SourceTable
    turnover: SourceTable
    attributes: AttributeTable
    context: CompanyContext

    def activities(self, join: JoinMode | str = JoinMode.INNER) -> list[Activity]:
        return assemble_activities(self.capex, self.turnover, self.attributes, join)


# -- parsing -----------------------------------------------------------------


def _records(path: Path, columns: Sequence[str], optional: Sequence[str] = ()) -> Iterator[tuple[int, dict]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(path, 1, None, str(exc.object[exc.start:exc.end]), "file is not valid UTF-8") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if not header or not any(h.strip() for h in header):
        raise ParseError(path, 1, None, "", "missing header row")
    header = [h.strip() for h in header]
    if header[0].startswith("﻿"):
        header[0] = header[0][1:]
    required = list(columns)
    if header[: len(required)] != required or any(h not in optional for h in header[len(required):]):
        raise ParseError(path, 1, None, ",".join(header), f"header must be {','.join(required)}")
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(path, line, None, ",".join(row), f"expected {len(header)} fields, got {len(row)}")
        yield line, dict(zip(header, (c.strip() for c in row)))


def _number(path, line, column, text) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(path, line, column, text, "not a number") from None
    if not math.isfinite(v):
        raise ParseError(path, line, column, text, "not a finite number")
    return v


def _optional_number(path, line, column, text) -> float | None:
    return None if text == "" else _number(path, line, column, text)


def _level(path, line, column, text) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ParseError(path, line, column, text, "not an integer level") from None
    if not LEVEL_MIN <= v <= LEVEL_MAX:
        raise OutOfRangeLevel(f"{path}:{line} column {column!r}: level {v} outside {LEVEL_MIN}..{LEVEL_MAX}")
    return v


def _require_code(path, line, text) -> str:
    if not text:
        raise ParseError(path, line, "code", text, "empty activity code")
    return text


def load_source_table(path: str | os.PathLike, kind: SourceKind | str) -> SourceTable:
    path = Path(path)
    rows = []
    for line, rec in _records(path, SOURCE_COLUMNS):
        amount = _number(path, line, "amount_musd", rec["amount_musd"])
        share = _number(path, line, "share_of_company", rec["share_of_company"])
        if amount < 0:
            raise ValidationError(f"{path}:{line}: amount_musd must be >= 0, got {amount:g}")
        if not 0 <= share <= 1:
            raise ValidationError(f"{path}:{line}: share_of_company must be a fraction in [0, 1], got {share:g}")
        rows.append(SourceRow(_require_code(path, line, rec["code"]), rec["name"], amount, share))
    if not rows:
        raise ParseError(path, 2, None, "", "no data rows")
    try:
        return SourceTable(SourceKind(kind), tuple(rows))
    except DuplicateCode as exc:
        raise DuplicateCode(exc.code, str(path)) from None


def load_attributes(path: str | os.PathLike) -> AttributeTable:
    path = Path(path)
    rows = []
    for line, rec in _records(path, ATTRIBUTE_COLUMNS):
        rows.append(
            AttributeRow(
                _require_code(path, line, rec["code"]),
                rec["name"],
                _level(path, line, "link", rec["link"]),
                _level(path, line, "contribution", rec["contribution"]),
                rec["link_rationale"],
                rec["contribution_rationale"],
            )
        )
    if not rows:
        raise ParseError(path, 2, None, "", "no data rows")
    try:
        return AttributeTable(tuple(rows))
    except DuplicateCode as exc:
        raise DuplicateCode(exc.code, str(path)) from None


def load_context(path: str | os.PathLike) -> CompanyContext:
    path = Path(path)
    records = list(_records(path, CONTEXT_COLUMNS, CONTEXT_OPTIONAL))
    if len(records) != 1:
        raise ParseError(path, 2, None, "", f"expected exactly one context row, got {len(records)}")
    line, rec = records[0]
    num = {c: _number(path, line, c, rec[c]) for c in CONTEXT_COLUMNS[2:]}
    period = _number(path, line, "period", rec["period"])
    ctx = CompanyContext(
        company=rec["company"],
        period=int(period),
        eligible_capex=num["eligible_capex_musd"],
        eligible_capex_share=num["eligible_capex_share"],
        eligible_turnover=num["eligible_turnover_musd"],
        eligible_turnover_share=num["eligible_turnover_share"],
        aligned_capex=num["aligned_capex_musd"],
        aligned_turnover=num["aligned_turnover_musd"],
        total_capex=_optional_number(path, line, "total_capex_musd", rec.get("total_capex_musd", "")),
        total_turnover=_optional_number(path, line, "total_turnover_musd", rec.get("total_turnover_musd", "")),
    )
    if ctx.total_capex is None or ctx.total_turnover is None:
        log.info(
            "derived company totals from eligible amount/share: capex %.1f, turnover %.1f",
            ctx.company_capex,
            ctx.company_turnover,
        )
    return ctx


def _num_text(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_source_table(table: SourceTable, out: IO[str] | str | os.PathLike) -> None:
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="", encoding="utf-8") as f:
            write_source_table(table, f)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SOURCE_COLUMNS)
    for r in table.rows:
        w.writerow([r.code, r.name, _num_text(r.amount), repr(r.share_of_company)])


# -- assembly ----------------------------------------------------------------


def assemble_activities(
    capex: SourceTable,
    turnover: SourceTable,
    attrs: AttributeTable,
    join: JoinMode | str = JoinMode.INNER,
) -> list[Activity]:
    """Join CapEx and Turnover tables on code and attach Link/Contribution.

    ``inner`` keeps activities present in both tables (capex order);
    ``capex_only``/``turnover_only`` keep one table with one monetary field set;
    ``outer`` keeps the union, capex rows first.
    """
    join = JoinMode(join)
    cx, tx, at = capex.by_code(), turnover.by_code(), attrs.by_code()
    if join is JoinMode.INNER:
        codes = [c for c in capex.codes if c in tx]
    elif join is JoinMode.CAPEX_ONLY:
        codes = list(capex.codes)
    elif join is JoinMode.TURNOVER_ONLY:
        codes = list(turnover.codes)
    else:
        codes = list(capex.codes) + [c for c in turnover.codes if c not in cx]

    out = []
    for code in codes:
        if code not in at:
            raise MissingAttribute(code)
        a = at[code]
        c = cx.get(code) if join is not JoinMode.TURNOVER_ONLY else None
        t = tx.get(code) if join is not JoinMode.CAPEX_ONLY else None
        name = (c or t).name or a.name
        out.append(
            Activity(
                code=code,
                name=name,
                capex=c.amount if c else None,
                turnover=t.amount if t else None,
                link=a.link,
                contribution=a.contribution,
            )
        )
    return out


def fixture_dir() -> Path:
    return Path(str(resources.files("crosswash") / "data" / FIXTURE_NAME))


def default_data_dir() -> Path:
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else fixture_dir()


def load_dataset(data_dir: str | os.PathLike | None = None) -> Dataset:
    """Load capex.csv, turnover.csv, attributes.csv and context.csv from a directory."""
    d = Path(data_dir) if data_dir is not None else default_data_dir()
    if not d.is_dir():
        raise ValidationError(f"data directory not found: {d}")
    missing = [n for n in ("capex.csv", "turnover.csv", "attributes.csv", "context.csv") if not (d / n).is_file()]
    if missing:
        raise ValidationError(f"{d}: missing {', '.join(missing)}")
    ds = Dataset(
        capex=load_source_table(d / "capex.csv", SourceKind.CAPEX),
        turnover=load_source_table(d / "turnover.csv", SourceKind.TURNOVER),
        attributes=load_attributes(d / "attributes.csv"),
        context=load_context(d / "context.csv"),
    )
    for table, aligned in ((ds.capex, ds.context.aligned_capex), (ds.turnover, ds.context.aligned_turnover)):
        if abs(table.total - aligned) > 0.5:
            log.warning(
                "%s amounts sum to %g but context reports %g aligned", table.kind.value, table.total, aligned
            )
    return ds
