"""Command-line entry point.

Exit status: 0 success, 1 internal error or failed reproduction,
2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .aggregation import GroupBy, Scope, group_by_level, group_merged
from .core import DEFAULT_WEIGHTS, Criterion, Direction, WeightVector, apply_deterioration, as_criteria, canonical_criterion, score_run
from .dataset import DATA_DIR_ENV, JoinMode, load_dataset
from .errors import InputError, ValidationError
from .report import FORMATS, render_aggregate, render_comparison, render_scores, render_sweep
from .reproduce import reproduce
from .sensitivity import CriteriaSet, compare_criteria_sets, sweep_weights

log = logging.getLogger("crosswash")


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def read_weights_file(path: str) -> tuple[tuple[Criterion, ...], WeightVector]:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"weights file not found: {p}")
    with p.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames][:2] != ["criterion", "weight"]:
            raise ValidationError(f"{p}:1: header must be criterion,weight,direction")
        criteria, entries = [], []
        for rec in reader:
            line = reader.line_num
            try:
                w = float(rec["weight"])
            except (TypeError, ValueError):
                raise ValidationError(f"{p}:{line}: weight {rec['weight']!r} is not a number") from None
            direction = (rec.get("direction") or "benefit").strip().lower()
            try:
                criteria.append(Criterion(rec["criterion"], Direction(direction)))
            except ValueError:
                raise ValidationError(f"{p}:{line}: direction must be benefit or cost, got {direction!r}") from None
            entries.append((rec["criterion"], w))
    return as_criteria(criteria), WeightVector(tuple(entries))


def resolve_weights(criteria_text: str | None, weights_text: str | None, weights_file: str | None):
    """Build (criteria, weights) from the CLI flags; defaults to the four-criterion set."""
    if weights_file:
        criteria, weights = read_weights_file(weights_file)
        if criteria_text:
            wanted = [canonical_criterion(c) for c in _split(criteria_text)]
            by_id = {c.id: c for c in criteria}
            missing = [c for c in wanted if c not in by_id]
            if missing:
                raise ValidationError(f"weights file has no weight for {', '.join(missing)}")
            criteria = tuple(by_id[c] for c in wanted)
            weights = WeightVector(tuple((c, weights[c]) for c in wanted))
        return criteria, weights
    if criteria_text is None and weights_text is None:
        return as_criteria(DEFAULT_WEIGHTS.ids), DEFAULT_WEIGHTS
    if criteria_text is None or weights_text is None:
        raise ValidationError("--criteria and --weights must be given together")
    names = _split(criteria_text)
    try:
        values = [float(v) for v in _split(weights_text)]
    except ValueError:
        raise ValidationError(f"--weights must be comma-separated numbers, got {weights_text!r}") from None
    if len(names) != len(values):
        raise ValidationError(f"{len(names)} criteria but {len(values)} weights")
    criteria = as_criteria(names)
    return criteria, WeightVector(tuple(zip((c.id for c in criteria), values)))


def _write(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_score(args) -> int:
    ds = load_dataset(args.data_dir)
    criteria, weights = resolve_weights(args.criteria, args.weights, args.weights_file)
    table = score_run(ds.activities(args.join), criteria, weights, renormalize=args.renormalize_weights)
    adjusted = None
    if args.base_score is not None:
        adjusted = apply_deterioration(args.base_score, table.deterioration_percent)
    _write(args, render_scores(table, args.format, adjusted))
    return 0


def cmd_aggregate(args) -> int:
    ds = load_dataset(args.data_dir)
    if args.scope == Scope.MERGED.value:
        agg = group_merged(ds.activities(JoinMode.INNER), args.by, ds.context)
    else:
        agg = group_by_level(ds.activities(JoinMode.OUTER), args.by, ds.context)
    _write(args, render_aggregate(agg, args.format, args.paper_compat))
    return 0


def cmd_sweep(args) -> int:
    ds = load_dataset(args.data_dir)
    criteria, weights = resolve_weights(args.criteria, args.weights, args.weights_file)
    acts = ds.activities(args.join)
    sweep = sweep_weights(
        acts, criteria, weights, args.step, args.radius,
        renormalize=args.renormalize_weights, workers=args.workers,
    )
    _write(args, render_sweep(sweep, args.format, {a.code: a.name for a in acts}))
    return 0


def cmd_compare(args) -> int:
    ds = load_dataset(args.data_dir)
    ca, wa = resolve_weights(args.criteria_a, args.weights_a, None)
    if args.criteria_b is None and args.weights_b is None:
        cb, wb = as_criteria(("Link", "Contribution")), WeightVector((("Link", 0.3), ("Contribution", 0.2)))
    else:
        cb, wb = resolve_weights(args.criteria_b, args.weights_b, None)
    cmp = compare_criteria_sets(
        ds.activities(args.join),
        CriteriaSet(ca, wa, args.renormalize_weights),
        CriteriaSet(cb, wb, args.renormalize_weights),
    )
    _write(args, render_comparison(cmp, args.format))
    return 0


def cmd_reproduce(args) -> int:
    ds = load_dataset(args.data_dir)
    report = reproduce(ds, args.golden_dir)
    _write(args, report.render())
    if not report.ok:
        print(f"reproduction failed: first mismatching table is {report.first_mismatch.table}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", help=f"dataset directory (default: ${DATA_DIR_ENV} or the bundled fixture)")
    common.add_argument("--format", choices=FORMATS, default="markdown")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--paper-compat", action="store_true",
                        help="aggregate reports: published column names, share-of-selected in percent")
    common.add_argument("--renormalize-weights", action="store_true", help="divide weights by their sum")
    common.add_argument("--join", choices=[m.value for m in JoinMode if m is not JoinMode.OUTER],
                        default=JoinMode.INNER.value)
    common.add_argument("-v", "--verbose", action="store_true")

    weights = argparse.ArgumentParser(add_help=False)
    weights.add_argument("--criteria", help="comma-separated criteria, e.g. link,contribution,capex,turnover")
    weights.add_argument("--weights", help="comma-separated weights matching --criteria")
    weights.add_argument("--weights-file", help="CSV with columns criterion,weight,direction")

    p = argparse.ArgumentParser(prog="crosswash", description="Crosswashing scores from taxonomy disclosures.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("score", parents=[common, weights], help="score activities with a weighted sum")
    s.add_argument("--base-score", type=float, help="environmental score (0-100) to deteriorate")
    s.set_defaults(func=cmd_score)

    a = sub.add_parser("aggregate", parents=[common], help="CapEx/Turnover grouped by level")
    a.add_argument("--by", choices=[g.value for g in GroupBy], default=GroupBy.LINK.value)
    a.add_argument("--scope", choices=[s.value for s in Scope], default=Scope.FULL.value)
    a.set_defaults(func=cmd_aggregate)

    w = sub.add_parser("sweep", parents=[common, weights], help="weight perturbation sweep")
    w.add_argument("--step", type=float, default=0.05)
    w.add_argument("--radius", type=int, default=1)
    w.add_argument("--workers", type=int, default=None)
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", parents=[common], help="compare two criteria/weight sets")
    c.add_argument("--criteria-a")
    c.add_argument("--weights-a")
    c.add_argument("--criteria-b")
    c.add_argument("--weights-b")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("reproduce", parents=[common], help="regenerate published tables and diff against golden files")
    r.add_argument("--golden-dir", help="directory of golden CSVs (default: bundled)")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
