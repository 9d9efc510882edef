import pytest

from crosswash.aggregation import GroupBy, Scope, concentration_summary, group_by_level, group_merged
from crosswash.core import Activity
from crosswash.errors import ValidationError


@pytest.fixture(scope="module")
def full(dataset):
    return dataset.activities("outer")


def test_link_capex_only(dataset):
    agg = group_by_level(dataset.activities("capex_only"), "link", dataset.context)
    row = agg.row(3)
    assert row.capex_musd == 1446
    assert row.capex_share_selected == pytest.approx(54.524887, abs=1e-6)
    assert row.capex_share_company == pytest.approx(0.079202, abs=5e-4)
    assert all(r.turnover_musd is None for r in agg.rows)


def test_contribution_turnover_only(dataset):
    agg = group_by_level(dataset.activities("turnover_only"), GroupBy.CONTRIBUTION, dataset.context)
    assert agg.row(3).turnover_musd == 1841
    assert agg.levels == (0, 2, 3)


def test_full_scope_sparse_cells_are_null(full, dataset):
    agg = group_by_level(full, "contribution", dataset.context)
    assert agg.row(1).capex_musd == 114
    assert agg.row(1).turnover_musd is None
    link = group_by_level(full, "link", dataset.context)
    assert link.row(0).turnover_musd is None
    assert link.row(4).turnover_musd == 446


def test_singleton(dataset):
    agg = group_by_level([Activity("4.3", capex=938.0, turnover=47.0, link=4, contribution=3)], "link", dataset.context)
    assert len(agg.rows) == 1
    assert agg.rows[0].capex_share_selected == 100.0 and agg.rows[0].turnover_share_selected == 100.0


def test_empty(dataset):
    with pytest.raises(ValidationError):
        group_by_level([], "link", dataset.context)


def test_merged(merged, dataset):
    link = group_merged(merged, "link", dataset.context)
    assert link.scope is Scope.MERGED
    assert (link.row(4).capex_musd, link.row(4).turnover_musd) == (952, 446)
    # plastics 21 + professional services 9
    assert link.row(1).capex_musd == 21 + 9
    contrib = group_merged(merged, "contribution", dataset.context)
    assert contrib.row(2).turnover_musd == 1497


def test_merged_requires_both_figures(dataset):
    with pytest.raises(ValidationError):
        group_merged(dataset.activities("capex_only"), "link", dataset.context)


@pytest.mark.parametrize("which", list(GroupBy))
@pytest.mark.parametrize("join", ["outer", "inner"])
def test_partition(dataset, which, join):
    agg = group_by_level(dataset.activities(join), which, dataset.context)
    assert list(agg.levels) == sorted(set(agg.levels))
    for metric in ("capex", "turnover"):
        shares = [r.get(metric, "share_selected") for r in agg.rows if r.get(metric) is not None]
        assert sum(shares) == pytest.approx(100.0, abs=0.01)
        assert sum(r.get(metric) or 0 for r in agg.rows) == agg.total(metric)


@pytest.mark.parametrize("which", list(GroupBy))
def test_merged_never_exceeds_full(full, merged, dataset, which):
    f = group_by_level(full, which, dataset.context)
    m = group_merged(merged, which, dataset.context)
    for r in m.rows:
        for metric in ("capex", "turnover"):
            assert r.get(metric) <= f.row(r.level).get(metric)


def test_link3_merged_vs_full(full, merged, dataset):
    assert group_merged(merged, "link", dataset.context).row(3).capex_musd == 1406
    assert group_by_level(full, "link", dataset.context).row(3).capex_musd == 1446


def test_concentration(full, dataset):
    link = group_by_level(full, "link", dataset.context)
    assert concentration_summary(link, {3, 4}) == pytest.approx(54.524887 + 36.651584, abs=1e-5)
    assert round(concentration_summary(link, {3, 4}), 2) == 91.18
    contrib = group_by_level(full, "contribution", dataset.context)
    assert concentration_summary(contrib, {3}) == pytest.approx(83.898944, abs=1e-6)
    assert concentration_summary(contrib, set()) == 0
    assert concentration_summary(contrib, {1}, "turnover") == 0
    # contribution levels 2 and 3 hold ~98% of turnover
    assert concentration_summary(contrib, {2, 3}, "turnover") == pytest.approx(98.64, abs=0.01)


def test_concentration_unknown_metric(full, dataset):
    with pytest.raises(ValidationError):
        concentration_summary(group_by_level(full, "link", dataset.context), {1}, "ebitda")
