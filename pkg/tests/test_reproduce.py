"""Regression lock on the published-table reproduction.

These tests pin both sides of the reproduction report: the cells the
engine reproduces within tolerance, and the exact set of published cells
it cannot reproduce from the bundled data. The failures are findings,
not bugs; shrinking a set is an improvement, growing one is a
regression, and either deserves a deliberate review of the data.
"""

import pytest

from netval.core import ValidationError
from netval.reproduce import TABLE_NUMBERS, reproduce_all, reproduce_table


def failure_set(report):
    return {(cell.row, cell.column) for cell in report.failures}


class TestCoverage:
    def test_table_numbers(self):
        assert TABLE_NUMBERS == (2, 3, 4, 5, 6, 7, 18)

    def test_cell_counts(self):
        expected = {2: 8, 3: 28, 4: 4, 5: 30, 6: 36, 7: 36, 18: 30}
        for number, count in expected.items():
            assert len(reproduce_table(number).cells) == count, number

    def test_unknown_table_rejected(self):
        with pytest.raises(ValidationError):
            reproduce_table(99)

    def test_reproduce_all_covers_every_table(self):
        reports = reproduce_all()
        assert [r.table for r in reports] == list(TABLE_NUMBERS)

    def test_every_cell_reports_both_sides(self):
        for report in reproduce_all():
            for cell in report.cells:
                assert cell.computed == cell.computed  # not NaN
                assert cell.published == cell.published
                assert cell.tolerance  # human-readable criterion, never blank


class TestDiscountRates:
    def test_table_2_reproduces_exactly(self):
        report = reproduce_table(2)
        assert report.ok
        assert failure_set(report) == set()


class TestCashFlowTables:
    def test_table_3_fails_only_on_the_ruble_company(self):
        report = reproduce_table(3)
        assert failure_set(report) == {
            ("vkontakte", "discounted flow 1"),
            ("vkontakte", "discounted flow 2"),
            ("vkontakte", "discounted flow 3"),
            ("vkontakte", "discounted flow 4"),
            ("vkontakte", "discounted flow 5"),
            ("vkontakte", "discounted terminal"),
            ("vkontakte", "enterprise value"),
        }

    def test_table_3_usd_companies_reproduce(self):
        report = reproduce_table(3)
        good = {c.row for c in report.cells} - {r for r, _ in failure_set(report)}
        assert good == {"facebook", "twitter", "sina_weibo"}

    def test_table_4_deviation_set(self):
        report = reproduce_table(4)
        assert failure_set(report) == {("vkontakte", "deviation")}


class TestMultipleTables:
    def test_table_5_failure_set(self):
        assert failure_set(reproduce_table(5)) == {
            ("ebit", "twitter"),
            ("ebit", "vkontakte"),
            ("ebitda", "vkontakte"),
            ("revenue", "vkontakte"),
            ("mau", "vkontakte"),
        }

    def test_table_6_failure_set(self):
        assert failure_set(reproduce_table(6)) == {("mau", "vkontakte")}

    def test_table_7_failure_set(self):
        assert failure_set(reproduce_table(7)) == {("mau", "sina_weibo")}

    def test_table_18_failure_set(self):
        # the published grid disagrees with its own inputs on three rows
        # for every company except the one it was built around
        expected = {
            (row, company)
            for row in ("ebit", "ebitda", "mau")
            for company in ("facebook", "twitter", "pinterest", "snapchat", "sina_weibo")
        }
        assert failure_set(reproduce_table(18)) == expected

    def test_table_18_reproduced_rows(self):
        report = reproduce_table(18)
        good_rows = {c.row for c in report.cells if c.ok}
        assert "revenue" in good_rows
        assert "dau" in good_rows


class TestFailureBookkeeping:
    def test_ok_flag_matches_failures(self):
        for report in reproduce_all():
            assert report.ok == (len(report.failures) == 0)

    def test_failed_cells_really_differ(self):
        for report in reproduce_all():
            for cell in report.failures:
                assert cell.computed != pytest.approx(cell.published, rel=1e-12)

    def test_total_failure_count(self):
        total = sum(len(report.failures) for report in reproduce_all())
        assert total == 7 + 1 + 5 + 1 + 1 + 15
