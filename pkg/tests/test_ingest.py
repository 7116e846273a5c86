from decimal import Decimal

import pytest

from netval.core import Money, Unit, ValidationError
from netval.ingest import (
    ParseError,
    load_company,
    load_corpus,
    load_snapshot,
    parse_company,
    serialize_company,
)

MINIMAL = """\
#name: demo
#country: usa
#unit: millions-USD
year,revenue_advertising,revenue_other,cost_price,rnd,marketing,admin,other_income,ebit,income_tax,net_income,da,capex,delta_nwc,net_borrowing,dau,mau,forecast
2018,100,,,,,,,,,,,,,,10,20,false
2019,110,,,,,,,,,,,,,,12,24,false
"""


class TestBundledCorpus:
    def test_six_companies_sorted_by_name(self, corpus):
        assert [p.name for p in corpus] == [
            "facebook", "pinterest", "sina_weibo", "snapchat", "twitter", "vkontakte",
        ]

    def test_facebook_actual_enterprise_value(self, profile_of):
        assert profile_of("facebook").actual_ev == Money(584350, Unit.MILLIONS_USD)

    def test_sina_weibo_monthly_users(self, snapshot_of):
        assert snapshot_of("sina_weibo").mau == 516.0

    def test_every_profile_validates(self, corpus):
        for profile in corpus:
            profile.validate()

    def test_forecast_rows_only_where_published(self, profile_of):
        for name in ("facebook", "twitter", "sina_weibo", "vkontakte"):
            assert len(profile_of(name).forecast_rows) == 6
        for name in ("pinterest", "snapchat"):
            assert profile_of(name).forecast_rows == []
            assert "insufficient history / negative net income" in profile_of(name).note

    def test_snapshot_is_in_millions(self, snapshots):
        assert len(snapshots) == 6
        assert all(s.actual_ev.unit is Unit.MILLIONS_USD for s in snapshots)


class TestRoundTrip:
    def test_bundled_profiles_survive_serialization(self, corpus):
        for profile in corpus:
            again = parse_company(serialize_company(profile), source=profile.name)
            assert again == profile

    def test_minimal_profile_round_trip(self):
        profile = parse_company(MINIMAL)
        assert parse_company(serialize_company(profile)) == profile
        assert profile.statements[0].revenue_advertising == Money(100, Unit.MILLIONS_USD)
        assert profile.statements[0].mau == 20.0


class TestParseErrors:
    def test_missing_name(self):
        with pytest.raises(ParseError, match="name"):
            parse_company(MINIMAL.replace("#name: demo\n", ""))

    def test_unknown_metadata_key(self):
        with pytest.raises(ParseError, match="unknown metadata"):
            parse_company("#flavour: tart\n" + MINIMAL)

    def test_duplicate_metadata_key(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_company("#name: other\n" + MINIMAL)

    def test_header_must_match_schema(self):
        with pytest.raises(ParseError, match="header"):
            parse_company(MINIMAL.replace(",forecast", ",projected"))

    def test_wrong_cell_count_names_the_line(self):
        with pytest.raises(ParseError, match="line 6"):
            parse_company(MINIMAL.replace("2019,110", "2019,110,55"))

    def test_bad_number_names_the_column(self):
        with pytest.raises(ParseError, match="revenue_advertising"):
            parse_company(MINIMAL.replace("2019,110", "2019,12x"))

    def test_mau_below_dau_rejected(self):
        text = MINIMAL.replace(",10,20,false", ",30,20,false")
        with pytest.raises(ValidationError, match="active users"):
            parse_company(text)

    def test_duplicate_years_rejected(self):
        text = MINIMAL.replace("2018,", "2019,")
        with pytest.raises(ValidationError, match="duplicate"):
            parse_company(text)

    def test_incomplete_discount_block_rejected(self):
        text = "#risk_free_rate: 0.02\n" + MINIMAL
        with pytest.raises(ParseError, match="incomplete discount"):
            parse_company(text)

    def test_metadata_after_header_rejected(self):
        text = MINIMAL + "#note: too late\n"
        with pytest.raises(ParseError, match="metadata after"):
            parse_company(text)


class TestDirectoryLoading:
    def test_empty_directory_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="no company files"):
            load_corpus(tmp_path)

    def test_duplicate_company_names_rejected(self, tmp_path):
        (tmp_path / "a.csv").write_text(MINIMAL)
        (tmp_path / "b.csv").write_text(MINIMAL)
        with pytest.raises(ValidationError, match="duplicate company name"):
            load_corpus(tmp_path)

    def test_load_company_reads_files(self, tmp_path):
        path = tmp_path / "demo.csv"
        path.write_text(MINIMAL)
        assert load_company(path).name == "demo"


class TestSnapshotParsing:
    def test_header_checked(self, tmp_path):
        path = tmp_path / "snap.csv"
        path.write_text("company,revenue\nx,1\n")
        with pytest.raises(ParseError, match="header"):
            load_snapshot(path)

    def test_cell_count_checked(self, tmp_path):
        path = tmp_path / "snap.csv"
        path.write_text(
            "company,revenue,ebit,ebitda,ni,dau,mau,actual_ev,rank\n"
            "x,1,2,3,4,5,6\n"
        )
        with pytest.raises(ParseError, match="expected 9 cells"):
            load_snapshot(path)

    def test_rank_may_be_empty(self, tmp_path):
        path = tmp_path / "snap.csv"
        path.write_text(
            "company,revenue,ebit,ebitda,ni,dau,mau,actual_ev,rank\n"
            "x,1,2,3,4,5,6,7,\n"
        )
        rows = load_snapshot(path)
        assert rows[0].rank is None
        assert rows[0].actual_ev.amount == Decimal(7)
