import math

import pytest
from hypothesis import given, settings, strategies as st

from netval.core import FinancialStatement, Money, Unit, ValidationError
from netval.forecast import (
    AVERAGE,
    GEOMETRIC,
    TREND,
    ForecastMethod,
    average_growth_rate,
    linear_trend,
    parse_method_config,
    project_statement,
)

MLN = Unit.MILLIONS_USD


def _history(items_by_year):
    rows = []
    for year, items in sorted(items_by_year.items()):
        kwargs = {"year": year}
        for name, value in items.items():
            kwargs[name] = value if name in ("dau", "mau") else Money(value, MLN)
        rows.append(FinancialStatement(**kwargs))
    return rows


class TestAverageGrowthRate:
    def test_constant_ten_percent(self):
        assert average_growth_rate([100, 110, 121]) == pytest.approx(0.10, abs=1e-12)

    def test_flat_series(self):
        assert average_growth_rate([100, 100, 100]) == 0.0

    def test_published_advertising_revenue_span(self):
        # 84,319 -> 98,983 -> 113,639 over two years compounds at about 16.1%
        rate = average_growth_rate([84319, 98983, 113639])
        assert rate == pytest.approx((113639 / 84319) ** 0.5 - 1, rel=1e-12)
        assert round(rate, 3) == 0.161

    def test_intermediate_values_cancel(self):
        assert average_growth_rate([100, 7, 121]) == pytest.approx(0.10, abs=1e-12)

    def test_short_series_rejected(self):
        with pytest.raises(ValidationError):
            average_growth_rate([100])

    def test_non_positive_values_rejected(self):
        with pytest.raises(ValidationError):
            average_growth_rate([100, -1, 121])
        with pytest.raises(ValidationError):
            average_growth_rate([0, 100])

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(
        st.lists(st.floats(min_value=0.1, max_value=1e6), min_size=2, max_size=12),
        st.floats(min_value=0.001, max_value=1000.0),
    )
    def test_invariant_under_uniform_scaling(self, series, factor):
        base = average_growth_rate(series)
        scaled = average_growth_rate([value * factor for value in series])
        assert scaled == pytest.approx(base, rel=1e-9, abs=1e-12)


class TestLinearTrend:
    def test_exact_line_continues(self):
        assert linear_trend([1, 2, 3], 2) == pytest.approx([4, 5], abs=1e-9)

    def test_flat_line(self):
        assert linear_trend([5, 5, 5], 1) == pytest.approx([5], abs=1e-12)

    def test_least_squares_continuation(self):
        # slope 1.5 and intercept 1/3 on indices 1..3, evaluated at 4
        assert linear_trend([2, 3, 5], 1) == pytest.approx([19 / 3], rel=1e-12)

    def test_zero_horizon(self):
        assert linear_trend([1, 2], 0) == []

    def test_short_series_rejected(self):
        with pytest.raises(ValidationError):
            linear_trend([1], 1)

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(
        st.floats(min_value=-100, max_value=100),
        st.floats(min_value=-50, max_value=50),
        st.integers(min_value=2, max_value=10),
        st.integers(min_value=1, max_value=5),
    )
    def test_exact_on_affine_inputs(self, intercept, slope, length, horizon):
        series = [intercept + slope * i for i in range(1, length + 1)]
        expected = [intercept + slope * i
                    for i in range(length + 1, length + horizon + 1)]
        got = linear_trend(series, horizon)
        for value, want in zip(got, expected):
            assert value == pytest.approx(want, rel=1e-9, abs=1e-6)


class TestMethodConfig:
    def test_parse_with_comments_and_blanks(self):
        methods = parse_method_config(
            "# growth assumptions\n"
            "revenue_advertising = historical-average-growth\n"
            "\n"
            "cost_price = geometric-growth:0.05\n"
            "dau = linear-trend\n"
        )
        assert methods["revenue_advertising"] == ForecastMethod(AVERAGE)
        assert methods["cost_price"] == ForecastMethod(GEOMETRIC, 0.05)
        assert methods["dau"] == ForecastMethod(TREND)

    def test_geometric_requires_rate(self):
        with pytest.raises(ValidationError):
            parse_method_config("cost_price = geometric-growth\n")

    def test_geometric_rate_floor(self):
        with pytest.raises(ValidationError):
            ForecastMethod.parse("geometric-growth:-1.5")

    def test_parameter_rejected_for_parameterless_methods(self):
        with pytest.raises(ValidationError):
            parse_method_config("dau = linear-trend:2\n")

    def test_unknown_line_item_rejected(self):
        with pytest.raises(ValidationError, match="ebitda"):
            parse_method_config("ebitda = linear-trend\n")

    def test_derived_items_not_assignable(self):
        for item in ("ebit", "income_tax", "net_income"):
            with pytest.raises(ValidationError, match=item):
                parse_method_config(f"{item} = linear-trend\n")

    def test_duplicate_assignment_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            parse_method_config("dau = linear-trend\ndau = linear-trend\n")

    def test_unknown_method_rejected(self):
        with pytest.raises(ValidationError):
            parse_method_config("dau = exponential-smoothing\n")


class TestProjectStatement:
    def test_flat_history_stays_flat_under_every_method(self):
        history = _history({y: {"revenue_advertising": 100} for y in (2016, 2017, 2018)})
        for spec in ("historical-average-growth", "geometric-growth:0.0", "linear-trend"):
            methods = {"revenue_advertising": ForecastMethod.parse(spec)}
            projected = project_statement(history, methods, 3, tax_rate=0.21)
            values = [float(p.revenue_advertising) for p in projected]
            assert values == pytest.approx([100, 100, 100], rel=1e-9)

    def test_geometric_growth_reproduces_powers_exactly(self):
        history = _history({2018: {"cost_price": 80}, 2019: {"cost_price": 100}})
        methods = {"cost_price": ForecastMethod(GEOMETRIC, 0.07)}
        projected = project_statement(history, methods, 4, tax_rate=0.2)
        for k, row in enumerate(projected, start=1):
            assert float(row.cost_price) == 100.0 * (1.0 + 0.07) ** k

    def test_years_continue_from_last_observation(self):
        history = _history({2018: {"mau": 10}, 2019: {"mau": 20}})
        projected = project_statement(
            history, {"mau": ForecastMethod(GEOMETRIC, 0.0)}, 2, tax_rate=0.2
        )
        assert [row.year for row in projected] == [2020, 2021]
        assert all(row.forecast for row in projected)

    def test_derived_items_recomputed_from_components(self):
        history = _history({
            2018: {"revenue_advertising": 100, "revenue_other": 10, "cost_price": 40},
            2019: {"revenue_advertising": 110, "revenue_other": 12, "cost_price": 44},
        })
        methods = {
            "revenue_advertising": ForecastMethod(GEOMETRIC, 0.10),
            "revenue_other": ForecastMethod(GEOMETRIC, 0.0),
            "cost_price": ForecastMethod(GEOMETRIC, 0.10),
        }
        projected = project_statement(history, methods, 1, tax_rate=0.21)
        row = projected[0]
        ebit = float(row.ebit)
        assert ebit == pytest.approx(121 + 12 - 48.4, rel=1e-12)
        assert float(row.income_tax) == pytest.approx(0.21 * ebit, rel=1e-12)
        assert float(row.net_income) == pytest.approx(0.79 * ebit, rel=1e-12)

    def test_statutory_rate_by_country(self):
        history = _history({
            2018: {"revenue_advertising": 100},
            2019: {"revenue_advertising": 100},
        })
        methods = {"revenue_advertising": ForecastMethod(GEOMETRIC, 0.0)}
        for country, rate in (("usa", 0.21), ("china", 0.25), ("russia", 0.20)):
            row = project_statement(history, methods, 1, country=country)[0]
            assert float(row.income_tax) == pytest.approx(rate * 100, rel=1e-12)

    def test_explicit_tax_rate_beats_country(self):
        history = _history({
            2018: {"revenue_advertising": 100},
            2019: {"revenue_advertising": 100},
        })
        methods = {"revenue_advertising": ForecastMethod(GEOMETRIC, 0.0)}
        row = project_statement(history, methods, 1, tax_rate=0.3, country="usa")[0]
        assert float(row.income_tax) == pytest.approx(30.0, rel=1e-12)

    def test_unknown_country_rejected(self):
        history = _history({
            2018: {"revenue_advertising": 100},
            2019: {"revenue_advertising": 100},
        })
        methods = {"revenue_advertising": ForecastMethod(GEOMETRIC, 0.0)}
        with pytest.raises(ValidationError, match="tax rate"):
            project_statement(history, methods, 1, country="atlantis")

    def test_zero_horizon_is_empty(self):
        history = _history({2018: {"dau": 1}, 2019: {"dau": 2}})
        assert project_statement(
            history, {"dau": ForecastMethod(TREND)}, 0, tax_rate=0.2
        ) == []

    def test_missing_history_for_assigned_item(self):
        history = _history({2018: {"dau": 1}, 2019: {"dau": 2}})
        methods = {"cost_price": ForecastMethod(TREND)}
        with pytest.raises(ValidationError, match="cost_price"):
            project_statement(history, methods, 1, tax_rate=0.2)

    def test_single_observation_is_not_enough(self):
        history = _history({2019: {"cost_price": 10}})
        methods = {"cost_price": ForecastMethod(GEOMETRIC, 0.1)}
        with pytest.raises(ValidationError, match="two"):
            project_statement(history, methods, 1, tax_rate=0.2)

    def test_user_counts_project_like_money(self):
        history = _history({2018: {"mau": 100.0}, 2019: {"mau": 121.0}})
        row = project_statement(
            history, {"mau": ForecastMethod(AVERAGE)}, 1, tax_rate=0.2
        )[0]
        # one observed interval at 21 percent growth
        assert row.mau == pytest.approx(121.0 * 1.21, rel=1e-9)
        assert row.income_tax is None  # no money components projected
