from decimal import Decimal

import pytest

from netval.core import (
    CashFlowForecast,
    DiscountInputs,
    FinancialStatement,
    Money,
    Unit,
    UnitMismatchError,
    ValidationError,
    convert_unit,
    validate_statement,
)

TH = Unit.THOUSANDS_USD
MLN = Unit.MILLIONS_USD


class TestMoney:
    def test_float_amounts_coerce_through_repr(self):
        assert Money(0.1, MLN).amount == Decimal("0.1")

    def test_string_and_decimal_amounts(self):
        assert Money("12.50", TH).amount == Decimal("12.50")
        assert Money(Decimal("-3"), TH).amount == Decimal("-3")

    def test_addition_is_exact(self):
        total = Money("0.1", MLN) + Money("0.2", MLN)
        assert total.amount == Decimal("0.3")

    def test_subtraction_and_negation(self):
        assert (Money(5, TH) - Money(7, TH)).amount == Decimal(-2)
        assert (-Money(5, TH)).amount == Decimal(-5)

    def test_cross_unit_addition_rejected(self):
        with pytest.raises(UnitMismatchError):
            Money(1, TH) + Money(1, MLN)

    def test_cross_unit_comparison_rejected(self):
        with pytest.raises(UnitMismatchError):
            Money(1, TH) < Money(2, MLN)

    def test_money_times_money_rejected(self):
        with pytest.raises(TypeError):
            Money(2, TH) * Money(3, TH)

    def test_scalar_multiplication(self):
        assert (Money(2, TH) * 3).amount == Decimal(6)
        assert (Money(9, TH) / 2).amount == Decimal("4.5")

    def test_division_by_money_rejected(self):
        with pytest.raises(TypeError):
            Money(4, TH) / Money(2, TH)

    def test_ratio_is_dimensionless_decimal(self):
        quotient = Money(3, MLN).ratio(Money(2, MLN))
        assert isinstance(quotient, Decimal)
        assert quotient == Decimal("1.5")

    def test_ratio_rejects_zero_and_unit_mismatch(self):
        with pytest.raises(ValidationError):
            Money(1, TH).ratio(Money(0, TH))
        with pytest.raises(UnitMismatchError):
            Money(1, TH).ratio(Money(1, MLN))

    def test_unit_conversion_is_exact_both_ways(self):
        original = Money("1234.567", TH)
        assert original.to_unit(MLN).amount == Decimal("1.234567")
        assert original.to_unit(MLN).to_unit(TH) == original
        assert convert_unit(Money(2, MLN), TH).amount == Decimal(2000)

    def test_float_conversion(self):
        assert float(Money("2.5", TH)) == 2.5

    def test_constructors(self):
        assert Money.thousands(1).unit is TH
        assert Money.millions(1).unit is MLN


class TestUnit:
    def test_parse_round_trip(self):
        for unit in Unit:
            assert Unit.parse(unit.value) is unit

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValidationError):
            Unit.parse("billions-USD")


class TestDiscountInputs:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            DiscountInputs(0.02, 0.05, 1.0, 0.04, 0.7, 0.2, 0.2)

    def test_weights_must_be_fractions(self):
        with pytest.raises(ValidationError):
            DiscountInputs(0.02, 0.05, 1.0, 0.04, 1.2, -0.2, 0.2)

    def test_tax_rate_domain(self):
        with pytest.raises(ValidationError):
            DiscountInputs(0.02, 0.05, 1.0, 0.04, 0.8, 0.2, 1.0)


class TestStatementValidation:
    def test_mau_below_dau_rejected(self):
        stmt = FinancialStatement(year=2019, dau=300.0, mau=200.0)
        with pytest.raises(ValidationError, match="2019"):
            validate_statement(stmt)

    def test_mixed_units_rejected(self):
        stmt = FinancialStatement(
            year=2019, ebit=Money(1, TH), da=Money(1, MLN)
        )
        with pytest.raises(UnitMismatchError):
            validate_statement(stmt)

    def test_net_income_tie_out(self):
        good = FinancialStatement(
            year=2020,
            ebit=Money(100, MLN),
            income_tax=Money(21, MLN),
            net_income=Money(79, MLN),
        )
        validate_statement(good)
        bad = FinancialStatement(
            year=2020,
            ebit=Money(100, MLN),
            income_tax=Money(21, MLN),
            net_income=Money(90, MLN),
        )
        with pytest.raises(ValidationError, match="net income"):
            validate_statement(bad)

    def test_money_items_skips_missing(self):
        stmt = FinancialStatement(year=2019, ebit=Money(1, TH))
        assert dict(stmt.money_items()) == {"ebit": Money(1, TH)}


class TestCashFlowForecast:
    def test_horizon_and_unit(self):
        forecast = CashFlowForecast(
            flows=(Money(1, TH), Money(2, TH)), post_forecast_flow=Money(3, TH)
        )
        assert forecast.horizon == 2
        assert forecast.unit is TH

    def test_empty_flows_rejected(self):
        with pytest.raises(ValidationError):
            CashFlowForecast(flows=(), post_forecast_flow=Money(1, TH))

    def test_mixed_units_rejected(self):
        with pytest.raises(UnitMismatchError):
            CashFlowForecast(
                flows=(Money(1, TH),), post_forecast_flow=Money(1, MLN)
            )
