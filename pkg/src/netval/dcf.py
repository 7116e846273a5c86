"""Discounted cash flow valuation.

Free cash flow to the firm is discounted at the weighted average cost of
capital to give enterprise value; free cash flow to equity is discounted at
the CAPM cost of equity to give equity value. A terminal value capitalises
the first post-horizon flow as a growing perpetuity. Cash flow sums are
exact decimal arithmetic; discounting itself is float.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .core import (
    CashFlowForecast,
    CompanyProfile,
    DiscountInputs,
    Money,
    ValidationError,
)

__all__ = [
    "LiquidationInputs",
    "ValuationResult",
    "build_fcfe_forecast",
    "build_fcff_forecast",
    "capm",
    "deviation",
    "enterprise_value",
    "equity_value",
    "estimate_beta",
    "fcfe",
    "fcff",
    "fcff_from_components",
    "firm_value_from_equity",
    "liquidation_value",
    "terminal_value",
    "value_company",
    "wacc",
]


def capm(risk_free_rate: float, beta: float, market_premium: float) -> float:
    """Cost of equity: the risk-free rate plus beta times the market premium."""
    return risk_free_rate + beta * market_premium


def wacc(inputs: DiscountInputs) -> float:
    """Weighted average cost of capital, debt side after tax."""
    cost_of_equity = capm(inputs.risk_free_rate, inputs.beta, inputs.market_premium)
    return (
        inputs.debt_rate * inputs.debt_weight * (1.0 - inputs.tax_rate)
        + cost_of_equity * inputs.equity_weight
    )


def estimate_beta(asset_returns: Sequence[float], market_returns: Sequence[float]) -> float:
    """Covariance of asset and market returns over the market's variance.

    Population moments; the 1/n factors cancel in the ratio, so the sample
    convention would give the same number.
    """
    n = len(asset_returns)
    if n != len(market_returns):
        raise ValidationError(
            f"return series lengths differ: {n} vs {len(market_returns)}"
        )
    if n < 3:
        raise ValidationError("beta needs at least three return observations")
    mean_a = math.fsum(asset_returns) / n
    mean_m = math.fsum(market_returns) / n
    cov = math.fsum(
        (a - mean_a) * (m - mean_m) for a, m in zip(asset_returns, market_returns)
    )
    var = math.fsum((m - mean_m) ** 2 for m in market_returns)
    if var == 0.0:
        raise ValidationError("market returns have zero variance")
    return cov / var


def fcff(ebit: Money, tax_rate: float, da: Money, delta_nwc: Money, capex: Money) -> Money:
    """Free cash flow to the firm from EBIT and a tax rate.

    EBIT * (1 - tax_rate) + DA + change in net working capital + capital
    expenditure. The working capital and capex terms carry their own signs
    in the inputs (a build-up of working capital or an outlay enters
    negative), so everything is added.
    """
    if not 0.0 <= tax_rate < 1.0:
        raise ValidationError(f"tax rate must lie in [0, 1), got {tax_rate}")
    return ebit * (1.0 - tax_rate) + da + delta_nwc + capex


def fcff_from_components(
    ebit: Money, income_tax: Money, da: Money, delta_nwc: Money, capex: Money
) -> Money:
    """Free cash flow to the firm when the tax charge is given as an amount.

    EBIT - tax + DA + change in net working capital + capital expenditure,
    an exact sum of the stated amounts. This is the form used when taking
    statement rows at face value, and it tolerates tax amounts whose sign
    does not match an effective rate in [0, 1).
    """
    return ebit - income_tax + da + delta_nwc + capex


def fcfe(
    net_income: Money, da: Money, capex: Money, delta_nwc: Money, net_borrowing: Money
) -> Money:
    """Free cash flow to equity: net income plus the signed adjustments."""
    return net_income + da + capex + delta_nwc + net_borrowing


def terminal_value(post_forecast_flow: Money, rate: float, growth: float) -> Money:
    """Growing perpetuity value of the first post-horizon flow.

    The flow is already one year past the horizon, so no extra growth step
    is applied here.
    """
    if rate <= growth:
        raise ValidationError(
            f"discount rate {rate} must exceed terminal growth {growth}"
        )
    return post_forecast_flow / (rate - growth)


@dataclass(frozen=True)
class ValuationResult:
    """A present value and the discounted pieces it is the exact sum of."""

    discounted_flows: Tuple[Money, ...]
    discounted_terminal: Money
    enterprise_value: Money
    discount_rate: float
    deviation_vs_actual: Optional[float] = None

    def terminal_share(self) -> float:
        """Fraction of value contributed by the terminal piece."""
        return float(self.discounted_terminal.ratio(self.enterprise_value))


def _discount(forecast: CashFlowForecast, rate: float, growth: float) -> ValuationResult:
    if rate <= -1.0:
        raise ValidationError(f"discount rate must exceed -1, got {rate}")
    unit = forecast.unit
    n = forecast.horizon
    discounted = tuple(
        Money(float(flow) / (1.0 + rate) ** t, unit)
        for t, flow in enumerate(forecast.flows, start=1)
    )
    tv = terminal_value(forecast.post_forecast_flow, rate, growth)
    discounted_tv = Money(float(tv) / (1.0 + rate) ** n, unit)
    total = Money(0, unit)
    for part in discounted:
        total = total + part
    total = total + discounted_tv
    return ValuationResult(
        discounted_flows=discounted,
        discounted_terminal=discounted_tv,
        enterprise_value=total,
        discount_rate=rate,
    )


def enterprise_value(forecast: CashFlowForecast, rate: float, growth: float) -> ValuationResult:
    """Present value of a firm cash flow forecast at the given rate.

    Each flow is discounted at its own period, the post-horizon flow is
    capitalised as a growing perpetuity and discounted back over the full
    horizon, and the total is the exact sum of the reported pieces.
    """
    return _discount(forecast, rate, growth)


def equity_value(forecast: CashFlowForecast, cost_of_equity: float, growth: float) -> Money:
    """Present value of an equity cash flow forecast at the cost of equity."""
    return _discount(forecast, cost_of_equity, growth).enterprise_value


def firm_value_from_equity(equity: Money, net_debt: Money) -> Money:
    """Bridge an equity value to firm value by adding net debt."""
    return equity + net_debt


@dataclass(frozen=True)
class LiquidationInputs:
    """What an orderly wind-down would leave for the owners."""

    total_assets_revalued: Money
    obligations: Money
    urgency_discount: float
    liquidation_costs: Money

    def __post_init__(self):
        if not 0.0 <= self.urgency_discount < 1.0:
            raise ValidationError(
                f"urgency discount must lie in [0, 1), got {self.urgency_discount}"
            )
        if self.liquidation_costs.amount < 0:
            raise ValidationError("liquidation costs cannot be negative")


def liquidation_value(inputs: LiquidationInputs) -> Money:
    """Revalued assets net of obligations, haircut for urgency, less costs."""
    base = inputs.total_assets_revalued - inputs.obligations
    return base * (1.0 - inputs.urgency_discount) - inputs.liquidation_costs


def deviation(estimated: Money, actual: Money) -> float:
    """Relative error of an estimate against an observed value.

    Positive means the estimate is high. Both amounts must share a unit and
    the observed value must be non-zero.
    """
    return float(estimated.ratio(actual) - 1)


def build_fcff_forecast(profile: CompanyProfile) -> CashFlowForecast:
    """Assemble the firm cash flow forecast from a profile's forecast rows.

    Each row must carry ebit, income_tax, da, capex and delta_nwc. The last
    row becomes the post-horizon flow for the terminal value; the rows
    before it are the explicit forecast. Flows are exact component sums.
    """
    rows = profile.forecast_rows
    if len(rows) < 2:
        detail = f": {profile.note}" if profile.note else ""
        raise ValidationError(
            f"{profile.name}: need at least two forecast rows, one explicit "
            f"and one post-horizon, found {len(rows)}{detail}"
        )
    flows = []
    for row in rows:
        for field in ("ebit", "income_tax", "da", "capex", "delta_nwc"):
            if getattr(row, field) is None:
                raise ValidationError(
                    f"{profile.name} {row.year}: forecast row is missing {field}"
                )
        flows.append(
            fcff_from_components(row.ebit, row.income_tax, row.da, row.delta_nwc, row.capex)
        )
    return CashFlowForecast(flows=tuple(flows[:-1]), post_forecast_flow=flows[-1])


def value_company(profile: CompanyProfile) -> ValuationResult:
    """Full firm valuation of a bundled or loaded company profile.

    Builds the cash flow forecast from the profile's forecast rows,
    discounts at the profile's weighted average cost of capital with its
    terminal growth rate, and reports the deviation against the observed
    enterprise value when one is on file.
    """
    if not profile.forecast_rows:
        detail = f": {profile.note}" if profile.note else ""
        raise ValidationError(
            f"{profile.name}: no forecast rows on file, cannot run a cash "
            f"flow valuation{detail}"
        )
    if profile.discount is None:
        raise ValidationError(f"{profile.name}: no discount inputs on file")
    if profile.terminal_growth is None:
        raise ValidationError(f"{profile.name}: no terminal growth rate on file")
    forecast = build_fcff_forecast(profile)
    result = _discount(forecast, wacc(profile.discount), profile.terminal_growth)
    dev = None
    if profile.actual_ev is not None:
        dev = deviation(result.enterprise_value, profile.actual_ev)
    return ValuationResult(
        discounted_flows=result.discounted_flows,
        discounted_terminal=result.discounted_terminal,
        enterprise_value=result.enterprise_value,
        discount_rate=result.discount_rate,
        deviation_vs_actual=dev,
    )


def build_fcfe_forecast(profile: CompanyProfile) -> CashFlowForecast:
    """Assemble the equity cash flow forecast from a profile's forecast rows.

    Requires net_income, da, capex, delta_nwc and net_borrowing per row.
    """
    rows = profile.forecast_rows
    if len(rows) < 2:
        raise ValidationError(
            f"{profile.name}: need at least two forecast rows, found {len(rows)}"
        )
    flows = []
    for row in rows:
        for field in ("net_income", "da", "capex", "delta_nwc", "net_borrowing"):
            if getattr(row, field) is None:
                raise ValidationError(
                    f"{profile.name} {row.year}: forecast row is missing {field}"
                )
        flows.append(fcfe(row.net_income, row.da, row.capex, row.delta_nwc, row.net_borrowing))
    return CashFlowForecast(flows=tuple(flows[:-1]), post_forecast_flow=flows[-1])
