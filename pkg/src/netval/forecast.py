"""Line-item extrapolation over a forecast horizon.

Three methods are supported per line item: continuation at a fixed geometric
growth rate, continuation at the series' own historical average growth rate,
and least-squares linear trend. Aggregates (EBIT, income tax, net income)
are never extrapolated directly; they are recomputed each projected year
from the projected components so statements stay internally consistent.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .core import FinancialStatement, Money, ValidationError

# default corporate income tax by country of incorporation
STATUTORY_TAX = {
    "usa": 0.21,
    "china": 0.25,
    "russia": 0.20,
}

GEOMETRIC = "geometric-growth"
AVERAGE = "historical-average-growth"
TREND = "linear-trend"

# line items a method may be assigned to; everything else is derived
PROJECTABLE = (
    "revenue_advertising",
    "revenue_other",
    "cost_price",
    "rnd",
    "marketing",
    "admin",
    "other_income",
    "da",
    "capex",
    "delta_nwc",
    "net_borrowing",
    "dau",
    "mau",
)

_DERIVED = ("ebit", "income_tax", "net_income")


@dataclass(frozen=True)
class ForecastMethod:
    kind: str
    rate: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (GEOMETRIC, AVERAGE, TREND):
            raise ValidationError(f"unknown forecast method {self.kind!r}")
        if self.kind == GEOMETRIC:
            if self.rate is None:
                raise ValidationError("geometric-growth needs a rate parameter")
            if not self.rate > -1.0:
                raise ValidationError(f"geometric growth rate must exceed -1, got {self.rate}")
        elif self.rate is not None:
            raise ValidationError(f"{self.kind} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "ForecastMethod":
        """Parse ``method`` or ``method:parameter`` notation."""
        kind, sep, param = text.strip().partition(":")
        rate = None
        if sep:
            try:
                rate = float(param)
            except ValueError:
                raise ValidationError(f"bad method parameter {param!r}") from None
        return cls(kind=kind.strip(), rate=rate)


def parse_method_config(text: str) -> Dict[str, ForecastMethod]:
    """Read ``line_item = method[:parameter]`` assignments, one per line.

    Blank lines and ``#`` comments are ignored. Assignments to derived items
    (ebit, income_tax, net_income) are rejected.
    """
    methods = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        item, sep, spec_text = line.partition("=")
        if not sep:
            raise ValidationError(f"line {lineno}: expected 'line_item = method'")
        item = item.strip()
        if item in _DERIVED:
            raise ValidationError(
                f"line {lineno}: {item} is derived from projected components, "
                "not extrapolated directly"
            )
        if item not in PROJECTABLE:
            raise ValidationError(f"line {lineno}: unknown line item {item!r}")
        if item in methods:
            raise ValidationError(f"line {lineno}: duplicate assignment for {item!r}")
        methods[item] = ForecastMethod.parse(spec_text)
    return methods


def average_growth_rate(series: Sequence[float]) -> float:
    """Geometric mean of year-over-year growth, as a fraction.

    Equals (last/first)**(1/(n-1)) - 1, since intermediate ratios telescope.
    Every value must be strictly positive for the ratios to mean anything.
    """
    if len(series) < 2:
        raise ValidationError("growth rate needs at least two observations")
    for value in series:
        if not value > 0:
            raise ValidationError(
                f"growth is undefined for non-positive value {value}"
            )
    first, last = float(series[0]), float(series[-1])
    return (last / first) ** (1.0 / (len(series) - 1)) - 1.0


def linear_trend(series: Sequence[float], horizon: int) -> List[float]:
    """Continue a series along its ordinary-least-squares line.

    The fit regresses the values against their positions; the returned list
    holds the fitted values at the next ``horizon`` positions. The result
    does not depend on where the position index starts.
    """
    n = len(series)
    if n < 2:
        raise ValidationError("linear trend needs at least two observations")
    if horizon < 0:
        raise ValidationError("horizon must be non-negative")
    mean_i = (n - 1) / 2.0
    mean_y = math.fsum(series) / n
    sxy = math.fsum((i - mean_i) * (y - mean_y) for i, y in enumerate(series))
    sxx = math.fsum((i - mean_i) ** 2 for i in range(n))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_i
    return [intercept + slope * (n - 1 + k) for k in range(1, horizon + 1)]


def _continue_series(series: List[float], method: ForecastMethod, horizon: int) -> List[float]:
    if method.kind == TREND:
        return linear_trend(series, horizon)
    if method.kind == AVERAGE:
        rate = average_growth_rate(series)
    else:
        rate = method.rate
    last = float(series[-1])
    # anchored powers, so a single item reproduces v*(1+g)**k bit for bit
    return [last * (1.0 + rate) ** k for k in range(1, horizon + 1)]


def project_statement(
    history: Sequence[FinancialStatement],
    methods: Dict[str, ForecastMethod],
    horizon: int,
    tax_rate: Optional[float] = None,
    country: Optional[str] = None,
) -> List[FinancialStatement]:
    """Project assigned line items ``horizon`` years past the last history row.

    Each assigned item is extended independently by its method, using that
    item's non-empty observations in year order (treated as equally spaced).
    EBIT is then recomputed per projected year from whichever revenue and
    cost components were projected, income tax is applied to it at
    ``tax_rate`` (or the statutory rate for ``country``), and net income is
    the difference. Items without an assignment stay empty.
    """
    if horizon == 0:
        return []
    if horizon < 0:
        raise ValidationError("horizon must be non-negative")
    if not history:
        raise ValidationError("no history to project from")
    for item in methods:
        if item in _DERIVED:
            raise ValidationError(f"{item} is derived, not directly projectable")
        if item not in PROJECTABLE:
            raise ValidationError(f"unknown line item {item!r}")

    unit = None
    for row in history:
        for _, money in row.money_items():
            unit = money.unit
            break
        if unit is not None:
            break

    projected: Dict[str, List[float]] = {}
    for item, method in methods.items():
        series = [
            float(getattr(row, item))
            for row in history
            if getattr(row, item) is not None
        ]
        if len(series) < 2:
            raise ValidationError(
                f"{item}: need at least two historical observations, found {len(series)}"
            )
        projected[item] = _continue_series(series, method, horizon)

    if tax_rate is None and country is not None:
        try:
            tax_rate = STATUTORY_TAX[country.lower()]
        except KeyError:
            raise ValidationError(f"no statutory tax rate on file for {country!r}") from None

    ebit_parts = (
        ("revenue_advertising", 1),
        ("revenue_other", 1),
        ("cost_price", -1),
        ("rnd", -1),
        ("marketing", -1),
        ("admin", -1),
        ("other_income", 1),
    )

    last_year = history[-1].year
    rows = []
    for k in range(horizon):
        kwargs = {"year": last_year + 1 + k, "forecast": True}
        for item in projected:
            value = projected[item][k]
            if item in ("dau", "mau"):
                kwargs[item] = value
            else:
                kwargs[item] = Money(value, unit)
        contributions = [
            sign * projected[item][k] for item, sign in ebit_parts if item in projected
        ]
        if contributions:
            ebit = math.fsum(contributions)
            kwargs["ebit"] = Money(ebit, unit)
            if tax_rate is not None:
                tax = tax_rate * ebit
                kwargs["income_tax"] = Money(tax, unit)
                kwargs["net_income"] = Money(ebit - tax, unit)
        rows.append(FinancialStatement(**kwargs))
    return rows
