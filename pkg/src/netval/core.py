"""Core value types shared by every valuation method.

Money is deliberately strict: amounts are Decimal, every amount carries its
scale unit, and mixing scales raises instead of silently coercing. The two
scales used by the bundled statements are thousands and millions of USD, and
conversion between them is an exact shift by 10^3.
"""

from dataclasses import dataclass, field, fields
from decimal import Decimal
from enum import Enum
from typing import Optional, Union


class NetvalError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(NetvalError):
    """Invalid input data or parameters."""


class UnitMismatchError(ValidationError):
    """Arithmetic or comparison attempted across different money units."""


class Unit(Enum):
    THOUSANDS_USD = "thousands-USD"
    MILLIONS_USD = "millions-USD"

    @classmethod
    def parse(cls, text: str) -> "Unit":
        for u in cls:
            if u.value == text:
                return u
        raise ValidationError(f"unknown money unit: {text!r}")


# scale of each unit in whole dollars, used for conversions
_DOLLARS = {
    Unit.THOUSANDS_USD: Decimal(10) ** 3,
    Unit.MILLIONS_USD: Decimal(10) ** 6,
}

Amount = Union[int, str, float, Decimal]


def _as_decimal(value: Amount) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, float):
        # repr-round-trip keeps 0.1 as 0.1 instead of its binary expansion
        return Decimal(repr(value))
    return Decimal(value)


@dataclass(frozen=True)
class Money:
    """An immutable amount tagged with its scale unit."""

    amount: Decimal
    unit: Unit

    def __post_init__(self):
        if not isinstance(self.amount, Decimal):
            object.__setattr__(self, "amount", _as_decimal(self.amount))

    # -- construction helpers ------------------------------------------------

    @classmethod
    def thousands(cls, value: Amount) -> "Money":
        return cls(_as_decimal(value), Unit.THOUSANDS_USD)

    @classmethod
    def millions(cls, value: Amount) -> "Money":
        return cls(_as_decimal(value), Unit.MILLIONS_USD)

    # -- arithmetic ----------------------------------------------------------

    def _require_same_unit(self, other: "Money", op: str) -> None:
        if not isinstance(other, Money):
            raise TypeError(f"cannot {op} Money and {type(other).__name__}")
        if other.unit is not self.unit:
            raise UnitMismatchError(
                f"cannot {op} {self.unit.value} and {other.unit.value}; "
                "convert explicitly first"
            )

    def __add__(self, other: "Money") -> "Money":
        self._require_same_unit(other, "add")
        return Money(self.amount + other.amount, self.unit)

    def __sub__(self, other: "Money") -> "Money":
        self._require_same_unit(other, "subtract")
        return Money(self.amount - other.amount, self.unit)

    def __neg__(self) -> "Money":
        return Money(-self.amount, self.unit)

    def __mul__(self, scalar: Amount) -> "Money":
        if isinstance(scalar, Money):
            raise TypeError("Money * Money is not defined")
        return Money(self.amount * _as_decimal(scalar), self.unit)

    __rmul__ = __mul__

    def __truediv__(self, divisor: Amount) -> "Money":
        if isinstance(divisor, Money):
            raise TypeError("use .ratio() for Money / Money")
        return Money(self.amount / _as_decimal(divisor), self.unit)

    def ratio(self, other: "Money") -> Decimal:
        """Dimensionless quotient of two amounts in the same unit."""
        self._require_same_unit(other, "divide")
        if other.amount == 0:
            raise ValidationError("division by zero-amount Money")
        return self.amount / other.amount

    def __lt__(self, other: "Money") -> bool:
        self._require_same_unit(other, "compare")
        return self.amount < other.amount

    def __le__(self, other: "Money") -> bool:
        self._require_same_unit(other, "compare")
        return self.amount <= other.amount

    # -- conversion ----------------------------------------------------------

    def to_unit(self, unit: Unit) -> "Money":
        if unit is self.unit:
            return self
        factor = _DOLLARS[self.unit] / _DOLLARS[unit]
        return Money(self.amount * factor, unit)

    def __float__(self) -> float:
        return float(self.amount)

    def __str__(self) -> str:
        return f"{self.amount} {self.unit.value}"


def convert_unit(money: Money, unit: Unit) -> Money:
    """Exact rescaling between thousands and millions of USD."""
    return money.to_unit(unit)


@dataclass(frozen=True)
class DiscountInputs:
    """CAPM and WACC ingredients for one company. All rates are fractions."""

    risk_free_rate: float
    market_premium: float
    beta: float
    debt_rate: float
    equity_weight: float
    debt_weight: float
    tax_rate: float

    def __post_init__(self):
        if not 0.0 <= self.equity_weight <= 1.0 or not 0.0 <= self.debt_weight <= 1.0:
            raise ValidationError("capital weights must lie in [0, 1]")
        if abs(self.equity_weight + self.debt_weight - 1.0) > 1e-6:
            raise ValidationError(
                f"equity and debt weights must sum to 1, got "
                f"{self.equity_weight + self.debt_weight}"
            )
        if not 0.0 <= self.tax_rate < 1.0:
            raise ValidationError("tax rate must lie in [0, 1)")


# money-valued line items of a statement, in file column order
MONEY_FIELDS = (
    "revenue_advertising",
    "revenue_other",
    "cost_price",
    "rnd",
    "marketing",
    "admin",
    "other_income",
    "ebit",
    "income_tax",
    "net_income",
    "da",
    "capex",
    "delta_nwc",
    "net_borrowing",
)


@dataclass(frozen=True)
class FinancialStatement:
    """One fiscal year of a company, historical or forecast.

    Monetary fields are Optional[Money]; a missing cell in the source data is
    None, never zero. capex, delta_nwc and net_borrowing are signed flows
    (outflows negative). income_tax is the tax charge with the sign used by
    the cash-flow construction: positive when it reduces free cash flow.
    dau/mau are user counts in millions and are not Money.
    """

    year: int
    revenue_advertising: Optional[Money] = None
    revenue_other: Optional[Money] = None
    cost_price: Optional[Money] = None
    rnd: Optional[Money] = None
    marketing: Optional[Money] = None
    admin: Optional[Money] = None
    other_income: Optional[Money] = None
    ebit: Optional[Money] = None
    income_tax: Optional[Money] = None
    net_income: Optional[Money] = None
    da: Optional[Money] = None
    capex: Optional[Money] = None
    delta_nwc: Optional[Money] = None
    net_borrowing: Optional[Money] = None
    dau: Optional[float] = None
    mau: Optional[float] = None
    forecast: bool = False

    def money_items(self):
        """Yield (field name, Money) for every populated monetary field."""
        for name in MONEY_FIELDS:
            value = getattr(self, name)
            if value is not None:
                yield name, value


def validate_statement(stmt: FinancialStatement, tolerance: Decimal = Decimal(2)) -> None:
    """Check internal consistency of one statement row.

    Raises ValidationError if ebit, income_tax and net_income are all present
    but |net_income - (ebit - income_tax)| exceeds ``tolerance`` (units of the
    last displayed digit of the source file), or if mau < dau.
    """
    units = {m.unit for _, m in stmt.money_items()}
    if len(units) > 1:
        raise UnitMismatchError(f"statement {stmt.year} mixes units {units}")

    if stmt.ebit is not None and stmt.income_tax is not None and stmt.net_income is not None:
        residual = abs(stmt.net_income.amount - (stmt.ebit.amount - stmt.income_tax.amount))
        if residual > tolerance:
            raise ValidationError(
                f"year {stmt.year}: net income {stmt.net_income.amount} is not "
                f"ebit - tax = {stmt.ebit.amount - stmt.income_tax.amount} "
                f"(off by {residual}, tolerance {tolerance})"
            )

    if stmt.dau is not None and stmt.mau is not None and stmt.mau < stmt.dau:
        raise ValidationError(
            f"year {stmt.year}: monthly active users ({stmt.mau}) below daily "
            f"active users ({stmt.dau})"
        )


@dataclass(frozen=True)
class CashFlowForecast:
    """Explicit-horizon cash flows plus the first post-horizon flow.

    flows[t] is the flow of forecast year t+1 (discounted t+1 full years).
    post_forecast_flow feeds the terminal value.
    """

    flows: tuple
    post_forecast_flow: Money

    def __post_init__(self):
        if len(self.flows) == 0:
            raise ValidationError("forecast must contain at least one explicit flow")
        units = {f.unit for f in self.flows} | {self.post_forecast_flow.unit}
        if len(units) > 1:
            raise UnitMismatchError("forecast flows mix units")

    @property
    def horizon(self) -> int:
        return len(self.flows)

    @property
    def unit(self) -> Unit:
        return self.post_forecast_flow.unit


@dataclass
class CompanyProfile:
    """Everything the engine knows about one company."""

    name: str
    country: str
    unit: Unit
    actual_ev: Optional[Money] = None
    rank: Optional[int] = None
    statements: list = field(default_factory=list)  # historical rows
    forecast_rows: list = field(default_factory=list)  # rows flagged forecast=true
    discount: Optional[DiscountInputs] = None
    terminal_growth: Optional[float] = None
    note: Optional[str] = None

    def validate(self) -> None:
        years = [s.year for s in self.statements + self.forecast_rows]
        if len(years) != len(set(years)):
            raise ValidationError(f"{self.name}: duplicate statement years")
        if years != sorted(years):
            raise ValidationError(f"{self.name}: statement years out of order")
        for s in self.statements + self.forecast_rows:
            try:
                validate_statement(s)
            except ValidationError as exc:
                raise ValidationError(f"{self.name}: {exc}") from exc

    def latest_actual(self) -> Optional[FinancialStatement]:
        return self.statements[-1] if self.statements else None


def statement_fields() -> tuple:
    """Column names of a statement row, in canonical file order."""
    return tuple(f.name for f in fields(FinancialStatement))
