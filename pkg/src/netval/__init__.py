"""Deterministic company-valuation toolkit.

Three method families behind one CLI: discounted cash flow (firm and equity
variants), peer-multiple comparables, and real-option pricing. Ships with a
six-company social-network corpus used by the regression suite.
"""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    CashFlowForecast,
    CompanyProfile,
    DiscountInputs,
    FinancialStatement,
    Money,
    NetvalError,
    Unit,
    UnitMismatchError,
    ValidationError,
    convert_unit,
)
from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
from .ingest import (  # noqa: F401
    load_bundled_corpus,
    load_bundled_snapshot,
    load_company,
    load_corpus,
    load_snapshot,
)
from .dcf import (  # noqa: F401
    capm,
    enterprise_value,
    equity_value,
    estimate_beta,
    fcfe,
    fcff,
    liquidation_value,
    terminal_value,
    value_company,
    wacc,
)
from .comparables import (  # noqa: F401
    AccuracyBand,
    CompanySnapshot,
    MultipleKind,
    company_multiples,
    implied_value,
    peer_average,
    value_target,
    valuation_grid,
)
from .forecast import ForecastMethod, project_statement  # noqa: F401
from .realoptions import (  # noqa: F401
    ConstantStrike,
    DatarMathewsResult,
    DiscreteDistribution,
    LognormalPayoff,
    OptionSpec,
    ScenarioSet,
    TriangularFuzzyNumber,
    binomial_call,
    black_scholes_call,
    datar_mathews,
    fuzzy_payoff_rov,
    load_scenario_set,
)
from .reproduce import reproduce_all, reproduce_table  # noqa: F401
