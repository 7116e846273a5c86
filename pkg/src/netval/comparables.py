"""Peer-multiple valuation.

Each company is valued off the other companies in the sample: compute a
multiple (enterprise value over some fundamental or user count) for every
peer, average the peers' multiples leaving the target out, and multiply the
average back onto the target's own metric. Negative EBIT or EBITDA produces
a signed multiple which enters the peer mean with its sign; only the final
implied value takes the absolute value. That ordering matters: averaging
magnitudes instead would not reproduce the reference grids bundled with the
package.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional

from .core import Money, ValidationError


class MultipleKind(Enum):
    EV_EBIT = "EV/EBIT"
    EV_EBITDA = "EV/EBITDA"
    EV_REVENUE = "EV/R"
    EV_DAU = "EV/DAU"
    EV_MAU = "EV/MAU"

    @classmethod
    def parse(cls, text: str) -> "MultipleKind":
        for kind in cls:
            if kind.value.lower() == text.lower():
                return kind
        raise ValidationError(f"unknown multiple kind: {text!r}")


ALL_KINDS = (
    MultipleKind.EV_EBIT,
    MultipleKind.EV_EBITDA,
    MultipleKind.EV_REVENUE,
    MultipleKind.EV_DAU,
    MultipleKind.EV_MAU,
)

# multiples whose denominator may legitimately be negative
_SIGNED_KINDS = frozenset({MultipleKind.EV_EBIT, MultipleKind.EV_EBITDA})


class AccuracyBand(Enum):
    """Deviation buckets; boundaries belong to the better band."""

    HIGH = "high"          # |deviation| <= 20%
    MEDIUM = "medium"      # 20% < |deviation| <= 35%
    LOW = "low"            # 35% < |deviation| <= 50%
    REJECTED = "rejected"  # beyond 50%


@dataclass(frozen=True)
class CompanySnapshot:
    """One company's fundamentals for a single reference year.

    Monetary fields share one unit (the bundled snapshot uses millions of
    USD); dau and mau are user counts in millions of people.
    """

    name: str
    revenue: Money
    ebit: Money
    ebitda: Money
    ni: Money
    dau: float
    mau: float
    actual_ev: Money
    rank: Optional[int] = None

    def __post_init__(self):
        if not self.actual_ev.amount > 0:
            raise ValidationError(f"{self.name}: actual enterprise value must be positive")
        if self.mau < self.dau:
            raise ValidationError(
                f"{self.name}: monthly active users ({self.mau}) below daily "
                f"active users ({self.dau})"
            )


def _metric(snapshot: CompanySnapshot, kind: MultipleKind) -> float:
    if kind is MultipleKind.EV_EBIT:
        return float(snapshot.ebit)
    if kind is MultipleKind.EV_EBITDA:
        return float(snapshot.ebitda)
    if kind is MultipleKind.EV_REVENUE:
        return float(snapshot.revenue)
    if kind is MultipleKind.EV_DAU:
        return float(snapshot.dau)
    return float(snapshot.mau)


def multiple(snapshot: CompanySnapshot, kind: MultipleKind) -> float:
    """Enterprise value over the metric selected by ``kind``.

    Returns a dimensionless ratio for the fundamentals, or money per million
    users for the DAU/MAU kinds. The sign of a negative EBIT or EBITDA is
    preserved; revenue and user counts must be strictly positive.
    """
    denom = _metric(snapshot, kind)
    if denom == 0:
        raise ValidationError(f"{snapshot.name}: zero {kind.value} denominator")
    if denom < 0 and kind not in _SIGNED_KINDS:
        raise ValidationError(f"{snapshot.name}: negative {kind.value} denominator")
    return float(snapshot.actual_ev) / denom


@dataclass(frozen=True)
class MultipleSet:
    """The five multiples of one company."""

    name: str
    values: Dict[MultipleKind, float]


def company_multiples(snapshot: CompanySnapshot) -> MultipleSet:
    return MultipleSet(
        name=snapshot.name,
        values={kind: multiple(snapshot, kind) for kind in ALL_KINDS},
    )


def peer_average(target: str, companies: List[CompanySnapshot], kind: MultipleKind) -> float:
    """Arithmetic mean of the signed multiples of every company except the target."""
    peers = [s for s in companies if s.name != target]
    if not peers:
        raise ValidationError(f"no peers left for {target!r}")
    return math.fsum(multiple(s, kind) for s in peers) / len(peers)


def implied_value(
    target: CompanySnapshot, companies: List[CompanySnapshot], kind: MultipleKind
) -> Money:
    """Peer-average multiple applied to the target's own metric.

    The product is taken in absolute value, so a target with negative EBIT
    still receives a positive valuation.
    """
    avg = peer_average(target.name, companies, kind)
    value = abs(avg * _metric(target, kind))
    return Money(value, target.actual_ev.unit)


def average_implied_value(target: CompanySnapshot, companies: List[CompanySnapshot]) -> Money:
    """Mean of the five per-multiple implied values."""
    values = [float(implied_value(target, companies, kind)) for kind in ALL_KINDS]
    return Money(math.fsum(values) / len(values), target.actual_ev.unit)


def classify(dev: float) -> AccuracyBand:
    """Bucket a deviation fraction; band edges belong to the better band."""
    if not math.isfinite(dev):
        raise ValidationError("deviation must be finite")
    magnitude = abs(dev)
    if magnitude <= 0.20:
        return AccuracyBand.HIGH
    if magnitude <= 0.35:
        return AccuracyBand.MEDIUM
    if magnitude <= 0.50:
        return AccuracyBand.LOW
    return AccuracyBand.REJECTED


def rank_proximity(max_distance: int) -> Callable[[CompanySnapshot, CompanySnapshot], bool]:
    """Peer filter keeping candidates within ``max_distance`` ranking places.

    Candidates without a rank are dropped when the filter is active. Off by
    default everywhere; the full sample is the documented behaviour.
    """

    def admit(target: CompanySnapshot, candidate: CompanySnapshot) -> bool:
        if target.rank is None or candidate.rank is None:
            return False
        return abs(target.rank - candidate.rank) <= max_distance

    return admit


@dataclass(frozen=True)
class TargetValuation:
    """Implied values, deviations and accuracy bands for one target company."""

    target: CompanySnapshot
    implied: Dict[MultipleKind, Money]
    average: Money
    deviations: Dict[MultipleKind, float]
    average_deviation: float
    bands: Dict[MultipleKind, AccuracyBand]
    average_band: AccuracyBand


def value_target(
    target: CompanySnapshot,
    companies: List[CompanySnapshot],
    peer_filter: Optional[Callable[[CompanySnapshot, CompanySnapshot], bool]] = None,
) -> TargetValuation:
    pool = companies
    if peer_filter is not None:
        pool = [target] + [
            s for s in companies if s.name != target.name and peer_filter(target, s)
        ]
    implied = {kind: implied_value(target, pool, kind) for kind in ALL_KINDS}
    average = average_implied_value(target, pool)
    actual = float(target.actual_ev)
    deviations = {kind: float(implied[kind]) / actual - 1.0 for kind in ALL_KINDS}
    average_deviation = float(average) / actual - 1.0
    return TargetValuation(
        target=target,
        implied=implied,
        average=average,
        deviations=deviations,
        average_deviation=average_deviation,
        bands={kind: classify(deviations[kind]) for kind in ALL_KINDS},
        average_band=classify(average_deviation),
    )


def valuation_grid(
    companies: List[CompanySnapshot],
    peer_filter: Optional[Callable[[CompanySnapshot, CompanySnapshot], bool]] = None,
) -> List[TargetValuation]:
    """value_target applied to every company, in input order."""
    return [value_target(target, companies, peer_filter) for target in companies]
