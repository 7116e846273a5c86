"""Loading and saving of company files and the 2019 cross-company snapshot.

A company file is UTF-8 comma-separated text: a block of ``#key: value``
metadata lines, then the fixed column header, then one row per fiscal year.
Decimal points are ``.``, there are no thousands separators, and an empty
cell means "not reported" (never zero). Rows carrying projected years are
flagged ``forecast=true``.

The bundled corpus under ``data/`` covers six social networks. Amounts are
kept exactly as published, including the VKontakte file whose magnitudes are
inconsistent with that company's dollar valuation (see the #note inside the
file); nothing is rescaled on load.
"""

from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import List, Optional

from .comparables import CompanySnapshot
from .core import (
    MONEY_FIELDS,
    CompanyProfile,
    DiscountInputs,
    FinancialStatement,
    Money,
    Unit,
    ValidationError,
)

COMPANY_HEADER = (
    "year," + ",".join(MONEY_FIELDS) + ",dau,mau,forecast"
)

SNAPSHOT_HEADER = "company,revenue,ebit,ebitda,ni,dau,mau,actual_ev,rank"

# metadata keys holding the discount-rate ingredients, in file order
_DISCOUNT_KEYS = (
    "risk_free_rate",
    "market_premium",
    "beta",
    "debt_rate",
    "equity_weight",
    "debt_weight",
    "tax_rate",
)

_KNOWN_META = {"name", "country", "unit", "actual_ev", "rank", "terminal_growth", "note"}
_KNOWN_META.update(_DISCOUNT_KEYS)


class ParseError(ValidationError):
    """Malformed file contents (as opposed to invalid financial data)."""


def bundled_data_dir() -> Path:
    """Directory holding the corpus shipped with the package."""
    return Path(__file__).resolve().parent / "data"


def _fail(source, lineno, message):
    raise ParseError(f"{source}: line {lineno}: {message}")


def _decimal(text, source, lineno, column):
    try:
        return Decimal(text)
    except InvalidOperation:
        _fail(source, lineno, f"column {column!r}: {text!r} is not a number")


def _float(text, source, lineno, column):
    try:
        return float(text)
    except ValueError:
        _fail(source, lineno, f"column {column!r}: {text!r} is not a number")


def parse_company(text: str, source: str = "<string>") -> CompanyProfile:
    """Parse one company file; raises ParseError/ValidationError with the
    offending line identified."""
    meta = {}
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header_seen:
                _fail(source, lineno, "metadata after the header row")
            key, sep, value = line[1:].partition(":")
            key = key.strip()
            if not sep:
                _fail(source, lineno, "metadata line without ':'")
            if key not in _KNOWN_META:
                _fail(source, lineno, f"unknown metadata key {key!r}")
            if key in meta:
                _fail(source, lineno, f"duplicate metadata key {key!r}")
            meta[key] = value.strip()
            continue
        if not header_seen:
            if line != COMPANY_HEADER:
                _fail(source, lineno, "header row does not match the company file schema")
            header_seen = True
            continue
        rows.append((lineno, line))

    if not header_seen:
        raise ParseError(f"{source}: no header row found")
    for required in ("name", "country", "unit"):
        if required not in meta:
            raise ParseError(f"{source}: missing #{required} metadata")

    unit = Unit.parse(meta["unit"])
    actual_ev = None
    if "actual_ev" in meta:
        actual_ev = Money(Decimal(meta["actual_ev"]), unit)
    rank = int(meta["rank"]) if "rank" in meta else None

    discount = None
    given = [k for k in _DISCOUNT_KEYS if k in meta]
    if given and len(given) != len(_DISCOUNT_KEYS):
        missing = sorted(set(_DISCOUNT_KEYS) - set(given))
        raise ParseError(f"{source}: incomplete discount inputs, missing {missing}")
    if given:
        discount = DiscountInputs(**{k: float(meta[k]) for k in _DISCOUNT_KEYS})

    terminal_growth = float(meta["terminal_growth"]) if "terminal_growth" in meta else None

    statements, forecast_rows = [], []
    columns = COMPANY_HEADER.split(",")
    for lineno, line in rows:
        cells = line.split(",")
        if len(cells) != len(columns):
            _fail(source, lineno, f"expected {len(columns)} cells, got {len(cells)}")
        record = dict(zip(columns, (c.strip() for c in cells)))
        year = int(_decimal(record["year"], source, lineno, "year"))
        kwargs = {"year": year}
        for name in MONEY_FIELDS:
            cell = record[name]
            kwargs[name] = Money(_decimal(cell, source, lineno, name), unit) if cell else None
        for name in ("dau", "mau"):
            cell = record[name]
            kwargs[name] = _float(cell, source, lineno, name) if cell else None
        flag = record["forecast"].lower()
        if flag not in ("true", "false", ""):
            _fail(source, lineno, f"forecast flag must be true or false, got {flag!r}")
        kwargs["forecast"] = flag == "true"
        stmt = FinancialStatement(**kwargs)
        (forecast_rows if stmt.forecast else statements).append(stmt)

    profile = CompanyProfile(
        name=meta["name"],
        country=meta["country"],
        unit=unit,
        actual_ev=actual_ev,
        rank=rank,
        statements=statements,
        forecast_rows=forecast_rows,
        discount=discount,
        terminal_growth=terminal_growth,
        note=meta.get("note"),
    )
    profile.validate()
    return profile


def load_company(path) -> CompanyProfile:
    path = Path(path)
    return parse_company(path.read_text(encoding="utf-8"), source=str(path))


def _format_user_count(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(value)


def serialize_company(profile: CompanyProfile) -> str:
    """Inverse of parse_company: re-loading the output yields an equal profile."""
    lines = [
        f"#name: {profile.name}",
        f"#country: {profile.country}",
        f"#unit: {profile.unit.value}",
    ]
    if profile.actual_ev is not None:
        lines.append(f"#actual_ev: {profile.actual_ev.amount}")
    if profile.rank is not None:
        lines.append(f"#rank: {profile.rank}")
    if profile.discount is not None:
        for key in _DISCOUNT_KEYS:
            lines.append(f"#{key}: {getattr(profile.discount, key)!r}")
    if profile.terminal_growth is not None:
        lines.append(f"#terminal_growth: {profile.terminal_growth!r}")
    if profile.note:
        lines.append(f"#note: {profile.note}")
    lines.append(COMPANY_HEADER)
    for stmt in list(profile.statements) + list(profile.forecast_rows):
        cells = [str(stmt.year)]
        for name in MONEY_FIELDS:
            money = getattr(stmt, name)
            cells.append(str(money.amount) if money is not None else "")
        for name in ("dau", "mau"):
            value = getattr(stmt, name)
            cells.append(_format_user_count(value) if value is not None else "")
        cells.append("true" if stmt.forecast else "false")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def save_company(profile: CompanyProfile, path) -> None:
    Path(path).write_text(serialize_company(profile), encoding="utf-8")


def load_corpus(directory) -> List[CompanyProfile]:
    """Load every company file in a directory, sorted by company name."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.csv"))
    if not paths:
        raise ValidationError(f"no company files in {directory}")
    profiles = [load_company(p) for p in paths]
    seen = {}
    for profile in profiles:
        if profile.name in seen:
            raise ValidationError(
                f"duplicate company name {profile.name!r} in {directory}"
            )
        seen[profile.name] = profile
    return sorted(profiles, key=lambda p: p.name)


def load_snapshot(path) -> List[CompanySnapshot]:
    """Load the cross-company snapshot file (amounts in millions of USD)."""
    path = Path(path)
    snapshots = []
    header_seen = False
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != SNAPSHOT_HEADER:
                _fail(path, lineno, "header row does not match the snapshot schema")
            header_seen = True
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 9:
            _fail(path, lineno, f"expected 9 cells, got {len(cells)}")
        name = cells[0]
        try:
            snapshots.append(
                CompanySnapshot(
                    name=name,
                    revenue=Money.millions(_decimal(cells[1], path, lineno, "revenue")),
                    ebit=Money.millions(_decimal(cells[2], path, lineno, "ebit")),
                    ebitda=Money.millions(_decimal(cells[3], path, lineno, "ebitda")),
                    ni=Money.millions(_decimal(cells[4], path, lineno, "ni")),
                    dau=_float(cells[5], path, lineno, "dau"),
                    mau=_float(cells[6], path, lineno, "mau"),
                    actual_ev=Money.millions(_decimal(cells[7], path, lineno, "actual_ev")),
                    rank=int(cells[8]) if cells[8] else None,
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}: line {lineno} ({name}): {exc}") from exc
    if not header_seen:
        raise ParseError(f"{path}: no header row found")
    return snapshots


def load_bundled_corpus() -> List[CompanyProfile]:
    return load_corpus(bundled_data_dir() / "companies")


def load_bundled_snapshot() -> List[CompanySnapshot]:
    return load_snapshot(bundled_data_dir() / "snapshot_2019.csv")


def find_company(profiles: List[CompanyProfile], name: str) -> Optional[CompanyProfile]:
    for profile in profiles:
        if profile.name == name:
            return profile
    return None
