"""Command-line front door for the valuation engine.

Commands: dcf, multiples, option {bs|binomial|dm|fuzzy}, forecast,
reproduce. Every command takes --data (alternate dataset directory),
--format (table or json) and --seed. The JSON report and the rendered
table carry the same numbers; the table is only a view. Exit status 0
means success, 1 a validation failure, and 2 a reproduction run that
found cells out of tolerance.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import comparables, dcf, forecast, reproduce
from .comparables import ALL_KINDS
from .core import MONEY_FIELDS, Money, Unit, ValidationError
from .ingest import (
    find_company,
    load_bundled_corpus,
    load_bundled_snapshot,
    load_corpus,
    load_snapshot,
)
from .realoptions import (
    ConstantStrike,
    OptionSpec,
    TriangularFuzzyNumber,
    binomial_call,
    black_scholes_call,
    datar_mathews,
    fuzzy_payoff_rov,
    load_scenario_set,
)

# Fixed default so every run is reproducible without any flags.
DEFAULT_SEED = 20200417

_USERS_UNIT = "millions-people"


@dataclass(frozen=True)
class RunConfig:
    """A parsed command line: the command, the shared flags, and the rest."""

    command: str
    data_dir: Optional[str]
    output_format: str
    params: Dict[str, object]


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this engine reserves 2 for
    reproduction-tolerance failures, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _shared_flags(defaulted: bool) -> _Parser:
    """The global flags, attachable both before and after the subcommand.

    The root parser's copy carries the real defaults; the per-command
    copies default to SUPPRESS so that an omitted flag never overwrites
    a value already parsed at the root.
    """
    parser = _Parser(add_help=False)

    def default(value):
        return value if defaulted else argparse.SUPPRESS

    parser.add_argument("--data", metavar="DIR", default=default(None),
                        help="dataset directory with companies/ and snapshot_2019.csv "
                             "(default: the bundled dataset)")
    parser.add_argument("--format", dest="output_format", choices=("table", "json"),
                        default=default("table"), help="report format (default table)")
    parser.add_argument("--seed", type=_u64, default=default(None),
                        help=f"seed for Monte Carlo runs (default {DEFAULT_SEED})")
    return parser


def build_parser() -> argparse.ArgumentParser:
    shared = _shared_flags(defaulted=False)

    parser = _Parser(prog="netval",
                     description="Deterministic valuation engine for social "
                                 "network companies.",
                     parents=[_shared_flags(defaulted=True)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_dcf = sub.add_parser("dcf", parents=[shared],
                           help="discounted cash flow valuation of one company")
    p_dcf.add_argument("--company", required=True, help="company name, e.g. facebook")

    p_mult = sub.add_parser("multiples", parents=[shared],
                            help="peer-multiple valuation from the snapshot file")
    which = p_mult.add_mutually_exclusive_group(required=True)
    which.add_argument("--target", help="value one company against its peers")
    which.add_argument("--all", action="store_true",
                       help="full deviation grid over every company")
    p_mult.add_argument("--peers", nargs="+", metavar="NAME",
                        help="restrict the peer pool to these companies")

    p_opt = sub.add_parser("option", help="price a real option")
    models = p_opt.add_subparsers(dest="model", required=True, parser_class=_Parser)

    def contract_args(p, with_steps=False):
        p.add_argument("--spot", type=float, required=True,
                       help="present value of the underlying cash flows")
        p.add_argument("--strike", type=float, required=True,
                       help="exercise price (investment outlay)")
        p.add_argument("--rate", type=float, required=True, help="risk-free rate")
        p.add_argument("--time", type=float, required=True, help="years to expiry")
        p.add_argument("--vol", type=float, required=True, help="annual volatility")
        p.add_argument("--unit", type=Unit.parse, default=Unit.MILLIONS_USD,
                       help="money unit of spot and strike (default millions-USD)")
        if with_steps:
            p.add_argument("--steps", type=_positive_int, default=1000,
                           help="lattice steps (default 1000)")

    contract_args(models.add_parser("bs", parents=[shared],
                                    help="Black-Scholes-Merton closed form"))
    contract_args(models.add_parser("binomial", parents=[shared],
                                    help="binomial lattice"), with_steps=True)

    p_dm = models.add_parser("dm", parents=[shared],
                             help="Datar-Mathews Monte Carlo")
    p_dm.add_argument("--config", required=True, metavar="FILE",
                      help="scenario configuration file")
    p_dm.add_argument("--workers", type=_positive_int, default=1,
                      help="worker threads (the result does not depend on this)")

    p_fz = models.add_parser("fuzzy", parents=[shared],
                             help="fuzzy pay-off real option value")
    p_fz.add_argument("--peak", type=float, required=True,
                      help="most likely net present value")
    p_fz.add_argument("--left", type=float, required=True,
                      help="spread below the peak")
    p_fz.add_argument("--right", type=float, required=True,
                      help="spread above the peak")
    p_fz.add_argument("--unit", type=Unit.parse, default=Unit.MILLIONS_USD,
                      help="money unit of the triangle (default millions-USD)")

    p_fc = sub.add_parser("forecast", parents=[shared],
                          help="project line items from a company's history")
    p_fc.add_argument("--company", required=True)
    p_fc.add_argument("--methods", required=True, metavar="FILE",
                      help="method assignments, one 'line_item = method' per line")
    p_fc.add_argument("--horizon", type=_positive_int, default=5,
                      help="years to project (default 5)")
    p_fc.add_argument("--tax-rate", type=float, default=None,
                      help="override the country's statutory tax rate")

    p_rep = sub.add_parser("reproduce", parents=[shared],
                           help="recompute one published reference table")
    p_rep.add_argument("table", type=int,
                       help=f"table number, one of {list(reproduce.TABLE_NUMBERS)}")

    return parser


# ---------------------------------------------------------------------------
# formatting

def _fmt_money(value: float) -> str:
    if value != value:  # NaN never reaches reports; belt and braces
        return "nan"
    return f"{value:,.2f}" if abs(value) >= 100 else f"{value:.6g}"


def _fmt_percent(value: float) -> str:
    return f"{value * 100:.1f}%"


def _fmt_ratio(value: float) -> str:
    return f"{value:,.4f}"


def _render_rows(rows: List[Tuple[str, ...]], indent: str = "  ") -> List[str]:
    """Align a list of equal-length string tuples into columns."""
    if not rows:
        return []
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for row in rows:
        cells = [cell.ljust(widths[i]) for i, cell in enumerate(row)]
        out.append((indent + "  ".join(cells)).rstrip())
    return out


def _load_profiles(config: RunConfig):
    if config.data_dir is None:
        return load_bundled_corpus()
    return load_corpus(Path(config.data_dir) / "companies")


def _load_snapshots(config: RunConfig):
    if config.data_dir is None:
        return load_bundled_snapshot()
    return load_snapshot(Path(config.data_dir) / "snapshot_2019.csv")


def _get_profile(config: RunConfig, name: str):
    profiles = _load_profiles(config)
    profile = find_company(profiles, name)
    if profile is None:
        known = ", ".join(sorted(p.name for p in profiles))
        raise ValidationError(f"unknown company {name!r}; dataset has: {known}")
    return profile


# ---------------------------------------------------------------------------
# commands

def run_dcf(config: RunConfig):
    profile = _get_profile(config, config.params["company"])
    result = dcf.value_company(profile)
    inputs = profile.discount
    cost_of_equity = dcf.capm(inputs.risk_free_rate, inputs.beta, inputs.market_premium)
    unit = profile.unit.value

    payload = {
        "command": "dcf",
        "company": profile.name,
        "unit": unit,
        "cost_of_equity": cost_of_equity,
        "wacc": result.discount_rate,
        "discounted_flows": [float(flow) for flow in result.discounted_flows],
        "discounted_terminal": float(result.discounted_terminal),
        "enterprise_value": float(result.enterprise_value),
        "terminal_share": result.terminal_share(),
        "actual_enterprise_value":
            float(profile.actual_ev) if profile.actual_ev is not None else None,
        "deviation": result.deviation_vs_actual,
    }

    rows = [("cost of equity", _fmt_percent(cost_of_equity), ""),
            ("wacc", _fmt_percent(result.discount_rate), "")]
    for t, flow in enumerate(result.discounted_flows, start=1):
        rows.append((f"discounted flow {t}", _fmt_money(float(flow)), unit))
    rows.append(("discounted terminal", _fmt_money(float(result.discounted_terminal)), unit))
    rows.append(("enterprise value", _fmt_money(float(result.enterprise_value)), unit))
    rows.append(("terminal share", _fmt_percent(result.terminal_share()), ""))
    if profile.actual_ev is not None:
        rows.append(("actual enterprise value", _fmt_money(float(profile.actual_ev)), unit))
        rows.append(("deviation", _fmt_percent(result.deviation_vs_actual), ""))
    lines = [f"dcf valuation: {profile.name}"] + _render_rows(rows)
    return payload, lines, 0


def _snapshot_pool(config: RunConfig):
    snapshots = sorted(_load_snapshots(config), key=lambda s: s.name)
    return snapshots, {s.name: s for s in snapshots}


def _target_payload(valuation) -> List[Dict[str, object]]:
    rows = []
    for kind in ALL_KINDS:
        rows.append({
            "multiple": kind.value,
            "implied_value": float(valuation.implied[kind]),
            "deviation": valuation.deviations[kind],
            "band": valuation.bands[kind].value,
        })
    rows.append({
        "multiple": "average",
        "implied_value": float(valuation.average),
        "deviation": valuation.average_deviation,
        "band": valuation.average_band.value,
    })
    return rows


def _target_rows(name: str, valuation) -> List[Tuple[str, ...]]:
    out = []
    for entry in _target_payload(valuation):
        out.append((name, str(entry["multiple"]), _fmt_money(entry["implied_value"]),
                    _fmt_percent(entry["deviation"]), str(entry["band"])))
    return out


def run_multiples(config: RunConfig):
    snapshots, by_name = _snapshot_pool(config)
    unit = Unit.MILLIONS_USD.value
    header = ("company", "multiple", "implied value", "deviation", "band")

    if config.params.get("all"):
        if config.params.get("peers"):
            raise ValidationError("--peers only applies to --target runs")
        grid = [(s.name, comparables.value_target(s, snapshots)) for s in snapshots]
        payload = {
            "command": "multiples",
            "unit": unit,
            "grid": [{"company": name, "rows": _target_payload(v)} for name, v in grid],
        }
        rows = [header]
        for name, valuation in grid:
            rows.extend(_target_rows(name, valuation))
        lines = [f"multiples grid ({unit})"] + _render_rows(rows)
        return payload, lines, 0

    target_name = config.params["target"]
    if target_name not in by_name:
        known = ", ".join(s.name for s in snapshots)
        raise ValidationError(f"unknown company {target_name!r}; snapshot has: {known}")
    target = by_name[target_name]

    pool = snapshots
    peer_names = config.params.get("peers")
    if peer_names:
        unknown = sorted(set(peer_names) - set(by_name))
        if unknown:
            raise ValidationError(f"unknown peer companies: {unknown}")
        keep = set(peer_names) | {target_name}
        pool = [s for s in snapshots if s.name in keep]
    valuation = comparables.value_target(target, pool)

    payload = {
        "command": "multiples",
        "target": target_name,
        "unit": unit,
        "actual_enterprise_value": float(target.actual_ev),
        "rows": _target_payload(valuation),
    }
    rows = [header] + _target_rows(target_name, valuation)
    lines = [f"multiples valuation: {target_name} ({unit})"] + _render_rows(rows)
    return payload, lines, 0


def _resolve_seed(config: RunConfig) -> int:
    seed = config.params.get("seed")
    return DEFAULT_SEED if seed is None else seed


def run_option(config: RunConfig):
    model = config.params["model"]
    if model in ("bs", "binomial"):
        unit = config.params["unit"]
        spec = OptionSpec(
            spot=Money(config.params["spot"], unit),
            strike=Money(config.params["strike"], unit),
            risk_free=config.params["rate"],
            time_to_expiry=config.params["time"],
            volatility=config.params["vol"],
        )
        if model == "bs":
            price = black_scholes_call(spec)
            payload = {"command": "option", "model": "bs",
                       "unit": unit.value, "value": float(price)}
            rows = [("value", _fmt_money(float(price)), unit.value)]
            title = "option value (Black-Scholes-Merton)"
        else:
            steps = config.params["steps"]
            price = binomial_call(spec, steps)
            payload = {"command": "option", "model": "binomial", "steps": steps,
                       "unit": unit.value, "value": float(price)}
            rows = [("value", _fmt_money(float(price)), unit.value),
                    ("steps", str(steps), "")]
            title = "option value (binomial lattice)"
        return payload, [title] + _render_rows(rows), 0

    if model == "dm":
        path = Path(config.params["config"])
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as bad:
            raise ValidationError(f"cannot read scenario file: {bad}") from None
        scenarios = load_scenario_set(
            text,
            seed_override=config.params.get("seed"),
            source=str(path),
            seed_default=DEFAULT_SEED,
        )
        result = datar_mathews(scenarios, workers=config.params["workers"])
        unit = scenarios.unit.value
        payload = {
            "command": "option", "model": "dm", "unit": unit,
            "value": float(result.value),
            "standard_error": float(result.standard_error),
            "paths": result.paths,
            "seed": result.seed,
        }
        rows = [("value", _fmt_money(float(result.value)), unit),
                ("standard error", _fmt_money(float(result.standard_error)), unit),
                ("paths", str(result.paths), ""),
                ("seed", str(result.seed), "")]
        return payload, ["option value (Datar-Mathews)"] + _render_rows(rows), 0

    # fuzzy
    triangle = TriangularFuzzyNumber(
        peak=config.params["peak"],
        left_spread=config.params["left"],
        right_spread=config.params["right"],
    )
    unit = config.params["unit"].value
    value = fuzzy_payoff_rov(triangle)
    payload = {"command": "option", "model": "fuzzy", "unit": unit,
               "value": float(value)}
    rows = [("value", _fmt_money(float(value)), unit)]
    return payload, ["option value (fuzzy pay-off)"] + _render_rows(rows), 0


def run_forecast(config: RunConfig):
    profile = _get_profile(config, config.params["company"])
    methods_path = Path(config.params["methods"])
    try:
        methods_text = methods_path.read_text(encoding="utf-8")
    except OSError as bad:
        raise ValidationError(f"cannot read methods file: {bad}") from None
    methods = forecast.parse_method_config(methods_text)
    projected = forecast.project_statement(
        profile.statements,
        methods,
        config.params["horizon"],
        tax_rate=config.params.get("tax_rate"),
        country=profile.country,
    )

    unit = profile.unit.value
    shown = [name for name in MONEY_FIELDS if name in methods or name in
             ("ebit", "income_tax", "net_income")]
    years = []
    rows = []
    for statement in projected:
        items = {}
        for name in shown:
            money = getattr(statement, name)
            if money is not None:
                items[name] = float(money)
                rows.append((str(statement.year), name, _fmt_money(float(money)), unit))
        for name in ("dau", "mau"):
            if name in methods:
                count = getattr(statement, name)
                if count is not None:
                    items[name] = count
                    rows.append((str(statement.year), name, _fmt_money(count), _USERS_UNIT))
        years.append({"year": statement.year, "items": items})

    payload = {"command": "forecast", "company": profile.name, "unit": unit,
               "horizon": config.params["horizon"], "years": years}
    lines = [f"forecast: {profile.name}, {config.params['horizon']} year(s)"]
    lines += _render_rows([("year", "line item", "value", "unit")] + rows)
    return payload, lines, 0


def run_reproduce(config: RunConfig):
    report = reproduce.reproduce_table(config.params["table"], config.data_dir)
    payload = {
        "command": "reproduce",
        "table": report.table,
        "title": report.title,
        "ok": report.ok,
        "cells": [{
            "row": cell.row, "column": cell.column,
            "computed": cell.computed, "published": cell.published,
            "tolerance": cell.tolerance, "ok": cell.ok,
        } for cell in report.cells],
    }
    rows = [("row", "column", "computed", "published", "delta", "tolerance", "within")]
    for cell in report.cells:
        rows.append((cell.row, cell.column,
                     _fmt_money(cell.computed), _fmt_money(cell.published),
                     f"{cell.computed - cell.published:+.4g}",
                     cell.tolerance, "yes" if cell.ok else "NO"))
    bad = len(report.failures)
    verdict = ("all cells within tolerance" if report.ok
               else f"{bad} of {len(report.cells)} cells out of tolerance")
    lines = [f"reproduce table {report.table} ({report.title}): {verdict}"]
    lines += _render_rows(rows)
    return payload, lines, 0 if report.ok else 2


_RUNNERS = {
    "dcf": run_dcf,
    "multiples": run_multiples,
    "option": run_option,
    "forecast": run_forecast,
    "reproduce": run_reproduce,
}


def main(argv=None) -> int:
    namespace = build_parser().parse_args(argv)
    values = vars(namespace)
    config = RunConfig(
        command=values.pop("command"),
        data_dir=values.pop("data"),
        output_format=values.pop("output_format"),
        params=values,
    )
    try:
        payload, lines, exit_code = _RUNNERS[config.command](config)
    except ValidationError as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 1
    if config.output_format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
