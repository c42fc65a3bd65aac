"""Command-line entry point: ``ssrscreen screen|scan|compare``.

Exit status: 0 success, 1 usage error, 2 input or data error, 3 numerical
failure. The log level comes from ``SSRSCREEN_LOG_LEVEL`` (default WARNING).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ssrscreen.freqscan import (
    DEFAULT_BAND,
    NumericalError,
    ScanError,
    ScanResult,
    ScanScenario,
    sensitivity_sweep,
)
from ssrscreen.model import (
    BranchKey,
    Contingency,
    ModelError,
    NetworkModel,
    contingency_from_dict,
    parse_network,
    wind_farm_params_from_dict,
)
from ssrscreen.report import (
    DAMPING_HEADER,
    ExpansionComparison,
    _csv,
    _table,
    contingency_rows,
    CONTINGENCY_HEADER,
    damping_rows,
    emit_report,
    match_conditions,
    pair_damping,
    slug,
)
from ssrscreen.topology import DEFAULT_K, DEFAULT_MAX_DEPTH, RadialCondition, screen

log = logging.getLogger("ssrscreen")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- request files -----------------------------------------------------------

@dataclass(frozen=True)
class ScreeningRequest:
    source: str
    sink: str
    series_line: BranchKey
    max_depth: int = DEFAULT_MAX_DEPTH
    k: int = DEFAULT_K


@dataclass(frozen=True)
class ScanRequest:
    poi: str
    band: tuple[float, float, float]
    wind_farm: Any            # WindFarmParams, "ideal", or None for the model's own farm
    scenarios: tuple[ScanScenario, ...]
    scenarios_after: tuple[ScanScenario, ...]


def _read_json(path: str | Path, what: str) -> Any:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: syntax error: {exc.msg} (line {exc.lineno}, column {exc.colno})")


def load_network(path: str | Path) -> NetworkModel:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"network file not found: {p}")
    try:
        return parse_network(p.read_text())
    except ModelError as exc:
        raise InputError(f"{p}: {exc}") from None


def screening_requests(doc: Any) -> list[ScreeningRequest]:
    if isinstance(doc, dict) and "requests" in doc:
        doc = doc["requests"]
    if isinstance(doc, dict):
        doc = [doc]
    out = []
    for d in doc:
        try:
            sl = d["series_line"]
            out.append(ScreeningRequest(
                source=str(d["source"]), sink=str(d["sink"]),
                series_line=BranchKey(str(sl["from"]), str(sl["to"]), str(sl["circuit"])),
                max_depth=int(d.get("max_depth", DEFAULT_MAX_DEPTH)), k=int(d.get("k", DEFAULT_K))))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad screening request: {exc!r}") from None
    return out


def _scenario(d: dict, ctg_key: str) -> ScanScenario:
    ctg = d.get(ctg_key, d.get("contingency"))
    shunts = d.get("shunt_status", "none")
    return ScanScenario(
        turbines_in_service_fraction=float(d.get("turbines_in_service_fraction", 1.0)),
        dispatch_fraction=float(d.get("dispatch_fraction", 1.0)),
        shunt_status=shunts if isinstance(shunts, str) else tuple(shunts),
        contingency=contingency_from_dict(ctg) if ctg else Contingency("base case"),
        name=d.get("name", ""),
    )


def scan_request(doc: Any) -> ScanRequest:
    try:
        band = doc.get("band", {})
        wf = doc.get("wind_farm")
        if isinstance(wf, dict):
            wf = wind_farm_params_from_dict(wf)
        elif wf not in (None, "ideal"):
            raise ValueError(f"wind_farm must be an object, 'ideal' or null, got {wf!r}")
        scen = doc["scenarios"]
        return ScanRequest(
            poi=str(doc["poi"]),
            band=(float(band.get("start", DEFAULT_BAND[0])), float(band.get("end", DEFAULT_BAND[1])),
                  float(band.get("step", DEFAULT_BAND[2]))),
            wind_farm=wf,
            scenarios=tuple(_scenario(s, "contingency") for s in scen),
            scenarios_after=tuple(_scenario(s, "contingency_after") for s in scen),
        )
    except (KeyError, TypeError, ValueError, AttributeError, ModelError) as exc:
        raise InputError(f"bad scan request: {exc}") from None


def parse_band(text: str) -> tuple[float, float, float]:
    try:
        start, end, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--band expects start:end:step, got {text!r}") from None
    return start, end, step


# --- pipeline ----------------------------------------------------------------

def run_screen(model: NetworkModel, requests: list[ScreeningRequest],
               max_depth: int | None = None, k: int | None = None) -> list[list[RadialCondition]]:
    out = []
    for rq in requests:
        try:
            out.append(screen(model, rq.source, rq.sink, rq.series_line,
                              max_depth if max_depth is not None else rq.max_depth,
                              k if k is not None else rq.k))
        except ModelError as exc:
            raise InputError(str(exc)) from None
    return out


def run_scan(model: NetworkModel, rq: ScanRequest, band=None, after: bool = False):
    start, end, step = band or rq.band
    scenarios = rq.scenarios_after if after else rq.scenarios
    kw: dict[str, Any] = dict(f_start=start, f_end=end, f_step=step)
    params = None
    if rq.wind_farm == "ideal":
        kw["farm"] = lambda f: 0j
    elif rq.wind_farm is not None:
        params = rq.wind_farm
    try:
        results = sensitivity_sweep(model, rq.poi, params, scenarios, **kw)
    except (ModelError, ValueError) as exc:
        raise InputError(str(exc)) from None
    failed = [r for r in results if isinstance(r, ScanError)]
    if failed and len(failed) == len(results):
        message = "; ".join(f"{r.scenario.name}: {r.message}" for r in failed)
        if any(r.numerical for r in failed):
            raise NumericalError(message)
        raise InputError(message)
    return results


def _conditions_json(conds: list[RadialCondition]) -> str:
    return json.dumps([rc.to_dict() for rc in conds], indent=2) + "\n"


def _write(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        (out / name).write_text(files[name])


def _summary_lines(results) -> list[list[str]]:
    rows = []
    for r in results:
        sc = r.scenario
        if isinstance(r, ScanError):
            rows.append([sc.farm_label, sc.shunt_label, "", "", f"error: {r.message}"])
        elif r.damping is None:
            rows.append([sc.farm_label, sc.shunt_label, "", "", "no crossover"])
        else:
            d = r.damping
            rows.append([sc.farm_label, sc.shunt_label, f"{d.frequency:.2f}", f"{d.r_cum:.3f}",
                         d.classification])
    return rows


def cmd_screen(args) -> int:
    model = load_network(args.network)
    requests = screening_requests(_read_json(args.request, "screening request"))
    groups = run_screen(model, requests, args.max_depth, args.k)
    conds = [rc for g in groups for rc in g]
    _write(Path(args.out), {
        "conditions.json": _conditions_json(conds),
        "contingencies.csv": _csv(CONTINGENCY_HEADER, contingency_rows("network", conds)),
    })
    for rq, g in zip(requests, groups):
        print(f"{rq.source} -> {rq.sink} via {rq.series_line}: {len(g)} radial conditions"
              + (f", lowest outage count {g[0].outage_count}" if g else ""))
    return EXIT_OK


def cmd_scan(args) -> int:
    model = load_network(args.network)
    rq = scan_request(_read_json(args.request, "scan request"))
    band = parse_band(args.band) if args.band else None
    results = run_scan(model, rq, band)
    files = {f"scan_{slug(r.scenario.name)}.csv": r.to_csv()
             for r in results if isinstance(r, ScanResult)}
    files["summary.csv"] = _csv(DAMPING_HEADER[1:], [row[1:] for row in damping_rows("", results)])
    header = ["Wind Farm Operation Scenario", "Transmission Side Scenario", "Crossover (Hz)",
              "Cumulative R (Ohm)", "Classification"]
    table = _table(header, _summary_lines(results)) + "\n"
    files["summary.txt"] = table
    _write(Path(args.out), files)
    print(table, end="")
    return EXIT_OK


def cmd_compare(args) -> int:
    if not args.network_after:
        raise UsageError("compare needs --network-after")
    before = load_network(args.network)
    after = load_network(args.network_after)
    doc = _read_json(args.request, "compare request")
    if not isinstance(doc, dict) or "screening" not in doc or "scan" not in doc:
        raise InputError("compare request needs 'screening' and 'scan' sections")
    requests = screening_requests(doc["screening"])
    srq = scan_request(doc["scan"])
    band = parse_band(args.band) if args.band else None

    comp = ExpansionComparison()
    groups_b = run_screen(before, requests, args.max_depth, args.k)
    groups_a = run_screen(after, requests, args.max_depth, args.k)
    for gb, ga in zip(groups_b, groups_a):
        comp.conditions_before.extend(gb)
        comp.conditions_after.extend(ga)
        comp.matched.extend(match_conditions(gb, ga))
    comp.scans_before = run_scan(before, srq, band)
    comp.scans_after = run_scan(after, srq, band, after=True)
    try:
        comp.damping = pair_damping(comp.scans_before, comp.scans_after)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    files: dict[str, str] = {}
    for fmt in ("text", "json", "csv"):
        files.update(emit_report(comp, fmt))
    _write(Path(args.out), files)
    v = comp.verdicts
    print(f"outage count index: {v['outage_count']}")
    print(f"damping index: {v['damping']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssrscreen", description="SSR risk screening before and after a transmission expansion.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, request_help):
        sp.add_argument("--network", required=True, help="network file (JSON)")
        sp.add_argument("--request", required=True, help=request_help)
        sp.add_argument("--out", required=True, help="output directory for artifacts")
        sp.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    s = sub.add_parser("screen", help="enumerate radial conditions and their contingencies")
    common(s, "screening request: {source, sink, series_line, max_depth, k} or a list of them")
    s.add_argument("--max-depth", type=int, help=f"DFS depth bound in branches (default {DEFAULT_MAX_DEPTH})")
    s.add_argument("--k", type=int, help=f"largest outage count kept (default {DEFAULT_K})")
    s.set_defaults(func=cmd_screen)

    s = sub.add_parser("scan", help="frequency scan at the POI for each scenario")
    common(s, "scan request: {poi, band, wind_farm, scenarios}")
    s.add_argument("--band", help="start:end:step in Hz (default 5:59:0.1)")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("compare", help="screen and scan both networks and compare the indices")
    common(s, "compare request: {screening: ..., scan: ...}")
    s.add_argument("--network-after", help="network file after the expansion")
    s.add_argument("--band", help="start:end:step in Hz (default 5:59:0.1)")
    s.add_argument("--max-depth", type=int, help="DFS depth bound in branches")
    s.add_argument("--k", type=int, help="largest outage count kept")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = os.environ.get("SSRSCREEN_LOG_LEVEL", "WARNING").upper()
    if args.verbose:
        level = "INFO" if args.verbose == 1 else "DEBUG"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ssrscreen: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"ssrscreen: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"ssrscreen: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
