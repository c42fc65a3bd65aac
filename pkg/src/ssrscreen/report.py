"""Before/after comparison of the two SSR indices and report rendering."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

from ssrscreen.freqscan import Crossover, ScanError, ScanResult
from ssrscreen.topology import RadialCondition

IMPROVES = "improves"
WORSENS = "worsens"
MIXED = "mixed"
UNCHANGED = "unchanged"

UNDAMPED = "Undamped SSCI/IGE"
DAMPED = "Damped Oscillation"
NO_CROSSOVER = "No crossover"

CONTINGENCY_HEADER = ["Case", "Contingency #", "From Bus Number", "To Bus Number", "Ckt ID",
                      "Comments", "Outage Count"]
DAMPING_HEADER = ["Case", "Wind Farm Operation Scenario", "Transmission Side Scenario",
                  "Cross-over Frequency X (Hz)", "Cumulative R (Ohm)", "Observation"]
MATCHED_HEADER = ["Sink", "Path", "Outaged Bus Pairs", "Outage Count Before", "Outage Count After"]


def _same(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def observation(r_cum: float | None) -> str:
    if r_cum is None:
        return NO_CROSSOVER
    return UNDAMPED if r_cum < 0 else DAMPED


@dataclass(frozen=True)
class MatchedCondition:
    key: tuple
    before: RadialCondition | None
    after: RadialCondition | None

    @property
    def count_before(self) -> int | None:
        return None if self.before is None else self.before.outage_count

    @property
    def count_after(self) -> int | None:
        return None if self.after is None else self.after.outage_count

    @property
    def two_sided(self) -> bool:
        return self.before is not None and self.after is not None


def _designation(rc: RadialCondition) -> tuple:
    return rc.source, rc.sink, rc.series_line.canonical()


def match_conditions(before: Sequence[RadialCondition],
                     after: Sequence[RadialCondition]) -> list[MatchedCondition]:
    """Pair conditions with the same station-level identity.

    The identity is the sink, the retained corridor and the outaged bus
    pairs, all at station level, so added parallel circuits change only the
    outage count. Unmatched conditions come back one-sided.
    """
    designations = {_designation(rc) for rc in (*before, *after)}
    if len(designations) > 1:
        raise ValueError(f"conditions come from different designations: {sorted(designations)}")
    b = {rc.station_key(): rc for rc in before}
    a = {rc.station_key(): rc for rc in after}
    keys = sorted(set(b) | set(a), key=lambda k: (
        min(x.outage_count for x in (b.get(k), a.get(k)) if x is not None), k))
    return [MatchedCondition(k, b.get(k), a.get(k)) for k in keys]


def outage_count_verdict(matched: Sequence[MatchedCondition | tuple[int, int]]) -> str:
    """Higher outage counts after the change mean lower SSR likelihood."""
    pairs = []
    for m in matched:
        if isinstance(m, MatchedCondition):
            if m.two_sided:
                pairs.append((m.count_before, m.count_after))
        else:
            pairs.append(tuple(m))
    if all(b == a for b, a in pairs):
        return UNCHANGED
    if all(a >= b for b, a in pairs):
        return IMPROVES
    if all(a <= b for b, a in pairs):
        return WORSENS
    return MIXED


@dataclass(frozen=True)
class DampingRow:
    scenario: str
    farm_label: str
    shunt_label: str
    before: Crossover | None
    after: Crossover | None

    @property
    def r_before(self) -> float | None:
        return None if self.before is None else self.before.r_cum

    @property
    def r_after(self) -> float | None:
        return None if self.after is None else self.after.r_cum


def pair_damping(before: Sequence[ScanResult | ScanError],
                 after: Sequence[ScanResult | ScanError]) -> list[DampingRow]:
    b = {r.scenario.name: r for r in before if isinstance(r, ScanResult)}
    a = {r.scenario.name: r for r in after if isinstance(r, ScanResult)}
    if set(b) != set(a):
        diff = sorted(set(b) ^ set(a))
        raise ValueError(f"scenario sets differ: {diff}")
    rows = []
    for r in before:
        if isinstance(r, ScanResult):
            sc = r.scenario
            rows.append(DampingRow(sc.name, sc.farm_label, sc.shunt_label,
                                   r.damping, a[sc.name].damping))
    return rows


def damping_verdict(rows: Sequence[DampingRow | tuple[float, float]]) -> str:
    """Lower cumulative resistance after the change means less damping.

    ``worsens`` needs every resistance to drop or hold with at least one
    strict drop where the resistance is negative; ``improves`` mirrors it.
    Rows without a crossover on either side are left out.
    """
    pairs = []
    for row in rows:
        rb, ra = (row.r_before, row.r_after) if isinstance(row, DampingRow) else row
        if rb is not None and ra is not None:
            pairs.append((rb, ra))
    if all(_same(b, a) for b, a in pairs):
        return UNCHANGED
    negative = [(b, a) for b, a in pairs if b < 0 or a < 0]
    if all(a < b or _same(a, b) for b, a in pairs) and any(a < b and not _same(a, b)
                                                          for b, a in negative):
        return WORSENS
    if all(a > b or _same(a, b) for b, a in pairs) and any(a > b and not _same(a, b)
                                                          for b, a in negative):
        return IMPROVES
    return MIXED


@dataclass
class ExpansionComparison:
    conditions_before: list[RadialCondition] = field(default_factory=list)
    conditions_after: list[RadialCondition] = field(default_factory=list)
    matched: list[MatchedCondition] = field(default_factory=list)
    scans_before: list[ScanResult | ScanError] = field(default_factory=list)
    scans_after: list[ScanResult | ScanError] = field(default_factory=list)
    damping: list[DampingRow] = field(default_factory=list)

    @property
    def verdicts(self) -> dict[str, str]:
        return {"outage_count": outage_count_verdict(self.matched),
                "damping": damping_verdict(self.damping)}


# --- rendering ---------------------------------------------------------------

def _g(v: float | None) -> str:
    return "" if v is None else f"{v:.9g}"


def slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_").lower()


def contingency_rows(case: str, conditions: Sequence[RadialCondition]) -> list[list[str]]:
    rows = []
    for rc in conditions:
        comment = f"Radial path from {rc.source} to {rc.sink}"
        outages = rc.contingency.outages or (None,)
        for i, o in enumerate(outages):
            rows.append([
                case,
                rc.contingency.label if i == 0 else "",
                "" if o is None else o.from_bus,
                "" if o is None else o.to_bus,
                "" if o is None else o.circuit,
                comment if i == 0 else "",
                str(rc.outage_count) if i == 0 else "",
            ])
    return rows


def damping_rows(case: str, results: Sequence[ScanResult | ScanError]) -> list[list[str]]:
    rows = []
    for r in results:
        sc = r.scenario
        if isinstance(r, ScanError):
            rows.append([case, sc.farm_label, sc.shunt_label, "", "", f"Error: {r.message}"])
            continue
        d = r.damping
        rows.append([case, sc.farm_label, sc.shunt_label,
                     _g(None if d is None else d.frequency), _g(None if d is None else d.r_cum),
                     observation(None if d is None else d.r_cum)])
    return rows


def _csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else \
        [len(h) for h in header]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header).rstrip(), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*r).rstrip() for r in rows]
    return "\n".join(lines)


def _matched_rows(matched: Sequence[MatchedCondition]) -> list[list[str]]:
    rows = []
    for m in matched:
        rc = m.before or m.after
        pairs = " ".join("-".join(p) for p in m.key[2])
        rows.append([rc.sink, "-".join(rc.path.path.buses), pairs,
                     "" if m.count_before is None else str(m.count_before),
                     "" if m.count_after is None else str(m.count_after)])
    return rows


def _all_damping_rows(c: ExpansionComparison) -> list[list[str]]:
    return damping_rows("before", c.scans_before) + damping_rows("after", c.scans_after)


def _all_contingency_rows(c: ExpansionComparison) -> list[list[str]]:
    return contingency_rows("before", c.conditions_before) + contingency_rows("after", c.conditions_after)


def _as_json(c: ExpansionComparison) -> str:
    doc = {
        "topology": {
            "before": [rc.to_dict() for rc in c.conditions_before],
            "after": [rc.to_dict() for rc in c.conditions_after],
            "matched": [dict(zip(MATCHED_HEADER, r)) for r in _matched_rows(c.matched)],
        },
        "damping": [dict(zip(DAMPING_HEADER, r)) for r in _all_damping_rows(c)],
        "verdicts": c.verdicts,
    }
    return json.dumps(doc, indent=2) + "\n"


def _as_text(c: ExpansionComparison) -> str:
    v = c.verdicts
    parts = [
        "[topology]",
        _table(CONTINGENCY_HEADER, _all_contingency_rows(c)),
        "",
        _table(MATCHED_HEADER, _matched_rows(c.matched)),
        "",
        "[damping]",
        _table(DAMPING_HEADER, _all_damping_rows(c)),
        "",
        "[verdicts]",
        f"outage_count = {v['outage_count']}",
        f"damping = {v['damping']}",
    ]
    return "\n".join(parts) + "\n"


FORMATS = ("text", "csv", "json")


def emit_report(comparison: ExpansionComparison, fmt: str = "text") -> dict[str, str]:
    """Render ``comparison`` as a mapping of artifact file name to content."""
    if fmt == "text":
        return {"report.txt": _as_text(comparison)}
    if fmt == "json":
        return {"report.json": _as_json(comparison)}
    if fmt == "csv":
        out = {
            "contingencies.csv": _csv(CONTINGENCY_HEADER, _all_contingency_rows(comparison)),
            "matched.csv": _csv(MATCHED_HEADER, _matched_rows(comparison.matched)),
            "damping.csv": _csv(DAMPING_HEADER, _all_damping_rows(comparison)),
        }
        for case, results in (("before", comparison.scans_before), ("after", comparison.scans_after)):
            for r in results:
                if isinstance(r, ScanResult):
                    out[f"scan_{case}_{slug(r.scenario.name)}.csv"] = r.to_csv()
        return out
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


def read_damping_csv(text: str) -> list[dict]:
    """Parse damping.csv back into rows with numeric fields as floats."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        for col in ("Cross-over Frequency X (Hz)", "Cumulative R (Ohm)"):
            rec[col] = float(rec[col]) if rec[col] else None
        rows.append(rec)
    return rows


def read_contingencies_csv(text: str) -> list[dict]:
    """Regroup contingencies.csv into one record per condition."""
    out: list[dict] = []
    for rec in csv.DictReader(io.StringIO(text)):
        if rec["Contingency #"]:
            out.append({"case": rec["Case"], "label": rec["Contingency #"],
                        "comments": rec["Comments"], "outage_count": int(rec["Outage Count"]),
                        "outages": []})
        if rec["From Bus Number"]:
            out[-1]["outages"].append((rec["From Bus Number"], rec["To Bus Number"], rec["Ckt ID"]))
    return out
