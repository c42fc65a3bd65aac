"""Network data model, file format and contingency application.

All impedances are per-unit on ``system_mva_base`` and the base kV of the
terminal buses. Models are immutable; every operation returns a new model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, NamedTuple

import numpy as np

BUS_KINDS = ("station", "boundary", "external-grid", "poi")
BRANCH_ROLES = ("line", "transformer", "tertiary-stub")
MACHINE_KINDS = ("wind-farm", "conventional", "infinite-grid")
STATUSES = ("in", "out")


class ModelError(ValueError):
    """Invalid network or contingency data.

    ``line`` and ``col`` are set for syntax errors in a document.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)
        self.line = line
        self.col = col


class BranchKey(NamedTuple):
    from_bus: str
    to_bus: str
    circuit: str

    @property
    def pair(self) -> frozenset[str]:
        return frozenset((self.from_bus, self.to_bus))

    def canonical(self) -> "BranchKey":
        """Orientation-free form, terminals in lexicographic order."""
        a, b = sorted((self.from_bus, self.to_bus))
        return BranchKey(a, b, self.circuit)

    def other(self, bus: str) -> str:
        return self.to_bus if bus == self.from_bus else self.from_bus

    def __str__(self) -> str:
        return f"{self.from_bus}-{self.to_bus}/{self.circuit}"


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ModelError(message)


@dataclass(frozen=True)
class Bus:
    id: str
    base_kv: float
    kind: str = "station"

    def __post_init__(self) -> None:
        _check(isinstance(self.id, str) and self.id != "", "bus id must be a non-empty string")
        _check(self.base_kv > 0, f"bus {self.id}: base_kv must be > 0, got {self.base_kv}")
        _check(self.kind in BUS_KINDS, f"bus {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class Branch:
    from_bus: str
    to_bus: str
    circuit: str
    r: float
    x: float
    b_shunt: float = 0.0
    xc: float = 0.0
    role: str = "line"
    status: str = "in"
    # resistance scales as (f/f0)**r_freq_exponent; 0 keeps R constant
    r_freq_exponent: float = 0.0

    def __post_init__(self) -> None:
        name = f"branch {self.from_bus}-{self.to_bus}/{self.circuit}"
        _check(self.from_bus != self.to_bus, f"{name}: from and to must differ")
        _check(self.r >= 0, f"{name}: r must be >= 0")
        _check(self.b_shunt >= 0, f"{name}: b_shunt must be >= 0")
        _check(self.xc >= 0, f"{name}: xc must be >= 0")
        _check(self.role in BRANCH_ROLES, f"{name}: unknown role {self.role!r}")
        _check(self.status in STATUSES, f"{name}: status must be 'in' or 'out'")

    @property
    def key(self) -> BranchKey:
        return BranchKey(self.from_bus, self.to_bus, self.circuit)

    @property
    def in_service(self) -> bool:
        return self.status == "in"

    @property
    def series_compensated(self) -> bool:
        return self.xc > 0


@dataclass(frozen=True)
class ShuntDevice:
    bus: str
    b: float
    switchable: bool = False
    status: str = "in"

    def __post_init__(self) -> None:
        _check(self.status in STATUSES, f"shunt at {self.bus}: status must be 'in' or 'out'")

    @property
    def in_service(self) -> bool:
        return self.status == "in"


@dataclass(frozen=True)
class WindFarmParams:
    """Single-cage induction equivalent of one turbine, per unit on turbine MVA.

    ``rotor_frequency_map`` holds ``(dispatch_fraction, f_rotor_hz)`` points,
    interpolated linearly and held constant outside the given range.
    """

    n_turbines_total: int
    r_s: float
    x_s: float
    x_m: float
    r_r: float
    x_r: float
    rotor_frequency_map: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        _check(int(self.n_turbines_total) == self.n_turbines_total and self.n_turbines_total > 0,
               "n_turbines_total must be a positive integer")
        for name in ("r_s", "x_s", "x_m", "r_r", "x_r"):
            _check(getattr(self, name) > 0, f"wind farm {name} must be > 0")
        pts = self.rotor_frequency_map
        _check(len(pts) > 0, "rotor_frequency_map must not be empty")
        dispatch = [p[0] for p in pts]
        freqs = [p[1] for p in pts]
        _check(all(0 <= d <= 1 for d in dispatch), "dispatch points must lie in [0, 1]")
        _check(all(b > a for a, b in zip(dispatch, dispatch[1:])),
               "dispatch points must be strictly increasing")
        _check(all(b >= a for a, b in zip(freqs, freqs[1:])),
               "rotor frequency must be nondecreasing in dispatch")
        _check(all(0 < f < 90 for f in freqs), "rotor frequency must lie in (0, 90) Hz")

    def rotor_frequency(self, dispatch_fraction: float) -> float:
        d, f = zip(*self.rotor_frequency_map)
        return float(np.interp(dispatch_fraction, d, f))


@dataclass(frozen=True)
class Machine:
    bus: str
    kind: str
    mva_base: float
    x_subtransient: float | None = None
    wf_params: WindFarmParams | None = None

    def __post_init__(self) -> None:
        _check(self.kind in MACHINE_KINDS, f"machine at {self.bus}: unknown kind {self.kind!r}")
        _check(self.mva_base > 0, f"machine at {self.bus}: mva_base must be > 0")
        if self.kind == "wind-farm":
            _check(self.wf_params is not None, f"wind farm at {self.bus} needs wf_params")
        else:
            _check(self.x_subtransient is not None and self.x_subtransient > 0,
                   f"machine at {self.bus}: x_subtransient must be > 0")


@dataclass(frozen=True)
class Contingency:
    label: str
    outages: tuple[BranchKey, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for key in self.outages:
            c = key.canonical()
            _check(c not in seen, f"contingency {self.label!r}: duplicate outage {key}")
            seen.add(c)

    @property
    def outage_count(self) -> int:
        return len(self.outages)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "outages": [{"from": k.from_bus, "to": k.to_bus, "circuit": k.circuit}
                        for k in self.outages],
        }


@dataclass(frozen=True)
class NetworkModel:
    name: str
    system_mva_base: float
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    shunts: tuple[ShuntDevice, ...] = ()
    machines: tuple[Machine, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check(self.system_mva_base > 0, "system_mva_base must be > 0")
        bus_ids: set[str] = set()
        for bus in self.buses:
            _check(bus.id not in bus_ids, f"duplicate bus id {bus.id!r}")
            bus_ids.add(bus.id)
        index: dict[BranchKey, int] = {}
        for i, br in enumerate(self.branches):
            for end in (br.from_bus, br.to_bus):
                _check(end in bus_ids, f"branch {br.key} references unknown bus {end!r}")
            c = br.key.canonical()
            _check(c not in index, f"duplicate branch (from, to, circuit) {br.key}")
            index[c] = i
        for sh in self.shunts:
            _check(sh.bus in bus_ids, f"shunt references unknown bus {sh.bus!r}")
        for m in self.machines:
            _check(m.bus in bus_ids, f"machine references unknown bus {m.bus!r}")
        object.__setattr__(self, "_index", index)

    def bus(self, bus_id: str) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise ModelError(f"unknown bus {bus_id!r}")

    def has_bus(self, bus_id: str) -> bool:
        return any(b.id == bus_id for b in self.buses)

    def branch(self, key: BranchKey | tuple[str, str, str]) -> Branch:
        """Look up a branch by key in either orientation."""
        i = self._index.get(BranchKey(*key).canonical())
        if i is None:
            raise ModelError(f"unknown branch {BranchKey(*key)}")
        return self.branches[i]

    def in_service_branches(self) -> list[Branch]:
        return [br for br in self.branches if br.in_service]

    def series_compensated(self) -> list[Branch]:
        return [br for br in self.branches if br.in_service and br.series_compensated]

    def islands(self) -> list[set[str]]:
        """Connected components of the in-service branch graph."""
        adj: dict[str, set[str]] = {b.id: set() for b in self.buses}
        for br in self.in_service_branches():
            adj[br.from_bus].add(br.to_bus)
            adj[br.to_bus].add(br.from_bus)
        seen: set[str] = set()
        comps = []
        for b in self.buses:
            if b.id in seen:
                continue
            stack, comp = [b.id], {b.id}
            while stack:
                for nb in adj[stack.pop()]:
                    if nb not in comp:
                        comp.add(nb)
                        stack.append(nb)
            seen |= comp
            comps.append(comp)
        return comps

    @property
    def multi_island(self) -> bool:
        return len(self.islands()) > 1


def apply_contingency(model: NetworkModel, ctg: Contingency) -> NetworkModel:
    """Return a copy of ``model`` with the outaged branches set out of service."""
    out = set()
    for key in ctg.outages:
        br = model.branch(key)
        if not br.in_service:
            raise ModelError(f"contingency {ctg.label!r}: branch {key} is already out of service")
        out.add(br.key)
    branches = tuple(replace(br, status="out") if br.key in out else br for br in model.branches)
    return replace(model, branches=branches)


# --- file format -----------------------------------------------------------

def _load_json(document: str) -> Any:
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None


def _req(d: dict, key: str, where: str) -> Any:
    if not isinstance(d, dict):
        raise ModelError(f"{where}: expected an object")
    if key not in d:
        raise ModelError(f"{where}: missing field {key!r}")
    return d[key]


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _wf_from_dict(d: dict) -> WindFarmParams:
    where = "wf_params"
    pts = tuple((_num(p[0], where), _num(p[1], where)) for p in _req(d, "rotor_frequency_map", where))
    return WindFarmParams(
        n_turbines_total=int(_req(d, "n_turbines_total", where)),
        r_s=_num(_req(d, "r_s", where), where),
        x_s=_num(_req(d, "x_s", where), where),
        x_m=_num(_req(d, "x_m", where), where),
        r_r=_num(_req(d, "r_r", where), where),
        x_r=_num(_req(d, "x_r", where), where),
        rotor_frequency_map=pts,
    )


def wind_farm_params_to_dict(p: WindFarmParams) -> dict[str, Any]:
    return {
        "n_turbines_total": p.n_turbines_total,
        "r_s": p.r_s,
        "x_s": p.x_s,
        "x_m": p.x_m,
        "r_r": p.r_r,
        "x_r": p.x_r,
        "rotor_frequency_map": [list(pt) for pt in p.rotor_frequency_map],
    }


def wind_farm_params_from_dict(d: dict) -> WindFarmParams:
    return _wf_from_dict(d)


def network_from_dict(doc: dict) -> NetworkModel:
    if not isinstance(doc, dict):
        raise ModelError("network document must be an object")
    buses = []
    for i, d in enumerate(_req(doc, "buses", "network")):
        where = f"buses[{i}]"
        buses.append(Bus(id=str(_req(d, "id", where)),
                         base_kv=_num(_req(d, "base_kv", where), where),
                         kind=d.get("kind", "station")))
    branches = []
    for i, d in enumerate(_req(doc, "branches", "network")):
        where = f"branches[{i}]"
        branches.append(Branch(
            from_bus=str(_req(d, "from", where)),
            to_bus=str(_req(d, "to", where)),
            circuit=str(_req(d, "circuit", where)),
            r=_num(_req(d, "r", where), where),
            x=_num(_req(d, "x", where), where),
            b_shunt=_num(d.get("b_shunt", 0.0), where),
            xc=_num(d.get("xc", 0.0), where),
            role=d.get("role", "line"),
            status=d.get("status", "in"),
            r_freq_exponent=_num(d.get("r_freq_exponent", 0.0), where),
        ))
    shunts = []
    for i, d in enumerate(doc.get("shunts", [])):
        where = f"shunts[{i}]"
        shunts.append(ShuntDevice(bus=str(_req(d, "bus", where)),
                                  b=_num(_req(d, "b", where), where),
                                  switchable=bool(d.get("switchable", False)),
                                  status=d.get("status", "in")))
    machines = []
    for i, d in enumerate(doc.get("machines", [])):
        where = f"machines[{i}]"
        xs = d.get("x_subtransient")
        wf = d.get("wf_params")
        machines.append(Machine(bus=str(_req(d, "bus", where)),
                                kind=_req(d, "kind", where),
                                mva_base=_num(_req(d, "mva_base", where), where),
                                x_subtransient=None if xs is None else _num(xs, where),
                                wf_params=None if wf is None else _wf_from_dict(wf)))
    return NetworkModel(
        name=str(doc.get("name", "")),
        system_mva_base=_num(_req(doc, "system_mva_base", "network"), "system_mva_base"),
        buses=tuple(buses),
        branches=tuple(branches),
        shunts=tuple(shunts),
        machines=tuple(machines),
    )


def parse_network(document: str) -> NetworkModel:
    """Parse and validate a network document (JSON text)."""
    return network_from_dict(_load_json(document))


def network_to_dict(model: NetworkModel) -> dict[str, Any]:
    branches = []
    for br in model.branches:
        d = {"from": br.from_bus, "to": br.to_bus, "circuit": br.circuit, "r": br.r, "x": br.x,
             "b_shunt": br.b_shunt, "xc": br.xc, "role": br.role, "status": br.status}
        if br.r_freq_exponent:
            d["r_freq_exponent"] = br.r_freq_exponent
        branches.append(d)
    machines = []
    for m in model.machines:
        d: dict[str, Any] = {"bus": m.bus, "kind": m.kind, "mva_base": m.mva_base}
        if m.x_subtransient is not None:
            d["x_subtransient"] = m.x_subtransient
        if m.wf_params is not None:
            d["wf_params"] = wind_farm_params_to_dict(m.wf_params)
        machines.append(d)
    return {
        "name": model.name,
        "system_mva_base": model.system_mva_base,
        "buses": [{"id": b.id, "base_kv": b.base_kv, "kind": b.kind} for b in model.buses],
        "branches": branches,
        "shunts": [{"bus": s.bus, "b": s.b, "switchable": s.switchable, "status": s.status}
                   for s in model.shunts],
        "machines": machines,
    }


def serialize_network(model: NetworkModel) -> str:
    return json.dumps(network_to_dict(model), indent=2) + "\n"


def contingency_from_dict(d: dict) -> Contingency:
    outages = []
    for i, o in enumerate(_req(d, "outages", "contingency")):
        where = f"outages[{i}]"
        outages.append(BranchKey(str(_req(o, "from", where)), str(_req(o, "to", where)),
                                 str(_req(o, "circuit", where))))
    return Contingency(label=str(d.get("label", "")), outages=tuple(outages))


def parse_contingency(document: str) -> Contingency:
    return contingency_from_dict(_load_json(document))


def make_contingency(label: str, outages: Iterable[tuple[str, str, str]]) -> Contingency:
    return Contingency(label, tuple(BranchKey(*o) for o in outages))
