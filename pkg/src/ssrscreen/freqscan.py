"""Sub-synchronous frequency scan at the point of interconnection.

Network elements use constant resistance, inductive reactance scaled by
f/f0 and series-capacitor reactance scaled by f0/f. The studied wind farm
is a single-cage induction equivalent, so only the induction generator
effect shows up as negative resistance; converter control interaction is
not modelled.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ssrscreen.model import (
    Branch,
    Contingency,
    ModelError,
    NetworkModel,
    WindFarmParams,
    apply_contingency,
)

log = logging.getLogger(__name__)

F0 = 60.0
GRID_ADMITTANCE = -1e6j  # per unit, inductive so the infinite bus adds no resistance
DEFAULT_BAND = (5.0, 59.0, 0.1)
REFINE_TOL = 1e-3


class NumericalError(RuntimeError):
    """Singular admittance matrix or another failed numerical step."""


class SlipPoleError(ValueError):
    """Scan frequency equals the rotor electrical frequency (zero slip)."""


@dataclass(frozen=True)
class NodalAdmittance:
    matrix: sp.csc_matrix
    buses: tuple[str, ...]

    def index(self, bus: str) -> int:
        return self.buses.index(bus)


def _machine_admittance(model: NetworkModel, m, f: float) -> complex:
    if m.kind == "infinite-grid":
        return GRID_ADMITTANCE
    if m.kind == "conventional":
        x_sys = m.x_subtransient * model.system_mva_base / m.mva_base
        return 1.0 / (1j * x_sys * f / F0)
    return 0j  # wind farms other than the study unit are left open


def branch_impedance(br: Branch, f: float) -> complex:
    """Series impedance r + jx(f/f0) - jxc(f0/f) in per unit."""
    h = f / F0
    return br.r * h ** br.r_freq_exponent + 1j * br.x * h - 1j * br.xc / h


def network_admittance(model: NetworkModel, f: float, exclude_machines_at: Sequence[str] = (),
                       buses: Sequence[str] | None = None) -> NodalAdmittance:
    """Nodal admittance matrix Y(f) in per unit on the system base.

    Machines at buses in ``exclude_machines_at`` are left out. ``buses``
    restricts the matrix to a subset (an island); branches leaving the
    subset are ignored.
    """
    if f <= 0:
        raise ValueError("frequency must be > 0")
    order = tuple(buses) if buses is not None else tuple(b.id for b in model.buses)
    idx = {b: i for i, b in enumerate(order)}
    h = f / F0
    rows, cols, vals = [], [], []

    def add(i, j, y):
        rows.append(i)
        cols.append(j)
        vals.append(y)

    for br in model.in_service_branches():
        i, j = idx.get(br.from_bus), idx.get(br.to_bus)
        if i is None or j is None:
            continue
        z = branch_impedance(br, f)
        if z == 0:
            raise NumericalError(f"branch {br.key} has zero impedance at {f} Hz")
        y = 1.0 / z
        ych = 1j * br.b_shunt / 2 * h
        add(i, i, y + ych)
        add(j, j, y + ych)
        add(i, j, -y)
        add(j, i, -y)
    for sh in model.shunts:
        if sh.in_service and sh.bus in idx:
            add(idx[sh.bus], idx[sh.bus], 1j * sh.b * h)
    skip = set(exclude_machines_at)
    for m in model.machines:
        if m.bus in idx and m.bus not in skip:
            y = _machine_admittance(model, m, f)
            if y:
                add(idx[m.bus], idx[m.bus], y)
    n = len(order)
    Y = sp.csc_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))
    empty = np.flatnonzero(np.abs(Y).sum(axis=1).A1 == 0)
    if len(empty):
        raise NumericalError(f"isolated bus {order[empty[0]]!r} makes Y({f} Hz) singular")
    return NodalAdmittance(Y, order)


def _island(model: NetworkModel, bus: str) -> list[str]:
    for comp in model.islands():
        if bus in comp:
            return [b.id for b in model.buses if b.id in comp]
    raise ModelError(f"unknown bus {bus!r}")


def impedance_base(model: NetworkModel, bus: str) -> float:
    return model.bus(bus).base_kv ** 2 / model.system_mva_base


def driving_point_impedance(model: NetworkModel, poi: str, f: float,
                            island: Sequence[str] | None = None) -> complex:
    """Thevenin impedance in Ohms seen at ``poi``, study unit excluded."""
    buses = island if island is not None else _island(model, poi)
    Y = network_admittance(model, f, exclude_machines_at=(poi,), buses=buses)
    rhs = np.zeros(len(buses), dtype=complex)
    rhs[Y.index(poi)] = 1.0
    try:
        v = spla.splu(Y.matrix).solve(rhs)
    except RuntimeError as exc:
        raise NumericalError(f"island {sorted(buses)} has no path to ground at {f} Hz: {exc}") from None
    z = v[Y.index(poi)]
    if not np.isfinite(z):
        raise NumericalError(f"island {sorted(buses)} has no path to ground at {f} Hz")
    return complex(z) * impedance_base(model, poi)


# --- wind farm ---------------------------------------------------------------

@dataclass(frozen=True)
class ScanScenario:
    turbines_in_service_fraction: float = 1.0
    dispatch_fraction: float = 1.0
    shunt_status: str | tuple[str, ...] = "none"  # "none", "all" or bus ids
    contingency: Contingency = field(default_factory=lambda: Contingency("base case"))
    name: str = ""

    def __post_init__(self) -> None:
        if not 0 < self.turbines_in_service_fraction <= 1:
            raise ValueError("turbines_in_service_fraction must lie in (0, 1]")
        if not 0 <= self.dispatch_fraction <= 1:
            raise ValueError("dispatch_fraction must lie in [0, 1]")
        if isinstance(self.shunt_status, str) and self.shunt_status not in ("none", "all"):
            raise ValueError(f"unknown shunt_status {self.shunt_status!r}")
        if not self.name:
            object.__setattr__(self, "name", f"{self.farm_label} / {self.shunt_label}")

    @property
    def farm_label(self) -> str:
        t = round(self.turbines_in_service_fraction * 100)
        d = round(self.dispatch_fraction * 100)
        return f"{t:g}% turbines at {d:g}% Dispatch"

    @property
    def shunt_label(self) -> str:
        if self.shunt_status == "none":
            return "No Shunt"
        if self.shunt_status == "all":
            return "All Shunt"
        return "Shunts " + ",".join(self.shunt_status)


def slip(f: float, f_rotor: float) -> float:
    return (f - f_rotor) / f


def rotor_branch_impedance(params: WindFarmParams, f: float, f_rotor: float) -> complex:
    """Rotor branch r_r/s + j x_r f/f0 in per unit; zero slip is a pole."""
    s = slip(f, f_rotor)
    if s == 0:
        raise SlipPoleError(f"zero slip at {f} Hz")
    return params.r_r / s + 1j * params.x_r * f / F0


def turbine_impedance(params: WindFarmParams, f: float, f_rotor: float) -> complex:
    h = f / F0
    zm = 1j * params.x_m * h
    zr = rotor_branch_impedance(params, f, f_rotor)
    return params.r_s + 1j * params.x_s * h + zm * zr / (zm + zr)


def wind_farm_impedance(params: WindFarmParams, scenario: ScanScenario, f: float,
                        base_kv: float, mva_base: float) -> complex:
    """Aggregate farm impedance in Ohms.

    ``mva_base`` is the rating of the whole farm; each turbine carries
    ``mva_base / n_turbines_total`` and the in-service turbines act in
    parallel.
    """
    if f <= 0:
        raise ValueError("frequency must be > 0")
    f_rotor = params.rotor_frequency(scenario.dispatch_fraction)
    z_turbine = turbine_impedance(params, f, f_rotor) * base_kv ** 2 * params.n_turbines_total / mva_base
    return z_turbine / (params.n_turbines_total * scenario.turbines_in_service_fraction)


# --- scan --------------------------------------------------------------------

@dataclass(frozen=True)
class Crossover:
    frequency: float
    r_cum: float
    kind: str             # "series" (X rises through zero) or "parallel"

    @property
    def classification(self) -> str:
        return "undamped" if self.r_cum < 0 else "damped"


@dataclass
class ScanResult:
    scenario: ScanScenario
    samples: np.ndarray   # columns f, R_net, X_net, R_cum, X_cum
    crossovers: list[Crossover]
    skipped: list[float] = field(default_factory=list)
    include_parallel: bool = False

    @property
    def counted(self) -> list[Crossover]:
        return [c for c in self.crossovers if self.include_parallel or c.kind == "series"]

    @property
    def damping(self) -> Crossover | None:
        """Counted crossover with the lowest cumulative resistance."""
        counted = self.counted
        return min(counted, key=lambda c: (c.r_cum, c.frequency)) if counted else None

    def to_csv(self) -> str:
        lines = ["f_hz,r_net_ohm,x_net_ohm,r_cum_ohm,x_cum_ohm"]
        for row in self.samples:
            lines.append(",".join(f"{v:.9g}" for v in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ScanError:
    scenario: ScanScenario
    message: str
    numerical: bool = False  # solver failure rather than bad input


def apply_scenario(model: NetworkModel, scenario: ScanScenario) -> NetworkModel:
    post = apply_contingency(model, scenario.contingency)
    status = scenario.shunt_status
    if not isinstance(status, str):
        known = {s.bus for s in post.shunts if s.switchable}
        missing = set(status) - known
        if missing:
            raise ModelError(f"no switchable shunt at {sorted(missing)}")
    shunts = []
    for s in post.shunts:
        if s.switchable:
            on = status == "all" or (not isinstance(status, str) and s.bus in status)
            s = replace(s, status="in" if on else "out")
        shunts.append(s)
    return replace(post, shunts=tuple(shunts))


def _frequency_grid(f_start: float, f_end: float, f_step: float) -> np.ndarray:
    if not (0 < f_start < f_end < F0):
        raise ValueError("band must satisfy 0 < start < end < 60 Hz")
    if f_step <= 0:
        raise ValueError("step must be > 0")
    n = int(math.floor((f_end - f_start) / f_step + 1e-9)) + 1
    return np.round(f_start + f_step * np.arange(n), 10)


def study_farm(model: NetworkModel, poi: str):
    for m in model.machines:
        if m.bus == poi and m.kind == "wind-farm":
            return m
    return None


def frequency_scan(model: NetworkModel, poi: str, params: WindFarmParams | None,
                   scenario: ScanScenario, f_start: float = DEFAULT_BAND[0],
                   f_end: float = DEFAULT_BAND[1], f_step: float = DEFAULT_BAND[2], *,
                   farm: Callable[[float], complex] | None = None,
                   farm_mva: float | None = None, include_parallel: bool = False,
                   refine_tol: float = REFINE_TOL) -> ScanResult:
    """Scan R and X at ``poi`` and locate reactance crossovers.

    ``farm`` overrides the generator-side impedance with any f -> Ohm
    function. Otherwise the induction equivalent is used, with parameters
    and rating taken from the wind farm at ``poi`` unless given.
    """
    freqs = _frequency_grid(f_start, f_end, f_step)
    post = apply_scenario(model, scenario)
    island = _island(post, poi)
    if farm is None:
        machine = study_farm(model, poi)
        if params is None:
            if machine is None:
                raise ModelError(f"no wind farm at {poi!r} and no parameters given")
            params = machine.wf_params
        mva = farm_mva or (machine.mva_base if machine is not None else None)
        if mva is None:
            raise ModelError("farm MVA rating unknown")
        kv = model.bus(poi).base_kv

        def farm(f: float) -> complex:
            return wind_farm_impedance(params, scenario, f, kv, mva)

    def cumulative(f: float) -> tuple[complex, complex]:
        zn = driving_point_impedance(post, poi, f, island)
        return zn, zn + farm(f)

    rows, skipped = [], []
    for f in freqs:
        try:
            zn, zc = cumulative(float(f))
        except SlipPoleError:
            log.warning("%s: skipping %.6g Hz (zero slip)", scenario.name, f)
            skipped.append(float(f))
            continue
        rows.append((f, zn.real, zn.imag, zc.real, zc.imag))
    samples = np.array(rows, dtype=float).reshape(-1, 5)

    def x_cum(f: float) -> float:
        try:
            return cumulative(f)[1].imag
        except SlipPoleError:
            return cumulative(f + refine_tol / 10)[1].imag

    crossovers = []
    for a, b in zip(samples[:-1], samples[1:]):
        xa, xb = a[4], b[4]
        if xa < 0 <= xb:
            kind = "series"
        elif xa > 0 >= xb:
            kind = "parallel"
        else:
            continue
        lo, hi = float(a[0]), float(b[0])
        sign_lo = xa < 0
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            if (x_cum(mid) < 0) == sign_lo:
                lo = mid
            else:
                hi = mid
        fx = 0.5 * (lo + hi)
        try:
            r = cumulative(fx)[1].real
        except SlipPoleError:
            r = cumulative(fx + refine_tol / 10)[1].real
        crossovers.append(Crossover(fx, r, kind))
    return ScanResult(scenario, samples, crossovers, skipped, include_parallel)


def sensitivity_sweep(model: NetworkModel, poi: str, params: WindFarmParams | None,
                      scenarios: Sequence[ScanScenario], **scan_kw) -> list[ScanResult | ScanError]:
    """One scan per scenario, in order; failures become ``ScanError`` entries."""
    if not scenarios:
        raise ValueError("scenarios must not be empty")
    out: list[ScanResult | ScanError] = []
    for sc in scenarios:
        try:
            out.append(frequency_scan(model, poi, params, sc, **scan_kw))
        except (ModelError, NumericalError, ValueError) as exc:
            log.error("scenario %r failed: %s", sc.name, exc)
            out.append(ScanError(sc, str(exc), isinstance(exc, NumericalError)))
    return out
