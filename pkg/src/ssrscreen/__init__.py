"""Sub-synchronous resonance screening for transmission expansion studies.

Two indices are computed for a generation resource before and after a
network change: the outage count of contingencies that leave the resource
radially connected to a series-compensated line, and the cumulative
resistance at the reactance crossover of a frequency scan at the point of
interconnection.
"""

from ssrscreen.model import (
    Branch,
    Bus,
    Contingency,
    Machine,
    ModelError,
    NetworkModel,
    ShuntDevice,
    WindFarmParams,
    apply_contingency,
    parse_contingency,
    parse_network,
    serialize_network,
)
from ssrscreen.topology import RadialCondition, screen, verify_radiality
from ssrscreen.freqscan import (
    NumericalError,
    ScanResult,
    ScanScenario,
    driving_point_impedance,
    frequency_scan,
    sensitivity_sweep,
    wind_farm_impedance,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "Bus",
    "Contingency",
    "Machine",
    "ModelError",
    "NetworkModel",
    "NumericalError",
    "RadialCondition",
    "ScanResult",
    "ScanScenario",
    "ShuntDevice",
    "WindFarmParams",
    "apply_contingency",
    "driving_point_impedance",
    "frequency_scan",
    "parse_contingency",
    "parse_network",
    "screen",
    "sensitivity_sweep",
    "serialize_network",
    "verify_radiality",
    "wind_farm_impedance",
]
