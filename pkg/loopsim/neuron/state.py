from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Tuple


@dataclass(frozen=True)
class EnergyLedger:
    """Energy per stage (J); every entry is non-negative"""
    spd: float = 0.0
    junctions: float = 0.0
    plasticity: float = 0.0
    htron: float = 0.0
    ntron: float = 0.0
    led_capacitive: float = 0.0
    led_injection: float = 0.0
    joule: float = 0.0

    RECEIVER = ("spd", "junctions")
    TRANSMITTER = ("htron", "ntron", "led_capacitive", "led_injection", "joule")

    def add(self, **entries: float) -> "EnergyLedger":
        updated = {}
        for name, value in entries.items():
            if value < 0:
                raise ValueError(f"negative energy for stage '{name}'")
            updated[name] = getattr(self, name) + value
        return replace(self, **updated)

    def merge(self, other: "EnergyLedger") -> "EnergyLedger":
        return self.add(**other.to_dict())

    @property
    def receiver(self) -> float:
        return sum(getattr(self, n) for n in self.RECEIVER)

    @property
    def transmitter(self) -> float:
        return sum(getattr(self, n) for n in self.TRANSMITTER)

    @property
    def total(self) -> float:
        return sum(getattr(self, f.name) for f in fields(self))

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class NeuronState:
    i_ni: float = 0.0
    refractory_until: float = 0.0
    firing_count: int = 0
    energy_ledger: EnergyLedger = field(default_factory=EnergyLedger)

    def evolve(self, **changes) -> "NeuronState":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["energy_ledger"] = self.energy_ledger.to_dict()
        return data


@dataclass(frozen=True)
class NeuronalFiringEvent:
    t: float
    n_photons: int
    requested_photons: int
    e_amp: float
    eta_amp: float
    pulse_duration: float
    chain_delay: float
    breakdown: Tuple[Tuple[str, float], ...] = ()

    HEADER = ("t_fire", "n_photons", "E_amp")

    def row(self):
        return [self.t, self.n_photons, self.e_amp]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["breakdown"] = dict(self.breakdown)
        return data
