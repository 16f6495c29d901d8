"""Event types exchanged between neuron shards and the record a run produces"""

from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Tuple

from ..neuron.state import EnergyLedger, NeuronalFiringEvent
from ..synapse.state import PlasticityEvent, SynapticFiringEvent

SynapseKey = Tuple[int, int]


class EventKind(IntEnum):
    """Ordering among events sharing (t, source, edge)"""
    PHOTON = 0
    DRIVE = 1
    REFRACTORY_END = 2


@dataclass(frozen=True, order=True)
class QueuedEvent:
    """Heap entry; the field order is the tie-breaking order"""
    t: float
    source: int
    edge: int
    kind: EventKind
    seq: int
    target: int = field(compare=False)
    synapse: int = field(compare=False, default=-1)
    n_photons: int = field(compare=False, default=0)


@dataclass(frozen=True)
class PhotonEvent:
    t_arrival: float
    edge: int
    n_photons: int
    t_fire: float = 0.0
    emitted: int = 0

    HEADER = ("edge", "t_fire", "t_arrival", "emitted", "delivered")

    def row(self) -> List[float]:
        return [self.edge, self.t_fire, self.t_arrival, self.emitted, self.n_photons]


@dataclass(frozen=True)
class SinkActivity:
    """Aggregated terminal-synapse events caused by one neuron's emissions"""
    events: int = 0
    energy: float = 0.0

    def add(self, events: int, energy: float) -> "SinkActivity":
        return SinkActivity(self.events + events, self.energy + energy)


@dataclass
class SpikeRecord:
    """Everything a network run observed, keyed by neuron and (neuron, synapse)"""
    t_end: float
    seed: int
    mode: str
    firings: Dict[int, List[NeuronalFiringEvent]] = field(default_factory=dict)
    synaptic: Dict[SynapseKey, List[SynapticFiringEvent]] = field(default_factory=dict)
    plasticity: Dict[SynapseKey, List[PlasticityEvent]] = field(default_factory=dict)
    photons: List[PhotonEvent] = field(default_factory=list)
    sinks: Dict[int, SinkActivity] = field(default_factory=dict)
    ledgers: Dict[int, EnergyLedger] = field(default_factory=dict)
    final_si: Dict[SynapseKey, float] = field(default_factory=dict)
    final_weights: Dict[SynapseKey, int] = field(default_factory=dict)
    ni_trace: List[Tuple[float, int, float]] = field(default_factory=list)
    processed_events: int = 0
    aborted: bool = False

    def firing_times(self, neuron: int) -> List[float]:
        return [e.t for e in self.firings.get(neuron, [])]

    def synaptic_times(self, neuron: int, synapse: int) -> List[float]:
        return [e.t for e in self.synaptic.get((neuron, synapse), []) if e.n_fluxons > 0]

    @property
    def counts(self) -> Dict[str, int]:
        return {
            "firings": sum(len(v) for v in self.firings.values()),
            "synaptic_events": sum(1 for v in self.synaptic.values() for e in v if e.energy > 0),
            "plasticity_events": sum(len(v) for v in self.plasticity.values()),
            "photon_events": len(self.photons),
            "sink_events": sum(s.events for s in self.sinks.values()),
            "processed_events": self.processed_events,
        }

    @property
    def amplifier_energy(self) -> float:
        return sum(e.e_amp for events in self.firings.values() for e in events)

    @property
    def synaptic_energy(self) -> float:
        network = sum(e.energy for events in self.synaptic.values() for e in events)
        return network + sum(s.energy for s in self.sinks.values())

    @property
    def plasticity_energy(self) -> float:
        return sum(e.energy for events in self.plasticity.values() for e in events)

    def spike_rows(self) -> List[List[float]]:
        rows = [[neuron] + e.row() for neuron, events in self.firings.items() for e in events]
        return sorted(rows, key=lambda r: (r[1], r[0]))

    def synaptic_rows(self) -> List[List[float]]:
        rows = [[n, s] + e.row() for (n, s), events in self.synaptic.items() for e in events]
        return sorted(rows, key=lambda r: (r[2], r[0], r[1]))

    def plasticity_rows(self) -> List[List[float]]:
        rows = [[n, s] + e.row() for (n, s), events in self.plasticity.items() for e in events]
        return sorted(rows, key=lambda r: (r[2], r[0], r[1]))

    def summary(self) -> Dict[str, Any]:
        return {
            "t_end": self.t_end,
            "seed": self.seed,
            "mode": self.mode,
            "aborted": self.aborted,
            "counts": self.counts,
            "energy": {
                "amplifier": self.amplifier_energy,
                "synaptic": self.synaptic_energy,
                "plasticity": self.plasticity_energy,
            },
            "final_si": {f"{n}.{s}": v for (n, s), v in sorted(self.final_si.items())},
            "final_weights": {f"{n}.{s}": v for (n, s), v in sorted(self.final_weights.items())},
            "photons": {
                "requested": sum(e.requested_photons for events in self.firings.values() for e in events),
                "emitted": sum(e.n_photons for events in self.firings.values() for e in events),
            },
        }

    def to_csv(self, out_dir: Path, prefix: str = "") -> List[Path]:
        """Write spikes, synaptic events and (when present) plasticity and I_ni tables"""
        from ..store.records import write_table

        out_dir = Path(out_dir)
        written = [
            write_table(out_dir / f"{prefix}spikes.csv", ("neuron",) + NeuronalFiringEvent.HEADER, self.spike_rows()),
            write_table(out_dir / f"{prefix}synaptic_events.csv", ("neuron", "synapse") + SynapticFiringEvent.HEADER,
                        self.synaptic_rows()),
        ]
        if self.plasticity:
            written.append(write_table(out_dir / f"{prefix}plasticity_events.csv",
                                       ("neuron", "synapse") + PlasticityEvent.HEADER, self.plasticity_rows()))
        if self.ni_trace:
            written.append(write_table(out_dir / f"{prefix}ni_trace.csv", ("t", "neuron", "i_ni"),
                                       [list(r) for r in self.ni_trace]))
        return written
