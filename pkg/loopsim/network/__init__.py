from .events import EventKind, PhotonEvent, QueuedEvent, SinkActivity, SpikeRecord
from .power import (CRYOSTAT_BASE_POWER, CRYOSTAT_POWER_PER_WATT, PowerReport, ScalePreset, die_preset, power_report,
                    wafer_preset)
from .rates import log_uniform, one_over_f_rates
from .simulator import DEVICE_NEURON_LIMIT, NeuronShard, SimulationMode, edge_delay, make_transducer, run

__all__ = [
    "EventKind", "PhotonEvent", "QueuedEvent", "SinkActivity", "SpikeRecord",
    "CRYOSTAT_BASE_POWER", "CRYOSTAT_POWER_PER_WATT", "PowerReport", "ScalePreset", "die_preset", "power_report",
    "wafer_preset", "log_uniform", "one_over_f_rates",
    "DEVICE_NEURON_LIMIT", "NeuronShard", "SimulationMode", "edge_delay", "make_transducer", "run",
]
