from .core import (chain_violations, fire, integrate_ni, record_plasticity, record_synaptic, reset_synapses,
                   threshold_check)
from .state import EnergyLedger, NeuronalFiringEvent, NeuronState

__all__ = [
    "chain_violations", "fire", "integrate_ni", "record_plasticity", "record_synaptic", "reset_synapses",
    "threshold_check", "EnergyLedger", "NeuronalFiringEvent", "NeuronState",
]
