from .core import advance, contribution_per_event, ni_contribution, purge, si_decay, synaptic_fire
from .state import PlasticityEvent, SynapseState, SynapticFiringEvent
from .transducer import BehavioralTransducer, DeviceTransducer, Transducer, TransductionResult
from .weights import (SpikeOrder, WritePolarity, anti_hebbian_pair, apply_stdp, hebbian_pair, plasticity_energy,
                      stdp_magnitude, stdp_update, weight_to_bias, weight_write)

__all__ = [
    "advance", "contribution_per_event", "ni_contribution", "purge", "si_decay", "synaptic_fire",
    "PlasticityEvent", "SynapseState", "SynapticFiringEvent",
    "BehavioralTransducer", "DeviceTransducer", "Transducer", "TransductionResult",
    "SpikeOrder", "WritePolarity", "anti_hebbian_pair", "apply_stdp", "hebbian_pair", "plasticity_energy",
    "stdp_magnitude", "stdp_update", "weight_to_bias", "weight_write",
]
