import logging
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..config.models import NeuronParams, ResetPolicy
from ..devices.amplifier import amplifier_efficiency, amplifier_energy
from ..devices.led import EmissionMode, capacitance_floor, led_emit, pulse_for_photons
from ..devices.switches import transmitter_chain
from ..errors import ConfigError, DomainError, Violation
from ..synapse.core import advance, ni_contribution, purge
from ..synapse.state import SynapseState, SynapticFiringEvent
from .state import NeuronalFiringEvent, NeuronState

logger = logging.getLogger(__name__)


def integrate_ni(state: NeuronState, synapse_states: Sequence[SynapseState], params: NeuronParams,
                 t: float) -> NeuronState:
    """Recompute I_ni as the signed sum of SI-loop contributions at time t.

    Under the clear_ni reset policy the NI loop reads zero until the
    refractory window has passed.
    """
    if params.reset_policy == ResetPolicy.CLEAR_NI and t < state.refractory_until:
        return state.evolve(i_ni=0.0)
    total = 0.0
    for syn_state, syn in zip(synapse_states, params.synapses):
        total += ni_contribution(advance(syn_state, syn, t), syn, params.ni_inductance)
    return state.evolve(i_ni=total)


def threshold_check(state: NeuronState, params: NeuronParams, t: float) -> bool:
    """I_th + I_ni ≥ Ic(J_th), outside the refractory window"""
    if t < state.refractory_until:
        return False
    return params.threshold_bias + state.i_ni >= params.jth.critical_current


def record_synaptic(state: NeuronState, event: SynapticFiringEvent, params: NeuronParams,
                    synapse: int) -> NeuronState:
    """Book a synaptic firing event's energy on the receiving neuron"""
    if event.energy == 0:
        return state
    spd = params.synapses[synapse].spd.detection_energy
    return state.evolve(energy_ledger=state.energy_ledger.add(spd=spd, junctions=event.energy - spd))


def record_plasticity(state: NeuronState, energy: float) -> NeuronState:
    return state.evolve(energy_ledger=state.energy_ledger.add(plasticity=energy))


def fire(state: NeuronState, params: NeuronParams, t: float,
         rng: Union[None, int, np.random.Generator] = None,
         mode: EmissionMode = EmissionMode.EXPECTED) -> Tuple[NeuronState, NeuronalFiringEvent]:
    """Run the transmitter chain and emit a photon pulse.

    J_ro latches and diverts its bias to the nTron gate; the nTron channel
    current switches the hTron, whose on-resistance drives the LED for the
    pulse duration matching fanout·photons_per_synapse.
    """
    if not threshold_check(state, params, t):
        raise DomainError(f"fire at t={t:.6g} s without threshold crossing or inside refractory window")

    tx = params.transmitter
    chain = transmitter_chain(tx)
    if not chain.drives_led:
        raise ConfigError("transmitter chain does not reach the LED", violations=tx.violations())

    target = params.photon_target
    duration = pulse_for_photons(tx.led, target)
    pulse = led_emit(tx.led, duration, rng, mode)
    if mode == EmissionMode.EXPECTED and pulse.n_photons != target:
        logger.warning("Neuron emits %d photons instead of %d (capacitance floor %d)",
                       pulse.n_photons, target, capacitance_floor(tx.led))

    model = tx.amplifier
    n = pulse.n_photons
    e_amp = amplifier_energy(model, tx.led, n)
    injection = e_amp - model.fixed_energy
    stages = {
        "htron": chain.htron.energy,
        "ntron": tx.ntron.gate_energy,
        "led_capacitive": 0.5 * tx.led.capacitance * tx.led.drive_voltage ** 2,
        "led_injection": injection / (1 + model.joule_overhead),
        "joule": injection * model.joule_overhead / (1 + model.joule_overhead),
    }
    event = NeuronalFiringEvent(t=t, n_photons=n, requested_photons=target, e_amp=e_amp,
                                eta_amp=amplifier_efficiency(model, tx.led, n), pulse_duration=duration,
                                chain_delay=chain.htron.delay, breakdown=tuple(stages.items()))
    state = state.evolve(i_ni=0.0, refractory_until=t + params.refractory, firing_count=state.firing_count + 1,
                         energy_ledger=state.energy_ledger.add(**stages))
    return state, event


def reset_synapses(synapse_states: Sequence[SynapseState], params: NeuronParams) -> List[SynapseState]:
    """Apply the post-firing reset policy to the neuron's SI loops"""
    if params.reset_policy == ResetPolicy.PURGE_SI:
        return [purge(s) for s in synapse_states]
    return list(synapse_states)


def chain_violations(params: NeuronParams) -> List[Violation]:
    return params.transmitter.violations("neuron.transmitter")
