import logging
import math
from typing import Tuple

from ..config.models import CONSTANTS, SynapseParams
from ..devices.spd import spd_detect
from ..errors import ConfigError, DomainError, Violation
from .state import SynapseState, SynapticFiringEvent
from .transducer import Transducer
from .weights import weight_to_bias

logger = logging.getLogger(__name__)


def si_decay(state: SynapseState, params: SynapseParams, dt: float) -> SynapseState:
    """Leak of the SI-loop current through r_si over dt"""
    if dt < 0:
        raise DomainError(f"decay interval must be non-negative, got {dt}")
    if params.si_resistance == 0 or dt == 0 or state.i_si == 0:
        return state.evolve(t_update=state.t_update + dt)
    i_si = state.i_si * math.exp(-dt / params.tau_si)
    return state.evolve(i_si=i_si, t_update=state.t_update + dt,
                        saturated=state.saturated and i_si >= params.max_si_current)


def advance(state: SynapseState, params: SynapseParams, t: float) -> SynapseState:
    """Bring the SI-loop current up to time t"""
    if t <= state.t_update:
        return state
    return si_decay(state, params, t - state.t_update)


def synaptic_fire(state: SynapseState, params: SynapseParams, t: float,
                  transducer: Transducer) -> Tuple[SynapseState, SynapticFiringEvent]:
    """Photon detection at t: add the transduced fluxons to the SI loop.

    A detector that is not armed returns a zero-fluxon, zero-energy event.
    The SI loop saturates silently at its capacity; the event carries a flag.
    """
    state = advance(state, params, t)
    bias = weight_to_bias(params, state.weight)
    spd = spd_detect(state.spd, params.spd, t, 0.0)
    if spd is state.spd:
        return state, SynapticFiringEvent(t=t, n_fluxons=0, delta_i_si=0.0, energy=0.0,
                                          weight=state.weight, bias=bias, saturated=state.saturated)

    result = transducer.transduce(bias, params, state.i_si)
    quantum = CONSTANTS.flux_quantum / params.si_inductance
    room = max(0, int(math.floor((params.max_si_current - state.i_si) / quantum + 1e-9)))
    added = min(result.n_fluxons, room)
    saturated = added < result.n_fluxons
    if saturated and not state.saturated:
        logger.warning("SI loop saturated at %.4g A (t=%.4g s)", state.i_si + added * quantum, t)
    delta = added * quantum
    state = state.evolve(i_si=state.i_si + delta, spd=spd, saturated=saturated)
    event = SynapticFiringEvent(t=t, n_fluxons=added, delta_i_si=delta, energy=result.energy,
                                weight=state.weight, bias=bias, saturated=saturated)
    return state, event


def purge(state: SynapseState) -> SynapseState:
    return state.evolve(i_si=0.0, saturated=False)


def ni_contribution(state: SynapseState, params: SynapseParams, l_ni: float) -> float:
    """Current coupled into the NI loop: sign·(M_sy/L_ni)·I_si"""
    if params.mutual_inductance > math.sqrt(params.si_inductance * l_ni):
        raise ConfigError("coupling violation", violations=[
            Violation("synapse.mutual_inductance", "|M_sy| exceeds sqrt(L_si·L_ni)")])
    return params.coupling_sign * params.mutual_inductance / l_ni * state.i_si


def contribution_per_event(params: SynapseParams, n_fluxons: int, l_ni: float) -> float:
    """NI-loop current added by one unsaturated event of n fluxons"""
    delta_si = n_fluxons * CONSTANTS.flux_quantum / params.si_inductance
    return params.coupling_sign * params.mutual_inductance / l_ni * delta_si
