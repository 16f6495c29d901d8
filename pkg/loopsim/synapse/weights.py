"""Synaptic weight memory: supervised writes and spike-timing-dependent updates"""

import math
from enum import Enum
from typing import Optional, Tuple

from ..config.models import CONSTANTS, StdpKernel, SynapseParams
from ..errors import DomainError
from .state import PlasticityEvent, SynapseState


class WritePolarity(Enum):
    POTENTIATE = "potentiate"
    DEPRESS = "depress"


class SpikeOrder(Enum):
    PRE_THEN_POST = "pre_then_post"
    POST_THEN_PRE = "post_then_pre"


def weight_to_bias(params: SynapseParams, w: int) -> float:
    """Synaptic bias I_sy for weight index w (linear map over the levels)"""
    if not 0 <= w <= params.n_levels - 1:
        raise DomainError(f"weight {w} outside [0, {params.n_levels - 1}]")
    return params.bias_min + w * (params.bias_max - params.bias_min) / (params.n_levels - 1)


def _clamp(params: SynapseParams, w: int) -> int:
    return max(0, min(params.n_levels - 1, w))


def weight_write(state: SynapseState, params: SynapseParams, polarity: WritePolarity) -> SynapseState:
    """Add or remove one flux quantum in the storage loop; a full or empty loop ignores the write"""
    step = 1 if polarity == WritePolarity.POTENTIATE else -1
    w = _clamp(params, state.weight + step)
    if w == state.weight:
        return state
    return state.evolve(weight=w)


def stdp_magnitude(params: SynapseParams, dt: float) -> int:
    """Levels changed by a correlated pair separated by dt"""
    if dt < 0:
        raise DomainError(f"spike separation must be non-negative, got {dt}")
    if dt >= params.stdp_window:
        return 0
    if params.stdp_kernel == StdpKernel.EXPONENTIAL:
        return int(round(params.stdp_step * math.exp(-dt / params.stdp_window)))
    return int(round(params.stdp_step * max(0.0, 1.0 - dt / params.stdp_window)))


def hebbian_pair(state: SynapseState, params: SynapseParams, t_pre: float, t_post: float) -> SynapseState:
    """Potentiating detector pair; photons in the opposite order leave the storage loop unchanged"""
    if t_post < t_pre:
        return state
    w = _clamp(params, state.weight + stdp_magnitude(params, t_post - t_pre))
    return state if w == state.weight else state.evolve(weight=w)


def anti_hebbian_pair(state: SynapseState, params: SynapseParams, t_pre: float, t_post: float) -> SynapseState:
    """Depressing detector pair, triggered by a post-synaptic photon ahead of a pre-synaptic one"""
    if t_pre < t_post:
        return state
    w = _clamp(params, state.weight - stdp_magnitude(params, t_pre - t_post))
    return state if w == state.weight else state.evolve(weight=w)


def stdp_update(state: SynapseState, params: SynapseParams, dt: float, order: SpikeOrder) -> SynapseState:
    if dt < 0:
        raise DomainError(f"spike separation must be non-negative, got {dt}")
    if order == SpikeOrder.PRE_THEN_POST:
        return hebbian_pair(state, params, 0.0, dt)
    return anti_hebbian_pair(state, params, dt, 0.0)


def plasticity_energy(params: SynapseParams, delta_w: int) -> float:
    """Two update-detector clicks plus one storage-junction fluxon per level changed"""
    return 2 * params.spd.detection_energy + abs(delta_w) * params.storage_critical_current * CONSTANTS.flux_quantum


def apply_stdp(state: SynapseState, params: SynapseParams, t: float,
               pre: Optional[float] = None, post: Optional[float] = None) -> Tuple[SynapseState, PlasticityEvent]:
    """Record a pre- or post-synaptic spike at t and run the matching detector pair.

    The tapped photons click both update detectors on their side whether or
    not a partner spike sits inside the window, so every call books at least
    2·E_spd. Without a partner the weight is unchanged.
    """
    if pre is None and post is None:
        raise DomainError("apply_stdp needs a pre or post spike time")
    if pre is not None:
        state = state.evolve(t_last_pre=pre)
        partner, order = state.t_last_post, SpikeOrder.POST_THEN_PRE
    else:
        state = state.evolve(t_last_post=post)
        partner, order = state.t_last_pre, SpikeOrder.PRE_THEN_POST
    if partner is None or t - partner >= params.stdp_window:
        return state, PlasticityEvent(t=t, delta_w=0, energy=plasticity_energy(params, 0), weight=state.weight)
    updated = stdp_update(state, params, t - partner, order)
    delta = updated.weight - state.weight
    event = PlasticityEvent(t=t, delta_w=delta, energy=plasticity_energy(params, delta), weight=updated.weight)
    return updated, event
