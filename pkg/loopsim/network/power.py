"""Power accounting for network runs and the die / wafer scale presets"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..config.models import Drive, LoopsimConfig, NetworkConfig, NeuronParams, ResetPolicy, SinkFanout
from ..errors import DomainError
from ..synapse.core import contribution_per_event
from ..synapse.transducer import BehavioralTransducer
from .events import SpikeRecord
from .rates import log_uniform, one_over_f_rates

logger = logging.getLogger(__name__)

# documented, not simulated
CRYOSTAT_BASE_POWER = 1e3
CRYOSTAT_POWER_PER_WATT = 1e3

DIE_NEURONS = 8100
DIE_AREA = 1e-4
WAFER_NEURONS = 1_000_000
WAFER_SYNAPSES_PER_NEURON = 200
WAFER_AREA = math.pi * 0.15 ** 2
RATE_RANGE = (100.0, 20e6)
FANOUT_RANGE = (20, 1000)
EVENTS_TO_THRESHOLD = 5
PRESET_DURATION = 10e-6
FANOUT_STREAM = 2


class PowerReport(BaseModel):
    duration: float = Field(..., gt=0, description="s")
    neurons: int = Field(..., ge=0, description="Represented neurons (after scaling)")
    scale: float = Field(1.0, gt=0)
    transmitter_power: float = Field(..., ge=0, description="Σ E_amp / duration (W)")
    receiver_power: float = Field(..., ge=0, description="Σ synaptic event energy / duration (W)")
    update_power: float = Field(..., ge=0, description="Σ STDP update energy / duration (W)")
    static_power: float = Field(0.0, ge=0, description="W")
    total: float = Field(..., ge=0, description="W")
    area: float = Field(..., gt=0, description="m²")
    power_density: float = Field(..., ge=0, description="W/m²")
    cryostat_power: float = Field(..., ge=0, description="Documented cooling overhead (W), not part of total")


def power_report(record: SpikeRecord, config: NetworkConfig, duration: float) -> PowerReport:
    if not duration > 0:
        raise DomainError(f"power report needs a positive duration, got {duration}")
    scale = config.scale
    transmitter = record.amplifier_energy / duration * scale
    receiver = record.synaptic_energy / duration * scale
    update = record.plasticity_energy / duration * scale
    neurons = int(round(len(config.neurons) * scale))
    static = config.static_power_per_neuron * neurons
    total = transmitter + receiver + update + static
    return PowerReport(
        duration=duration, neurons=neurons, scale=scale,
        transmitter_power=transmitter, receiver_power=receiver, update_power=update, static_power=static,
        total=total, area=config.die_area, power_density=total / config.die_area,
        cryostat_power=CRYOSTAT_BASE_POWER + CRYOSTAT_POWER_PER_WATT * total,
    )


@dataclass(frozen=True)
class ScalePreset:
    name: str
    description: str
    config: LoopsimConfig
    t_end: float


def _preset_neuron(config: LoopsimConfig) -> NeuronParams:
    """A neuron with one strong drive synapse and one undriven plastic synapse.

    The threshold bias sits half a strong event below the crossing after
    EVENTS_TO_THRESHOLD events; SI loops are purged on firing.
    """
    base = config.synapse
    drive = base.model_copy(update={"initial_weight": base.n_levels - 1, "plastic": False})
    update = base.model_copy(update={"initial_weight": 0, "plastic": True})
    neuron = config.neuron
    n_strong = BehavioralTransducer(config.calibration).fluxon_yield(drive.bias_max)
    step = contribution_per_event(drive, n_strong, neuron.ni_inductance)
    threshold = neuron.jth.critical_current - (EVENTS_TO_THRESHOLD - 0.5) * step
    if threshold < 0:
        raise DomainError(f"{EVENTS_TO_THRESHOLD} strong events overshoot the thresholding junction")
    return neuron.model_copy(update={"synapses": [drive, update], "threshold_bias": threshold,
                                     "reset_policy": ResetPolicy.PURGE_SI})


def _driven_network(neuron: NeuronParams, rates: np.ndarray, fanouts: np.ndarray, seed: int,
                    area: float, scale: float) -> NetworkConfig:
    neurons = [neuron.model_copy(update={"fanout": int(f)}) for f in fanouts]
    return NetworkConfig(
        neurons=neurons,
        sinks=[SinkFanout(source=i, count=int(f)) for i, f in enumerate(fanouts)],
        drives=[Drive(neuron=i, synapse=0, rate=float(r)) for i, r in enumerate(rates)],
        die_area=area, seed=seed, scale=scale,
    )


def die_preset(config: LoopsimConfig, seed: Optional[int] = None, n: int = DIE_NEURONS,
               t_end: float = PRESET_DURATION) -> ScalePreset:
    """8100 neurons on 1 cm² with 1/f drive rates and rate-anticorrelated fanouts"""
    seed = config.seed if seed is None else seed
    rates = one_over_f_rates(n, *RATE_RANGE, seed=seed)
    fanouts = np.rint(log_uniform(n, *FANOUT_RANGE, seed=seed, key=FANOUT_STREAM)).astype(int)
    # busiest neurons get the smallest fanouts
    ordered = np.empty(n, dtype=int)
    ordered[np.argsort(rates, kind="stable")] = np.sort(fanouts)[::-1]
    network = _driven_network(_preset_neuron(config), rates, ordered, seed, DIE_AREA, 1.0)
    logger.info("Die preset: %d neurons, mean fanout %.1f, median drive rate %.3g Hz",
                n, ordered.mean() if n else 0.0, float(np.median(rates)) if n else 0.0)
    return ScalePreset(name="die", description=f"{n} neurons on a 1 cm die",
                       config=config.model_copy(update={"network": network}), t_end=t_end)


def wafer_preset(config: LoopsimConfig, seed: Optional[int] = None, sample: int = 1000,
                 t_end: float = PRESET_DURATION) -> ScalePreset:
    """A neuron sample with fanout 200, scaled to 10⁶ neurons on a 300 mm wafer"""
    seed = config.seed if seed is None else seed
    rates = one_over_f_rates(sample, *RATE_RANGE, seed=seed)
    fanouts = np.full(sample, WAFER_SYNAPSES_PER_NEURON, dtype=int)
    network = _driven_network(_preset_neuron(config), rates, fanouts, seed, WAFER_AREA, WAFER_NEURONS / sample)
    return ScalePreset(name="wafer",
                       description=f"{sample} sampled neurons scaled to {WAFER_NEURONS} on a 300 mm wafer",
                       config=config.model_copy(update={"network": network}), t_end=t_end)
