"""Step models of the transmitter's superconducting switches"""

from dataclasses import dataclass
from typing import NamedTuple

from ..config.models import HtronParams, NtronParams, TransmitterParams


class HtronResponse(NamedTuple):
    resistance: float
    delay: float
    energy: float


def ntron_response(params: NtronParams, gate_current: float) -> float:
    """Channel resistance: on_resistance at or above the gate threshold, else 0"""
    if gate_current >= params.gate_threshold:
        return params.on_resistance
    return 0.0


def htron_response(params: HtronParams, gate_current: float) -> HtronResponse:
    if gate_current >= params.gate_threshold:
        return HtronResponse(params.on_resistance, params.switch_time, params.switch_energy)
    return HtronResponse(0.0, 0.0, 0.0)


def jro_gate_current(params: TransmitterParams, latched: bool) -> float:
    """Current the relaxation-oscillator junction diverts to the nTron gate"""
    return params.jro_bias if latched else 0.0


@dataclass(frozen=True)
class ChainResponse:
    """Outcome of one pass through J_ro, nTron and hTron"""
    gate_current: float
    ntron_resistance: float
    channel_current: float
    htron: HtronResponse

    @property
    def drives_led(self) -> bool:
        return self.htron.resistance > 0


def transmitter_chain(params: TransmitterParams, latched: bool = True) -> ChainResponse:
    """Propagate a J_ro latch event through the amplifier chain"""
    gate = jro_gate_current(params, latched)
    r_ntron = ntron_response(params.ntron, gate)
    channel = params.ntron.channel_current if r_ntron > 0 else 0.0
    return ChainResponse(gate_current=gate, ntron_resistance=r_ntron, channel_current=channel,
                         htron=htron_response(params.htron, channel))
