from .amplifier import (amplifier_efficiency, amplifier_energy, crossover_photons, efficiency_asymptote,
                        efficiency_curve)
from .led import EmissionMode, PhotonPulse, capacitance_floor, injected_carriers, led_emit, pulse_for_photons
from .spd import SpdMode, SpdState, spd_detect, spd_diverted_current
from .switches import ChainResponse, HtronResponse, htron_response, jro_gate_current, ntron_response, transmitter_chain

__all__ = [
    "amplifier_efficiency", "amplifier_energy", "crossover_photons", "efficiency_asymptote", "efficiency_curve",
    "EmissionMode", "PhotonPulse", "capacitance_floor", "injected_carriers", "led_emit", "pulse_for_photons",
    "SpdMode", "SpdState", "spd_detect", "spd_diverted_current",
    "ChainResponse", "HtronResponse", "htron_response", "jro_gate_current", "ntron_response", "transmitter_chain",
]
