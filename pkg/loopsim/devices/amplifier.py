"""Total efficiency of the J_ro → nTron → hTron → LED amplifier chain.

E_amp = E_fixed + N_ph·e·V_led·(1 + κ)/η_qe and η_amp = N_ph·hν/E_amp.
"""

from typing import Iterable

import numpy as np

from ..config.models import CONSTANTS, AmplifierEfficiencyModel, LedParams
from ..errors import DomainError


def amplifier_energy(model: AmplifierEfficiencyModel, led: LedParams, n_photons: float) -> float:
    if n_photons < 0:
        raise DomainError("photon count must be non-negative")
    per_photon = CONSTANTS.electron_charge * led.drive_voltage * (1 + model.joule_overhead) / led.quantum_efficiency
    return model.fixed_energy + n_photons * per_photon


def amplifier_efficiency(model: AmplifierEfficiencyModel, led: LedParams, n_photons: float) -> float:
    if n_photons == 0:
        return 0.0
    return n_photons * led.photon_energy / amplifier_energy(model, led, n_photons)


def efficiency_asymptote(model: AmplifierEfficiencyModel, led: LedParams) -> float:
    """Large-N limit η_qe·(hν/eV_led)/(1 + κ)"""
    return (led.quantum_efficiency * led.photon_energy
            / (CONSTANTS.electron_charge * led.drive_voltage) / (1 + model.joule_overhead))


def crossover_photons(model: AmplifierEfficiencyModel, led: LedParams) -> float:
    """Photon count at which the per-photon energy equals E_fixed"""
    per_photon = CONSTANTS.electron_charge * led.drive_voltage * (1 + model.joule_overhead) / led.quantum_efficiency
    return model.fixed_energy / per_photon


def efficiency_curve(model: AmplifierEfficiencyModel, led: LedParams, n_photons: Iterable[float]) -> np.ndarray:
    return np.array([amplifier_efficiency(model, led, n) for n in n_photons])
