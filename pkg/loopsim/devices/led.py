import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Union

import numpy as np

from ..config.models import CONSTANTS, LedParams
from ..errors import DomainError
from ..rng import stream

logger = logging.getLogger(__name__)

MAX_CARRIERS = 1e15
MIN_PULSE = 1e-15


class EmissionMode(Enum):
    STOCHASTIC = "stochastic"
    EXPECTED = "expected"


@dataclass(frozen=True)
class PhotonPulse:
    n_photons: int
    electrical_energy: float
    injected_carriers: float
    pulse_duration: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_photons": self.n_photons,
            "electrical_energy": self.electrical_energy,
            "injected_carriers": self.injected_carriers,
            "pulse_duration": self.pulse_duration,
        }


def injected_carriers(params: LedParams, pulse_duration: float) -> float:
    """(I_LED·T + C_led·V_led)/e"""
    return (params.drive_current * pulse_duration
            + params.capacitance * params.drive_voltage) / CONSTANTS.electron_charge


def led_emit(params: LedParams, pulse_duration: float,
             rng: Union[None, int, np.random.Generator] = None,
             mode: EmissionMode = EmissionMode.STOCHASTIC) -> PhotonPulse:
    """Drive the LED for `pulse_duration`.

    Stochastic mode draws Binomial(N_inj, η_qe) from `rng` (a generator or an
    integer seed); expected-value mode returns round(N_inj·η_qe).
    """
    if not pulse_duration > 0:
        raise DomainError(f"pulse duration must be positive, got {pulse_duration}")
    carriers = injected_carriers(params, pulse_duration)
    if not math.isfinite(carriers) or carriers > MAX_CARRIERS:
        raise DomainError(f"pulse of {pulse_duration:.3g} s injects {carriers:.3g} carriers (limit {MAX_CARRIERS:.0e})")

    if mode == EmissionMode.EXPECTED:
        n = int(round(carriers * params.quantum_efficiency))
    else:
        if rng is None:
            raise DomainError("stochastic emission needs a generator or seed")
        generator = stream(rng) if isinstance(rng, (int, np.integer)) else rng
        n = int(generator.binomial(int(round(carriers)), params.quantum_efficiency))

    energy = (carriers * CONSTANTS.electron_charge * params.drive_voltage
              + 0.5 * params.capacitance * params.drive_voltage ** 2)
    return PhotonPulse(n_photons=n, electrical_energy=energy, injected_carriers=carriers,
                       pulse_duration=pulse_duration)


def pulse_for_photons(params: LedParams, n_photons: int) -> float:
    """Pulse duration whose expected photon count is `n_photons`.

    The capacitive charge alone sets a floor; targets below it get the
    shortest pulse and emit more than requested.
    """
    if n_photons < 0:
        raise DomainError("photon target must be non-negative")
    charge = n_photons / params.quantum_efficiency * CONSTANTS.electron_charge
    duration = (charge - params.capacitance * params.drive_voltage) / params.drive_current
    if duration < MIN_PULSE:
        logger.warning("Photon target %d is below the capacitance floor of %d photons",
                       n_photons, capacitance_floor(params))
        return MIN_PULSE
    return duration


def capacitance_floor(params: LedParams) -> int:
    return int(round(params.capacitance * params.drive_voltage / CONSTANTS.electron_charge
                     * params.quantum_efficiency))
