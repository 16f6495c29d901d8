"""Closed-form junction and loop relations"""

import math

from ..config.models import CONSTANTS, JunctionParams
from ..errors import DomainError


def rsj_mean_voltage(params: JunctionParams, bias: float) -> float:
    """Time-averaged voltage of an overdamped junction under constant bias.

    Zero on the superconducting branch (bias ≤ Ic), R·sqrt(I² − Ic²) above it.
    """
    if params.capacitance != 0:
        raise DomainError("rsj_mean_voltage holds in the overdamped limit only (C_j = 0)")
    if bias < 0:
        raise DomainError(f"bias must be non-negative, got {bias}")
    ic = params.critical_current
    if bias <= ic:
        return 0.0
    return params.shunt_resistance * math.sqrt(bias * bias - ic * ic)


def fluxon_rate(params: JunctionParams, bias: float) -> float:
    """Mean 2π-slip rate (1/s) of an overdamped junction: V/Φ0"""
    return rsj_mean_voltage(params, bias) / CONSTANTS.flux_quantum


def loop_storage_capacity(inductance: float, critical_current: float) -> float:
    """β_L/2π = L·Ic/Φ0, the number of fluxons a loop can hold"""
    if inductance <= 0 or critical_current <= 0:
        raise DomainError("inductance and critical current must be positive")
    return inductance * critical_current / CONSTANTS.flux_quantum


def plasma_frequency(params: JunctionParams) -> float:
    """Junction plasma frequency (Hz); infinite for C_j = 0"""
    if params.capacitance == 0:
        return math.inf
    omega = math.sqrt(2 * math.pi * params.critical_current / (CONSTANTS.flux_quantum * params.capacitance))
    return omega / (2 * math.pi)

