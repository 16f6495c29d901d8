import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional

from ..config.models import SpdParams
from ..errors import DomainError


class SpdMode(Enum):
    SUPERCONDUCTING = "superconducting"
    HOTSPOT = "hotspot"
    RECOVERING = "recovering"


@dataclass(frozen=True)
class SpdState:
    """Detector state as of its last detection"""
    mode: SpdMode = SpdMode.SUPERCONDUCTING
    t_last_detection: Optional[float] = None
    diverted_current: float = 0.0

    def at(self, params: SpdParams, t: float) -> "SpdState":
        """The same detector observed at time t"""
        if self.t_last_detection is None or t < self.t_last_detection:
            return self
        dt = t - self.t_last_detection
        diverted = spd_diverted_current(params, dt)
        if dt < params.hotspot_duration:
            mode = SpdMode.HOTSPOT
        elif dt < params.dead_time:
            mode = SpdMode.RECOVERING
        else:
            mode = SpdMode.SUPERCONDUCTING
        return replace(self, mode=mode, diverted_current=diverted)

    def is_armed(self, params: SpdParams, t: float) -> bool:
        return self.at(params, t).mode == SpdMode.SUPERCONDUCTING

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "t_last_detection": self.t_last_detection,
            "diverted_current": self.diverted_current,
        }


def spd_diverted_current(params: SpdParams, dt: float) -> float:
    """Current diverted from the SPD into r_spd, Δt after a detection"""
    if dt < 0:
        raise DomainError(f"time since detection must be non-negative, got {dt}")
    if dt <= params.hotspot_duration:
        return params.bias_current
    return params.bias_current * math.exp(-(dt - params.hotspot_duration) / params.tau)


def spd_detect(state: SpdState, params: SpdParams, t: float, draw: float) -> SpdState:
    """Register a photon arriving at t; `draw` is a uniform variate in [0, 1).

    A detector still in its hotspot or recovery (dead) phase, a failed draw,
    or an arrival earlier than the last detection leaves the state unchanged.
    """
    if state.t_last_detection is not None and t < state.t_last_detection:
        return state
    if not state.is_armed(params, t):
        return state
    if draw >= params.detection_efficiency:
        return state
    return SpdState(mode=SpdMode.HOTSPOT, t_last_detection=t, diverted_current=params.bias_current)
