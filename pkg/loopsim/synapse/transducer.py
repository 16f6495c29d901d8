import logging
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..config.models import CONSTANTS, CalibrationTable, SolverConfig, SynapseParams, TransducerParams
from ..errors import DomainError
from ..junction.templates import run_transducer

logger = logging.getLogger(__name__)

RANGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TransductionResult:
    n_fluxons: int
    junction_slips: int
    energy: float


class Transducer(ABC):
    """Photon-to-fluxon conversion of one synaptic firing event"""

    @abstractmethod
    def fluxon_yield(self, bias: float) -> int:
        """Fluxons added to the SI loop by one detection at synaptic bias `bias`"""
        pass

    def junction_slips(self, bias: float, params: SynapseParams) -> int:
        return self.fluxon_yield(bias) * params.slips_per_fluxon

    def effective_yield(self, bias: float, i_si: float, params: SynapseParams) -> int:
        if not params.si_feedback:
            return self.fluxon_yield(bias)
        return self.fluxon_yield(bias - i_si)

    def transduce(self, bias: float, params: SynapseParams, i_si: float = 0.0) -> TransductionResult:
        n = self.effective_yield(bias, i_si, params)
        if params.si_feedback:
            slips = n * params.slips_per_fluxon
        else:
            slips = self.junction_slips(bias, params)
        energy = params.spd.detection_energy + slips * params.jj.critical_current * CONSTANTS.flux_quantum
        return TransductionResult(n_fluxons=n, junction_slips=slips, energy=energy)


class BehavioralTransducer(Transducer):
    """Piecewise-linear interpolation through the device-tier anchor table"""

    def __init__(self, table: CalibrationTable, strict: bool = True):
        self.table = table
        self.strict = strict
        self._bias = np.array([a.bias for a in table.anchors])
        self._fluxons = np.array([a.fluxons for a in table.anchors], dtype=float)

    def fluxon_yield(self, bias: float) -> int:
        lo, hi = self.table.bias_range
        if bias < lo - RANGE_TOLERANCE or bias > hi + RANGE_TOLERANCE:
            if self.strict:
                raise DomainError(f"bias {bias:.4g} A outside calibrated range [{lo:.3g}, {hi:.3g}] A")
            if bias < lo:
                return 0
        return int(round(float(np.interp(bias, self._bias, self._fluxons))))

    def effective_yield(self, bias: float, i_si: float, params: SynapseParams) -> int:
        if not params.si_feedback:
            return self.fluxon_yield(bias)
        effective = bias - i_si
        if effective < self.table.bias_range[0]:
            return 0
        return self.fluxon_yield(effective)


class DeviceTransducer(Transducer):
    """Runs the transducer circuit template; results are cached per bias"""

    def __init__(self, params: TransducerParams, solver: SolverConfig):
        self.params = params
        self.solver = solver
        self._cache: Dict[float, Tuple[int, int]] = {}
        self._lock = threading.Lock()

    def _run(self, bias: float) -> Tuple[int, int]:
        key = round(bias, 15)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        run = run_transducer(self.params, bias, self.solver)
        result = (max(run.n_fluxons, 0), max(run.junction_slips, 0))
        logger.info("Device transducer at %.3g A: %d fluxons", bias, result[0])
        with self._lock:
            self._cache[key] = result
        return result

    def fluxon_yield(self, bias: float) -> int:
        if bias <= 0:
            return 0
        return self._run(bias)[0]

    def junction_slips(self, bias: float, params: SynapseParams) -> int:
        if bias <= 0:
            return 0
        return self._run(bias)[1]
