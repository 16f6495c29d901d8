"""Calibration of the transducer template against the fluxon-yield targets.

The J_sf shunt resistance (at fixed β_c) sets the low-bias yield; the JTL
bias then shapes the high-bias yield. The two are alternated for a few
rounds, after which the anchor table for the behavioral tier is regenerated.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

from scipy.optimize import brentq

from ..config.models import (CONSTANTS, BiasAnchor, CalibrationTable, JunctionParams, SolverConfig,
                             TransducerParams)
from ..errors import DomainError
from .templates import run_transducer

logger = logging.getLogger(__name__)

ANCHOR_BIASES = (0.8e-6, 1.0e-6, 1.5e-6, 2.0e-6, 2.5e-6, 3.0e-6, 3.5e-6, 4.0e-6)
BETA_C = 0.3


@dataclass
class CalibrationResult:
    transducer: TransducerParams
    table: CalibrationTable
    history: List[Tuple[str, float, float]] = field(default_factory=list)

    def fragment(self) -> Dict[str, Any]:
        """Configuration fragment replacing the shipped calibrated values"""
        return {
            "transducer": {
                "jsf": self.transducer.jsf.model_dump(mode="json"),
                "jtl_bias": self.transducer.jtl_bias,
            },
            "calibration": self.table.model_dump(mode="json"),
        }


def fluxon_estimate(params: TransducerParams, bias: float, solver: SolverConfig) -> float:
    """Flux added to the SI loop by one detection, in units of Φ0 (not rounded)"""
    run = run_transducer(params, bias, solver)
    return run.delta_si * params.si_inductance / CONSTANTS.flux_quantum


def _with_shunt(params: TransducerParams, resistance: float) -> TransducerParams:
    jsf = JunctionParams.with_beta_c(params.jsf.critical_current, resistance, BETA_C)
    return params.model_copy(update={"jsf": jsf})


def _solve(f: Callable[[float], float], lo: float, hi: float, knob: str, xtol: float) -> float:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        raise DomainError(f"calibration target for {knob} not bracketed on [{lo:.3g}, {hi:.3g}] "
                          f"(residuals {f_lo:.3g}, {f_hi:.3g})")
    return brentq(f, lo, hi, xtol=xtol, maxiter=40)


def calibrate(params: TransducerParams, solver: SolverConfig, targets: CalibrationTable,
              rounds: int = 2, shunt_range: Tuple[float, float] = (1.0, 20.0),
              anchor_biases: Sequence[float] = ANCHOR_BIASES) -> CalibrationResult:
    low, high = targets.target_low, targets.target_high
    history: List[Tuple[str, float, float]] = []
    current = params

    for k in range(rounds):
        def low_residual(r: float) -> float:
            n = fluxon_estimate(_with_shunt(current, r), low.bias, solver)
            history.append(("jsf.shunt_resistance", r, n))
            return n - low.fluxons

        shunt = _solve(low_residual, *shunt_range, knob="J_sf shunt", xtol=1e-3)
        current = _with_shunt(current, shunt)
        logger.info("Round %d: J_sf shunt %.4g Ω (C_j %.4g F)", k + 1, shunt, current.jsf.capacitance)

        def high_residual(bias: float) -> float:
            n = fluxon_estimate(current.model_copy(update={"jtl_bias": bias}), high.bias, solver)
            history.append(("jtl_bias", bias, n))
            return n - high.fluxons

        jtl_bias = _solve(high_residual, 0.0, 0.9 * current.jtl.critical_current, knob="JTL bias", xtol=1e-9)
        current = current.model_copy(update={"jtl_bias": jtl_bias})
        logger.info("Round %d: JTL bias %.4g A", k + 1, jtl_bias)

    table = anchor_table(current, solver, targets, anchor_biases)
    return CalibrationResult(transducer=current, table=table, history=history)


def anchor_table(params: TransducerParams, solver: SolverConfig, targets: CalibrationTable,
                 biases: Sequence[float] = ANCHOR_BIASES) -> CalibrationTable:
    """Device-tier yields at each anchor bias, forced non-decreasing"""
    anchors = []
    floor = 0
    for bias in sorted(biases):
        n = run_transducer(params, bias, solver).n_fluxons
        if n < floor:
            logger.warning("Yield %d at %.3g A below previous anchor %d; clamped", n, bias, floor)
            n = floor
        floor = n
        anchors.append(BiasAnchor(bias=bias, fluxons=n))
    return CalibrationTable(anchors=anchors, target_low=targets.target_low, target_high=targets.target_high)
