from .calibration import CalibrationResult, anchor_table, calibrate, fluxon_estimate
from .circuit import Branch, CompiledCircuit, CurrentSource, ElementKind, Hotspot, LoopCircuit, MutualCoupling
from .physics import fluxon_rate, loop_storage_capacity, plasma_frequency, rsj_mean_voltage
from .solver import JunctionState, Trace, count_fluxons, integrate_transient
from .templates import (StdpRun, TransducerRun, ni_current, ni_integration, run_stdp_cell, run_transducer,
                        single_junction, stdp_cell, storage_cell, stored_fluxons, transducer, transducer_window)

__all__ = [
    "Branch", "CompiledCircuit", "CurrentSource", "ElementKind", "Hotspot", "LoopCircuit", "MutualCoupling",
    "JunctionState", "Trace", "count_fluxons", "integrate_transient",
    "fluxon_rate", "loop_storage_capacity", "plasma_frequency", "rsj_mean_voltage",
    "TransducerRun", "ni_current", "ni_integration", "run_transducer", "single_junction", "storage_cell",
    "stored_fluxons", "transducer", "transducer_window", "StdpRun", "run_stdp_cell", "stdp_cell",
    "CalibrationResult", "anchor_table", "calibrate", "fluxon_estimate",
]
