from .models import (
    CONSTANTS, AmplifierEfficiencyModel, BiasAnchor, CalibrationTable, Drive, Edge, HtronParams,
    JunctionParams, LedParams, LoopsimConfig, NetworkConfig, NeuronParams, NtronParams,
    PhysicalConstants, ResetPolicy, SimulationMode, SinkFanout, SolverConfig, SolverMethod, SpdParams, StdpKernel,
    SynapseParams, TransducerParams, TransmitterParams,
)
from .loader import apply_overrides, config_hash, load_config, load_raw, read_json, validate_config

__all__ = [
    "CONSTANTS", "AmplifierEfficiencyModel", "BiasAnchor", "CalibrationTable", "Drive", "Edge",
    "HtronParams", "JunctionParams", "LedParams", "LoopsimConfig", "NetworkConfig", "NeuronParams",
    "NtronParams", "PhysicalConstants", "ResetPolicy", "SimulationMode", "SinkFanout", "SolverConfig", "SolverMethod",
    "SpdParams", "StdpKernel", "SynapseParams", "TransducerParams", "TransmitterParams",
    "apply_overrides", "config_hash", "load_config", "load_raw", "read_json", "validate_config",
]
