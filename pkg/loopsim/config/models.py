import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import constants as sc

from ..errors import Violation


class Params(BaseModel):
    """Immutable parameter block; unknown keys are rejected"""
    model_config = ConfigDict(frozen=True, extra="forbid")


class PhysicalConstants(Params):
    flux_quantum: float = Field(sc.h / (2 * sc.e), gt=0, description="Φ0 (Wb)")
    electron_charge: float = Field(sc.e, gt=0, description="e (C)")
    planck: float = Field(sc.h, gt=0, description="h (J·s)")
    speed_of_light: float = Field(sc.c, gt=0, description="c (m/s)")

    @model_validator(mode="after")
    def _flux_quantum_consistent(self):
        expected = self.planck / (2 * self.electron_charge)
        if abs(self.flux_quantum - expected) > 5e-6 * expected:
            raise ValueError("flux_quantum must equal h/(2e) to 6 significant figures")
        return self

    @property
    def phi0_over_2pi(self) -> float:
        return self.flux_quantum / (2 * math.pi)


CONSTANTS = PhysicalConstants()


class JunctionParams(Params):
    critical_current: float = Field(..., gt=0, description="Ic (A)")
    shunt_resistance: float = Field(..., gt=0, description="R (Ω)")
    capacitance: float = Field(0.0, ge=0, description="C_j (F)")
    hysteretic: bool = Field(False, description="Relaxation-oscillator (latching) junction")

    @property
    def beta_c(self) -> float:
        """Stewart-McCumber parameter 2π·Ic·R²·C/Φ0"""
        return (2 * math.pi * self.critical_current * self.shunt_resistance ** 2
                * self.capacitance / CONSTANTS.flux_quantum)

    @model_validator(mode="after")
    def _hysteresis_needs_underdamping(self):
        if self.hysteretic and self.beta_c <= 1:
            raise ValueError(f"hysteretic junction requires beta_c > 1 (got {self.beta_c:.3g})")
        return self

    @classmethod
    def with_beta_c(cls, critical_current: float, shunt_resistance: float, beta_c: float,
                    hysteretic: bool = False) -> "JunctionParams":
        capacitance = beta_c * CONSTANTS.flux_quantum / (
            2 * math.pi * critical_current * shunt_resistance ** 2)
        return cls(critical_current=critical_current, shunt_resistance=shunt_resistance,
                   capacitance=capacitance, hysteretic=hysteretic)


class SolverMethod(str, Enum):
    RADAU = "radau"
    BDF = "bdf"
    RK4 = "rk4"


class SolverConfig(Params):
    method: SolverMethod = SolverMethod.RADAU
    dt_max: float = Field(2e-12, gt=0, description="Maximum step and sampling interval (s)")
    rel_tol: float = Field(1e-6, gt=0)
    abs_tol: float = Field(1e-9, gt=0, description="Absolute tolerance; also the KCL residual bound (A)")
    t_end: float = Field(40e-9, gt=0, description="End of the simulated window (s)")
    min_step: float = Field(1e-18, gt=0, description="Step floor below which integration fails (s)")


# --- devices -----------------------------------------------------------------

class SpdParams(Params):
    inductance: float = Field(72e-9, gt=0, description="L_spd (H)")
    recovery_resistance: float = Field(2.0, gt=0, description="r_spd (Ω)")
    hotspot_resistance: float = Field(5e3, gt=0, description="r_hotspot (Ω)")
    hotspot_duration: float = Field(200e-12, gt=0, description="t_hotspot (s)")
    bias_current: float = Field(10e-6, gt=0, description="I_spd (A)")
    detection_efficiency: float = Field(1.0, ge=0, le=1)
    dead_fraction: float = Field(0.1, gt=0, lt=1,
                                 description="Detector re-arms once the diverted current falls below this fraction")

    @property
    def tau(self) -> float:
        """Recovery time constant L_spd/r_spd"""
        return self.inductance / self.recovery_resistance

    @property
    def dead_time(self) -> float:
        return self.hotspot_duration + self.tau * math.log(1.0 / self.dead_fraction)

    @property
    def detection_energy(self) -> float:
        """½·L_spd·I_spd²"""
        return 0.5 * self.inductance * self.bias_current ** 2

    @model_validator(mode="after")
    def _recovery_slower_than_hotspot(self):
        if self.tau <= self.hotspot_duration:
            raise ValueError("L_spd/r_spd must exceed the hotspot duration")
        return self


class LedParams(Params):
    capacitance: float = Field(10e-15, gt=0, description="C_led (F)")
    quantum_efficiency: float = Field(1e-3, gt=0, le=1, description="η_qe")
    drive_voltage: float = Field(1.0, gt=0.5, description="V_led (V)")
    photon_frequency: float = Field(250e12, gt=0, description="ν (Hz)")
    drive_current: float = Field(10e-6, gt=0, description="I_LED (A)")

    @property
    def photon_energy(self) -> float:
        return CONSTANTS.planck * self.photon_frequency


class NtronParams(Params):
    gate_threshold: float = Field(60e-6, gt=0, description="A")
    channel_current: float = Field(1.2e-3, gt=0, description="A")
    on_resistance: float = Field(1e3, gt=0, description="Ω")
    gate_energy: float = Field(0.0, ge=0, description="Energy per switching event (J)")


class HtronParams(Params):
    gate_threshold: float = Field(1.2e-3, gt=0, description="A")
    on_resistance: float = Field(800e3, gt=0, description="Ω")
    switch_time: float = Field(1e-9, gt=0, description="s")
    switch_energy: float = Field(20e-15, gt=0, description="J")


class AmplifierEfficiencyModel(Params):
    fixed_energy: float = Field(..., gt=0, description="E_fixed (J)")
    joule_overhead: float = Field(9.34, ge=0, description="κ")

    @classmethod
    def from_chain(cls, ntron: NtronParams, htron: HtronParams, led: LedParams,
                   joule_overhead: float = 9.34) -> "AmplifierEfficiencyModel":
        fixed = htron.switch_energy + ntron.gate_energy + 0.5 * led.capacitance * led.drive_voltage ** 2
        return cls(fixed_energy=fixed, joule_overhead=joule_overhead)


def _default_jro() -> JunctionParams:
    return JunctionParams.with_beta_c(80e-6, 10.0, 25.0, hysteretic=True)


class TransmitterParams(Params):
    jro: JunctionParams = Field(default_factory=_default_jro, description="Relaxation-oscillator junction")
    jro_bias: float = Field(65e-6, gt=0, description="J_ro bias, diverted to the nTron gate when latched (A)")
    ntron: NtronParams = NtronParams()
    htron: HtronParams = HtronParams()
    led: LedParams = LedParams()
    joule_overhead: float = Field(9.34, ge=0, description="κ")

    @property
    def amplifier(self) -> AmplifierEfficiencyModel:
        return AmplifierEfficiencyModel.from_chain(self.ntron, self.htron, self.led, self.joule_overhead)

    def violations(self, path: str = "transmitter") -> List[Violation]:
        found = []
        if not self.jro.hysteretic:
            found.append(Violation(f"{path}.jro.hysteretic", "J_ro must be a latching junction"))
        if self.jro_bias >= self.jro.critical_current:
            found.append(Violation(f"{path}.jro_bias", "J_ro bias must stay below its critical current"))
        if self.jro_bias < self.ntron.gate_threshold:
            found.append(Violation(f"{path}.jro_bias",
                                   "chain fault: J_ro bias cannot switch the nTron gate"))
        if self.ntron.channel_current < self.htron.gate_threshold:
            found.append(Violation(f"{path}.ntron.channel_current",
                                   "chain fault: nTron channel current below hTron gate threshold"))
        if self.htron.on_resistance * self.led.drive_current < self.led.drive_voltage:
            found.append(Violation(f"{path}.htron.on_resistance",
                                   "chain fault: hTron cannot develop the LED drive voltage"))
        if self.ntron.on_resistance >= self.htron.on_resistance:
            found.append(Violation(f"{path}.ntron.on_resistance",
                                   "nTron on-resistance must be far below the hTron's"))
        return found


# --- synapse -------------------------------------------------------------------

def _default_jsf() -> JunctionParams:
    return JunctionParams.with_beta_c(10e-6, 5.0, 0.3)


class TransducerParams(Params):
    """Device template of the photon-to-fluxon synapse"""
    spd: SpdParams = SpdParams()
    jsf: JunctionParams = Field(default_factory=_default_jsf, description="Synaptic firing junction")
    jtl: JunctionParams = Field(default_factory=_default_jsf, description="JTL junction")
    jtl_inductance: float = Field(200e-12, gt=0, description="H")
    jtl_bias: float = Field(5.7e-6, ge=0, description="JTL bias, set by calibration (A)")
    si_junction: JunctionParams = Field(default_factory=_default_jsf, description="Third junction in the SI loop")
    si_inductance: float = Field(10e-6, gt=0, description="L_si (H)")
    si_resistance: float = Field(0.0, ge=0, description="r_si (Ω)")
    superconducting_resistance: float = Field(1e-9, gt=0,
                                              description="Residual SPD resistance outside the hotspot (Ω)")


class BiasAnchor(Params):
    bias: float = Field(..., gt=0, description="I_sy (A)")
    fluxons: int = Field(..., ge=0)


class CalibrationTable(Params):
    """Fluxon yield anchors produced by the device tier"""
    anchors: List[BiasAnchor]
    target_low: BiasAnchor = BiasAnchor(bias=1e-6, fluxons=33)
    target_high: BiasAnchor = BiasAnchor(bias=3e-6, fluxons=497)

    @model_validator(mode="after")
    def _sorted_monotone(self):
        biases = [a.bias for a in self.anchors]
        if len(biases) < 2 or biases != sorted(biases) or len(set(biases)) != len(biases):
            raise ValueError("anchors must hold at least two strictly increasing biases")
        counts = [a.fluxons for a in self.anchors]
        if any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError("anchor fluxon counts must be non-decreasing")
        return self

    @property
    def bias_range(self) -> Tuple[float, float]:
        return self.anchors[0].bias, self.anchors[-1].bias


class StdpKernel(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


class SynapseParams(Params):
    spd: SpdParams = SpdParams()
    jj: JunctionParams = Field(default_factory=_default_jsf, description="J_sf")
    si_inductance: float = Field(10e-6, gt=0, description="L_si (H)")
    si_resistance: float = Field(0.0, ge=0, description="r_si (Ω)")
    mutual_inductance: float = Field(97e-9, ge=0, description="M_sy (H)")
    coupling_sign: int = Field(1, description="+1 excitatory, -1 inhibitory")
    n_levels: int = Field(2, ge=2)
    bias_min: float = Field(1e-6, gt=0, description="I_sy at w = 0 (A)")
    bias_max: float = Field(3e-6, gt=0, description="I_sy at w = n_levels-1 (A)")
    initial_weight: int = Field(0, ge=0)
    plastic: bool = Field(False, description="Attach the STDP update circuit")
    stdp_window: float = Field(50e-9, gt=0, description="τ_w (s)")
    stdp_kernel: StdpKernel = StdpKernel.LINEAR
    stdp_step: int = Field(1, ge=1, description="w_step")
    storage_critical_current: float = Field(40e-6, gt=0, description="Ic of the storage-loop junctions (A)")
    slips_per_fluxon: int = Field(2, ge=1, description="Junction switchings per fluxon delivered to the SI loop")
    si_feedback: bool = Field(False, description="Evaluate yield at the effective bias I_sy - I_si")

    @model_validator(mode="after")
    def _ranges(self):
        if self.coupling_sign not in (1, -1):
            raise ValueError("coupling_sign must be +1 or -1")
        if self.bias_min >= self.bias_max:
            raise ValueError("bias_min must be below bias_max")
        if self.initial_weight > self.n_levels - 1:
            raise ValueError("initial_weight outside [0, n_levels-1]")
        return self

    @property
    def tau_si(self) -> float:
        if self.si_resistance == 0:
            return math.inf
        return self.si_inductance / self.si_resistance

    @property
    def capacity(self) -> float:
        """β_L/2π of the SI loop"""
        return self.si_inductance * self.jj.critical_current / CONSTANTS.flux_quantum

    @property
    def max_si_current(self) -> float:
        return self.capacity * CONSTANTS.flux_quantum / self.si_inductance

    def violations(self, path: str, l_ni: Optional[float] = None,
                   table: Optional[CalibrationTable] = None) -> List[Violation]:
        found = []
        if l_ni is not None and self.mutual_inductance > math.sqrt(self.si_inductance * l_ni):
            found.append(Violation(f"{path}.mutual_inductance",
                                   "coupling violation: |M_sy| exceeds sqrt(L_si·L_ni)"))
        if table is not None:
            peak = max(a.fluxons for a in table.anchors)
            if self.capacity < peak:
                found.append(Violation(f"{path}.si_inductance",
                                       f"SI loop capacity {self.capacity:.3g} below {peak} fluxons per event"))
        return found


# --- neuron --------------------------------------------------------------------

class ResetPolicy(str, Enum):
    CLEAR_NI = "clear_ni"
    PURGE_SI = "purge_si"


def _default_jth() -> JunctionParams:
    return JunctionParams.with_beta_c(10e-6, 5.0, 0.3)


class NeuronParams(Params):
    ni_inductance: float = Field(100e-9, gt=0, description="L_ni (H)")
    jth: JunctionParams = Field(default_factory=_default_jth, description="Thresholding junction")
    threshold_bias: float = Field(7e-6, ge=0, description="I_th (A)")
    synapses: List[SynapseParams] = Field(default_factory=list)
    fanout: int = Field(1, ge=1)
    photons_per_synapse: int = Field(10, ge=1)
    refractory: float = Field(50e-9, ge=0, description="s")
    transmitter: TransmitterParams = TransmitterParams()
    reset_policy: ResetPolicy = ResetPolicy.CLEAR_NI

    @model_validator(mode="after")
    def _bias_below_ic(self):
        if self.threshold_bias >= self.jth.critical_current:
            raise ValueError("threshold_bias must stay below the J_th critical current")
        return self

    @property
    def photon_target(self) -> int:
        return self.fanout * self.photons_per_synapse

    def violations(self, path: str, table: Optional[CalibrationTable] = None) -> List[Violation]:
        found = self.transmitter.violations(f"{path}.transmitter")
        for i, syn in enumerate(self.synapses):
            found.extend(syn.violations(f"{path}.synapses[{i}]", self.ni_inductance, table))
        return found


# --- network -------------------------------------------------------------------

class Edge(Params):
    source: int = Field(..., ge=0)
    target: int = Field(..., ge=0, description="Target neuron index")
    synapse: int = Field(..., ge=0, description="Synapse index on the target")
    path_length: float = Field(1e-3, ge=0, description="m")
    transmission: float = Field(1.0, gt=0, le=1)


class SinkFanout(Params):
    """Aggregated terminal synapses: accounted for energy, not integrated"""
    source: int = Field(..., ge=0)
    count: int = Field(..., ge=1)
    path_length: float = Field(1e-3, ge=0)
    transmission: float = Field(1.0, gt=0, le=1)
    weight: int = Field(0, ge=0)


class Drive(Params):
    """Poisson photon source on one synapse"""
    neuron: int = Field(..., ge=0)
    synapse: int = Field(..., ge=0)
    rate: float = Field(..., ge=0, description="Mean photon-event rate (Hz)")
    start: float = Field(0.0, ge=0)
    stop: Optional[float] = Field(None, gt=0)
    times: Optional[List[float]] = Field(None, description="Deterministic arrival times instead of Poisson")


class NetworkConfig(Params):
    neurons: List[NeuronParams]
    edges: List[Edge] = Field(default_factory=list)
    sinks: List[SinkFanout] = Field(default_factory=list)
    drives: List[Drive] = Field(default_factory=list)
    die_area: float = Field(1e-4, gt=0, description="m²")
    group_index: float = Field(2.0, gt=0)
    seed: int = 0
    max_events: int = Field(50_000_000, ge=1, description="Event-queue bound")
    static_power_per_neuron: float = Field(0.0, ge=0, description="Optional static bias term (W)")
    scale: float = Field(1.0, gt=0, description="Extrapolation factor applied by power_report")
    stochastic_emission: bool = Field(False, description="Binomial LED emission instead of expected-value counts")
    trace_ni: bool = Field(False, description="Record I_ni after every integration step")

    def violations(self, path: str = "network", table: Optional[CalibrationTable] = None) -> List[Violation]:
        found = []
        n = len(self.neurons)
        out_counts: Dict[int, int] = {i: 0 for i in range(n)}
        for k, edge in enumerate(self.edges):
            if edge.source >= n:
                found.append(Violation(f"{path}.edges[{k}].source", "unknown source neuron"))
                continue
            if edge.target >= n or edge.synapse >= len(self.neurons[edge.target].synapses):
                found.append(Violation(f"{path}.edges[{k}]", "edge targets a missing synapse"))
            out_counts[edge.source] += 1
        for k, sink in enumerate(self.sinks):
            if sink.source >= n:
                found.append(Violation(f"{path}.sinks[{k}].source", "unknown source neuron"))
                continue
            out_counts[sink.source] += sink.count
        for k, drive in enumerate(self.drives):
            if drive.neuron >= n or drive.synapse >= len(self.neurons[drive.neuron].synapses):
                found.append(Violation(f"{path}.drives[{k}]", "drive targets a missing synapse"))
        for i, neuron in enumerate(self.neurons):
            if out_counts[i] and out_counts[i] != neuron.fanout:
                found.append(Violation(f"{path}.neurons[{i}].fanout",
                                       f"fanout {neuron.fanout} differs from {out_counts[i]} out-edges"))
        seen = set()
        for i, neuron in enumerate(self.neurons):
            # neurons built by presets share parameter objects; check each once
            if id(neuron) in seen:
                continue
            seen.add(id(neuron))
            found.extend(neuron.violations(f"{path}.neurons[{i}]", table))
        return found


# --- top level -----------------------------------------------------------------

class SimulationMode(str, Enum):
    DEVICE = "device"
    BEHAVIORAL = "behavioral"


class LoopsimConfig(Params):
    version: str = "1"
    solver: SolverConfig = SolverConfig()
    transducer: TransducerParams = TransducerParams()
    calibration: CalibrationTable
    synapse: SynapseParams = SynapseParams()
    neuron: NeuronParams = NeuronParams()
    network: Optional[NetworkConfig] = None
    seed: int = 0
    parallelism: int = Field(1, ge=1)
    t_end: Optional[float] = Field(None, gt=0, description="Simulated duration (s); presets fall back to their own")
    mode: SimulationMode = SimulationMode.BEHAVIORAL

    def violations(self) -> List[Violation]:
        found = []
        for name in ("jsf", "jtl", "si_junction"):
            jj = getattr(self.transducer, name)
            if jj.hysteretic:
                found.append(Violation(f"transducer.{name}.hysteretic",
                                       f"transducer junctions are non-hysteretic (beta_c={jj.beta_c:.3g})"))
        found.extend(self.synapse.violations("synapse", self.neuron.ni_inductance, self.calibration))
        found.extend(self.neuron.violations("neuron", self.calibration))
        if self.network is not None:
            found.extend(self.network.violations("network", self.calibration))
        return found
