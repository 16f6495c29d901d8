"""Fixed circuit templates used by the device tier.

Each builder returns a LoopCircuit. Bias sources that feed only junction
paths are ramped from zero; the SPD bias starts already flowing through
L_spd, which is encoded in the circuit's initial node phases.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.models import CONSTANTS, JunctionParams, NeuronParams, SolverConfig, TransducerParams
from .circuit import Branch, CurrentSource, ElementKind, Hotspot, LoopCircuit, MutualCoupling
from .solver import Trace, count_fluxons, integrate_transient

logger = logging.getLogger(__name__)

BIAS_RAMP = 100e-12
DETECTION_TIME = 1e-9
SETTLE_TIME = 3e-9
INJECTION_RESISTANCE = 1e6


def _ramp(value: float, ramp: float = BIAS_RAMP) -> List[Tuple[float, float]]:
    return [(0.0, 0.0), (ramp, value)]


def _junction(name: str, p: str, q: str, params: JunctionParams) -> Branch:
    return Branch(name=name, kind=ElementKind.JUNCTION, nodes=(p, q), junction=params)


def _inductor(name: str, p: str, q: str, value: float) -> Branch:
    return Branch(name=name, kind=ElementKind.INDUCTOR, nodes=(p, q), inductance=value)


def _resistor(name: str, p: str, q: str, value: float) -> Branch:
    return Branch(name=name, kind=ElementKind.RESISTOR, nodes=(p, q), resistance=value)


def single_junction(params: JunctionParams, bias: float) -> LoopCircuit:
    return LoopCircuit(
        name="single_junction",
        branches=[_junction("J1", "1", "0", params)],
        sources=[CurrentSource(name="I_bias", node="1", value=bias)],
    )


# --- photon-to-fluxon transducer ----------------------------------------------

def transducer(params: TransducerParams, bias: float, detections: Sequence[float] = (DETECTION_TIME,)) -> LoopCircuit:
    """SPD, r_spd, J_sf, one-junction JTL and the SI loop with its third junction.

    Nodes: a (SPD top), s (between hotspot and L_spd), b (J_sf), c (J_jtl,
    SI loop entry), e (only when r_si > 0), d (J_si).
    """
    spd = params.spd
    branches = [
        Branch(name="spd", kind=ElementKind.HOTSPOT, nodes=("a", "s"),
               hotspot=Hotspot(resistance=spd.hotspot_resistance, duration=spd.hotspot_duration,
                               residual=params.superconducting_resistance, detections=list(detections))),
        _inductor("L_spd", "s", "0", spd.inductance),
        _resistor("r_spd", "a", "b", spd.recovery_resistance),
        _junction("J_sf", "b", "0", params.jsf),
        _inductor("L_jtl", "b", "c", params.jtl_inductance),
        _junction("J_jtl", "c", "0", params.jtl),
    ]
    if params.si_resistance > 0:
        branches.append(_inductor("L_si", "c", "e", params.si_inductance))
        branches.append(_resistor("r_si", "e", "d", params.si_resistance))
    else:
        branches.append(_inductor("L_si", "c", "d", params.si_inductance))
    branches.append(_junction("J_si", "d", "0", params.si_junction))

    sources = [
        CurrentSource(name="I_spd", node="a", value=spd.bias_current),
        CurrentSource(name="I_sy", node="b", points=_ramp(bias)),
    ]
    if params.jtl_bias > 0:
        sources.append(CurrentSource(name="I_jtl", node="c", points=_ramp(params.jtl_bias)))

    spd_phase = spd.inductance * spd.bias_current / CONSTANTS.phi0_over_2pi
    return LoopCircuit(name="transducer", branches=branches, sources=sources,
                       initial_phases={"a": spd_phase, "s": spd_phase})


def transducer_window(params: TransducerParams, bias: float, t_detect: float = DETECTION_TIME) -> float:
    """End of the simulated window: the diverted current has fallen below what J_sf needs to switch"""
    spd = params.spd
    headroom = max(params.jsf.critical_current - bias, 0.1 * spd.bias_current)
    recovery = spd.tau * math.log(max(spd.bias_current / headroom, 1.0))
    return t_detect + spd.hotspot_duration + recovery + SETTLE_TIME


@dataclass(frozen=True)
class TransducerRun:
    trace: Trace
    bias: float
    n_fluxons: int
    junction_slips: int
    delta_si: float


def run_transducer(params: TransducerParams, bias: float, solver: SolverConfig,
                   detections: Optional[Sequence[float]] = None, t_end: Optional[float] = None) -> TransducerRun:
    """One or more detections on the transducer template, counted at the SI loop"""
    detections = list(detections) if detections is not None else [DETECTION_TIME]
    if t_end is None:
        t_end = (transducer_window(params, bias, detections[-1]) if detections
                 else DETECTION_TIME + SETTLE_TIME)
    circuit = transducer(params, bias, detections)
    trace = integrate_transient(circuit, solver.model_copy(update={"t_end": t_end}))
    i_si = trace.current("L_si")
    k0 = max(0, int(np.searchsorted(trace.t, detections[0])) - 1) if detections else 0
    delta = float(i_si[-1] - i_si[k0])
    n = int(round(delta * params.si_inductance / CONSTANTS.flux_quantum))
    slips = count_fluxons(trace, "J_sf") + count_fluxons(trace, "J_jtl")
    logger.debug("transducer at %.3g A: %d fluxons, %d slips", bias, n, slips)
    return TransducerRun(trace=trace, bias=bias, n_fluxons=n, junction_slips=slips, delta_si=delta)


# --- NI loop with mutually coupled SI loops -----------------------------------

def ni_integration(neuron: NeuronParams, schedule: Sequence[Tuple[int, float, float]],
                   rise_time: float = 20e-12) -> LoopCircuit:
    """SI loops as current-injected inductors coupled into the NI loop around J_th.

    `schedule` holds (synapse index, time, ΔI_si) steps; each step rises over
    `rise_time`. J_th sits in parallel with L_ni and carries the threshold bias.
    """
    branches = [
        _inductor("L_ni", "n", "0", neuron.ni_inductance),
        _junction("J_th", "n", "0", neuron.jth),
    ]
    couplings = []
    sources = [CurrentSource(name="I_th", node="n", points=_ramp(neuron.threshold_bias))]
    for i, syn in enumerate(neuron.synapses):
        node = f"si{i}"
        branches.append(_inductor(f"L_si{i}", node, "0", syn.si_inductance))
        branches.append(_resistor(f"r_inj{i}", node, "0", INJECTION_RESISTANCE))
        couplings.append(MutualCoupling(first=f"L_si{i}", second="L_ni", inductance=syn.mutual_inductance,
                                        sign=syn.coupling_sign))
        steps = sorted((t, di) for k, t, di in schedule if k == i)
        points = [(0.0, 0.0)]
        level = 0.0
        for t, di in steps:
            points.append((t, level))
            level += di
            points.append((t + rise_time, level))
        sources.append(CurrentSource(name=f"I_si{i}", node=node, points=points))
    return LoopCircuit(name="ni_integration", branches=branches, mutual_couplings=couplings, sources=sources)


def ni_current(trace: Trace, neuron: NeuronParams) -> np.ndarray:
    """Current added to J_th beyond its bias, per sample"""
    return trace.current("J_th") - neuron.threshold_bias


# --- binary synaptic storage cell ---------------------------------------------

STORAGE_INDUCTANCE = 90e-12
STORAGE_CRITICAL_CURRENT = 40e-6
WRITE_BIAS = 38e-6
STORE_BIAS = 20e-6
WRITE_AMPLITUDE = 20e-6
ERASE_AMPLITUDE = 50e-6
PULSE_WIDTH = 40e-12
PULSE_EDGE = 10e-12


def _pulses(times: Sequence[float], amplitude: float) -> List[Tuple[float, float]]:
    points = [(0.0, 0.0)]
    for t in sorted(times):
        points.extend([(t, 0.0), (t + PULSE_EDGE, amplitude),
                       (t + PULSE_EDGE + PULSE_WIDTH, amplitude), (t + 2 * PULSE_EDGE + PULSE_WIDTH, 0.0)])
    return points


def storage_cell(writes: Sequence[float] = (), erases: Sequence[float] = (),
                 inductance: float = STORAGE_INDUCTANCE,
                 junction: Optional[JunctionParams] = None) -> LoopCircuit:
    """Flux-quantum memory cell holding zero or one fluxon.

    J_w (node p) is biased at 38 µA; 20 µA is drawn from the storage side
    (node q, J_s) so a stored fluxon's circulating current leaves both
    junctions below Ic. Write pulses enter at p, erase pulses at q.
    """
    jj = junction or JunctionParams.with_beta_c(STORAGE_CRITICAL_CURRENT, 2.0, 0.3)
    return LoopCircuit(
        name="storage_cell",
        branches=[_junction("J_w", "p", "0", jj), _inductor("L_ss", "p", "q", inductance),
                  _junction("J_s", "q", "0", jj)],
        sources=[
            CurrentSource(name="I_b1", node="p", points=_ramp(WRITE_BIAS)),
            CurrentSource(name="I_b2", node="0", return_node="q", points=_ramp(STORE_BIAS)),
            CurrentSource(name="I_plus", node="p", points=_pulses(writes, WRITE_AMPLITUDE)),
            CurrentSource(name="I_minus", node="q", points=_pulses(erases, ERASE_AMPLITUDE)),
        ],
    )


def stored_fluxons(trace: Trace) -> int:
    """Net flux quanta held in the storage loop at the end of the trace"""
    return count_fluxons(trace, "J_w") - count_fluxons(trace, "J_s")


# --- spike-timing-dependent update cell ---------------------------------------

STDP_SLOW_INDUCTANCE = 1.25e-6
STDP_FAST_INDUCTANCE = 12.5e-9
STDP_LOOP_INDUCTANCE = 125e-9
STDP_SLOW_RESISTANCE = 125.0
STDP_FAST_RESISTANCE = 25.0
STDP_SLOW_HOTSPOT = 1e-9
STDP_FAST_HOTSPOT = 100e-12
STDP_SPD_BIAS = 10e-6
STDP_HOTSPOT_RESISTANCE = 5e3
STDP_RESIDUAL = 1e-6
UPDATE_CRITICAL_CURRENT = 53e-6
UPDATE_BIAS = WRITE_BIAS
STDP_SETTLE = 3e-9

_DETECTORS = {
    "slow": (STDP_SLOW_INDUCTANCE, STDP_SLOW_RESISTANCE, STDP_SLOW_HOTSPOT),
    "fast": (STDP_FAST_INDUCTANCE, STDP_FAST_RESISTANCE, STDP_FAST_HOTSPOT),
}


def _update_detector(name: str, out: str, inductance: float, resistance: float, hotspot: float,
                     detections: Sequence[float]) -> Tuple[List[Branch], CurrentSource]:
    a, s = f"{name}_a", f"{name}_s"
    branches = [
        Branch(name=f"spd_{name}", kind=ElementKind.HOTSPOT, nodes=(a, s),
               hotspot=Hotspot(resistance=STDP_HOTSPOT_RESISTANCE, duration=hotspot, residual=STDP_RESIDUAL,
                               detections=list(detections))),
        _inductor(f"L_{name}", s, "0", inductance),
        _resistor(f"r_{name}", a, out, resistance),
    ]
    return branches, CurrentSource(name=f"I_{name}", node=a, value=STDP_SPD_BIAS)


def stdp_cell(pre: Sequence[float] = (), post: Sequence[float] = (),
              junction: Optional[JunctionParams] = None) -> LoopCircuit:
    """Two detector pairs steering flux into a large synaptic storage loop.

    Each photon clicks one slow detector (L = 1.25 µH, τ = L/r ≈ 10 ns) and
    one fast detector (12.5 nH, 0.5 ns). Node h holds J_su_plus with the
    slow pre and fast post detectors; node g holds J_su_minus with the fast
    pre and slow post detectors. Either junction switches only while both
    of its detectors divert current, so a pre photon followed by a post
    photon winds flux into L_sy and the reverse order winds it out. I_sy is
    the current in L_sy.
    """
    jj = junction or JunctionParams.with_beta_c(UPDATE_CRITICAL_CURRENT, 2.0, 0.3)
    branches = [_junction("J_su_plus", "h", "0", jj), _inductor("L_sy", "h", "g", STDP_LOOP_INDUCTANCE),
                _junction("J_su_minus", "g", "0", jj)]
    sources = [CurrentSource(name="I_su_plus", node="h", points=_ramp(UPDATE_BIAS)),
               CurrentSource(name="I_su_minus", node="g", points=_ramp(UPDATE_BIAS))]
    phases = {}
    for name, out, kind, times in (("pre_h", "h", "slow", pre), ("post_h", "h", "fast", post),
                                   ("pre_g", "g", "fast", pre), ("post_g", "g", "slow", post)):
        inductance, resistance, hotspot = _DETECTORS[kind]
        parts, source = _update_detector(name, out, inductance, resistance, hotspot, times)
        branches.extend(parts)
        sources.append(source)
        phase = inductance * STDP_SPD_BIAS / CONSTANTS.phi0_over_2pi
        phases.update({f"{name}_a": phase, f"{name}_s": phase})
    return LoopCircuit(name="stdp_cell", branches=branches, sources=sources, initial_phases=phases)


@dataclass(frozen=True)
class StdpRun:
    trace: Trace
    n_fluxons: int
    delta_i_sy: float


def run_stdp_cell(solver: SolverConfig, pre: Sequence[float] = (), post: Sequence[float] = (),
                  t_end: Optional[float] = None) -> StdpRun:
    """Photon arrivals on the update cell; n_fluxons is the net flux added to the storage loop"""
    if t_end is None:
        t_end = max([*pre, *post, BIAS_RAMP]) + STDP_SETTLE
    trace = integrate_transient(stdp_cell(pre, post), solver.model_copy(update={"t_end": t_end}))
    n = count_fluxons(trace, "J_su_plus") - count_fluxons(trace, "J_su_minus")
    i_sy = trace.current("L_sy")
    logger.debug("stdp cell pre=%s post=%s: %+d fluxons", list(pre), list(post), n)
    return StdpRun(trace=trace, n_fluxons=n, delta_i_sy=float(i_sy[-1] - i_sy[0]))
