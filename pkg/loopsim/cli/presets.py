"""Experiment presets: each one runs headlessly and writes CSV tables plus a summary"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.loader import parse_value
from ..config.models import (CONSTANTS, AmplifierEfficiencyModel, LoopsimConfig, SolverConfig, StdpKernel,
                             TransducerParams, TransmitterParams)
from ..devices.amplifier import amplifier_efficiency, crossover_photons, efficiency_asymptote, efficiency_curve
from ..errors import ConfigError, SimulationAbort, Violation
from ..junction.calibration import calibrate
from ..junction.solver import integrate_transient
from ..junction.templates import (DETECTION_TIME, TransducerRun, ni_current, ni_integration, run_stdp_cell,
                                  run_transducer, storage_cell)
from ..network.power import PRESET_DURATION, die_preset, power_report, wafer_preset
from ..network.simulator import SimulationMode, run
from ..store.records import RunStore
from ..synapse.core import contribution_per_event
from ..synapse.state import SynapseState
from ..synapse.transducer import BehavioralTransducer
from ..synapse.weights import SpikeOrder, apply_stdp, stdp_update, weight_to_bias
from .sweeps import run_sweep

logger = logging.getLogger(__name__)

NETWORK_T_END = 1e-6


@dataclass
class RunContext:
    config: LoopsimConfig
    store: RunStore
    seed: int
    mode: SimulationMode = SimulationMode.BEHAVIORAL
    t_end: Optional[float] = None
    parallelism: int = 1
    options: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    description: str
    entry: Optional[Callable[[RunContext], Dict[str, Any]]]
    defaults: Dict[str, Any] = field(default_factory=dict)

    def options(self, overrides: Dict[str, Any]) -> Dict[str, Any]:
        unknown = sorted(set(overrides) - set(self.defaults))
        if unknown:
            raise ConfigError(f"unknown option for preset '{self.name}'",
                              violations=[Violation(f"preset.{k}", "not a preset option") for k in unknown])
        return {**self.defaults, **overrides}


# --- demo-synapse ---------------------------------------------------------------

def _synapse_point(point: Tuple[TransducerParams, SolverConfig, float, List[float]], seed: int) -> TransducerRun:
    params, solver, bias, detections = point
    return run_transducer(params, bias, solver, detections=detections)


def demo_synapse(ctx: RunContext) -> Dict[str, Any]:
    """Transducer transients at the weak and strong synaptic bias"""
    cfg, opts = ctx.config, ctx.options
    detections = [DETECTION_TIME + k * opts["spacing"] for k in range(int(opts["detections"]))]
    points = [(cfg.transducer, cfg.solver, float(b), detections) for b in opts["biases"]]
    runs = run_sweep(_synapse_point, points, ctx.seed, ctx.parallelism)

    ic = cfg.transducer.jsf.critical_current
    e_spd = cfg.transducer.spd.detection_energy
    results = []
    for run_ in runs:
        label = f"{run_.bias * 1e6:g}uA"
        ctx.store.adopt([run_.trace.to_csv(ctx.store.out_dir / f"synapse_{label}.csv")])
        energy = (e_spd + run_.junction_slips * ic * CONSTANTS.flux_quantum) if detections else 0.0
        results.append({"bias": run_.bias, "detections": len(detections), "n_fluxons": run_.n_fluxons,
                        "junction_slips": run_.junction_slips, "delta_i_si": run_.delta_si, "energy": energy,
                        "junctions": {name: run_.trace.junction_state(name).to_dict()
                                      for name in run_.trace.junction_names}})
        logger.info("Synapse at %s: %d fluxons, %.3g aJ", label, run_.n_fluxons, energy * 1e18)
    return {"runs": results}


# --- demo-integration -----------------------------------------------------------

def demo_integration(ctx: RunContext) -> Dict[str, Any]:
    """NI-loop current from a schedule of strong and weak synaptic events, device and behavioral"""
    cfg, opts = ctx.config, ctx.options
    strong = cfg.synapse.model_copy(update={"initial_weight": cfg.synapse.n_levels - 1})
    weak = cfg.synapse.model_copy(update={"initial_weight": 0})
    neuron = cfg.neuron.model_copy(update={"synapses": [strong, weak]})
    transducer = BehavioralTransducer(cfg.calibration)

    events = [(0, t) for t in opts["strong_times"]] + [(1, t) for t in opts["weak_times"]]
    schedule, steps = [], []
    for k, t in sorted(events, key=lambda e: e[1]):
        syn = neuron.synapses[k]
        n = transducer.fluxon_yield(weight_to_bias(syn, syn.initial_weight))
        schedule.append((k, t, n * CONSTANTS.flux_quantum / syn.si_inductance))
        steps.append((t, contribution_per_event(syn, n, neuron.ni_inductance)))
    t_end = max(t for _, t in events) + opts["settle"] if events else opts["settle"]

    trace = integrate_transient(ni_integration(neuron, schedule), cfg.solver.model_copy(update={"t_end": t_end}))
    device = ni_current(trace, neuron)
    behavioral = np.zeros_like(trace.t)
    for t, di in steps:
        behavioral[trace.t >= t] += di
    ctx.store.table("ni_integration.csv", ("t", "i_ni_device", "i_ni_behavioral"),
                    np.column_stack([trace.t, device, behavioral]))
    # increments from the settled bias before the first event
    first = min((t for _, t in events), default=t_end)
    final_device = float(device[-1] - device[trace.t < first][-1])
    final_behavioral = float(behavioral[-1])
    return {"events": len(events), "final_i_ni_device": final_device, "final_i_ni_behavioral": final_behavioral,
            "relative_difference": abs(final_device - final_behavioral) / final_behavioral if final_behavioral else 0.0}


# --- demo-binary ----------------------------------------------------------------

def demo_binary(ctx: RunContext) -> Dict[str, Any]:
    """Alternating write and erase pulses on the storage cell; I_sy follows the stored state"""
    cfg, opts = ctx.config, ctx.options
    half = opts["period"] / 2
    start = opts["start"]
    cycles = int(opts["cycles"])
    writes = [start + 2 * k * half for k in range(cycles)]
    erases = [start + (2 * k + 1) * half for k in range(cycles)]
    t_end = start + 2 * cycles * half + half
    trace = integrate_transient(storage_cell(writes, erases), cfg.solver.model_copy(update={"t_end": t_end}))

    winding = (trace.phase("J_w") - trace.phase("J_w")[0]) - (trace.phase("J_s") - trace.phase("J_s")[0])
    stored = np.clip(np.rint(winding / (2 * np.pi)), 0, 1).astype(int)
    syn = cfg.synapse
    bias = np.array([weight_to_bias(syn, int(w) * (syn.n_levels - 1)) for w in stored])
    ctx.store.table("binary_synapse.csv", ("t", "i_l_ss", "stored", "i_sy"),
                    np.column_stack([trace.t, trace.current("L_ss"), stored, bias]))
    toggles = int(np.count_nonzero(np.diff(stored)))
    return {"writes": writes, "erases": erases, "toggles": toggles, "final_state": int(stored[-1]),
            "i_sy_levels": sorted({float(b) for b in bias})}


# --- demo-stdp ------------------------------------------------------------------

STDP_FIRST_PHOTON = 0.5e-9


def _stdp_cell_point(point: Tuple[SolverConfig, float, SpikeOrder],
                     seed: int) -> Tuple[float, SpikeOrder, int, float]:
    solver, dt, order = point
    first, second = [STDP_FIRST_PHOTON], [STDP_FIRST_PHOTON + dt]
    pre, post = (first, second) if order == SpikeOrder.PRE_THEN_POST else (second, first)
    run_ = run_stdp_cell(solver, pre=pre, post=post)
    return dt, order, run_.n_fluxons, run_.delta_i_sy


def demo_stdp(ctx: RunContext) -> Dict[str, Any]:
    """Weight change against spike separation for both orders, plus a pairing protocol"""
    cfg, opts = ctx.config, ctx.options
    levels = int(opts["levels"])
    syn = cfg.synapse.model_copy(update={"plastic": True, "n_levels": levels, "initial_weight": levels // 2,
                                         "stdp_step": int(opts["step"]), "stdp_kernel": StdpKernel(opts["kernel"])})
    window = syn.stdp_window
    rows = []
    for dt in np.linspace(0.0, 1.2 * window, int(opts["points"])):
        for order in (1, -1):
            state = SynapseState.initial(syn)
            if order > 0:
                state, _ = apply_stdp(state, syn, 0.0, pre=0.0)
                state, event = apply_stdp(state, syn, dt, post=dt)
            else:
                state, _ = apply_stdp(state, syn, 0.0, post=0.0)
                state, event = apply_stdp(state, syn, dt, pre=dt)
            rows.append([dt, order, event.delta_w, event.energy])
    ctx.store.table("stdp_window.csv", ("dt", "order", "delta_w", "energy"), rows)

    state = SynapseState.initial(syn)
    trajectory = [[0.0, state.weight]]
    t, gap, lag = 0.0, opts["pair_interval"], opts["pair_lag"]
    for k in range(2 * int(opts["pairs"])):
        first, second = ("pre", "post") if k < int(opts["pairs"]) else ("post", "pre")
        t += gap
        state, _ = apply_stdp(state, syn, t, **{first: t})
        state, _ = apply_stdp(state, syn, t + lag, **{second: t + lag})
        trajectory.append([t + lag, state.weight])
    ctx.store.table("stdp_protocol.csv", ("t", "w"), trajectory)
    results = {"levels": levels, "kernel": syn.stdp_kernel.value, "window": window,
               "peak_weight": max(w for _, w in trajectory), "final_weight": state.weight}

    separations = [float(dt) for dt in opts["circuit_separations"]]
    if separations:
        points = [(cfg.solver, dt, order) for dt in separations for order in SpikeOrder]
        circuit = run_sweep(_stdp_cell_point, points, ctx.seed, ctx.parallelism)
        initial = SynapseState.initial(syn)
        rows = [[dt, 1 if order == SpikeOrder.PRE_THEN_POST else -1, n, di,
                 stdp_update(initial, syn, dt, order).weight - initial.weight] for dt, order, n, di in circuit]
        ctx.store.table("stdp_circuit.csv", ("dt", "order", "n_fluxons", "delta_i_sy", "delta_w"), rows)
        results["circuit_agrees"] = all((n > 0) - (n < 0) == (w > 0) - (w < 0) for *_, n, _, w in rows)
        logger.info("STDP cell over %d separations: sign agreement %s", len(separations), results["circuit_agrees"])
    return results


# --- efficiency-sweep -----------------------------------------------------------

def _efficiency_point(point: Tuple[TransmitterParams, float, float, np.ndarray], seed: int) -> Dict[str, Any]:
    tx, capacitance, qe, n_photons = point
    led = tx.led.model_copy(update={"capacitance": capacitance, "quantum_efficiency": qe})
    model = AmplifierEfficiencyModel.from_chain(tx.ntron, tx.htron, led, tx.joule_overhead)
    return {
        "capacitance": capacitance, "quantum_efficiency": qe,
        "log10_eta": np.log10(efficiency_curve(model, led, n_photons)),
        "asymptote": efficiency_asymptote(model, led),
        "eta_1e4": amplifier_efficiency(model, led, 1e4),
        "crossover_photons": crossover_photons(model, led),
    }


def efficiency_sweep(ctx: RunContext) -> Dict[str, Any]:
    """Amplifier-chain efficiency against photon count over LED capacitance × quantum efficiency"""
    opts = ctx.options
    n_photons = np.logspace(0, float(opts["max_exponent"]), int(opts["points"]))
    tx = ctx.config.neuron.transmitter
    points = [(tx, float(c), float(q), n_photons) for c in opts["capacitances"] for q in opts["quantum_efficiencies"]]
    cells = run_sweep(_efficiency_point, points, ctx.seed, ctx.parallelism)

    header = ["n_photons"] + [f"log10_eta_C{c['capacitance'] * 1e15:g}fF_qe{c['quantum_efficiency']:g}" for c in cells]
    ctx.store.table("efficiency.csv", header, np.column_stack([n_photons] + [c["log10_eta"] for c in cells]))
    return {"curves": len(cells), "cells": [{k: v for k, v in c.items() if k != "log10_eta"} for c in cells]}


# --- power-scale ----------------------------------------------------------------

def power_scale(ctx: RunContext) -> Dict[str, Any]:
    """Die and wafer activity presets with their power reports"""
    opts = ctx.options
    if ctx.mode == SimulationMode.DEVICE:
        logger.warning("power-scale runs in behavioral mode; --mode device ignored")
    t_end = ctx.t_end or PRESET_DURATION
    presets = [die_preset(ctx.config, ctx.seed, n=int(opts["die_neurons"]), t_end=t_end),
               wafer_preset(ctx.config, ctx.seed, sample=int(opts["wafer_sample"]), t_end=t_end)]
    summary = {}
    for preset in presets:
        record = run(preset.config, preset.t_end, SimulationMode.BEHAVIORAL, ctx.parallelism, seed=ctx.seed)
        report = power_report(record, preset.config.network, preset.t_end)
        ctx.store.adopt(record.to_csv(ctx.store.out_dir, prefix=f"{preset.name}_"))
        summary[preset.name] = {"description": preset.description, "counts": record.counts,
                                "power": report.model_dump()}
        logger.info("%s: total %.3g W, %.3g W/m²", preset.name, report.total, report.power_density)
    return summary


# --- run-network ----------------------------------------------------------------

def run_network(ctx: RunContext) -> Dict[str, Any]:
    """User-supplied network section"""
    t_end = ctx.t_end or ctx.options["t_end"]
    try:
        record = run(ctx.config, t_end, ctx.mode, ctx.parallelism, seed=ctx.seed)
    except SimulationAbort as e:
        if e.record is not None:
            ctx.store.adopt(e.record.to_csv(ctx.store.out_dir, prefix="partial_"))
            ctx.store.json("partial_summary.json", e.record.summary())
        raise
    ctx.store.adopt(record.to_csv(ctx.store.out_dir))
    report = power_report(record, ctx.config.network, t_end)
    return {"record": record.summary(), "power": report.model_dump()}


# --- calibrate ------------------------------------------------------------------

def run_calibration(ctx: RunContext) -> Dict[str, Any]:
    """Tune the J_sf shunt and JTL bias to the weak/strong yields, then rebuild the anchor table"""
    cfg, opts = ctx.config, ctx.options
    result = calibrate(cfg.transducer, cfg.solver, cfg.calibration, rounds=int(opts["rounds"]),
                       shunt_range=tuple(opts["shunt_range"]))
    ctx.store.json("calibration.json", result.fragment())
    ctx.store.table("anchors.csv", ("bias", "fluxons"), [[a.bias, a.fluxons] for a in result.table.anchors])
    ctx.store.table("calibration_history.csv", ("knob", "value", "fluxons"),
                    [[0 if knob.startswith("jsf") else 1, value, n] for knob, value, n in result.history])
    return {"shunt_resistance": result.transducer.jsf.shunt_resistance,
            "jsf_capacitance": result.transducer.jsf.capacitance,
            "jtl_bias": result.transducer.jtl_bias,
            "anchors": [[a.bias, a.fluxons] for a in result.table.anchors]}


PRESETS: Dict[str, ExperimentPreset] = {p.name: p for p in [
    ExperimentPreset("demo-synapse", "Synaptic firing transients at 1 µA and 3 µA bias", demo_synapse,
                     {"biases": [1e-6, 3e-6], "detections": 1, "spacing": 100e-9}),
    ExperimentPreset("demo-integration", "NI-loop integration of strong and weak synaptic events", demo_integration,
                     {"strong_times": [1e-9, 3e-9, 5e-9], "weak_times": [2e-9, 4e-9], "settle": 2e-9}),
    ExperimentPreset("demo-binary", "Binary storage cell toggling the synaptic bias", demo_binary,
                     {"cycles": 3, "period": 800e-12, "start": 300e-12}),
    ExperimentPreset("demo-stdp", "STDP window and pairing protocol", demo_stdp,
                     {"levels": 8, "step": 2, "kernel": "linear", "points": 25, "pairs": 4,
                      "pair_interval": 200e-9, "pair_lag": 10e-9, "circuit_separations": []}),
    ExperimentPreset("efficiency-sweep", "Amplifier efficiency over C_led × η_qe", efficiency_sweep,
                     {"capacitances": [10e-15, 50e-15, 100e-15], "quantum_efficiencies": [1.0, 1e-1, 1e-2, 1e-3],
                      "points": 71, "max_exponent": 7}),
    ExperimentPreset("power-scale", "Die and wafer power presets", power_scale,
                     {"die_neurons": 8100, "wafer_sample": 1000}),
    ExperimentPreset("run-network", "Run the network section of the configuration", run_network,
                     {"t_end": NETWORK_T_END}),
    ExperimentPreset("calibrate", "Calibrate the transducer and regenerate the anchor table", run_calibration,
                     {"rounds": 2, "shunt_range": [1.0, 20.0]}),
    ExperimentPreset("validate", "Check every configuration invariant", None),
]}


def split_overrides(overrides: Sequence[str]) -> Tuple[List[str], Dict[str, Any]]:
    """Separate preset.* options from configuration overrides"""
    config, options = [], {}
    for item in overrides:
        key, sep, raw = item.partition("=")
        if sep and key.strip().startswith("preset."):
            options[key.strip()[len("preset."):]] = parse_value(raw)
        else:
            config.append(item)
    return config, options
