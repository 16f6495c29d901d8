"""Event-driven network execution.

Each neuron is a shard owning its state, its synapses and a local event
heap. Time advances in conservative windows: every photon crosses an edge
with a delay of at least the shortest edge delay (the lookahead), so all
events inside [t_next, t_next + lookahead) can be processed shard by shard
without seeing each other. Cross-neuron events produced in a window are
merged in (t, source, edge, kind, seq) order before the next window starts.
Random draws come from counter-based streams keyed by what they decide
(drive index, firing index), never by processing order.
"""

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import chain
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import constants

from ..config.models import (Drive, Edge, LoopsimConfig, NetworkConfig, NeuronParams, SimulationMode, SinkFanout,
                             SynapseParams)
from ..devices.led import EmissionMode
from ..errors import ConfigError, SimulationAbort, Violation
from ..neuron.core import fire, integrate_ni, record_plasticity, record_synaptic, reset_synapses, threshold_check
from ..neuron.state import NeuronState
from ..rng import stream
from ..synapse.core import advance, synaptic_fire
from ..synapse.state import SynapseState
from ..synapse.transducer import BehavioralTransducer, DeviceTransducer, Transducer
from ..synapse.weights import apply_stdp, weight_to_bias
from .events import EventKind, PhotonEvent, QueuedEvent, SinkActivity, SpikeRecord

logger = logging.getLogger(__name__)

DEVICE_NEURON_LIMIT = 10

STREAM_DRIVE = 10
STREAM_EMISSION = 11
STREAM_LED = 12


def edge_delay(path_length: float, group_index: float) -> float:
    return path_length * group_index / constants.c


@dataclass(frozen=True)
class _Context:
    """Read-only data shared by every shard"""
    seed: int
    t_end: float
    transducer: Transducer
    sink_synapse: SynapseParams
    emission: EmissionMode
    trace_ni: bool
    detection: Dict[Tuple[int, int], float]


class NeuronShard:
    """One neuron with its synapses, pending events and logs"""

    def __init__(self, index: int, params: NeuronParams, edges: Sequence[Tuple[int, Edge, float]],
                 sinks: Sequence[Tuple[SinkFanout, float]], drives: Sequence[Tuple[int, Drive]], ctx: _Context):
        self.index = index
        self.params = params
        self.edges = list(edges)
        self.sinks = list(sinks)
        self.ctx = ctx
        self.state = NeuronState()
        self.synapses = [SynapseState.initial(s) for s in params.synapses]
        self.queue: List[QueuedEvent] = []
        self.firings = []
        self.synaptic: Dict[int, list] = {}
        self.plasticity: Dict[int, list] = {}
        self.photons: List[PhotonEvent] = []
        self.sink_activity = SinkActivity()
        self.ni_trace: List[Tuple[float, int, float]] = []
        self.processed = 0
        self._drives: Dict[int, Drive] = {}
        self._drive_rng: Dict[int, np.random.Generator] = {}
        self._drive_cursor: Dict[int, int] = {}
        self._sink_energy: Dict[int, float] = {}
        for d, drive in drives:
            self._start_drive(d, drive)

    # --- drives ---------------------------------------------------------------

    def _start_drive(self, d: int, drive: Drive):
        self._drives[d] = drive
        if drive.times is not None:
            self._drive_cursor[d] = 0
            self._next_listed(d)
        elif drive.rate > 0:
            self._drive_rng[d] = stream(self.ctx.seed, STREAM_DRIVE, d)
            self._next_poisson(d, drive.start)

    def _next_listed(self, d: int):
        times = sorted(self._drives[d].times)
        k = self._drive_cursor[d]
        if k < len(times):
            self._drive_cursor[d] = k + 1
            self._push_drive(d, times[k], seq=k)

    def _next_poisson(self, d: int, t: float):
        drive = self._drives[d]
        t_next = t + self._drive_rng[d].exponential(1.0 / drive.rate)
        stop = drive.stop if drive.stop is not None else self.ctx.t_end
        if t_next <= min(stop, self.ctx.t_end):
            self._push_drive(d, t_next, seq=0)

    def _push_drive(self, d: int, t: float, seq: int):
        drive = self._drives[d]
        self.schedule(QueuedEvent(t=t, source=-1, edge=d, kind=EventKind.DRIVE, seq=seq,
                                  target=self.index, synapse=drive.synapse, n_photons=1))

    def _drive_detected(self, d: int, synapse: int) -> bool:
        rng = self._drive_rng.get(d)
        if rng is None:
            return True
        return bool(rng.random() < self.ctx.detection[(self.index, synapse)])

    # --- queue ----------------------------------------------------------------

    def schedule(self, event: QueuedEvent):
        heapq.heappush(self.queue, event)

    def next_time(self) -> Optional[float]:
        return self.queue[0].t if self.queue else None

    def process(self, window_end: float, inclusive: bool, limit: Optional[int] = None) -> List[QueuedEvent]:
        """Run up to limit local events before window_end; return the cross-neuron events emitted"""
        outbound: List[QueuedEvent] = []
        taken = 0
        while self.queue:
            head = self.queue[0]
            if head.t > self.ctx.t_end or head.t > window_end or (head.t == window_end and not inclusive):
                break
            if limit is not None and taken >= limit:
                break
            taken += 1
            event = heapq.heappop(self.queue)
            self.processed += 1
            if event.kind == EventKind.DRIVE:
                if self._drive_detected(event.edge, event.synapse):
                    self._photon(event.t, event.synapse, outbound)
                if event.edge in self._drive_rng:
                    self._next_poisson(event.edge, event.t)
                else:
                    self._next_listed(event.edge)
            elif event.kind == EventKind.PHOTON:
                self._photon(event.t, event.synapse, outbound)
            else:
                self._update(event.t, outbound)
        return outbound

    # --- dynamics -------------------------------------------------------------

    def _photon(self, t: float, s: int, outbound: List[QueuedEvent]):
        syn = self.params.synapses[s]
        syn_state, event = synaptic_fire(self.synapses[s], syn, t, self.ctx.transducer)
        self.synaptic.setdefault(s, []).append(event)
        self.state = record_synaptic(self.state, event, self.params, s)
        if syn.plastic and event.energy > 0:
            syn_state, update = apply_stdp(syn_state, syn, t, pre=t)
            self.plasticity.setdefault(s, []).append(update)
            self.state = record_plasticity(self.state, update.energy)
        self.synapses[s] = syn_state
        self._update(t, outbound)

    def _update(self, t: float, outbound: List[QueuedEvent]):
        self.state = integrate_ni(self.state, self.synapses, self.params, t)
        if self.ctx.trace_ni:
            self.ni_trace.append((t, self.index, self.state.i_ni))
        if threshold_check(self.state, self.params, t):
            self._fire(t, outbound)

    def _fire(self, t: float, outbound: List[QueuedEvent]):
        count = self.state.firing_count
        rng = None
        if self.ctx.emission == EmissionMode.STOCHASTIC:
            rng = stream(self.ctx.seed, STREAM_LED, self.index, count)
        self.state, event = fire(self.state, self.params, t, rng, self.ctx.emission)
        self.firings.append(event)
        self.synapses = [advance(s, p, t) for s, p in zip(self.synapses, self.params.synapses)]
        self.synapses = reset_synapses(self.synapses, self.params)
        for s, syn in enumerate(self.params.synapses):
            if syn.plastic:
                self.synapses[s], update = apply_stdp(self.synapses[s], syn, t, post=t)
                self.plasticity.setdefault(s, []).append(update)
                self.state = record_plasticity(self.state, update.energy)
        if self.params.refractory > 0:
            self.schedule(QueuedEvent(t=t + self.params.refractory, source=self.index, edge=-1,
                                      kind=EventKind.REFRACTORY_END, seq=count, target=self.index))
        self._emit(t, event.n_photons, count, outbound)

    def _emit(self, t: float, n_photons: int, count: int, outbound: List[QueuedEvent]):
        """Split the pulse over the fanout and thin it per edge by transmission × detection efficiency"""
        rng = stream(self.ctx.seed, STREAM_EMISSION, self.index, count)
        share, extra = divmod(n_photons, self.params.fanout)
        slot = 0
        for e, edge, delay in self.edges:
            emitted = share + (1 if slot < extra else 0)
            slot += 1
            p = edge.transmission * self.ctx.detection[(edge.target, edge.synapse)]
            delivered = int(rng.binomial(emitted, p)) if emitted else 0
            self.photons.append(PhotonEvent(t_arrival=t + delay, edge=e, n_photons=delivered, t_fire=t,
                                            emitted=emitted))
            if delivered:
                outbound.append(QueuedEvent(t=t + delay, source=self.index, edge=e, kind=EventKind.PHOTON,
                                            seq=count, target=edge.target, synapse=edge.synapse,
                                            n_photons=delivered))
        sink_syn = self.ctx.sink_synapse
        for k, (sink, delay) in enumerate(self.sinks):
            slot += sink.count
            if t + delay > self.ctx.t_end or share == 0:
                continue
            p = sink.transmission * sink_syn.spd.detection_efficiency
            p_fire = 1.0 - (1.0 - p) ** share
            fired = int(rng.binomial(sink.count, p_fire))
            self.sink_activity = self.sink_activity.add(fired, fired * self._sink_event_energy(k, sink))

    def _sink_event_energy(self, k: int, sink: SinkFanout) -> float:
        if k not in self._sink_energy:
            syn = self.ctx.sink_synapse
            bias = weight_to_bias(syn, sink.weight)
            self._sink_energy[k] = self.ctx.transducer.transduce(bias, syn, 0.0).energy
        return self._sink_energy[k]

    def finish(self, record: SpikeRecord):
        t_end = self.ctx.t_end
        record.firings[self.index] = self.firings
        for s, events in self.synaptic.items():
            record.synaptic[(self.index, s)] = events
        for s, events in self.plasticity.items():
            record.plasticity[(self.index, s)] = events
        for s, (state, syn) in enumerate(zip(self.synapses, self.params.synapses)):
            record.final_si[(self.index, s)] = advance(state, syn, t_end).i_si
            record.final_weights[(self.index, s)] = state.weight
        record.photons.extend(self.photons)
        if self.sink_activity.events:
            record.sinks[self.index] = self.sink_activity
        record.ledgers[self.index] = self.state.energy_ledger
        record.ni_trace.extend(self.ni_trace)


def _network_of(config: Union[LoopsimConfig, NetworkConfig]) -> NetworkConfig:
    if isinstance(config, LoopsimConfig):
        if config.network is None:
            raise ConfigError("configuration has no network section",
                              violations=[Violation("network", "required for a network run")])
        return config.network
    return config


def make_transducer(config: LoopsimConfig, mode: SimulationMode) -> Transducer:
    if mode == SimulationMode.DEVICE:
        return DeviceTransducer(config.transducer, config.solver)
    return BehavioralTransducer(config.calibration)


def run(config: LoopsimConfig, t_end: float, mode: SimulationMode = SimulationMode.BEHAVIORAL,
        parallelism: Optional[int] = None, seed: Optional[int] = None,
        transducer: Optional[Transducer] = None) -> SpikeRecord:
    """Simulate config.network up to t_end and return its SpikeRecord.

    Raises ConfigError on invalid networks (device mode is limited to
    DEVICE_NEURON_LIMIT neurons) and SimulationAbort once max_events is
    exceeded; the abort carries the partial record.
    """
    mode = SimulationMode(mode)
    network = _network_of(config)
    violations = network.violations("network", config.calibration)
    if violations:
        raise ConfigError("invalid network", violations=violations)
    if mode == SimulationMode.DEVICE and len(network.neurons) > DEVICE_NEURON_LIMIT:
        raise ConfigError("device mode is limited to small networks", violations=[
            Violation("network.neurons",
                      f"{len(network.neurons)} neurons exceed {DEVICE_NEURON_LIMIT} in device mode")])
    if t_end <= 0:
        raise ConfigError("t_end must be positive", violations=[Violation("t_end", f"got {t_end}")])

    seed = network.seed if seed is None else seed
    workers = parallelism or config.parallelism
    ctx = _Context(
        seed=seed, t_end=t_end,
        transducer=transducer or make_transducer(config, mode),
        sink_synapse=config.synapse,
        emission=EmissionMode.STOCHASTIC if network.stochastic_emission else EmissionMode.EXPECTED,
        trace_ni=network.trace_ni,
        detection={(i, s): syn.spd.detection_efficiency
                   for i, n in enumerate(network.neurons) for s, syn in enumerate(n.synapses)},
    )

    out_edges: Dict[int, list] = {}
    for e, edge in enumerate(network.edges):
        out_edges.setdefault(edge.source, []).append((e, edge, edge_delay(edge.path_length, network.group_index)))
    out_sinks: Dict[int, list] = {}
    for sink in network.sinks:
        out_sinks.setdefault(sink.source, []).append((sink, edge_delay(sink.path_length, network.group_index)))
    drives: Dict[int, list] = {}
    for d, drive in enumerate(network.drives):
        drives.setdefault(drive.neuron, []).append((d, drive))

    shards = [NeuronShard(i, params, out_edges.get(i, ()), out_sinks.get(i, ()), drives.get(i, ()), ctx)
              for i, params in enumerate(network.neurons)]
    lookahead = min((d for edges in out_edges.values() for _, _, d in edges), default=math.inf)
    logger.info("Running %d neurons, %d edges, %d drives to t=%.3g s (%s mode, lookahead %.3g s, %d workers)",
                len(shards), len(network.edges), len(network.drives), t_end, mode.value, lookahead, workers)

    record = SpikeRecord(t_end=t_end, seed=seed, mode=mode.value)
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    windows = 0
    try:
        while True:
            pending = [t for t in (s.next_time() for s in shards) if t is not None]
            if not pending or min(pending) > t_end:
                break
            t_next = min(pending)
            window_end = t_next + lookahead
            inclusive = lookahead == 0
            active = [s for s in shards if s.next_time() is not None and s.next_time() <= window_end]
            # a shard reaching its limit alone pushes the total past max_events
            limit = network.max_events - sum(s.processed for s in shards) + 1
            if executor is not None and len(active) > 1:
                results = list(executor.map(lambda s: s.process(window_end, inclusive, limit), active))
            else:
                results = [s.process(window_end, inclusive, limit) for s in active]
            for event in sorted(chain.from_iterable(results)):
                shards[event.target].schedule(event)
            windows += 1
            processed = sum(s.processed for s in shards)
            if processed > network.max_events:
                record.aborted = True
                _collect(record, shards)
                logger.warning("Event budget of %d exceeded at t=%.4g s; returning partial record",
                               network.max_events, t_next)
                raise SimulationAbort(f"event queue bound {network.max_events} exceeded at t={t_next:.6g} s",
                                      record=record)
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    _collect(record, shards)
    logger.info("Network run done: %d windows, %s", windows, record.counts)
    return record


def _collect(record: SpikeRecord, shards: Sequence[NeuronShard]):
    for shard in shards:
        shard.finish(record)
    record.processed_events = sum(s.processed for s in shards)
    record.photons.sort(key=lambda p: (p.t_fire, p.edge))
    record.ni_trace.sort(key=lambda r: (r[0], r[1]))
