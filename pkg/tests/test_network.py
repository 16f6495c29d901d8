import filecmp

import numpy as np
import pytest
from scipy import stats

from loopsim.config import Drive, Edge, NetworkConfig, ResetPolicy
from loopsim.errors import ConfigError, DomainError, SimulationAbort
from loopsim.junction import anchor_table
from loopsim.network import (DEVICE_NEURON_LIMIT, EventKind, QueuedEvent, SimulationMode, edge_delay, log_uniform,
                             one_over_f_rates, run)
from loopsim.synapse import contribution_per_event

DRIVE_TIMES = [0.0, 100e-9, 200e-9]


def _neuron(config, events_to_fire, n_synapses=1, photons=100, fanout=1, reset=ResetPolicy.PURGE_SI):
    strong = config.synapse.model_copy(update={"initial_weight": 1})
    step = contribution_per_event(strong, 497, config.neuron.ni_inductance)
    threshold = config.neuron.jth.critical_current - (events_to_fire - 0.5) * step
    return config.neuron.model_copy(update={
        "synapses": [strong] * n_synapses, "threshold_bias": threshold, "fanout": fanout,
        "photons_per_synapse": photons, "reset_policy": reset,
    })


def _pair(config, **network):
    """A fires on its third driven event; B fires on the first photon it detects"""
    a = _neuron(config, 3)
    b = _neuron(config, 1)
    net = NetworkConfig(neurons=[a, b], edges=[Edge(source=0, target=1, synapse=0)],
                        drives=[Drive(neuron=0, synapse=0, rate=0.0, times=DRIVE_TIMES)], **network)
    return config.model_copy(update={"network": net})


def _ring(config, n=6, rate=5e6):
    neuron = _neuron(config, 3, n_synapses=2)
    drive, plastic = neuron.synapses
    drive = drive.model_copy(update={"spd": drive.spd.model_copy(update={"detection_efficiency": 0.9})})
    plastic = plastic.model_copy(update={"plastic": True})
    neuron = neuron.model_copy(update={"synapses": [drive, plastic]})
    net = NetworkConfig(
        neurons=[neuron] * n,
        edges=[Edge(source=i, target=(i + 1) % n, synapse=1, path_length=1e-3 * (1 + i)) for i in range(n)],
        drives=[Drive(neuron=i, synapse=0, rate=rate) for i in range(n)],
        seed=17, stochastic_emission=True, trace_ni=True,
    )
    return config.model_copy(update={"network": net})


class TestPropagation:
    def test_single_hop(self, config):
        cfg = _pair(config)
        record = run(cfg, 1e-6)
        delay = edge_delay(1e-3, cfg.network.group_index)
        assert record.firing_times(0) == [200e-9]
        assert record.synaptic_times(1, 0) == [pytest.approx(200e-9 + delay, abs=1e-18)]
        assert record.firing_times(1) == [pytest.approx(200e-9 + delay, abs=1e-18)]

    def test_delay_follows_path_length(self):
        assert edge_delay(0.15, 2.0) == pytest.approx(1e-9, rel=1e-3)

    def test_dark_target_logs_nothing(self, config):
        cfg = _pair(config)
        b = cfg.network.neurons[1]
        dark = b.model_copy(update={"synapses": [b.synapses[0].model_copy(update={
            "spd": b.synapses[0].spd.model_copy(update={"detection_efficiency": 0.0})})]})
        net = cfg.network.model_copy(update={"neurons": [cfg.network.neurons[0], dark]})
        record = run(cfg.model_copy(update={"network": net}), 1e-6)
        assert record.firing_times(0) == [200e-9]
        assert record.synaptic_times(1, 0) == []
        assert [p.n_photons for p in record.photons] == [0]

    def test_summary_books_requested_and_emitted_photons(self, config):
        record = run(_pair(config), 1e-6)
        assert record.summary()["photons"] == {"requested": 200, "emitted": 200}
        cfg = _pair(config)
        small = [n.model_copy(update={"photons_per_synapse": 10}) for n in cfg.network.neurons]
        record = run(cfg.model_copy(update={"network": cfg.network.model_copy(update={"neurons": small})}), 1e-6)
        assert len(record.firing_times(1)) == 1
        assert record.summary()["photons"] == {"requested": 20, "emitted": 124}

    def test_photon_conservation(self, config):
        cfg = _ring(config)
        record = run(cfg, 3e-6)
        assert record.firing_times(0)
        for p in record.photons:
            assert 0 <= p.n_photons <= p.emitted
        for neuron, events in record.firings.items():
            for event in events:
                pulses = [p for p in record.photons
                          if cfg.network.edges[p.edge].source == neuron and p.t_fire == event.t]
                assert sum(p.emitted for p in pulses) == event.n_photons
                assert sum(p.n_photons for p in pulses) <= event.n_photons

    def test_causality(self, config):
        cfg = _ring(config)
        record = run(cfg, 3e-6)
        arrivals = {(cfg.network.edges[p.edge].target, p.t_arrival) for p in record.photons if p.n_photons}
        for i in range(len(cfg.network.neurons)):
            for t in record.synaptic_times(i, 1):
                assert (i, t) in arrivals
        for p in record.photons:
            edge = cfg.network.edges[p.edge]
            assert p.t_arrival == pytest.approx(p.t_fire + edge_delay(edge.path_length, cfg.network.group_index))
            assert p.t_fire in record.firing_times(edge.source)


class TestExecution:
    def test_parallel_runs_are_identical(self, config, tmp_path):
        cfg = _ring(config)
        serial = run(cfg, 3e-6, parallelism=1)
        parallel = run(cfg, 3e-6, parallelism=4)
        assert serial.spike_rows() == parallel.spike_rows()
        assert serial.synaptic_rows() == parallel.synaptic_rows()
        assert serial.final_weights == parallel.final_weights
        a = serial.to_csv(tmp_path / "serial")
        b = parallel.to_csv(tmp_path / "parallel")
        assert [p.name for p in a] == [p.name for p in b]
        for x, y in zip(a, b):
            assert filecmp.cmp(x, y, shallow=False)

    def test_seed_changes_outcome(self, config):
        cfg = _ring(config)
        assert run(cfg, 3e-6, seed=1).spike_rows() != run(cfg, 3e-6, seed=2).spike_rows()

    def test_event_budget_aborts_with_partial_record(self, config):
        cfg = _ring(config)
        cfg = cfg.model_copy(update={"network": cfg.network.model_copy(update={"max_events": 20})})
        with pytest.raises(SimulationAbort) as err:
            run(cfg, 3e-6)
        record = err.value.record
        assert record.aborted
        assert record.processed_events > 20

    @pytest.mark.parametrize("parallelism", [1, 4])
    def test_event_budget_stops_networks_without_edges(self, config, parallelism):
        neuron = _neuron(config, 3)
        net = NetworkConfig(neurons=[neuron] * 4, drives=[Drive(neuron=i, synapse=0, rate=50e6) for i in range(4)],
                            max_events=10)
        with pytest.raises(SimulationAbort) as err:
            run(config.model_copy(update={"network": net}), 20e-6, parallelism=parallelism)
        record = err.value.record
        assert 10 < record.processed_events <= 4 * 11
        assert max(t for i in range(4) for t in record.synaptic_times(i, 0)) < 1e-6

    def test_device_mode_neuron_limit(self, config):
        neuron = _neuron(config, 3)
        net = NetworkConfig(neurons=[neuron] * (DEVICE_NEURON_LIMIT + 1))
        with pytest.raises(ConfigError):
            run(config.model_copy(update={"network": net}), 1e-6, mode=SimulationMode.DEVICE)

    def test_fanout_must_match_edges(self, config):
        cfg = _pair(config)
        a = cfg.network.neurons[0].model_copy(update={"fanout": 2})
        net = cfg.network.model_copy(update={"neurons": [a, cfg.network.neurons[1]]})
        with pytest.raises(ConfigError) as err:
            run(cfg.model_copy(update={"network": net}), 1e-6)
        assert any("fanout" in v.path for v in err.value.violations)

    def test_missing_network(self, config):
        with pytest.raises(ConfigError):
            run(config, 1e-6)

    def test_event_order_breaks_ties(self):
        first = QueuedEvent(t=1.0, source=0, edge=1, kind=EventKind.PHOTON, seq=0, target=3)
        later_edge = QueuedEvent(t=1.0, source=0, edge=2, kind=EventKind.PHOTON, seq=0, target=0)
        later_source = QueuedEvent(t=1.0, source=1, edge=0, kind=EventKind.PHOTON, seq=0, target=0)
        assert sorted([later_source, later_edge, first]) == [first, later_edge, later_source]

    def test_ni_trace_and_plasticity_tables(self, config, tmp_path):
        record = run(_ring(config), 3e-6)
        names = {p.name for p in record.to_csv(tmp_path)}
        assert {"spikes.csv", "synaptic_events.csv", "plasticity_events.csv", "ni_trace.csv"} <= names
        header = (tmp_path / "spikes.csv").read_text().splitlines()[0]
        assert header == "neuron,t_fire,n_photons,E_amp"


class TestRates:
    def test_degenerate_range(self):
        assert np.all(one_over_f_rates(5, 1e3, 1e3, seed=0) == 1e3)

    def test_invalid_range(self):
        with pytest.raises(DomainError):
            one_over_f_rates(5, 2e3, 1e3, seed=0)

    def test_median(self):
        rates = one_over_f_rates(100_000, 100.0, 20e6, seed=3)
        assert np.median(rates) == pytest.approx(44.7e3, rel=0.03)

    def test_log_density_is_flat(self):
        rates = one_over_f_rates(100_000, 100.0, 20e6, seed=4)
        counts, _ = np.histogram(np.log(rates), bins=20, range=(np.log(100.0), np.log(20e6)))
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_log_uniform_bounds(self):
        draws = log_uniform(1000, 20, 1000, seed=0, key=2)
        assert draws.min() >= 20 and draws.max() <= 1000

    def test_drive_rate_scaling(self, config):
        neuron = _neuron(config, 5)

        def fired(rate):
            net = NetworkConfig(neurons=[neuron] * 50,
                                drives=[Drive(neuron=i, synapse=0, rate=rate) for i in range(50)], seed=5)
            record = run(config.model_copy(update={"network": net}), 500e-6)
            return record.amplifier_energy

        assert fired(400e3) / fired(200e3) == pytest.approx(2.0, rel=0.1)


@pytest.mark.slow
class TestCrossTier:
    def test_device_and_behavioral_agree(self, config):
        table = anchor_table(config.transducer, config.solver, config.calibration, biases=[1e-6, 3e-6])
        cfg = _pair(config.model_copy(update={"calibration": table}))
        behavioral = run(cfg, 400e-9, mode=SimulationMode.BEHAVIORAL)
        device = run(cfg, 400e-9, mode=SimulationMode.DEVICE)
        for neuron in (0, 1):
            assert len(device.firing_times(neuron)) == len(behavioral.firing_times(neuron))
            for t_dev, t_beh in zip(device.firing_times(neuron), behavioral.firing_times(neuron)):
                assert t_dev == pytest.approx(t_beh, abs=1e-9)
        assert device.synaptic_times(1, 0) == pytest.approx(behavioral.synaptic_times(1, 0), abs=1e-9)
        for key, i_si in behavioral.final_si.items():
            assert device.final_si[key] == pytest.approx(i_si, rel=0.05, abs=1e-12)
