import math

import pytest

from loopsim.config import CONSTANTS, StdpKernel
from loopsim.errors import ConfigError, DomainError
from loopsim.synapse import (BehavioralTransducer, SpikeOrder, SynapseState, WritePolarity, advance, apply_stdp,
                             contribution_per_event, ni_contribution, plasticity_energy, purge, si_decay,
                             stdp_magnitude, stdp_update, synaptic_fire, weight_to_bias, weight_write)

QUANTUM = CONSTANTS.flux_quantum / 10e-6


@pytest.fixture
def levels(synapse):
    return synapse.model_copy(update={"n_levels": 7, "initial_weight": 3, "plastic": True})


class TestWeights:
    def test_binary_biases(self, synapse):
        assert weight_to_bias(synapse, 0) == 1e-6
        assert weight_to_bias(synapse, 1) == pytest.approx(3e-6)

    def test_multilevel_step(self, levels):
        assert weight_to_bias(levels, 1) - weight_to_bias(levels, 0) == pytest.approx(1e-6 / 3)

    def test_weight_out_of_range(self, synapse):
        with pytest.raises(DomainError):
            weight_to_bias(synapse, 2)

    def test_write_toggles(self, synapse):
        state = SynapseState.initial(synapse)
        up = weight_write(state, synapse, WritePolarity.POTENTIATE)
        assert weight_to_bias(synapse, up.weight) == pytest.approx(3e-6)
        assert weight_write(up, synapse, WritePolarity.DEPRESS).weight == 0

    def test_saturated_writes_are_no_ops(self, synapse):
        empty = SynapseState.initial(synapse)
        assert weight_write(empty, synapse, WritePolarity.DEPRESS) is empty
        full = empty.evolve(weight=1)
        assert weight_write(full, synapse, WritePolarity.POTENTIATE) is full

    def test_alternating_writes_return_to_start(self, synapse):
        state = SynapseState.initial(synapse)
        polarities = (WritePolarity.POTENTIATE, WritePolarity.DEPRESS)
        for i in range(1_000_000):
            state = weight_write(state, synapse, polarities[i % 2])
        assert state == SynapseState.initial(synapse)


class TestStdp:
    def test_signs(self, levels):
        state = SynapseState.initial(levels)
        assert stdp_update(state, levels, 10e-9, SpikeOrder.PRE_THEN_POST).weight > state.weight
        assert stdp_update(state, levels, 10e-9, SpikeOrder.POST_THEN_PRE).weight < state.weight

    @pytest.mark.parametrize("kernel", list(StdpKernel))
    def test_magnitude_falls_with_separation(self, levels, kernel):
        params = levels.model_copy(update={"stdp_step": 4, "stdp_kernel": kernel})
        magnitudes = [stdp_magnitude(params, dt) for dt in (0.0, 10e-9, 25e-9, 40e-9, 49e-9)]
        assert magnitudes == sorted(magnitudes, reverse=True)
        assert magnitudes[0] == 4

    def test_outside_window(self, levels):
        state = SynapseState.initial(levels)
        assert stdp_magnitude(levels, levels.stdp_window) == 0
        assert stdp_update(state, levels, 2 * levels.stdp_window, SpikeOrder.PRE_THEN_POST) == state

    def test_negative_separation(self, levels):
        with pytest.raises(DomainError):
            stdp_magnitude(levels, -1e-9)

    def test_pair_with_partner(self, levels):
        state = SynapseState.initial(levels)
        state, first = apply_stdp(state, levels, 0.0, pre=0.0)
        assert first.delta_w == 0
        assert first.energy == pytest.approx(2 * levels.spd.detection_energy)
        state, second = apply_stdp(state, levels, 10e-9, post=10e-9)
        assert second.delta_w == 1
        assert second.energy == pytest.approx(plasticity_energy(levels, 1))
        assert state.weight == 4

    def test_anti_hebbian_pair(self, levels):
        state, _ = apply_stdp(SynapseState.initial(levels), levels, 0.0, post=0.0)
        state, event = apply_stdp(state, levels, 5e-9, pre=5e-9)
        assert event.delta_w == -1
        assert state.weight == 2

    def test_clamped_update_books_no_junction_energy(self, levels):
        full = SynapseState.initial(levels).evolve(weight=6)
        state, _ = apply_stdp(full, levels, 0.0, pre=0.0)
        state, event = apply_stdp(state, levels, 1e-9, post=1e-9)
        assert event.delta_w == 0
        assert state.weight == 6

    def test_needs_a_spike(self, levels):
        with pytest.raises(DomainError):
            apply_stdp(SynapseState.initial(levels), levels, 0.0)


class TestDecay:
    def test_one_time_constant(self, synapse):
        params = synapse.model_copy(update={"si_resistance": 1.0})
        state = SynapseState(i_si=5e-6)
        decayed = si_decay(state, params, params.tau_si)
        assert decayed.i_si == pytest.approx(5e-6 / math.e, rel=1e-3)

    def test_lossless_loop_holds(self, synapse):
        state = SynapseState(i_si=5e-6)
        assert si_decay(state, synapse, 1e-3).i_si == 5e-6

    def test_advance_is_idempotent_backwards(self, synapse):
        state = SynapseState(i_si=1e-6, t_update=2e-9)
        assert advance(state, synapse, 1e-9) is state

    def test_negative_interval(self, synapse):
        with pytest.raises(DomainError):
            si_decay(SynapseState(), synapse, -1.0)


class TestSynapticFire:
    def test_strong_event(self, synapse, transducer):
        state = SynapseState.initial(synapse).evolve(weight=1)
        state, event = synaptic_fire(state, synapse, 0.0, transducer)
        assert event.n_fluxons == 497
        assert state.i_si == pytest.approx(497 * QUANTUM)
        assert event.energy == pytest.approx(synapse.spd.detection_energy
                                             + 2 * 497 * 10e-6 * CONSTANTS.flux_quantum)

    @pytest.mark.parametrize("bias", [1e-6, 1.5e-6, 2e-6, 2.5e-6, 3e-6])
    def test_event_energy_bounds(self, synapse, transducer, bias):
        energy = transducer.transduce(bias, synapse).energy
        assert 0.75 * 6e-18 <= energy <= 1.25 * 45e-18

    def test_detector_dead_time(self, synapse, transducer):
        state, _ = synaptic_fire(SynapseState.initial(synapse), synapse, 0.0, transducer)
        again, event = synaptic_fire(state, synapse, 1e-9, transducer)
        assert event.n_fluxons == 0
        assert event.energy == 0.0
        assert again.i_si == state.i_si

    def test_capacity_saturates(self, synapse, transducer, caplog):
        small = synapse.model_copy(update={"si_inductance": 100e-9})
        state, event = synaptic_fire(SynapseState.initial(small).evolve(weight=1), small, 0.0, transducer)
        assert event.saturated
        assert event.n_fluxons == 483
        assert state.i_si <= small.max_si_current
        assert "saturated" in caplog.text

    def test_purge(self, synapse, transducer):
        state, _ = synaptic_fire(SynapseState.initial(synapse), synapse, 0.0, transducer)
        assert purge(state).i_si == 0.0


class TestCoupling:
    def test_contribution(self, synapse):
        state = SynapseState(i_si=497 * QUANTUM)
        assert ni_contribution(state, synapse, 100e-9) == pytest.approx(contribution_per_event(synapse, 497, 100e-9))

    def test_inhibitory_sign(self, synapse):
        inhibitory = synapse.model_copy(update={"coupling_sign": -1})
        assert contribution_per_event(inhibitory, 33, 100e-9) < 0

    def test_coupling_violation(self, synapse):
        strong = synapse.model_copy(update={"mutual_inductance": 2e-6})
        with pytest.raises(ConfigError):
            ni_contribution(SynapseState(i_si=1e-6), strong, 100e-9)


class TestBehavioralTransducer:
    def test_anchors_are_exact(self, transducer, table):
        for anchor in table.anchors:
            assert transducer.fluxon_yield(anchor.bias) == anchor.fluxons

    def test_interpolates(self, transducer):
        assert transducer.fluxon_yield(1.2e-6) == 65

    def test_strict_range(self, transducer):
        with pytest.raises(DomainError):
            transducer.fluxon_yield(0.5e-6)
        with pytest.raises(DomainError):
            transducer.fluxon_yield(5e-6)

    def test_lenient_range(self, table):
        lenient = BehavioralTransducer(table, strict=False)
        assert lenient.fluxon_yield(0.5e-6) == 0
        assert lenient.fluxon_yield(5e-6) == 846

    def test_si_feedback_lowers_yield(self, synapse, transducer):
        feedback = synapse.model_copy(update={"si_feedback": True})
        assert transducer.effective_yield(3e-6, 1e-6, feedback) == 222
        assert transducer.effective_yield(1e-6, 1e-6, feedback) == 0
