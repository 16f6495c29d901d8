import logging
import math

import numpy as np
import pytest

from loopsim.config import CONSTANTS, JunctionParams, SolverConfig, SolverMethod, StdpKernel
from loopsim.errors import CircuitError, DomainError
from loopsim.junction import (Branch, CompiledCircuit, CurrentSource, ElementKind, LoopCircuit, MutualCoupling,
                              count_fluxons, fluxon_rate, integrate_transient, loop_storage_capacity, plasma_frequency,
                              rsj_mean_voltage, run_stdp_cell, run_transducer, single_junction, stdp_cell, storage_cell,
                              stored_fluxons)
from loopsim.synapse import SpikeOrder, SynapseState, stdp_update

IC = 10e-6
R = 5.0


def _overdamped():
    return JunctionParams(critical_current=IC, shunt_resistance=R)


def _underdamped():
    return JunctionParams.with_beta_c(IC, R, 0.5)


def _plasma_period():
    return 1 / plasma_frequency(_underdamped())


def _running(dt_max, t_end=1e-9, bias=2 * IC):
    return integrate_transient(single_junction(_underdamped(), bias), SolverConfig(t_end=t_end, dt_max=dt_max))


def _slip_voltage(trace, junction, t_from):
    slips = trace.slip_times[junction]
    slips = slips[slips > t_from]
    assert len(slips) >= 3
    return CONSTANTS.flux_quantum * (len(slips) - 1) / (slips[-1] - slips[0])


class TestPhysics:
    def test_rsj_voltage_below_ic_is_zero(self):
        assert rsj_mean_voltage(_overdamped(), 0.5 * IC) == 0.0

    def test_rsj_voltage_above_ic(self):
        assert rsj_mean_voltage(_overdamped(), 2 * IC) == pytest.approx(R * IC * math.sqrt(3))

    def test_rsj_needs_zero_capacitance(self):
        with pytest.raises(DomainError):
            rsj_mean_voltage(JunctionParams.with_beta_c(IC, R, 0.3), 2 * IC)

    def test_fluxon_rate_is_josephson_relation(self):
        jj = _overdamped()
        assert fluxon_rate(jj, 2 * IC) * CONSTANTS.flux_quantum == pytest.approx(rsj_mean_voltage(jj, 2 * IC))

    def test_storage_capacity(self):
        assert loop_storage_capacity(10e-6, 10e-6) == pytest.approx(4.84e4, rel=0.01)

    def test_storage_capacity_domain(self):
        with pytest.raises(DomainError):
            loop_storage_capacity(0.0, 10e-6)


class TestCircuit:
    def test_coupling_bound(self):
        circuit = LoopCircuit(
            branches=[Branch(name="L1", kind=ElementKind.INDUCTOR, nodes=("a", "0"), inductance=1e-9),
                      Branch(name="L2", kind=ElementKind.INDUCTOR, nodes=("b", "0"), inductance=1e-9),
                      Branch(name="R1", kind=ElementKind.RESISTOR, nodes=("a", "b"), resistance=1.0)],
            mutual_couplings=[MutualCoupling(first="L1", second="L2", inductance=2e-9)],
        )
        with pytest.raises(CircuitError) as err:
            CompiledCircuit(circuit)
        assert any("sqrt(L1·L2)" in v.message for v in err.value.violations)

    def test_disconnected_island(self):
        circuit = LoopCircuit(branches=[
            Branch(name="J1", kind=ElementKind.JUNCTION, nodes=("a", "0"), junction=_overdamped()),
            Branch(name="R1", kind=ElementKind.RESISTOR, nodes=("x", "y"), resistance=1.0),
        ])
        assert any("not connected" in v.message for v in circuit.violations())

    def test_parallel_junctions_without_inductance(self):
        circuit = LoopCircuit(branches=[
            Branch(name="J1", kind=ElementKind.JUNCTION, nodes=("a", "0"), junction=_overdamped()),
            Branch(name="J2", kind=ElementKind.JUNCTION, nodes=("0", "a"), junction=_overdamped()),
        ])
        assert any("zero inductance" in v.message for v in circuit.violations())

    def test_shorted_source(self):
        circuit = LoopCircuit(
            branches=[Branch(name="J1", kind=ElementKind.JUNCTION, nodes=("a", "0"), junction=_overdamped())],
            sources=[CurrentSource(name="I", node="a", return_node="a", value=1e-6)],
        )
        assert any("shorted" in v.message for v in circuit.violations())

    def test_piecewise_linear_source(self):
        source = CurrentSource(name="I", node="a", points=[(0.0, 0.0), (1.0, 2.0)])
        assert source.at(0.5) == pytest.approx(1.0)
        assert source.at(5.0) == pytest.approx(2.0)


class TestRsjOracle:
    @pytest.mark.parametrize("ratio", [1.01, 1.5, 3.0])
    def test_mean_voltage(self, ratio):
        bias = ratio * IC
        solver = SolverConfig(t_end=10e-9, dt_max=2e-12)
        trace = integrate_transient(single_junction(_overdamped(), bias), solver)
        assert _slip_voltage(trace, "J1", 0.5e-9) == pytest.approx(rsj_mean_voltage(_overdamped(), bias), rel=0.01)

    def test_subcritical_bias_does_not_slip(self):
        trace = integrate_transient(single_junction(_overdamped(), 0.9 * IC), SolverConfig(t_end=1e-9))
        assert count_fluxons(trace, "J1") == 0
        assert trace.phase("J1")[-1] == pytest.approx(math.asin(0.9), rel=1e-3)

    def test_rk4_agrees_with_radau(self):
        bias = 2 * IC
        radau = integrate_transient(single_junction(_overdamped(), bias), SolverConfig(t_end=2e-9, dt_max=0.5e-12))
        rk4 = integrate_transient(single_junction(_overdamped(), bias),
                                  SolverConfig(t_end=2e-9, dt_max=0.1e-12, method=SolverMethod.RK4))
        assert count_fluxons(rk4, "J1") == pytest.approx(count_fluxons(radau, "J1"), abs=1)

    def test_unknown_junction(self):
        trace = integrate_transient(single_junction(_overdamped(), 0.5 * IC), SolverConfig(t_end=0.1e-9))
        with pytest.raises(DomainError):
            count_fluxons(trace, "J9")

    def test_trace_csv(self, tmp_path):
        trace = integrate_transient(single_junction(_overdamped(), 2 * IC), SolverConfig(t_end=0.2e-9))
        path = trace.to_csv(tmp_path / "trace.csv")
        header = path.read_text().splitlines()[0].split(",")
        assert header[:3] == ["t", "J1.phase", "J1.voltage"]
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (len(trace.t), len(header))



class TestSampling:
    def test_resampling_keeps_the_fluxon_count(self):
        trace = _running(_plasma_period() / 20)
        grid = np.linspace(0.0, trace.t[-1], int(trace.t[-1] / (_plasma_period() / 10)) + 1)
        coarse = trace.resample(grid)
        assert len(coarse.t) < len(trace.t)
        assert count_fluxons(coarse, "J1") == count_fluxons(trace, "J1") > 0

    def test_halving_dt_max_keeps_the_fluxon_count(self):
        period = _plasma_period()
        assert count_fluxons(_running(period / 40), "J1") == count_fluxons(_running(period / 20), "J1")

    def test_coarse_step_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="loopsim.junction.solver"):
            _running(_plasma_period() / 2, t_end=0.1e-9, bias=0.5 * IC)
        assert "plasma period" in caplog.text

    def test_overdamped_junction_has_no_plasma_limit(self):
        assert plasma_frequency(_overdamped()) == math.inf


class TestJunctionState:
    def test_fluxon_count_never_decreases_under_constant_bias(self):
        trace = integrate_transient(single_junction(_overdamped(), 2 * IC), SolverConfig(t_end=1e-9))
        counts = [trace.junction_state("J1", k).fluxon_count for k in range(0, len(trace.t), 10)]
        assert counts == sorted(counts)
        assert trace.junction_state("J1").fluxon_count == pytest.approx(count_fluxons(trace, "J1"), abs=1)

    def test_voltage_and_latch(self):
        trace = integrate_transient(single_junction(_overdamped(), 2 * IC), SolverConfig(t_end=0.5e-9))
        state = trace.junction_state("J1")
        assert state.voltage == pytest.approx(trace.voltage("J1")[-1])
        assert not state.latched
        assert state.to_dict()["fluxon_count"] == state.fluxon_count


@pytest.mark.slow
class TestStorageCell:
    def test_write_then_erase(self, config):
        solver = config.solver.model_copy(update={"t_end": 1.2e-9})
        written = integrate_transient(storage_cell(writes=[0.3e-9]), solver)
        assert stored_fluxons(written) == 1
        cycled = integrate_transient(storage_cell(writes=[0.3e-9], erases=[0.7e-9]), solver)
        assert stored_fluxons(cycled) == 0

    def test_repeated_write_is_a_no_op(self, config):
        solver = config.solver.model_copy(update={"t_end": 1.2e-9})
        trace = integrate_transient(storage_cell(writes=[0.3e-9, 0.7e-9]), solver)
        assert stored_fluxons(trace) == 1

    def test_stored_state_holds_below_ic(self, config):
        solver = config.solver.model_copy(update={"t_end": 1.0e-9})
        trace = integrate_transient(storage_cell(writes=[0.3e-9]), solver)
        for name in ("J_w", "J_s"):
            assert abs(trace.current(name)[-1]) < 40e-6


@pytest.mark.slow
class TestTransducer:
    def test_weak_and_strong_yields(self, config):
        weak = run_transducer(config.transducer, 1e-6, config.solver)
        strong = run_transducer(config.transducer, 3e-6, config.solver)
        assert weak.n_fluxons == pytest.approx(33, abs=4)
        assert strong.n_fluxons == pytest.approx(497, abs=50)

    def test_yield_is_monotone_in_bias(self, config):
        counts = [run_transducer(config.transducer, b, config.solver).n_fluxons for b in (0.8e-6, 2e-6, 4e-6)]
        assert counts == sorted(counts)

    def test_no_detection_leaves_si_loop_empty(self, config):
        run = run_transducer(config.transducer, 3e-6, config.solver, detections=[])
        assert run.n_fluxons == 0
        assert np.max(np.abs(run.trace.current("L_si"))) < CONSTANTS.flux_quantum / config.transducer.si_inductance


FIRST_PHOTON = 0.5e-9


@pytest.mark.slow
class TestStdpCell:
    @pytest.fixture(scope="class")
    def solver(self, config):
        return config.solver.model_copy(update={"dt_max": 1e-12})

    @pytest.fixture
    def plastic(self, synapse):
        return synapse.model_copy(update={"plastic": True, "n_levels": 9, "initial_weight": 4, "stdp_step": 4,
                                          "stdp_window": 8e-9, "stdp_kernel": StdpKernel.LINEAR})

    def _circuit(self, solver, dt, order):
        first, second = [FIRST_PHOTON], [FIRST_PHOTON + dt]
        pre, post = (first, second) if order == SpikeOrder.PRE_THEN_POST else (second, first)
        return run_stdp_cell(solver, pre=pre, post=post)

    def _rule(self, params, dt, order):
        state = SynapseState.initial(params)
        return stdp_update(state, params, dt, order).weight - state.weight

    @pytest.mark.parametrize("order", list(SpikeOrder))
    def test_sign_and_size_follow_the_rule(self, solver, plastic, order):
        near, far = 1.5e-9, 4e-9
        circuit = [self._circuit(solver, dt, order).n_fluxons for dt in (near, far)]
        rule = [self._rule(plastic, dt, order) for dt in (near, far)]
        sign = 1 if order == SpikeOrder.PRE_THEN_POST else -1
        assert all(np.sign(c) == sign for c in circuit)
        assert all(np.sign(r) == sign for r in rule)
        assert abs(circuit[0]) > abs(circuit[1])
        assert abs(rule[0]) > abs(rule[1])

    def test_loop_current_counts_flux_quanta(self, solver):
        run = self._circuit(solver, 1.5e-9, SpikeOrder.PRE_THEN_POST)
        assert run.delta_i_sy == pytest.approx(run.n_fluxons * CONSTANTS.flux_quantum / 125e-9, abs=2e-9)

    def test_lone_photons_leave_the_loop_alone(self, solver):
        assert run_stdp_cell(solver, pre=[FIRST_PHOTON]).n_fluxons == 0
        assert run_stdp_cell(solver, post=[FIRST_PHOTON]).n_fluxons == 0

    @pytest.mark.parametrize("order", list(SpikeOrder))
    def test_pairs_outside_the_window(self, solver, plastic, order):
        assert self._circuit(solver, 12e-9, order).n_fluxons == 0
        assert self._rule(plastic, 12e-9, order) == 0

    def test_cell_layout(self):
        circuit = stdp_cell(pre=[1e-9], post=[2e-9])
        assert circuit.junction_names == ["J_su_plus", "J_su_minus"]
        assert circuit.branch("L_sy").inductance == 125e-9
        assert circuit.branch("L_pre_h").inductance == 1.25e-6
        assert circuit.branch("L_post_h").inductance == 12.5e-9
        assert not circuit.violations()
