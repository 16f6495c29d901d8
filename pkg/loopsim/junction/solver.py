import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from ..config.models import CONSTANTS, SolverConfig, SolverMethod
from ..errors import DomainError, IntegrationError
from .circuit import CompiledCircuit, LoopCircuit
from .physics import plasma_frequency

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
SAMPLES_PER_PLASMA_PERIOD = 5


@dataclass(frozen=True)
class JunctionState:
    """Snapshot of one junction taken from a trace sample"""
    phase: float
    phase_rate: float
    latched: bool
    fluxon_count: int

    @property
    def voltage(self) -> float:
        return CONSTANTS.phi0_over_2pi * self.phase_rate

    def to_dict(self) -> Dict[str, Any]:
        return {"phase": self.phase, "voltage": self.voltage, "latched": self.latched,
                "fluxon_count": self.fluxon_count}


@dataclass
class Trace:
    """Sampled transient solution.

    `junction_phase` and `junction_rate` hold the phase difference across each
    junction and its time derivative; `branch_currents` follows the circuit's
    branch order.
    """
    circuit: LoopCircuit
    t: np.ndarray
    node_names: List[str]
    node_phase: np.ndarray
    junction_names: List[str]
    junction_phase: np.ndarray
    junction_rate: np.ndarray
    branch_names: List[str]
    branch_currents: np.ndarray
    slip_times: Dict[str, np.ndarray] = field(default_factory=dict)
    slip_signs: Dict[str, np.ndarray] = field(default_factory=dict)
    kcl_residual: float = 0.0
    method: str = SolverMethod.RADAU.value
    evaluations: int = 0

    def _junction(self, name: str) -> int:
        try:
            return self.junction_names.index(name)
        except ValueError:
            raise DomainError(f"trace has no junction '{name}'")

    def phase(self, junction: str) -> np.ndarray:
        return self.junction_phase[:, self._junction(junction)]

    def voltage(self, junction: str) -> np.ndarray:
        return CONSTANTS.phi0_over_2pi * self.junction_rate[:, self._junction(junction)]

    def current(self, branch: str) -> np.ndarray:
        try:
            return self.branch_currents[:, self.branch_names.index(branch)]
        except ValueError:
            raise DomainError(f"trace has no branch '{branch}'")

    def mean_voltage(self, junction: str, t_from: float = 0.0) -> float:
        """Time-averaged voltage from the net phase advance over [t_from, t_end]"""
        phase = self.phase(junction)
        k = int(np.searchsorted(self.t, t_from))
        if k >= len(self.t) - 1:
            raise DomainError("averaging window holds fewer than two samples")
        span = self.t[-1] - self.t[k]
        return CONSTANTS.phi0_over_2pi * (phase[-1] - phase[k]) / span

    def junction_state(self, junction: str, sample: int = -1) -> JunctionState:
        k = self._junction(junction)
        params = self.circuit.branch(junction).junction
        rate = float(self.junction_rate[sample, k])
        voltage = CONSTANTS.phi0_over_2pi * rate
        latched = params.hysteretic and abs(voltage) > 0.5 * params.critical_current * params.shunt_resistance
        winding = (self.junction_phase[sample, k] - self.junction_phase[0, k]) / TWO_PI
        return JunctionState(phase=float(self.junction_phase[sample, k]), phase_rate=rate,
                             latched=latched, fluxon_count=int(math.floor(winding + 1e-9)))

    def resample(self, times: np.ndarray) -> "Trace":
        """Linear interpolation onto another time grid"""
        def interp(columns: np.ndarray) -> np.ndarray:
            if columns.size == 0:
                return np.zeros((len(times), columns.shape[1]))
            return np.column_stack([np.interp(times, self.t, columns[:, k]) for k in range(columns.shape[1])])

        return Trace(circuit=self.circuit, t=np.asarray(times), node_names=self.node_names,
                     node_phase=interp(self.node_phase), junction_names=self.junction_names,
                     junction_phase=interp(self.junction_phase), junction_rate=interp(self.junction_rate),
                     branch_names=self.branch_names, branch_currents=interp(self.branch_currents),
                     slip_times=self.slip_times, slip_signs=self.slip_signs,
                     kcl_residual=self.kcl_residual, method=self.method, evaluations=self.evaluations)

    def table(self) -> Tuple[List[str], np.ndarray]:
        header = ["t"]
        columns = [self.t]
        for k, name in enumerate(self.junction_names):
            header.extend([f"{name}.phase", f"{name}.voltage"])
            columns.extend([self.junction_phase[:, k], CONSTANTS.phi0_over_2pi * self.junction_rate[:, k]])
        for k, name in enumerate(self.branch_names):
            header.append(f"{name}.current")
            columns.append(self.branch_currents[:, k])
        return header, np.column_stack(columns)

    def to_csv(self, path: Union[str, Path]) -> Path:
        from ..store.records import write_table

        header, data = self.table()
        return write_table(path, header, data)


def count_fluxons(trace: Trace, junction: str) -> int:
    """Net windings round(Δφ/2π) of a junction over the trace window"""
    phase = trace.phase(junction)
    return int(round((phase[-1] - phase[0]) / TWO_PI))


class _Segment:
    """Equations of motion while every hotspot resistance is constant"""

    def __init__(self, cc: CompiledCircuit, t_mid: float):
        self.cc = cc
        g = cc.conductance_at(t_mid)
        f, c = cc.free, cc.cap
        self.g_fc = g[np.ix_(f, c)]
        self.g_cf = g[np.ix_(c, f)]
        self.g_cc = g[np.ix_(c, c)]
        self.g = g
        self.gff_inv = np.linalg.inv(g[np.ix_(f, f)]) if f.size else np.zeros((0, 0))
        self.c_inv = cc.c_cc_inv if c.size else np.zeros((0, 0))
        self.dvf_dvc = -self.gff_inv @ self.g_fc
        self.dvc_dvc = self.c_inv @ (-self.g_cc - self.g_cf @ self.dvf_dvc)

    def _drive(self, theta: np.ndarray, src: np.ndarray) -> np.ndarray:
        cc = self.cc
        phi = CONSTANTS.phi0_over_2pi
        josephson = cc.a_j @ (cc.ic[:, None] * np.sin(cc.a_j.T @ theta)) if cc.junctions else 0.0
        return src / phi - cc.k_matrix @ theta - josephson / phi

    def rates(self, t: np.ndarray, theta: np.ndarray, omega: np.ndarray):
        """Node phase rates and capacitive-node accelerations, column per sample"""
        cc = self.cc
        r = self._drive(theta, source_matrix(cc, t))
        v = np.zeros_like(theta)
        v[cc.cap] = omega
        v_f = self.gff_inv @ (r[cc.free] - self.g_fc @ omega)
        v[cc.free] = v_f
        accel = self.c_inv @ (r[cc.cap] - self.g_cc @ omega - self.g_cf @ v_f)
        return v, accel

    def fun(self, t: float, y: np.ndarray) -> np.ndarray:
        n = self.cc.size
        v, accel = self.rates(np.array([t]), y[:n, None], y[n:, None])
        return np.concatenate([v[:, 0], accel[:, 0]])

    def jac(self, t: float, y: np.ndarray) -> np.ndarray:
        cc = self.cc
        n, f, c = cc.size, cc.free, cc.cap
        theta = y[:n]
        stiffness = cc.k_matrix.copy()
        if cc.junctions:
            cos_term = cc.ic * np.cos(cc.a_j.T @ theta) / CONSTANTS.phi0_over_2pi
            stiffness += (cc.a_j * cos_term) @ cc.a_j.T
        dvf_dtheta = -self.gff_inv @ stiffness[f, :]
        dvc_dtheta = self.c_inv @ (-stiffness[c, :] - self.g_cf @ dvf_dtheta)

        jac = np.zeros((cc.state_size, cc.state_size))
        jac[np.ix_(f, np.arange(n))] = dvf_dtheta
        jac[np.ix_(f, n + np.arange(c.size))] = self.dvf_dvc
        jac[c, n + np.arange(c.size)] = 1.0
        jac[n:, :n] = dvc_dtheta
        jac[n:, n:] = self.dvc_dvc
        return jac


def source_matrix(cc: CompiledCircuit, t: np.ndarray) -> np.ndarray:
    """Injected node currents, one column per time point"""
    total = np.zeros((cc.size, len(t)))
    for s, v in zip(cc.circuit.sources, cc.source_vectors):
        if s.points:
            times, values = zip(*s.points)
            total += np.outer(v, np.interp(t, times, values))
        elif s.value:
            total += np.outer(v, np.full(len(t), s.value))
    return total


def _slip_event(column: np.ndarray):
    def event(t, y):
        return math.sin((column @ y[:len(column)] - math.pi) / 2)
    return event


def _rk4(segment: _Segment, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    ys = np.empty((len(y0), len(times)))
    y = y0.copy()
    ys[:, 0] = y
    for k in range(1, len(times)):
        t, h = times[k - 1], times[k] - times[k - 1]
        k1 = segment.fun(t, y)
        k2 = segment.fun(t + h / 2, y + h / 2 * k1)
        k3 = segment.fun(t + h / 2, y + h / 2 * k2)
        k4 = segment.fun(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("fixed-step integration diverged", t_fail=t, step=h)
        ys[:, k] = y
    return ys


def _grid_slips(phase: np.ndarray, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Slip midpoints (phase crossing π mod 2π) located between samples"""
    level = np.floor((phase - math.pi) / TWO_PI)
    steps = np.nonzero(np.diff(level))[0]
    times, signs = [], []
    for k in steps:
        sign = 1 if level[k + 1] > level[k] else -1
        target = math.pi + TWO_PI * (level[k + 1] if sign > 0 else level[k])
        frac = (target - phase[k]) / (phase[k + 1] - phase[k])
        times.append(t[k] + frac * (t[k + 1] - t[k]))
        signs.append(sign)
    return np.asarray(times), np.asarray(signs, dtype=int)


def integrate_transient(circuit: LoopCircuit, config: SolverConfig,
                        initial: Optional[np.ndarray] = None, locate_slips: bool = True) -> Trace:
    """Integrate the circuit from rest (all phases zero) over [0, t_end].

    Raises CircuitError for an invalid circuit and IntegrationError when the
    solver cannot proceed or the sampled branch currents violate Kirchhoff's
    current law by more than `abs_tol`.
    """
    cc = CompiledCircuit(circuit)
    n, nc = cc.size, cc.cap.size
    if initial is None:
        y = np.zeros(cc.state_size)
        for node, phase in circuit.initial_phases.items():
            y[cc.index[node]] = phase
    else:
        y = np.asarray(initial, dtype=float).copy()
    if y.shape != (cc.state_size,):
        raise DomainError(f"initial state must have {cc.state_size} entries")
    period = min((1 / plasma_frequency(b.junction) for b in cc.junctions), default=math.inf)
    if config.dt_max > period / SAMPLES_PER_PLASMA_PERIOD:
        logger.warning("dt_max %.3g s undersamples the %.3g s plasma period in '%s'",
                       config.dt_max, period, circuit.name)

    samples = max(1, math.ceil(config.t_end / config.dt_max - 1e-9))
    grid = np.linspace(0.0, config.t_end, samples + 1)
    edges = [0.0] + [b for b in circuit.breakpoints() if 0.0 < b < config.t_end] + [config.t_end]
    edges = [e for k, e in enumerate(edges) if k == 0 or e - edges[k - 1] >= config.min_step]
    edges[-1] = config.t_end

    ic_scale = float(np.max(cc.ic)) if cc.junctions else 1e-5
    atol_phase = config.abs_tol / ic_scale
    atol = np.concatenate([np.full(n, atol_phase), np.full(nc, atol_phase / config.dt_max)])

    states = np.zeros((cc.state_size, len(grid)))
    phase_rate = np.zeros((n, len(grid)))
    accel = np.zeros((nc, len(grid)))
    slips: Dict[str, List[Tuple[float, int]]] = {b.name: [] for b in cc.junctions}
    residual = 0.0
    evaluations = 0

    for k, (t0, t1) in enumerate(zip(edges[:-1], edges[1:])):
        last = k == len(edges) - 2
        segment = _Segment(cc, 0.5 * (t0 + t1))
        upper = grid <= t1 if last else grid < t1
        idx = np.nonzero((grid >= t0) & upper)[0]
        times = grid[idx]

        if config.method == SolverMethod.RK4:
            span = np.unique(np.concatenate([[t0], times, [t1]]))
            fine = []
            for a, b in zip(span[:-1], span[1:]):
                parts = max(1, math.ceil((b - a) / config.dt_max - 1e-9))
                fine.append(np.linspace(a, b, parts + 1)[:-1])
            fine = np.concatenate(fine + [[t1]])
            ys = _rk4(segment, y, fine)
            evaluations += 4 * (len(fine) - 1)
            pick = np.searchsorted(fine, times)
            if idx.size:
                states[:, idx] = ys[:, pick]
            y = ys[:, -1]
            if locate_slips:
                for j, b in enumerate(cc.junctions):
                    ts, signs = _grid_slips(cc.a_j[:, j] @ ys[:n], fine)
                    slips[b.name].extend(zip(ts.tolist(), signs.tolist()))
        else:
            events = [_slip_event(cc.a_j[:, j]) for j in range(len(cc.junctions))] if locate_slips else None
            eval_times = np.unique(np.append(times, t1))
            sol = solve_ivp(segment.fun, (t0, t1), y, method="Radau" if config.method == SolverMethod.RADAU else "BDF",
                            t_eval=eval_times, events=events, rtol=config.rel_tol, atol=atol,
                            max_step=config.dt_max, jac=segment.jac)
            evaluations += sol.nfev
            if sol.status == -1:
                t_fail = float(sol.t[-1]) if sol.t.size else t0
                raise IntegrationError(f"{config.method.value} failed in '{circuit.name}': {sol.message}",
                                       t_fail=t_fail, step=config.min_step)
            if idx.size:
                states[:, idx] = sol.y[:, np.searchsorted(eval_times, times)]
            y = sol.y[:, -1].copy()
            if locate_slips:
                for j, b in enumerate(cc.junctions):
                    for t_ev, y_ev in zip(sol.t_events[j], sol.y_events[j]):
                        rate = cc.a_j[:, j] @ segment.fun(t_ev, y_ev)[:n]
                        slips[b.name].append((float(t_ev), 1 if rate >= 0 else -1))

        if idx.size:
            v, a = segment.rates(times, states[:n, idx], states[n:, idx])
            phase_rate[:, idx] = v
            accel[:, idx] = a
            residual = max(residual, _kcl_residual(segment, times, states[:n, idx], v, a))
        logger.debug("segment %d [%.4e, %.4e] s: %d samples", k, t0, t1, idx.size)

    if residual > config.abs_tol:
        raise IntegrationError(f"Kirchhoff residual {residual:.3e} A exceeds abs_tol in '{circuit.name}'",
                               t_fail=config.t_end)

    theta = states[:n]
    junction_phase = (cc.a_j.T @ theta).T
    junction_rate = (cc.a_j.T @ phase_rate).T
    currents = _branch_currents(cc, grid, theta, phase_rate, accel)
    slip_times = {name: np.array([s[0] for s in sorted(v)]) for name, v in slips.items()}
    slip_signs = {name: np.array([s[1] for s in sorted(v)], dtype=int) for name, v in slips.items()}
    return Trace(circuit=circuit, t=grid, node_names=cc.node_names, node_phase=theta.T,
                 junction_names=[b.name for b in cc.junctions], junction_phase=junction_phase,
                 junction_rate=junction_rate, branch_names=[b.name for b in circuit.branches],
                 branch_currents=currents, slip_times=slip_times, slip_signs=slip_signs,
                 kcl_residual=residual, method=config.method.value, evaluations=evaluations)


def _kcl_residual(segment: _Segment, t: np.ndarray, theta: np.ndarray, v: np.ndarray, a: np.ndarray) -> float:
    cc = segment.cc
    phi = CONSTANTS.phi0_over_2pi
    accel = np.zeros_like(theta)
    accel[cc.cap] = a
    total = phi * (segment.g @ v + cc.k_matrix @ theta + cc.c_matrix @ accel)
    if cc.junctions:
        total += cc.a_j @ (cc.ic[:, None] * np.sin(cc.a_j.T @ theta))
    return float(np.max(np.abs(total - source_matrix(cc, t)))) if t.size else 0.0


def _branch_currents(cc: CompiledCircuit, t: np.ndarray, theta: np.ndarray,
                     v: np.ndarray, a: np.ndarray) -> np.ndarray:
    phi = CONSTANTS.phi0_over_2pi
    accel = np.zeros_like(theta)
    accel[cc.cap] = a
    inductor_currents = cc.l_inv @ (phi * cc.a_l.T @ theta) if cc.inductors else np.zeros((0, len(t)))
    columns = {}
    for k, b in enumerate(cc.inductors):
        columns[b.name] = inductor_currents[k]
    for k, b in enumerate(cc.resistors):
        columns[b.name] = phi * (cc.a_r[:, k] @ v) / b.resistance
    for k, b in enumerate(cc.junctions):
        dtheta = cc.a_j[:, k] @ theta
        jj = b.junction
        columns[b.name] = (jj.critical_current * np.sin(dtheta) + phi * (cc.a_j[:, k] @ v) / jj.shunt_resistance
                           + jj.capacitance * phi * (cc.a_j[:, k] @ accel))
    for k, b in enumerate(cc.hotspots):
        r = np.array([b.hotspot.resistance_at(x) for x in t])
        columns[b.name] = phi * (cc.a_h[:, k] @ v) / r
    return np.column_stack([columns[b.name] for b in cc.circuit.branches])

