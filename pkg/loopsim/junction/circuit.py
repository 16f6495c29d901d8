"""Loop circuit description and its compiled matrix form.

Node phases θ (flux in units of Φ0/2π) are the unknowns. Inductive branches,
including mutual couplings, contribute through the inverse branch-inductance
matrix; junctions, resistors and SPD hotspots contribute currents that depend
on phase differences and their rates. Ground is the node named "0".
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.models import JunctionParams
from ..errors import CircuitError, Violation

GROUND = "0"


class ElementKind(str, Enum):
    INDUCTOR = "inductor"
    RESISTOR = "resistor"
    JUNCTION = "junction"
    HOTSPOT = "hotspot"


class Hotspot(BaseModel):
    """Time-scheduled resistance of an SPD nanowire"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    resistance: float = Field(..., gt=0, description="r_hotspot (Ω)")
    duration: float = Field(..., gt=0, description="t_hotspot (s)")
    residual: float = Field(1e-9, gt=0, description="Resistance outside the hotspot (Ω)")
    detections: List[float] = Field(default_factory=list, description="Detection times (s)")

    def resistance_at(self, t: float) -> float:
        for t0 in self.detections:
            if t0 <= t < t0 + self.duration:
                return self.resistance
        return self.residual

    def breakpoints(self) -> List[float]:
        points = []
        for t0 in self.detections:
            points.extend([t0, t0 + self.duration])
        return points


class Branch(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    kind: ElementKind
    nodes: Tuple[str, str]
    inductance: Optional[float] = Field(None, gt=0)
    resistance: Optional[float] = Field(None, gt=0)
    junction: Optional[JunctionParams] = None
    hotspot: Optional[Hotspot] = None

    @model_validator(mode="after")
    def _value_matches_kind(self):
        required = {
            ElementKind.INDUCTOR: "inductance",
            ElementKind.RESISTOR: "resistance",
            ElementKind.JUNCTION: "junction",
            ElementKind.HOTSPOT: "hotspot",
        }[self.kind]
        if getattr(self, required) is None:
            raise ValueError(f"{self.kind.value} branch '{self.name}' needs '{required}'")
        if self.nodes[0] == self.nodes[1]:
            raise ValueError(f"branch '{self.name}' connects a node to itself")
        return self


class MutualCoupling(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    first: str
    second: str
    inductance: float = Field(..., ge=0, description="M (H)")
    sign: int = 1


class CurrentSource(BaseModel):
    """Current injected into `node` and drawn from `return_node`.

    Constant `value`, or piecewise-linear through `points` (held flat outside).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    node: str
    return_node: str = GROUND
    value: float = 0.0
    points: Optional[List[Tuple[float, float]]] = None

    def at(self, t: float) -> float:
        if not self.points:
            return self.value
        times, values = zip(*self.points)
        return float(np.interp(t, times, values))

    def breakpoints(self) -> List[float]:
        return [p[0] for p in self.points] if self.points else []

    @property
    def is_quiet(self) -> bool:
        if self.points:
            return all(v == 0 for _, v in self.points)
        return self.value == 0


class LoopCircuit(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "circuit"
    branches: List[Branch]
    mutual_couplings: List[MutualCoupling] = Field(default_factory=list)
    sources: List[CurrentSource] = Field(default_factory=list)
    initial_phases: Dict[str, float] = Field(default_factory=dict, description="Node phases at t = 0 (rad)")

    def branch(self, name: str) -> Branch:
        for b in self.branches:
            if b.name == name:
                return b
        raise KeyError(name)

    @property
    def junction_names(self) -> List[str]:
        return [b.name for b in self.branches if b.kind == ElementKind.JUNCTION]

    def breakpoints(self) -> List[float]:
        points = []
        for b in self.branches:
            if b.hotspot is not None:
                points.extend(b.hotspot.breakpoints())
        for s in self.sources:
            points.extend(s.breakpoints())
        return sorted(set(points))

    def violations(self) -> List[Violation]:
        found = []
        names = [b.name for b in self.branches]
        if len(set(names)) != len(names):
            found.append(Violation(f"{self.name}.branches", "branch names must be unique"))
        by_name = {b.name: b for b in self.branches}
        for k, m in enumerate(self.mutual_couplings):
            path = f"{self.name}.mutual_couplings[{k}]"
            first, second = by_name.get(m.first), by_name.get(m.second)
            if first is None or second is None or first.kind != ElementKind.INDUCTOR \
                    or second.kind != ElementKind.INDUCTOR:
                found.append(Violation(path, "mutual coupling must join two inductor branches"))
                continue
            if m.inductance > math.sqrt(first.inductance * second.inductance):
                found.append(Violation(path, f"|M| exceeds sqrt(L1·L2) for {m.first}/{m.second}"))
            if m.sign not in (1, -1):
                found.append(Violation(path, "sign must be +1 or -1"))
        if not self._connected():
            found.append(Violation(f"{self.name}.branches", "circuit graph is not connected to ground"))
        pairs = {}
        for b in self.branches:
            if b.kind == ElementKind.JUNCTION:
                key = frozenset(b.nodes)
                if key in pairs:
                    found.append(Violation(f"{self.name}.{b.name}",
                                           f"junction loop with {pairs[key]} has zero inductance"))
                pairs[key] = b.name
        nodes = {n for b in self.branches for n in b.nodes}
        for node in self.initial_phases:
            if node == GROUND or node not in nodes:
                found.append(Violation(f"{self.name}.initial_phases.{node}", "not a circuit node"))
        for s in self.sources:
            if s.node == s.return_node:
                found.append(Violation(f"{self.name}.{s.name}", "source shorted to itself"))
        return found

    def _connected(self) -> bool:
        parent: Dict[str, str] = {}

        def find(x: str) -> str:
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: str, b: str):
            parent[find(a)] = find(b)

        find(GROUND)
        for b in self.branches:
            union(*b.nodes)
        for s in self.sources:
            find(s.node)
            find(s.return_node)
        root = find(GROUND)
        return all(find(n) == root for n in list(parent))


class CompiledCircuit:
    """Matrix form of a LoopCircuit; immutable after construction"""

    def __init__(self, circuit: LoopCircuit):
        problems = circuit.violations()
        if problems:
            raise CircuitError(f"invalid circuit '{circuit.name}'", violations=problems)
        self.circuit = circuit

        nodes = []
        for b in circuit.branches:
            for n in b.nodes:
                if n != GROUND and n not in nodes:
                    nodes.append(n)
        for s in circuit.sources:
            for n in (s.node, s.return_node):
                if n != GROUND and n not in nodes:
                    nodes.append(n)
        self.node_names = nodes
        self.index = {n: i for i, n in enumerate(nodes)}
        size = len(nodes)

        def incidence(branches: List[Branch]) -> np.ndarray:
            a = np.zeros((size, len(branches)))
            for k, b in enumerate(branches):
                p, q = b.nodes
                if p != GROUND:
                    a[self.index[p], k] = 1.0
                if q != GROUND:
                    a[self.index[q], k] = -1.0
            return a

        def of_kind(kind: ElementKind) -> List[Branch]:
            return [b for b in circuit.branches if b.kind == kind]

        self.inductors = of_kind(ElementKind.INDUCTOR)
        self.resistors = of_kind(ElementKind.RESISTOR)
        self.junctions = of_kind(ElementKind.JUNCTION)
        self.hotspots = of_kind(ElementKind.HOTSPOT)

        self.a_l = incidence(self.inductors)
        self.a_r = incidence(self.resistors)
        self.a_j = incidence(self.junctions)
        self.a_h = incidence(self.hotspots)

        l_matrix = np.diag([b.inductance for b in self.inductors]) if self.inductors else np.zeros((0, 0))
        pos = {b.name: k for k, b in enumerate(self.inductors)}
        for m in circuit.mutual_couplings:
            i, j = pos[m.first], pos[m.second]
            l_matrix[i, j] = l_matrix[j, i] = m.sign * m.inductance
        if self.inductors and np.min(np.linalg.eigvalsh(l_matrix)) <= 0:
            raise CircuitError(f"inductance matrix of '{circuit.name}' is not positive definite")
        self.l_matrix = l_matrix
        self.l_inv = np.linalg.inv(l_matrix) if self.inductors else l_matrix
        self.k_matrix = self.a_l @ self.l_inv @ self.a_l.T if self.inductors else np.zeros((size, size))

        self.ic = np.array([b.junction.critical_current for b in self.junctions])
        g_j = np.array([1.0 / b.junction.shunt_resistance for b in self.junctions])
        c_j = np.array([b.junction.capacitance for b in self.junctions])
        g_r = np.array([1.0 / b.resistance for b in self.resistors])
        self.g_static = (self.a_r * g_r) @ self.a_r.T + (self.a_j * g_j) @ self.a_j.T
        self.c_matrix = (self.a_j * c_j) @ self.a_j.T

        self.cap = np.where(np.diag(self.c_matrix) > 0)[0]
        self.free = np.where(np.diag(self.c_matrix) <= 0)[0]
        if self.cap.size and abs(np.linalg.det(self.c_matrix[np.ix_(self.cap, self.cap)])) == 0:
            raise CircuitError(f"capacitance matrix of '{circuit.name}' is singular on capacitive nodes")
        self.c_cc_inv = np.linalg.inv(self.c_matrix[np.ix_(self.cap, self.cap)]) if self.cap.size else None

        # every non-capacitive node needs a dissipative path in every hotspot state
        for active in (False, True):
            g = self.g_static + self._hotspot_conductance([
                (h.hotspot.resistance if active else h.hotspot.residual) for h in self.hotspots])
            g_ff = g[np.ix_(self.free, self.free)]
            if self.free.size and np.linalg.matrix_rank(g_ff) < self.free.size:
                raise CircuitError(
                    f"circuit '{circuit.name}' has nodes with neither capacitance nor a resistive path")

        self.source_vectors = []
        for s in circuit.sources:
            v = np.zeros(size)
            if s.node != GROUND:
                v[self.index[s.node]] += 1.0
            if s.return_node != GROUND:
                v[self.index[s.return_node]] -= 1.0
            self.source_vectors.append(v)

    @property
    def size(self) -> int:
        return len(self.node_names)

    @property
    def state_size(self) -> int:
        return self.size + self.cap.size

    def _hotspot_conductance(self, resistances: List[float]) -> np.ndarray:
        if not self.hotspots:
            return np.zeros((self.size, self.size))
        g_h = 1.0 / np.asarray(resistances)
        return (self.a_h * g_h) @ self.a_h.T

    def conductance_at(self, t: float) -> np.ndarray:
        return self.g_static + self._hotspot_conductance(
            [h.hotspot.resistance_at(t) for h in self.hotspots])

    def source_current(self, t: float) -> np.ndarray:
        total = np.zeros(self.size)
        for s, v in zip(self.circuit.sources, self.source_vectors):
            total += s.at(t) * v
        return total

    def junction_index(self, name: str) -> int:
        for k, b in enumerate(self.junctions):
            if b.name == name:
                return k
        raise KeyError(name)
