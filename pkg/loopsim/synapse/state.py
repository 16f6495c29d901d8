from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional

from ..config.models import SynapseParams
from ..devices.spd import SpdState


@dataclass(frozen=True)
class SynapseState:
    """SI-loop current, stored weight and detector state of one synapse.

    `t_update` is the time at which `i_si` was last brought up to date.
    """
    i_si: float = 0.0
    weight: int = 0
    spd: SpdState = field(default_factory=SpdState)
    t_last_pre: Optional[float] = None
    t_last_post: Optional[float] = None
    t_update: float = 0.0
    saturated: bool = False

    @classmethod
    def initial(cls, params: SynapseParams) -> "SynapseState":
        return cls(weight=params.initial_weight)

    def evolve(self, **changes) -> "SynapseState":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["spd"] = self.spd.to_dict()
        return data


@dataclass(frozen=True)
class SynapticFiringEvent:
    t: float
    n_fluxons: int
    delta_i_si: float
    energy: float
    weight: int
    bias: float = 0.0
    saturated: bool = False

    HEADER = ("t", "n_fluxons", "delta_i_si", "energy", "w")

    def row(self) -> List[float]:
        return [self.t, self.n_fluxons, self.delta_i_si, self.energy, self.weight]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class PlasticityEvent:
    t: float
    delta_w: int
    energy: float
    weight: int

    HEADER = ("t", "delta_w", "energy", "w")

    def row(self) -> List[float]:
        return [self.t, self.delta_w, self.energy, self.weight]
