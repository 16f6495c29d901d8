from dataclasses import dataclass
from typing import List, Optional


@dataclass(frozen=True)
class Violation:
    """One violated invariant, addressed by its dotted parameter path"""
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class LoopsimError(Exception):
    """Base class for all simulator errors"""


class ConfigError(LoopsimError):
    """Invalid configuration, detected before any simulation runs"""

    def __init__(self, message: str, violations: Optional[List[Violation]] = None,
                 source: Optional[str] = None, line: Optional[int] = None):
        self.violations = list(violations or [])
        self.source = source
        self.line = line
        location = ""
        if source:
            location = f"{source}:{line}: " if line else f"{source}: "
        details = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{location}{message}" + (f" ({details})" if details else ""))


class CircuitError(ConfigError):
    """Circuit description violates a construction invariant"""


class DomainError(LoopsimError, ValueError):
    """Argument outside the domain of an operation"""


class IntegrationError(LoopsimError):
    """Transient integration failed to converge"""

    def __init__(self, message: str, t_fail: Optional[float] = None, step: Optional[float] = None):
        self.t_fail = t_fail
        self.step = step
        diagnostic = []
        if t_fail is not None:
            diagnostic.append(f"t={t_fail:.6e} s")
        if step is not None:
            diagnostic.append(f"last step={step:.3e} s")
        suffix = f" [{', '.join(diagnostic)}]" if diagnostic else ""
        super().__init__(message + suffix)


class SimulationAbort(LoopsimError):
    """Event-driven run stopped early; the partial record is attached"""

    def __init__(self, message: str, record=None):
        self.record = record
        super().__init__(message)
