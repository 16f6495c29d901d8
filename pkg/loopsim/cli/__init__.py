from .presets import PRESETS, ExperimentPreset, RunContext, split_overrides
from .sweeps import point_seeds, run_sweep
from .validate import report, validate

__all__ = ["PRESETS", "ExperimentPreset", "RunContext", "split_overrides", "point_seeds", "run_sweep", "report",
           "validate"]
