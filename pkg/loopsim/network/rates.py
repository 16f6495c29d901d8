import numpy as np

from ..errors import DomainError
from ..rng import stream

RATES_STREAM = 1


def one_over_f_rates(n: int, f_min: float, f_max: float, seed: int) -> np.ndarray:
    """n mean rates with density ∝ 1/f on [f_min, f_max] (inverse CDF)"""
    if n < 0:
        raise DomainError("rate count must be non-negative")
    if not 0 < f_min <= f_max:
        raise DomainError(f"invalid rate range [{f_min}, {f_max}]")
    if f_min == f_max:
        return np.full(n, float(f_min))
    u = stream(seed, RATES_STREAM).random(n)
    return f_min * (f_max / f_min) ** u


def log_uniform(n: int, low: float, high: float, seed: int, key: int) -> np.ndarray:
    """Log-uniform draws on [low, high]; the same law as one_over_f_rates on another stream"""
    if not 0 < low <= high:
        raise DomainError(f"invalid range [{low}, {high}]")
    u = stream(seed, key).random(n)
    return low * (high / low) ** u
