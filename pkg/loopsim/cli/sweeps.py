import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Sequence

from ..rng import derive_seed

logger = logging.getLogger(__name__)


def point_seeds(seed: int, n: int) -> List[int]:
    """Per-point seeds derived from the master seed by counter"""
    return [derive_seed(seed, k) for k in range(n)]


def run_sweep(task: Callable[[Any, int], Any], points: Sequence[Any], seed: int, workers: int = 1) -> List[Any]:
    """Evaluate task(point, seed_k) for every point; results keep the order of `points`.

    `task` must be a module-level function so worker processes can import it.
    """
    seeds = point_seeds(seed, len(points))
    if workers <= 1 or len(points) <= 1:
        return [task(p, s) for p, s in zip(points, seeds)]
    logger.info("Sweeping %d points on %d processes", len(points), workers)
    with ProcessPoolExecutor(max_workers=min(workers, len(points))) as pool:
        return list(pool.map(task, points, seeds))
