from __future__ import annotations

import numpy as np

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.common.rng import generator


def kmeanspp_indices(points: np.ndarray, n_seeds: int, seed: int | np.random.Generator) -> np.ndarray:
    """k-means++ seeding (no Lloyd refinement), cycling through the seeds when
    there are fewer points than requested."""
    rng = seed if isinstance(seed, np.random.Generator) else generator(seed)
    points = np.asarray(points, dtype=np.float64)
    if n_seeds <= 0:
        raise SpecValidationError("P", f"must be positive, got {n_seeds}")
    n = len(points)
    if n == 0:
        raise SpecValidationError("points", "must be nonempty")
    chosen = [int(rng.integers(n))]
    nearest = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(min(n_seeds, n) - 1):
        total = nearest.sum()
        if total > 0.0:
            pick = int(rng.choice(n, p=nearest / total))
        else:
            pick = int(rng.integers(n))
        chosen.append(pick)
        nearest = np.minimum(nearest, ((points - points[pick]) ** 2).sum(axis=1))
    seeds = np.asarray(chosen, dtype=np.int64)
    if n_seeds > len(seeds):
        seeds = seeds[np.arange(n_seeds) % len(seeds)]
    return seeds


def kmeanspp_seed(points: np.ndarray, n_seeds: int, seed: int | np.random.Generator) -> np.ndarray:
    return np.asarray(points, dtype=np.float64)[kmeanspp_indices(points, n_seeds, seed)]
