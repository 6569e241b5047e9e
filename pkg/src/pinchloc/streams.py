"""Keyed random-number streams.

Every stochastic draw in the library comes from a generator seeded by
the tuple (master_seed, trial_index, pa_index). Streams with distinct
keys are statistically independent, and a draw depends only on its key,
never on execution order. That makes every experiment reproducible
bit-for-bit regardless of trial scheduling or parallelism.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "standard_normal", "complex_normal"]


def stream(master_seed: int, trial_index: int, pa_index: int) -> np.random.Generator:
    """Return the generator for one (seed, trial, antenna) key."""
    return np.random.default_rng((master_seed, trial_index, pa_index))


def standard_normal(master_seed: int, trial_index: int, pa_index: int) -> float:
    """First N(0, 1) variate of the keyed stream."""
    return float(stream(master_seed, trial_index, pa_index).standard_normal())


def complex_normal(master_seed: int, trial_index: int, pa_index: int, variance: float) -> complex:
    """Zero-mean circularly symmetric complex Gaussian with E|n|^2 = variance."""
    g = stream(master_seed, trial_index, pa_index)
    scale = np.sqrt(variance / 2.0)
    re, im = g.standard_normal(2)
    return complex(scale * re, scale * im)
