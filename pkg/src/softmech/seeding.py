"""Deterministic fan-out from a master seed to per-task generators.

Sub-task number i of master seed s uses SeedSequence(s, spawn_key=(i,)); the
derivation is a pure function of (s, i), so trials can run in any order or in
parallel and reductions by max/mean stay reproducible.
"""

from __future__ import annotations

import numpy as np


def spawn_rng(master_seed: int, *counters: int) -> np.random.Generator:
    """Generator for sub-task ``counters`` of ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(counters)))
