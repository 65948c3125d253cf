"""Deterministic per-item random streams.

Stream ``i`` of a search with root seed ``s`` is a numpy PCG64 generator
seeded by ``SeedSequence(entropy=(s, i))``. SeedSequence hashing is
platform-stable, so results are reproducible across machines, and stream
assignment is by item index, never by thread schedule.
"""

from __future__ import annotations

import numpy as np


def item_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), int(index)))))
