"""Seeded, splittable random streams.

Every random draw in the package goes through a ``numpy.random.Generator``
built here. Streams are addressed by ``(seed, *key)`` so that a Monte Carlo
trial or a GA run gets the same numbers whether it is executed serially or
in a worker process.
"""

from __future__ import annotations

import numpy as np

# spawn-key namespaces
CHANNEL = 0
GA = 1


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for the sub-stream ``key`` of ``seed``."""
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
