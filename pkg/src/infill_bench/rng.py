"""Deterministic, splittable random streams.

Every parallel unit of work (a benchmark site, a candidate index) gets its own
generator derived from ``(seed, *path)``. Streams depend only on the path, not
on scheduling or worker count, so results are reproducible across thread
counts and identical when run serially.
"""

from __future__ import annotations

import numpy as np


def split_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by ``path`` under root ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))


def stream_seed(seed: int, *path: int) -> int:
    """Stable integer child seed for the stream addressed by ``path``.

    Use when the consumer wants a plain seed (e.g. to store in a record)
    rather than a generator.
    """
    return int(np.random.SeedSequence([seed, *path]).generate_state(1)[0])
