"""Seeded randomness shared by the randomized checks.

A single 64-bit seed feeds numpy's SeedSequence; each trial gets its own
spawned child driving a Philox (counter-based) generator, so trial k is
reproducible on its own and independent of how many trials run.
"""
from __future__ import annotations

import numpy as np


def split_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent Philox streams, one per trial, from a single 64-bit seed."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.Philox(c)) for c in children]
