"""Seed derivation for runs and replicates.

A run seed is split into four independent streams so that, for a fixed seed,
the inputs do not depend on which strategy or selection rule consumes the
other streams. Replicate seeds are derived from ``(base_seed, index)`` with
``numpy.random.SeedSequence`` spawn keys.
"""
from typing import NamedTuple

import numpy as np


class RunStreams(NamedTuple):
    inputs: np.random.Generator
    strategy: np.random.Generator
    device: np.random.Generator
    selection: np.random.Generator


def spawn_streams(seed: int) -> RunStreams:
    children = np.random.SeedSequence(seed).spawn(4)
    return RunStreams(*(np.random.default_rng(child) for child in children))


def derive_seed(base_seed: int, index: int) -> int:
    """Seed of replicate ``index``: first 64-bit word of ``SeedSequence(base_seed, spawn_key=(index,))``."""
    sequence = np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
