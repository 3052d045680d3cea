"""Seeded generators built on Philox, a counter-based bit generator.

Every stream is keyed by ``(seed, stream)`` so batches and workers get
disjoint, reproducible sequences.
"""
import numpy as np

DEFAULT_SEED = 20160901


def make_rng(seed=DEFAULT_SEED, stream=0):
    """Return a ``numpy.random.Generator`` keyed by ``(seed, stream)``."""
    stream = list(stream) if isinstance(stream, (tuple, list)) else [stream]
    # SeedSequence ignores trailing zero words, so the stream length is part of
    # the key; otherwise stream 1 and stream (1, 0) would coincide
    entropy = [int(seed), len(stream), *map(int, stream)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
