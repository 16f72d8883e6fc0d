"""Keyed random streams.

Every random draw in sketchboot comes from a PCG64 generator whose
``SeedSequence`` is built from a user seed plus a tuple of integer keys
(stream purpose, replicate index, trial index, ...). Streams with different
keys are statistically independent, and a given key always reproduces the
same stream, whatever the order or the thread it is consumed in.
"""

import numpy as np

# Stream purposes. Values are part of the reproducibility contract.
GAUSSIAN_SKETCH = 1
ROW_SAMPLING = 2
BOOTSTRAP = 3
TRIAL_SKETCH = 4
TRIAL_BOOTSTRAP = 5
HAAR = 6
ELLIPTICAL = 7
ADAPTIVE = 8

_U64_MASK = (1 << 64) - 1


def _seed_sequence(seed, keys):
    seed = int(seed)
    if seed < 0 or seed > _U64_MASK:
        raise ValueError(f'seed must be an unsigned 64-bit integer, got {seed}')
    return np.random.SeedSequence(seed, spawn_key=tuple(int(key) for key in keys))


def stream(seed, *keys):
    """Return an independent ``numpy.random.Generator`` keyed by ``(seed, keys)``."""
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed, keys)))


def derive_seed(seed, *keys):
    """Derive a fresh unsigned 64-bit seed for a nested component."""
    state = _seed_sequence(seed, keys).generate_state(1, dtype=np.uint64)
    return int(state[0])
