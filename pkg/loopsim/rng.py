"""Counter-based random streams.

Every stochastic quantity is drawn from its own Philox stream keyed by the
master seed and a tuple of integer identifiers (neuron, synapse, purpose...).
Streams never share state, so results do not depend on evaluation order or
on how work is split across workers.
"""

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for (seed, key)"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *key: int) -> int:
    """Derive a child integer seed, e.g. for sweep points"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))

